#include <gtest/gtest.h>

#include <cmath>

#include "dissipext/chi_example.hpp"
#include "dissipext/quadrature.hpp"

using namespace dissipext;

namespace {

const cplx I(0.0, 1.0);

struct Frozen {
  double xi;
  cplx sigma_plus, sigma_minus, h, eta2;
};

// 30-digit reference values computed with mpmath
const Frozen kFrozen[] = {
    {0.5, {1.53402345482680072399326966603, -2.82119278786526862753686395212},
     {-0.273574011084412333895816206629, 0.148755856543958301493961224295},
     {-0.620075935245253844894667503095, 0.59999323914141718647734850111},
     {0.250334007752245163043341072001, -0.662762335268155356348554835251}},
    {1.0, {5.05551816220104881160684475437, -3.99398731978060540920320820213},
     {-0.0962170130374948301868771190346, 0.121789784988729067161696252723},
     {-1.05314549855293840772136278189, 0.422525106428462065757654438402},
     {0.0736921967788449211509940163717, -0.254949544137344911030450796532}},
    {2.0, {28.7482165789802558048513149733, -9.20275085939351234560040577655},
     {-0.0101001426799158690179116797492, 0.0315515538426690695743253062484},
     {-2.01320171854777566272373664171, 0.244185193343001740554134386838},
     {0.00680910449589167064699263957563, -0.0357497766780052684484133198281}},
};

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(ChiExample, MatchesFrozenValues) {
  for (const auto& f : kFrozen) {
    const chi::Example e(f.xi);
    EXPECT_LT(rel(e.sigma_plus(), f.sigma_plus), 1e-14) << f.xi;
    EXPECT_LT(rel(e.sigma_minus(), f.sigma_minus), 1e-13) << f.xi;
    EXPECT_LT(rel(e.h(), f.h), 1e-13) << f.xi;
    EXPECT_LT(rel(e.eta(2.0), f.eta2), 1e-13) << f.xi;
  }
}

TEST(ChiExample, SigmaProductIsI) {
  for (double xi : {0.1, 0.5, 1.0, 2.0, 7.0}) {
    const auto [sp, sm] = chi::sigma_pm(xi);
    EXPECT_LT(std::abs(sp * sm - I), 1e-14 * std::max(1.0, std::abs(sp) * std::abs(sm)));
  }
}

TEST(ChiExample, SigmaTwoEvaluationOrders) {
  const double xi = 1.0;
  const cplx w = std::sqrt(cplx(1.0, -1.0));
  const auto [sp, sm] = chi::sigma_pm(xi);
  EXPECT_LT(std::abs(sp - (std::exp(w) * xi + w * std::exp(w))), 1e-14);
  EXPECT_LT(std::abs(sm - (std::exp(-w) * xi - std::exp(-w) * w)), 1e-15);
}

TEST(ChiExample, BranchSwapExchangesSigmas) {
  for (double xi : {0.5, 1.0, 2.0}) {
    const auto [sp, sm] = chi::sigma_pm(xi);
    const auto [np, nm] = chi::sigma_pm(xi, chi::Branch::Negated);
    EXPECT_LT(std::abs(np - sm), 1e-14 * std::abs(sm) + 1e-16);
    EXPECT_LT(std::abs(nm - sp), 1e-14 * std::abs(sp));
  }
}

TEST(ChiExample, BranchInvariance) {
  for (double xi : {0.5, 1.0, 2.0}) {
    const chi::Example a(xi), b(xi, chi::Branch::Negated);
    EXPECT_LT(std::abs(a.h() - b.h()), 1e-13);
    for (int i = 0; i <= 40; ++i) {
      const double x = 0.1 * i;
      EXPECT_LT(std::abs(a.eta(x) - b.eta(x)), 1e-13) << x;
      EXPECT_LT(std::abs(a.k(x) - b.k(x)), 1e-13) << x;
    }
  }
}

TEST(ChiExample, OriginValueAndContinuity) {
  for (double xi : {0.5, 1.0, 2.0, 4.0}) {
    const chi::Example e(xi);
    EXPECT_LT(std::abs(e.eta(0.0) + 2.0 * I), 1e-14);
    const Jet in = e.inner_branch(1.0), out = e.outer_branch(1.0);
    EXPECT_LT(std::abs(in.value - out.value), 1e-13);
    EXPECT_LT(std::abs(in.first - out.first), 1e-12);
  }
}

TEST(ChiExample, SolvesEigenEquation) {
  const auto v = chi::potential();
  for (double xi : {0.5, 1.0, 2.0}) {
    const chi::Example e(xi);
    for (int i = 0; i <= 30; ++i) {
      const double x = 0.1 * i + 0.013;
      const Jet j = e.eta_jet(x);
      // -eta'' - i chi eta = -xi^2 eta, conjugate coefficient
      const cplx res = -j.second + std::conj(v(x)) * j.value + xi * xi * j.value;
      EXPECT_LT(std::abs(res), 1e-10 * std::max(1.0, std::abs(j.value)));
    }
  }
}

TEST(ChiExample, HIsHalfIDerivative) {
  for (double xi : {0.5, 1.0, 2.0}) {
    const chi::Example e(xi);
    EXPECT_LT(std::abs(e.h() - 0.5 * I * e.eta_jet(0.0).first), 1e-12);
  }
}

TEST(ChiExample, Criticality) {
  const std::vector<double> lat{0.0, 1.0};
  for (double xi : {0.5, 1.0, 2.0}) {
    const auto [h, k] = chi::closed_form_hk(xi);
    const double mass = integrate([&](double x) { return std::norm(k(x)); }, lat, 0.0, 1.0);
    EXPECT_LT(std::abs(h.imag() - 0.25 * mass), 1e-10);
  }
}

TEST(ChiExample, KIsViTimesEta) {
  const auto v = chi::potential();
  const chi::Example e(1.0);
  for (double x : {0.0, 0.2, 0.99, 1.0, 1.5}) {
    if (x == 0.0) continue;
    EXPECT_EQ(e.k(x), v.imag_part(x) * e.eta(x));
  }
}
