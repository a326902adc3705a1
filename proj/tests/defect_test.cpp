#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "dissipext/defect.hpp"

using namespace dissipext;

namespace {

const cplx I(0.0, 1.0);

const std::vector<cplx> kLambdaLattice{I, -I, 2.0 * I, -2.0 * I, cplx(1, 1), cplx(1, -1), cplx(-1, 0.5), cplx(-1, -0.5)};

Potential mixed() {
  return Potential::step({0.0, 0.5, 1.2, 2.0}, {cplx(1.0, 0.3), cplx(-2.0, 0.0), cplx(0.5, 1.0)});
}

}  // namespace

TEST(WeylSolution, FreeEquationIsPureExponential) {
  const auto d = weyl_solution(Potential::zero(), -I);
  const cplx kappa = std::exp(I * M_PI / 4.0);
  EXPECT_LT(std::abs(d.kappa - kappa), 1e-15);
  EXPECT_EQ(d.value(0.0), cplx(1.0));
  for (double x : {0.3, 1.0, 2.7, 8.0}) {
    EXPECT_LT(std::abs(d.value(x) - std::exp(I * kappa * x)), 1e-13);
  }
  EXPECT_LT(std::abs(d.tail_coefficient - 1.0), 1e-13);
  // ||e^{i kappa x}||^2 = 1 / (2 Im kappa)
  EXPECT_NEAR(d.norm(), std::sqrt(1.0 / (2.0 * kappa.imag())), 1e-12);
}

TEST(WeylSolution, OnlyRealPartEnters) {
  const auto chi = Potential::step({0.0, 1.0}, {I});
  for (cplx lambda : {-I, cplx(0.4, -1.3), cplx(-2.0, -0.1)}) {
    const auto a = weyl_solution(chi, lambda);
    const cplx kappa = upper_sqrt(std::conj(lambda));
    for (double x : {0.0, 0.5, 1.0, 3.0}) EXPECT_LT(std::abs(a.value(x) - std::exp(I * kappa * x)), 1e-12);
  }
}

TEST(WeylSolution, StepRealPartResidual) {
  const auto v = Potential::step({0.0, 1.0}, {cplx(1.0, 0.0)});
  const auto d = weyl_solution(v, cplx(1.0, 1.0));
  EXPECT_EQ(d.value(0.0), cplx(1.0));
  EXPECT_LT(differential_residual(d.trace, 0.0, 1.0), 1e-9);
  EXPECT_GT(d.kappa.imag(), 0.0);
}

TEST(WeylSolution, ResidualOnLambdaLattice) {
  const auto v = mixed();
  for (cplx lambda : kLambdaLattice) {
    const auto d = weyl_solution(v, lambda);
    EXPECT_EQ(d.value(0.0), cplx(1.0));
    EXPECT_LT(differential_residual(d.trace, 0.0, v.support_end()), 1e-9) << lambda;
    EXPECT_TRUE(std::isfinite(d.norm()));
  }
}

TEST(WeylSolution, RejectsRealLambda) { EXPECT_THROW(weyl_solution(mixed(), 2.0), InvalidInput); }

TEST(ResolventIdentity, IdenticalInputs) {
  const auto d = weyl_solution(mixed(), cplx(0.5, -1.0));
  const auto r = verify_resolvent_identity(d, d);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.distance, 0.0);
}

TEST(ResolventIdentity, FreeExponentialsClosedForm) {
  const auto a = weyl_solution(Potential::zero(), -I);
  const auto b = weyl_solution(Potential::zero(), -2.0 * I);
  const auto r = verify_resolvent_identity(a, b);
  EXPECT_TRUE(r.origin_ok);
  EXPECT_TRUE(r.equation_ok) << r.equation_residual;
  EXPECT_TRUE(r.bound_ok);
  const cplx k1 = a.kappa, k2 = b.kappa;
  const double d2 = 1.0 / (2 * k1.imag()) + 1.0 / (2 * k2.imag()) - 2.0 * (I / (k2 - std::conj(k1))).real();
  EXPECT_NEAR(r.distance, std::sqrt(d2), 1e-12);
}

TEST(ResolventIdentity, SixteenPairs) {
  const auto v = mixed();
  std::vector<DefectSolution> ds;
  for (cplx l : kLambdaLattice) ds.push_back(weyl_solution(v, l));
  int pairs = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (std::size_t j : {(i + 1) % ds.size(), (i + 3) % ds.size()}) {
      const auto r = verify_resolvent_identity(ds[i], ds[j]);
      EXPECT_TRUE(r.passed()) << ds[i].lambda << " " << ds[j].lambda << " res " << r.equation_residual << " d "
                              << r.distance << " b " << r.bound;
      ++pairs;
    }
  }
  EXPECT_EQ(pairs, 16);
}

TEST(ResolventIdentity, DistanceShrinksAsMuApproachesLambda) {
  const auto v = mixed();
  const auto a = weyl_solution(v, -I);
  double prev = kInfinity;
  for (double eps : {0.5, 0.25, 0.1, 0.03, 0.01, 0.001}) {
    const auto b = weyl_solution(v, cplx(eps, -1.0 - eps));
    const auto r = verify_resolvent_identity(a, b);
    EXPECT_TRUE(r.passed());
    EXPECT_LT(r.distance, prev);
    prev = r.distance;
  }
  EXPECT_LT(prev, 1e-2);
}
