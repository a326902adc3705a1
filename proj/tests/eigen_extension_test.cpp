#include <gtest/gtest.h>

#include <cmath>

#include "dissipext/battery.hpp"
#include "dissipext/chi_example.hpp"
#include "dissipext/eigen_extension.hpp"

using namespace dissipext;

namespace {

const cplx I(0.0, 1.0);

}  // namespace

TEST(AdjointEigenfunction, FreeDecayMode) {
  const auto g = solve_adjoint_eigenfunction(Potential::zero(), -1.0);
  for (double x : {0.0, 0.4, 1.0, 3.0}) {
    const auto c = g.at(x);
    EXPECT_LT(std::abs(c.derivative / c.value + 1.0), 1e-13);
  }
  EXPECT_THROW(solve_adjoint_eigenfunction(Potential::zero(), 0.5), InvalidInput);
}

TEST(AdjointEigenfunction, ChiWellIsExponentialCombination) {
  const double xi = 1.0;
  const auto g = solve_adjoint_eigenfunction(chi::potential(), -xi * xi);
  const chi::Example e(xi);
  const cplx scale = g.at(0.0).value / e.eta(0.0);
  for (double x : {0.0, 0.3, 0.7, 1.0, 2.0}) EXPECT_LT(std::abs(g.at(x).value - scale * e.eta(x)), 1e-12);
  EXPECT_LT(differential_residual(g, 0.0, 1.0), 1e-9);
}

TEST(BoundaryFlux, FreeCaseExact) {
  const auto g = solve_adjoint_eigenfunction(Potential::zero(), -1.0);
  const auto gs = g.scaled(1.0 / g.at(0.0).value);
  auto gt = gs;
  gt.set_tail(gs.tail_origin(), *gs.tail_rate());
  const auto r = check_boundary_flux(gt, -1.0);
  EXPECT_LT(std::abs(r.lhs + 1.0), 1e-12);
  EXPECT_LT(std::abs(r.rhs + 1.0), 1e-12);
}

TEST(BoundaryFlux, ChiWell) {
  const auto g = solve_adjoint_eigenfunction(chi::potential(), -1.0);
  const auto r = check_boundary_flux(g, -1.0);
  EXPECT_TRUE(r.agrees) << r.residual;
  EXPECT_TRUE(r.imaginary_nonzero);
}

TEST(ConstructEigenExtension, MatchesChiClosedForms) {
  for (double xi : {0.5, 1.0, 2.0}) {
    const chi::Example e(xi);
    const auto r = construct_eigen_extension(chi::potential(), -xi * xi);
    EXPECT_TRUE(r.passed());
    EXPECT_EQ(r.eta.origin_value(), -2.0 * I);
    EXPECT_LT(std::abs(r.h - e.h()), 1e-8 * (1 + std::abs(e.h())));
    double sup = 0.0;
    for (double x : uniform_grid(0.0, 1.0 + 5.0 / xi, 2001)) sup = std::max(sup, std::abs(r.eta(x) - e.eta(x)));
    EXPECT_LT(sup, 1e-8);
    EXPECT_LT(norm(r.k - e.k_function()), 1e-8);
    EXPECT_LT(std::abs(r.slack), 1e-9);
    EXPECT_LT(r.symmetric_identity, 1e-12);
  }
}

TEST(ConstructEigenExtension, MixedStepPotential) {
  const auto v = Potential::step({0.0, 2.0}, {cplx(1.0, 1.0)});
  const auto r = construct_eigen_extension(v, -0.7);
  EXPECT_TRUE(r.absorption_ok) << r.absorption_residual;
  EXPECT_TRUE(r.slack_ok) << r.slack;
  EXPECT_TRUE(r.eigen_ok) << r.eigen_residual;
  EXPECT_TRUE(r.kv.passed());
  EXPECT_LT(std::abs(r.kv.z - (-0.7)), 1e-8 * 1.7);
}

TEST(ConstructEigenExtension, RandomBattery) {
  battery::Rng rng(42);
  for (int i = 0; i < 20; ++i) {
    const auto v = battery::random_step_potential(rng);
    const double lambda = -battery::uniform(rng, 0.1, 4.0);
    const auto r = construct_eigen_extension(v, lambda);
    EXPECT_TRUE(r.passed()) << i;
    EXPECT_LE(std::abs(r.slack), 1e-9 * (1 + std::abs(r.h)));
    EXPECT_TRUE(r.flux.agrees) << r.flux.residual;
  }
}

TEST(ConstructEigenExtension, SampledPotential) {
  std::vector<double> grid;
  std::vector<cplx> vals;
  for (int i = 0; i <= 16; ++i) {
    const double x = i / 8.0;
    grid.push_back(x);
    vals.emplace_back(std::cos(x), std::sin(M_PI * x / 2.0));
  }
  const auto v = Potential::sampled(grid, vals);
  const auto r = construct_eigen_extension(v, -1.3);
  EXPECT_TRUE(r.passed()) << r.absorption_residual << " " << r.slack << " " << r.eigen_residual;
}

TEST(ConstructEigenExtension, RejectsRealPotential) {
  EXPECT_THROW(construct_eigen_extension(Potential::step({0.0, 1.0}, {cplx(1.0)}), -1.0), Unsupported);
}

TEST(Reconstruct, FindsChiEigenvalue) {
  const chi::Example e(1.0);
  const ExtensionParams p(chi::potential(), BoundaryParameter::finite(e.h()), e.k_function());
  const auto r = reconstruct(chi::potential(), p);
  ASSERT_TRUE(r.has_value());
  EXPECT_NEAR(r->lambda, -1.0, 1e-9);
}
