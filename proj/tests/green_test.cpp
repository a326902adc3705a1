#include <gtest/gtest.h>

#include <cmath>

#include "dissipext/battery.hpp"
#include "dissipext/green.hpp"

using namespace dissipext;

namespace {

const cplx I(0.0, 1.0);

Potential real_steps() {
  return Potential::step({0.0, 0.6, 1.4, 2.5}, {cplx(1.0, 0.5), cplx(-1.5, 0.0), cplx(0.7, 2.0)});
}

/// one-sided fourth-order derivative from u at x, x -/+ h, ... (dir = -1 looks left)
cplx one_sided(const std::vector<CauchyData>& u, double h, double dir) {
  return -dir * (25.0 * u[0].value - 48.0 * u[1].value + 36.0 * u[2].value - 16.0 * u[3].value + 3.0 * u[4].value) /
         (12.0 * h);
}

}  // namespace

TEST(IntervalGreen, FreeCosinePair) {
  const auto pair = interval_green_pair(Potential::zero(), BoundaryParameter::finite(0.0), M_PI, -1.0);
  EXPECT_LT(std::abs(pair.wronskian + std::cosh(M_PI)), 1e-12 * std::cosh(M_PI));
  for (double x : {0.0, 0.5, 2.0, M_PI}) {
    EXPECT_LT(std::abs(pair.left.at(x).value - std::cosh(x)), 1e-12 * std::cosh(x));
    EXPECT_LT(std::abs(pair.right.at(x).value - std::sinh(M_PI - x)), 1e-12 * std::cosh(M_PI));
  }
}

TEST(IntervalGreen, SeededConditionsAreExact) {
  const cplx h(0.4, 0.0);
  const auto pair = interval_green_pair(real_steps(), BoundaryParameter::finite(h), 1.9, cplx(0.3, -1.0));
  const auto l0 = pair.left.at(0.0);
  EXPECT_EQ(l0.derivative - h * l0.value, cplx{});
  EXPECT_EQ(pair.right.at(1.9).value, cplx{});
  const auto d = interval_green_pair(real_steps(), BoundaryParameter::dirichlet(), 1.9, cplx(0.3, -1.0));
  EXPECT_EQ(d.left.at(0.0).value, cplx{});
}

TEST(IntervalGreen, WronskianIsConstant) {
  const auto pair = interval_green_pair(real_steps(), BoundaryParameter::finite(-0.8), 2.2, cplx(-0.5, -0.7));
  for (int i = 0; i <= 22; ++i) {
    const double x = 0.1 * i;
    EXPECT_LT(std::abs(wronskian(pair.left, pair.right, x) - pair.wronskian), 1e-10 * std::abs(pair.wronskian));
  }
}

TEST(IntervalGreen, RejectsNonPositiveX0) {
  EXPECT_THROW(interval_green_pair(real_steps(), BoundaryParameter::finite(0.0), 0.0, -I), InvalidInput);
}

TEST(IntervalGreen, ZeroRightHandSide) {
  const auto pair = interval_green_pair(real_steps(), BoundaryParameter::finite(0.2), 2.0, -I);
  const LatticeFunction zero({0.0, 2.0}, [](double) { return cplx{}; });
  const std::vector<double> xs{0.0, 0.7, 1.3, 2.0};
  for (const auto& c : apply_green(pair, zero, xs)) EXPECT_EQ(c.value, cplx{});
}

TEST(IntervalGreen, SolvesBoundaryValueProblem) {
  battery::Rng rng(42);
  for (int trial = 0; trial < 10; ++trial) {
    const cplx h(battery::uniform(rng, -1, 1), 0.0);
    const double x0 = battery::uniform(rng, 0.8, 2.4);
    const cplx lambda(battery::uniform(rng, -2, 2), -battery::uniform(rng, 0.3, 2.0));
    const auto pair = interval_green_pair(real_steps(), BoundaryParameter::finite(h), x0, lambda);
    const auto g = battery::random_rhs(rng, 0.0, x0);
    EXPECT_LT(green_residual(pair, g, 0.0, x0), 1e-6);
    const std::vector<double> ends{0.0, x0};
    const auto u = apply_green(pair, g, ends);
    EXPECT_LT(std::abs(u[0].derivative - h * u[0].value), 1e-8);
    EXPECT_LT(std::abs(u[1].value), 1e-8);
  }
}

TEST(IntervalGreen, FluxFormulaMatchesDifferentiation) {
  battery::Rng rng(7);
  for (int trial = 0; trial < 5; ++trial) {
    const double x0 = 1.2 + 0.2 * trial;
    const auto pair = interval_green_pair(real_steps(), BoundaryParameter::finite(0.5), x0, cplx(0.1, -1.0));
    const auto g = battery::random_rhs(rng, 0.0, x0);
    const double h = 1e-3;
    std::vector<double> xs;
    for (int i = 0; i < 5; ++i) xs.push_back(x0 - i * h);
    const auto u = apply_green(pair, g, xs);
    const cplx flux = green_flux(pair, g);
    EXPECT_LT(std::abs(flux - one_sided(u, h, -1.0)), 1e-8 * std::max(1.0, std::abs(flux)));
    EXPECT_LT(std::abs(flux - u[0].derivative), 1e-12 * std::max(1.0, std::abs(flux)));
  }
}

TEST(HalfLineGreen, FreeClosedForm) {
  const cplx lambda = I;
  const auto pair = halfline_green_pair(Potential::zero(), 0.0, lambda);
  const cplx kappa = upper_sqrt(lambda);
  EXPECT_LT(std::abs(pair.wronskian + 1.0), 1e-13);
  for (double x : {0.0, 0.4, 1.5, 4.0}) {
    EXPECT_LT(std::abs(pair.left.at(x).value - std::sin(kappa * x) / kappa), 1e-12 * std::abs(std::exp(-I * kappa * x)));
    EXPECT_LT(std::abs(pair.right.at(x).value - std::exp(I * kappa * x)), 1e-12);
  }
}

TEST(HalfLineGreen, SolvesProblemAndVanishesAtX0) {
  battery::Rng rng(43);
  for (int trial = 0; trial < 10; ++trial) {
    const double x0 = trial % 2 == 0 ? 0.0 : battery::uniform(rng, 0.3, 3.0);
    const cplx lambda(battery::uniform(rng, -2, 2), -battery::uniform(rng, 0.3, 2.0));
    const auto pair = halfline_green_pair(real_steps(), x0, lambda);
    const auto g = battery::random_rhs(rng, x0, x0 + battery::uniform(rng, 1.0, 3.0));
    EXPECT_LT(green_residual(pair, g, x0, g.end() + 2.0), 1e-6);
    const std::vector<double> at{x0};
    EXPECT_LT(std::abs(apply_green(pair, g, at)[0].value), 1e-8);
  }
}

TEST(HalfLineGreen, FluxFormulaMatchesDifferentiation) {
  battery::Rng rng(9);
  const double x0 = 0.9;
  const auto pair = halfline_green_pair(real_steps(), x0, cplx(-0.4, -1.2));
  const auto g = battery::random_rhs(rng, x0, 3.0);
  const double h = 1e-3;
  std::vector<double> xs;
  for (int i = 0; i < 5; ++i) xs.push_back(x0 + i * h);
  const auto u = apply_green(pair, g, xs);
  const cplx flux = green_flux(pair, g);
  EXPECT_LT(std::abs(flux - one_sided(u, h, 1.0)), 1e-8 * std::max(1.0, std::abs(flux)));
}

TEST(HalfLineGreen, DecaysBeyondSupport) {
  battery::Rng rng(10);
  const auto pair = halfline_green_pair(real_steps(), 0.5, cplx(0.0, -1.0));
  const auto g = battery::random_rhs(rng, 0.5, 2.0);
  const std::vector<double> xs{5.0, 10.0, 20.0};
  const auto u = apply_green(pair, g, xs);
  EXPECT_LT(std::abs(u[2].value), std::abs(u[0].value));
}
