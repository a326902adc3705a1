#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "dissipext/defect.hpp"
#include "dissipext/errors.hpp"
#include "dissipext/extensions.hpp"
#include "dissipext/functions.hpp"
#include "dissipext/ode.hpp"
#include "dissipext/potential.hpp"
#include "dissipext/quadrature.hpp"
#include "dissipext/tolerances.hpp"

namespace dissipext {

enum class GreenKind { Interval, HalfLine };

/// Fundamental pair of -u'' + V_R u = lambda u for the resolvent kernel.
/// Interval (0, x0): left satisfies the condition at 0, right vanishes at
/// x0 with right'(x0) = -1 (so right = sinh(x0 - x) in the free case). Half-line (x0, inf): left vanishes at x0, right is the L2 solution.
/// wronskian = left right' - left' right.
struct GreenPair {
  GreenKind kind;
  cplx lambda;
  double x0;
  SolutionTrace left;
  SolutionTrace right;
  cplx wronskian;

  /// (A - lambda) u = g is solved by the kernel with denominator -W.
  cplx denominator() const { return -wronskian; }
  double lower() const { return kind == GreenKind::Interval ? 0.0 : x0; }
};

namespace detail {

inline void check_wronskian(const GreenPair& p, double at, const Tolerances& tol) {
  const CauchyData a = p.left.at(at), b = p.right.at(at);
  const double scale = (std::abs(a.value) + std::abs(a.derivative)) * (std::abs(b.value) + std::abs(b.derivative));
  if (!(std::abs(p.wronskian) > tol.wronskian_guard * scale)) {
    throw NumericalBreakdown("Wronskian vanishes: lambda is numerically an eigenvalue");
  }
}

}  // namespace detail

inline GreenPair interval_green_pair(const Potential& v, const BoundaryParameter& h, double x0, cplx lambda,
                                     const Tolerances& tol = {}) {
  if (!(x0 > 0.0)) throw InvalidInput("interval Green's function needs x0 > 0; use the half-line kernel");
  const CauchyData seed = h.is_dirichlet() ? CauchyData{0.0, 0.0, 1.0} : CauchyData{0.0, 1.0, h.value()};
  auto left = solve_ivp(v, Coefficient::RealPartOnly, lambda, seed, x0);
  auto right = solve_ivp(v, Coefficient::RealPartOnly, lambda, {x0, 0.0, -1.0}, 0.0);
  const cplx w = wronskian(left, right, 0.0);
  GreenPair p{GreenKind::Interval, lambda, x0, std::move(left), std::move(right), w};
  detail::check_wronskian(p, 0.0, tol);
  return p;
}

/// right = exp(i kappa x) beyond max(L, x0). `reach` bounds the support of right-hand sides the pair can be applied to.
inline GreenPair halfline_green_pair(const Potential& v, double x0, cplx lambda, double reach = 0.0,
                                     const Tolerances& tol = {}) {
  if (lambda.imag() == 0.0 && lambda.real() >= 0.0) throw InvalidInput("half-line kernel needs lambda outside [0, inf)");
  if (x0 < 0.0) throw InvalidInput("x0 must be nonnegative");
  const double start = std::max(v.support_end(), x0);
  const double end = std::max({reach, start + 10.0, x0});
  const cplx ik = cplx(0.0, 1.0) * upper_sqrt(lambda);
  auto left = solve_ivp(v, Coefficient::RealPartOnly, lambda, {x0, 0.0, 1.0}, end);
  const cplx e = std::exp(ik * start);
  auto right = solve_ivp(v, Coefficient::RealPartOnly, lambda, {start, e, ik * e}, x0);
  right.set_tail(start, ik);
  const cplx w = wronskian(left, right, x0);
  GreenPair p{GreenKind::HalfLine, lambda, x0, std::move(left), std::move(right), w};
  detail::check_wronskian(p, x0, tol);
  return p;
}

/// u(x) = [right(x) int_lo^x left g + left(x) int_x^hi right g] / D and u'
/// from the same integrals, at the requested points (sorted or not).
inline std::vector<CauchyData> apply_green(const GreenPair& p, const LatticeFunction& g, std::span<const double> xs) {
  if (!g.tail().empty()) throw InvalidInput("right-hand side must have compact support");
  const double lo = p.lower();
  const double hi = p.kind == GreenKind::Interval ? p.x0 : std::max(lo, g.end());
  if (p.kind == GreenKind::HalfLine && hi > p.left.upper()) {
    throw PreconditionError("right-hand side extends beyond the reach of the half-line pair");
  }
  const auto& vb = p.left.potential().breakpoints();
  const auto lat = merge_lattices({vb, g.lattice(), std::vector<double>{lo, hi}});
  auto lg = [&](double y) { return p.left.at(y).value * g(y); };
  auto rg = [&](double y) { return p.right.at(y).value * g(y); };
  std::vector<double> targets;
  for (double x : xs) targets.push_back(std::clamp(x, lo, hi));
  std::vector<std::size_t> order(targets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return targets[a] < targets[b]; });
  std::vector<double> sorted;
  for (std::size_t i : order) sorted.push_back(targets[i]);
  const auto cl = cumulative_integral(lg, lat, lo, sorted);
  const auto cr = cumulative_integral(rg, lat, lo, sorted);
  const cplx total_r = hi > lo ? integrate(rg, lat, lo, hi) : cplx{};
  const cplx d = p.denominator();
  std::vector<CauchyData> out(xs.size());
  for (std::size_t s = 0; s < order.size(); ++s) {
    const std::size_t i = order[s];
    const double x = xs[i];
    if (x < lo || (p.kind == GreenKind::Interval && x > hi)) {
      throw PreconditionError("evaluation point outside the kernel's interval");
    }
    const CauchyData l = p.left.at(x), r = p.right.at(x);
    const cplx a = cl[s], b = total_r - cr[s];
    out[i] = {x, (r.value * a + l.value * b) / d, (r.derivative * a + l.derivative * b) / d};
  }
  return out;
}

/// The boundary flux u'(x0) from the kernel: right'(x0) int left g / D on
/// the interval, left'(x0) int right g / D on the half-line.
inline cplx green_flux(const GreenPair& p, const LatticeFunction& g) {
  const double lo = p.lower();
  const double hi = p.kind == GreenKind::Interval ? p.x0 : std::max(lo, g.end());
  const auto lat = merge_lattices({p.left.potential().breakpoints(), g.lattice(), std::vector<double>{lo, hi}});
  if (p.kind == GreenKind::Interval) {
    const cplx il = integrate([&](double y) { return p.left.at(y).value * g(y); }, lat, lo, hi);
    return p.right.at(p.x0).derivative * il / p.denominator();
  }
  const cplx ir = integrate([&](double y) { return p.right.at(y).value * g(y); }, lat, lo, hi);
  return p.left.at(p.x0).derivative * ir / p.denominator();
}

/// Relative residual of -u'' + (V_R - lambda) u - g, u'' by differencing the
/// kernel's u' inside the lattice pieces of [a, b].
inline double green_residual(const GreenPair& p, const LatticeFunction& g, double a, double b,
                             std::size_t per_piece = 12) {
  const double h = 1e-3;
  const Potential& v = p.left.potential();
  const auto lat = merge_lattices({v.breakpoints(), g.lattice(), std::vector<double>{a, b}});
  const auto xs = interior_samples(lat, a, b, per_piece, h);
  std::vector<double> pts;
  for (double x : xs) {
    for (int s = -2; s <= 2; ++s) pts.push_back(x + s * h);
  }
  const auto u = apply_green(p, g, pts);
  double worst = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const auto* c = &u[5 * i];
    const cplx d2 = (c[0].derivative - 8.0 * c[1].derivative + 8.0 * c[3].derivative - c[4].derivative) / (12.0 * h);
    const cplx q = v.coefficient(xs[i], Coefficient::RealPartOnly) - p.lambda;
    worst = std::max(worst, std::abs(-d2 + q * c[2].value - g(xs[i])));
    scale = std::max(scale, std::abs(g(xs[i])));
  }
  return scale > 0.0 ? worst / scale : worst;
}

}  // namespace dissipext
