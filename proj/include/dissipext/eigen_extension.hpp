#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "dissipext/errors.hpp"
#include "dissipext/extensions.hpp"
#include "dissipext/functions.hpp"
#include "dissipext/ode.hpp"
#include "dissipext/potential.hpp"
#include "dissipext/tolerances.hpp"

namespace dissipext {

/// L2 solution of -g'' + V_R g - i V_I g = lambda g (lambda < 0), seeded with
/// the tail exp(-xi x) at L and integrated back to 0.
inline SolutionTrace solve_adjoint_eigenfunction(const Potential& v, double lambda, std::span<const double> grid = {}) {
  if (!(lambda < 0.0)) throw InvalidInput("eigenvalue must be negative (outside [0, inf))");
  const double xi = std::sqrt(-lambda);
  const double L = v.support_end();
  auto g = solve_ivp(v, Coefficient::ConjugateV, lambda, {L, 1.0, -xi}, 0.0, grid);
  g.set_tail(L, -xi);
  return g;
}

struct FluxReport {
  cplx lhs{}, rhs{};
  double residual = 0.0;     // |lhs - rhs| / (|lhs| + |rhs|)
  bool agrees = false;
  bool imaginary_nonzero = false;
};

/// conj(g(0)) g'(0) against int (-V_R + i V_I + lambda)|g|^2 - int |g'|^2.
inline FluxReport check_boundary_flux(const SolutionTrace& g, double lambda, const Tolerances& tol = {}) {
  const Potential& v = g.potential();
  const DomainFunction f = g.as_domain_function();
  const LatticeFunction gv = f.values(), gd = f.derivatives();
  const auto lat = clip_lattice(v.breakpoints(), 0.0, v.support_end());
  const cplx inside = integrate(
      [&](double x) {
        const cplx q = v(x);
        return cplx(-q.real(), q.imag()) * std::norm(gv(x));
      },
      lat, 0.0, v.support_end());
  FluxReport r;
  const CauchyData o = g.at(0.0);
  r.lhs = std::conj(o.value) * o.derivative;
  r.rhs = inside + lambda * norm_squared(gv) - norm_squared(gd);
  r.residual = std::abs(r.lhs - r.rhs) / (std::abs(r.lhs) + std::abs(r.rhs));
  r.agrees = r.residual <= tol.flux_identity;
  r.imaginary_nonzero = std::abs(r.lhs.imag()) > 1e-10 * std::abs(o.value * o.derivative);
  return r;
}

struct EigenExtensionResult {
  double lambda = 0.0;
  SolutionTrace eta_trace;
  DomainFunction eta;
  cplx h{};
  LatticeFunction k;
  ExtensionParams params;

  double absorption_residual = 0.0;
  double slack = 0.0;
  double eigen_residual = 0.0;
  double adjoint_residual = 0.0;
  double symmetric_identity = 0.0;   // sup |V_I eta - (i/2) eta(0) k|
  FluxReport flux;
  KvReport kv;

  bool absorption_ok = false, slack_ok = false, eigen_ok = false, adjoint_ok = false;
  bool passed() const { return absorption_ok && slack_ok && eigen_ok && adjoint_ok && flux.agrees && kv.passed(); }
};

/// A_lambda = A_{(i/2) eta'(0), V_I eta}, eta = -2i g / g(0), with its
/// certificates.
inline EigenExtensionResult construct_eigen_extension(const Potential& v, double lambda,
                                                      std::span<const double> grid = {},
                                                      const Tolerances& tol = {}) {
  if (v.imag_vanishes(tol.vi_floor)) throw Unsupported("V_I = 0: no dissipative part to build A_lambda from");
  const SolutionTrace g = solve_adjoint_eigenfunction(v, lambda, grid);
  double sup = 0.0;
  for (const auto& n : g.nodes()) sup = std::max(sup, std::abs(n.value));
  const cplx g0 = g.nodes().front().value;
  if (!(std::abs(g0) > tol.adjoint_origin_guard * sup)) {
    throw NumericalBreakdown("adjoint eigenfunction vanishes at 0");
  }
  const cplx I(0.0, 1.0);
  SolutionTrace eta_trace = g.normalized_at_origin(-2.0 * I);
  eta_trace.set_tail(g.tail_origin(), *g.tail_rate());
  const DomainFunction eta = eta_trace.as_domain_function();
  const cplx d0 = eta_trace.at(0.0).derivative;
  const cplx h = 0.5 * I * d0;
  const Potential vv = v;
  LatticeFunction k(v.breakpoints(), [vv, eta](double x) { return vv.imag_part(x) * eta(x); });
  ExtensionParams params(v, BoundaryParameter::finite(h), k, tol);

  EigenExtensionResult r{lambda, eta_trace, eta, h, k, params, 0.0, 0.0, 0.0, 0.0, 0.0, {}, {}};
  const LatticeFunction ev = eta.values();
  const auto lat = clip_lattice(v.breakpoints(), 0.0, v.support_end());
  const double absorbed =
      integrate([&](double x) { return v.imag_part(x) * std::norm(ev(x)); }, lat, 0.0, v.support_end());
  r.absorption_residual = std::abs(d0.real() - 0.5 * absorbed) / std::abs(d0);
  r.absorption_ok = r.absorption_residual <= tol.absorption_residual;
  r.slack = params.slack();
  r.slack_ok = std::abs(r.slack) <= tol.criticality * (1.0 + std::abs(h));

  // a boundary-condition violation fails the certificate, reported as +inf
  const double scale = std::abs(lambda) * norm(ev);
  const double inf = std::numeric_limits<double>::infinity();
  try {
    r.eigen_residual = norm(apply_extension(v, params, eta, tol) - ev.scaled(lambda)) / scale;
  } catch (const DomainError&) {
    r.eigen_residual = inf;
  }
  r.eigen_ok = r.eigen_residual <= tol.eigen_residual;
  try {
    r.adjoint_residual = norm(apply_adjoint(v, params, eta, tol) - ev.scaled(lambda)) / scale;
  } catch (const DomainError&) {
    r.adjoint_residual = inf;
  }
  r.adjoint_ok = r.adjoint_residual <= tol.eigen_residual;

  const cplx e0 = eta.origin_value();
  for (double x : uniform_grid(0.0, v.support_end(), 801)) {
    r.symmetric_identity = std::max(r.symmetric_identity, std::abs(v.imag_part(x) * eta(x) - 0.5 * I * e0 * k(x)));
  }
  r.flux = check_boundary_flux(g, lambda, tol);
  try {
    r.kv = check_kv_conditions(v, params, eta, tol);
  } catch (const DomainError&) {
    r.kv.eigen_residual = inf;
  }
  return r;
}

/// m(lambda) = g'(0) / g(0) for the adjoint L2 solution; h of A_lambda.
inline cplx boundary_ratio(const Potential& v, double lambda) {
  const auto g = solve_adjoint_eigenfunction(v, lambda);
  const CauchyData o = g.at(0.0);
  return o.derivative / o.value;
}

/// Search lambda < 0 with h = m(lambda) (scan in xi = sqrt(-lambda), then
/// Gauss-Newton on the real unknown) and rebuild A_lambda; returns it when
/// both h and k match the given parameters.
inline std::optional<EigenExtensionResult> reconstruct(const Potential& v, const ExtensionParams& p,
                                                       const Tolerances& tol = {}) {
  if (p.h().is_dirichlet() || v.imag_vanishes(tol.vi_floor)) return std::nullopt;
  const cplx h = p.h().value();
  auto miss = [&](double xi) { return boundary_ratio(v, -xi * xi) - h; };

  const int n = 81;
  std::vector<double> xs(n);
  std::vector<double> fs(n);
  for (int i = 0; i < n; ++i) {
    xs[i] = std::pow(10.0, -2.0 + 4.0 * i / (n - 1));
    fs[i] = std::abs(miss(xs[i]));
  }
  std::vector<int> starts;
  for (int i = 0; i < n; ++i) {
    const bool left = i == 0 || fs[i] <= fs[i - 1];
    const bool right = i == n - 1 || fs[i] <= fs[i + 1];
    if (left && right) starts.push_back(i);
  }
  std::sort(starts.begin(), starts.end(), [&](int a, int b) { return fs[a] < fs[b]; });
  if (starts.size() > 3) starts.resize(3);

  for (int s : starts) {
    double xi = xs[s];
    for (int it = 0; it < 60; ++it) {
      const cplx f = miss(xi);
      const double dx = 1e-6 * xi;
      const cplx fp = (miss(xi + dx) - miss(xi - dx)) / (2.0 * dx);
      const double den = std::norm(fp);
      if (den == 0.0) break;
      double step = -(std::conj(fp) * f).real() / den;
      while (xi + step <= 0.0) step *= 0.5;
      xi += step;
      if (std::abs(step) <= 1e-15 * xi) break;
    }
    if (std::abs(miss(xi)) > 1e-6 * (1.0 + std::abs(h))) continue;
    std::optional<EigenExtensionResult> r;
    try {
      r.emplace(construct_eigen_extension(v, -xi * xi, {}, tol));
    } catch (const Error&) {
      continue;
    }
    if (std::abs(r->h - h) > 1e-8 * (1.0 + std::abs(h))) continue;
    if (norm(r->k - p.k()) > 1e-8 * (1.0 + norm(p.k()))) continue;
    return r;
  }
  return std::nullopt;
}

}  // namespace dissipext
