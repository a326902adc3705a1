#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "dissipext/errors.hpp"
#include "dissipext/functions.hpp"
#include "dissipext/ode.hpp"
#include "dissipext/potential.hpp"
#include "dissipext/tolerances.hpp"

namespace dissipext {

/// The L2 solution of -f'' + V_R f = conj(lambda) f with f(0) = 1, with the
/// exact tail c exp(i kappa x) beyond L.
struct DefectSolution {
  cplx lambda;
  cplx kappa;
  SolutionTrace trace;
  cplx tail_coefficient;

  cplx value(double x) const { return trace.at(x).value; }
  DomainFunction function() const { return trace.as_domain_function(); }
  double norm() const { return dissipext::norm(function().values()); }
};

/// sqrt(z) with the branch Im >= 0.
inline cplx upper_sqrt(cplx z) {
  cplx r = std::sqrt(z);
  if (r.imag() < 0.0) r = -r;
  return r;
}

inline DefectSolution weyl_solution(const Potential& v, cplx lambda, std::span<const double> grid = {},
                                    const Tolerances& tol = {}) {
  if (lambda.imag() == 0.0) throw InvalidInput("defect solution needs Im lambda != 0");
  const cplx lb = std::conj(lambda);
  const cplx kappa = upper_sqrt(lb);
  const double L = v.support_end();
  const cplx ik = cplx(0.0, 1.0) * kappa;
  auto trace = solve_ivp(v, Coefficient::RealPartOnly, lb, {L, 1.0, ik}, 0.0, grid);
  double sup = 0.0;
  for (const auto& n : trace.nodes()) sup = std::max(sup, std::abs(n.value));
  const cplx u0 = trace.nodes().front().value;
  if (!(std::abs(u0) >= tol.defect_normalization * sup)) {
    throw NumericalBreakdown("defect solution: |phi(0)| below normalization guard");
  }
  trace = trace.normalized_at_origin(1.0);
  trace.set_tail(L, ik);
  const cplx at_l = trace.at(L).value;
  return {lambda, kappa, std::move(trace), at_l * std::exp(-ik * L)};
}

struct ResolventIdentityReport {
  cplx lambda, mu;
  double origin_residual = 0.0;
  double equation_residual = 0.0;
  double distance = 0.0;
  double bound = 0.0;
  bool origin_ok = false;
  bool equation_ok = false;
  bool bound_ok = false;
  bool passed() const { return origin_ok && equation_ok && bound_ok; }
};

/// Residual form of phi_mu = [1 - (conj l - conj m)(S_hat - conj m)^{-1}] phi_l:
/// psi = phi_l - phi_mu has psi(0) = 0 and solves
/// -psi'' + V_R psi - conj(mu) psi = (conj l - conj m) phi_l, plus the norm bound.
inline ResolventIdentityReport verify_resolvent_identity(const DefectSolution& pl, const DefectSolution& pm,
                                                         const Tolerances& tol = {}) {
  ResolventIdentityReport r;
  r.lambda = pl.lambda;
  r.mu = pm.lambda;
  const Potential& v = pl.trace.potential();
  const double L = v.support_end();

  r.origin_residual = std::abs(pl.value(0.0) - pm.value(0.0));
  r.origin_ok = r.origin_residual == 0.0;

  const cplx lb = std::conj(pl.lambda), mb = std::conj(pm.lambda);
  const double depth = 4.0 / std::min(pl.kappa.imag(), pm.kappa.imag());
  std::vector<double> lat(v.breakpoints());
  lat.push_back(L + std::min(depth, 50.0));
  const double h = 1e-3;
  auto psi_d = [&](double x) { return pl.trace.at(x).derivative - pm.trace.at(x).derivative; };
  double worst = 0.0, scale = 0.0;
  for (double x : interior_samples(lat, 0.0, lat.back(), 16, h)) {
    const cplx d2 = difference_of_derivative(psi_d, x, h);
    const cplx psi = pl.value(x) - pm.value(x);
    const cplx q = v.coefficient(x, Coefficient::RealPartOnly) - mb;
    const cplx rhs = (lb - mb) * pl.value(x);
    worst = std::max(worst, std::abs(-d2 + q * psi - rhs));
    scale = std::max({scale, std::abs(rhs), std::abs(psi) * (1.0 + std::abs(q))});
  }
  r.equation_residual = scale > 0.0 ? worst / scale : worst;
  r.equation_ok = r.equation_residual <= tol.resolvent_residual;

  r.distance = norm(pl.function().values() - pm.function().values());
  r.bound = std::abs(pl.lambda - pm.lambda) * pl.norm() / std::abs(pm.lambda.imag());
  r.bound_ok = r.distance <= r.bound * (1.0 + tol.norm_bound_slack);
  return r;
}

}  // namespace dissipext
