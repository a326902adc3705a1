#pragma once

namespace dissipext {

/// Every acceptance threshold the library uses, in one place so that the
/// CLI can rescale them uniformly (DISSIPEXT_TOL_SCALE).
struct Tolerances {
  double boundary_condition = 1e-10;     // relative, f'(0) = h f(0)
  double criticality = 1e-9;             // |slack| <= tol * (1 + |h|)
  double symmetric_membership = 1e-9;
  double kv_eigen_residual = 1e-8;       // ||A K - z K|| <= tol ||A K||
  double kv_real_eigenvalue = 1e-9;      // |Im z| <= tol * (1 + |z|)
  double kv_origin_guard = 1e-12;        // |K(0)| > tol * sup|K|
  double defect_normalization = 1e-13;
  double adjoint_origin_guard = 1e-12;   // |g(0)| > tol * sup|g|
  double flux_identity = 1e-9;
  double absorption_residual = 1e-9;
  double eigen_residual = 1e-8;          // relative to |lambda| ||eta||
  double ode_residual = 1e-9;
  double resolvent_residual = 1e-8;
  double norm_bound_slack = 1e-6;
  double wronskian_guard = 1e-12;
  double adaptive_rtol = 1e-10;
  double vi_floor = 1e-14;               // sampled potentials: V_I "nonzero"

  [[nodiscard]] Tolerances scaled(double s) const {
    Tolerances t = *this;
    for (double* p : {&t.boundary_condition, &t.criticality, &t.symmetric_membership,
                      &t.kv_eigen_residual, &t.kv_real_eigenvalue, &t.kv_origin_guard,
                      &t.defect_normalization, &t.adjoint_origin_guard, &t.flux_identity,
                      &t.absorption_residual, &t.eigen_residual, &t.ode_residual,
                      &t.resolvent_residual, &t.norm_bound_slack, &t.wronskian_guard,
                      &t.adaptive_rtol, &t.vi_floor}) {
      *p *= s;
    }
    return t;
  }
};

}  // namespace dissipext
