#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "dissipext/errors.hpp"
#include "dissipext/functions.hpp"
#include "dissipext/potential.hpp"
#include "dissipext/quadrature.hpp"
#include "dissipext/tolerances.hpp"

namespace dissipext {

/// Finite h in C, or the Dirichlet point at infinity.
class BoundaryParameter {
 public:
  BoundaryParameter() = default;
  static BoundaryParameter finite(cplx h) {
    if (!std::isfinite(h.real()) || !std::isfinite(h.imag())) throw InvalidInput("h must be finite");
    BoundaryParameter b;
    b.h_ = h;
    return b;
  }
  static BoundaryParameter dirichlet() {
    BoundaryParameter b;
    b.dirichlet_ = true;
    return b;
  }

  bool is_dirichlet() const noexcept { return dirichlet_; }
  cplx value() const {
    if (dirichlet_) throw PreconditionError("Dirichlet boundary parameter has no finite value");
    return h_;
  }
  /// |h| for tolerance bands; 0 for Dirichlet.
  double magnitude() const noexcept { return dirichlet_ ? 0.0 : std::abs(h_); }

 private:
  cplx h_{};
  bool dirichlet_ = false;
};

/// (h, k) together with the slack Im h - 1/4 ||V_I^{-1/2} k||^2. The slack is
/// -inf when k is not in Ran V_I^{1/2}; for Dirichlet (k = 0) it is 0.
class ExtensionParams {
 public:
  ExtensionParams(const Potential& v, BoundaryParameter h, LatticeFunction k, const Tolerances& tol = {})
      : h_(h), k_(std::move(k)) {
    k_zero_ = !k_.tail().empty() ? false : norm_squared(k_) == 0.0;
    if (h_.is_dirichlet()) {
      if (!k_zero_) throw InvalidInput("Dirichlet boundary condition requires k = 0");
      weighted_ = 0.0;
      slack_ = 0.0;
      return;
    }
    weighted_ = weighted_k_norm(v, k_, tol.vi_floor);
    slack_ = std::isinf(weighted_) ? -kInfinity : h_.value().imag() - 0.25 * weighted_;
  }

  static ExtensionParams with_zero_k(const Potential& v, BoundaryParameter h, const Tolerances& tol = {}) {
    return {v, h, LatticeFunction::zero(), tol};
  }

  const BoundaryParameter& h() const noexcept { return h_; }
  const LatticeFunction& k() const noexcept { return k_; }
  bool k_is_zero() const noexcept { return k_zero_; }
  double weighted_k_norm_squared() const noexcept { return weighted_; }
  double slack() const noexcept { return slack_; }
  bool admissible() const noexcept { return slack_ >= 0.0; }

 private:
  BoundaryParameter h_;
  LatticeFunction k_;
  bool k_zero_ = true;
  double weighted_ = 0.0;
  double slack_ = 0.0;
};

namespace detail {

inline std::vector<double> operator_lattice(const Potential& v, const DomainFunction& f, const LatticeFunction& k) {
  std::vector<double> lat = merge_lattices({v.breakpoints(), f.lattice(), k.lattice()});
  if (lat.front() > 0.0) lat.insert(lat.begin(), 0.0);
  return lat;
}

inline double relative(double residual, double scale) { return scale > 0.0 ? residual / scale : residual; }

}  // namespace detail

/// Relative residual of f'(0) = h f(0) (or f(0) = 0 for Dirichlet).
inline double boundary_residual(const ExtensionParams& p, const DomainFunction& f) {
  const cplx f0 = f.origin_value(), d0 = f.origin_derivative();
  if (p.h().is_dirichlet()) return detail::relative(std::abs(f0), std::abs(d0));
  const cplx h = p.h().value();
  return detail::relative(std::abs(d0 - h * f0), std::abs(d0) + std::abs(h * f0));
}

/// Relative residual of f'(0) = conj(h) f(0) + <k, f> (f(0) = 0 for Dirichlet).
inline double adjoint_boundary_residual(const ExtensionParams& p, const DomainFunction& f) {
  const cplx f0 = f.origin_value(), d0 = f.origin_derivative();
  if (p.h().is_dirichlet()) return detail::relative(std::abs(f0), std::abs(d0));
  const cplx kf = inner(p.k(), f.values());
  const cplx hb = std::conj(p.h().value());
  return detail::relative(std::abs(d0 - hb * f0 - kf), std::abs(d0) + std::abs(hb * f0) + std::abs(kf));
}

/// -f'' + V f + f(0) k.
inline LatticeFunction apply_extension(const Potential& v, const ExtensionParams& p, const DomainFunction& f,
                                       const Tolerances& tol = {}) {
  const double r = boundary_residual(p, f);
  if (r > tol.boundary_condition) throw DomainError("f violates the boundary condition of A_{h,k}", r);
  const cplx f0 = f.origin_value();
  const LatticeFunction& k = p.k();
  return {detail::operator_lattice(v, f, k),
          [v, f, k, f0](double x) {
            const Jet j = f.jet(x);
            return -j.second + v(x) * j.value + f0 * k(x);
          },
          f.tail().transformed([](cplx rate) { return -rate * rate; })};
}

/// -f'' + conj(V) f on the adjoint domain.
inline LatticeFunction apply_adjoint(const Potential& v, const ExtensionParams& p, const DomainFunction& f,
                                     const Tolerances& tol = {}) {
  const double r = adjoint_boundary_residual(p, f);
  if (r > tol.boundary_condition) throw DomainError("f violates the boundary condition of A*_{h,k}", r);
  return {detail::operator_lattice(v, f, p.k()),
          [v, f](double x) {
            const Jet j = f.jet(x);
            return -j.second + std::conj(v(x)) * j.value;
          },
          f.tail().transformed([](cplx rate) { return -rate * rate; })};
}

struct FormImaginary {
  double direct = 0.0;       // Im <f, A f>
  double decomposed = 0.0;   // slack |f(0)|^2 + ||V_I^{1/2} f - i f(0)/2 V_I^{-1/2} k||^2
  double scale = 0.0;
};

/// Im <f, A_{h,k} f> two ways. `direct` integrates by parts once:
/// Im[conj f(0) f'(0)] + int V_I |f|^2 + Im[f(0) <f, k>].
inline FormImaginary form_imaginary(const Potential& v, const ExtensionParams& p, const DomainFunction& f,
                                    const Tolerances& tol = {}) {
  const double r = boundary_residual(p, f);
  if (r > tol.boundary_condition) throw DomainError("f violates the boundary condition of A_{h,k}", r);
  const cplx f0 = f.origin_value(), d0 = f.origin_derivative();
  const LatticeFunction fv = f.values();
  const LatticeFunction& k = p.k();
  const double L = v.support_end();
  const auto lat = clip_lattice(merge_lattices({v.breakpoints(), k.lattice(), f.lattice()}), 0.0,
                                std::max(L, k.end()));
  const double absorbed = integrate([&](double x) { return v.imag_part(x) * std::norm(fv(x)); }, lat, 0.0, lat.back());
  const cplx fk = inner(fv, k);

  FormImaginary out;
  out.direct = (std::conj(f0) * d0).imag() + absorbed + (f0 * fk).imag();

  const cplx half_i_f0(0.0, 0.5);
  double defect = 0.0;
  for (std::size_t i = 0; i + 1 < lat.size(); ++i) {
    const double a = lat[i], b = lat[i + 1];
    const std::vector<double> piece{a, b};
    if (v.imag_vanishes_on(a, b, tol.vi_floor)) {
      const double mass = integrate([&](double x) { return std::norm(k(x)); }, piece, a, b);
      if (mass > 0.0) defect = kInfinity;
      continue;
    }
    defect += integrate(
        [&](double x) {
          const double vi = v.imag_part(x);
          if (vi <= 0.0) return 0.0;
          const double s = std::sqrt(vi);
          return std::norm(s * fv(x) - half_i_f0 * f0 * k(x) / s);
        },
        piece, a, b);
  }
  out.decomposed = (p.h().is_dirichlet() ? 0.0 : p.slack() * std::norm(f0)) + defect;
  const double fn = norm(fv);
  out.scale = std::norm(f0) * (1.0 + p.h().magnitude()) + std::abs(f0 * d0) + fn * fn * (1.0 + v.sup_abs()) +
              std::abs(f0) * fn * norm(k);
  return out;
}

struct MembershipResult {
  bool member = false;
  bool boundary_ok = false;
  double residual = 0.0;   // ||V_I f - (i/2) f(0) k|| relative
};

/// f in H_sym iff V_I f = (i/2) f(0) k (and f is in the domain).
inline MembershipResult symmetric_membership(const Potential& v, const ExtensionParams& p, const DomainFunction& f,
                                             const Tolerances& tol = {}) {
  MembershipResult m;
  m.boundary_ok = boundary_residual(p, f) <= tol.boundary_condition;
  const cplx f0 = f.origin_value();
  const LatticeFunction vif = f.values().multiplied_by(v.imag_function());
  const LatticeFunction rhs = p.k().scaled(cplx(0.0, 0.5) * f0);
  const double diff = norm(vif - rhs);
  const double scale = norm(vif) + std::abs(f0) * norm(p.k());
  m.residual = detail::relative(diff, scale);
  m.member = m.boundary_ok && diff <= tol.symmetric_membership * scale;
  return m;
}

struct KvReport {
  bool cond_i = false;
  bool cond_ii = false;
  bool z_real = false;
  cplx z{};
  double eigen_residual = 0.0;       // ||A K - z K|| / ||A K||
  double membership_residual = 0.0;
  bool passed() const { return cond_i && cond_ii && z_real; }
};

/// Conditions (i) V_I K = (i/2) K(0) k and (ii) A K in span{K}, the latter
/// via the Rayleigh quotient z and the relative eigen-residual.
inline KvReport check_kv_conditions(const Potential& v, const ExtensionParams& p, const DomainFunction& kfun,
                                    const Tolerances& tol = {}) {
  const cplx k0 = kfun.origin_value();
  if (!(std::abs(k0) > tol.kv_origin_guard * sup_norm(kfun.values()))) {
    throw PreconditionError("K(0) vanishes; conditions need K(0) != 0");
  }
  KvReport r;
  const MembershipResult m = symmetric_membership(v, p, kfun, tol);
  r.cond_i = m.member;
  r.membership_residual = m.residual;
  const LatticeFunction kv = kfun.values();
  const LatticeFunction ak = apply_extension(v, p, kfun, tol);
  r.z = inner(kv, ak) / norm_squared(kv);
  const double ak_norm = norm(ak);
  r.eigen_residual = detail::relative(norm(ak - kv.scaled(r.z)), ak_norm);
  r.cond_ii = r.eigen_residual <= tol.kv_eigen_residual;
  r.z_real = std::abs(r.z.imag()) <= tol.kv_real_eigenvalue * (1.0 + std::abs(r.z));
  return r;
}

}  // namespace dissipext
