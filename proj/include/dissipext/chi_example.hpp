#pragma once

#include <cmath>
#include <complex>
#include <utility>

#include "dissipext/errors.hpp"
#include "dissipext/functions.hpp"
#include "dissipext/potential.hpp"

namespace dissipext::chi {

/// Which square root of xi^2 - i plays omega. All outputs below are
/// invariant under the swap.
enum class Branch { Principal, Negated };

/// V = i on (0, 1), zero beyond.
inline Potential potential() { return Potential::step({0.0, 1.0}, {cplx(0.0, 1.0)}); }

inline cplx omega(double xi, Branch b = Branch::Principal) {
  const cplx w = std::sqrt(cplx(xi * xi, -1.0));
  return b == Branch::Principal ? w : -w;
}

inline std::pair<cplx, cplx> sigma_pm(double xi, Branch b = Branch::Principal) {
  if (!(xi > 0.0)) throw InvalidInput("xi must be positive");
  const cplx w = omega(xi, b);
  return {(xi + w) * std::exp(w), (xi - w) * std::exp(-w)};
}

/// Closed-form data of the eigenvalue -xi^2 extension over V = i chi_(0,1).
class Example {
 public:
  explicit Example(double xi, Branch b = Branch::Principal) : xi_(xi), omega_(chi::omega(xi, b)) {
    std::tie(sp_, sm_) = sigma_pm(xi, b);
    const cplx d = sp_ - sm_;
    if (std::abs(d) <= 1e-12) throw NumericalBreakdown("sigma_+ = sigma_-");
    const cplx I(0.0, 1.0);
    ap_ = 2.0 * I * sm_ / d;
    am_ = -2.0 * I * sp_ / d;
    bracket_ = ap_ * std::exp(omega_ + xi_) + am_ * std::exp(-omega_ + xi_);
    h_ = (sm_ + sp_) / (sm_ - sp_) * omega_;
  }

  double xi() const noexcept { return xi_; }
  double lambda() const noexcept { return -xi_ * xi_; }
  cplx omega() const noexcept { return omega_; }
  cplx sigma_plus() const noexcept { return sp_; }
  cplx sigma_minus() const noexcept { return sm_; }
  cplx h() const noexcept { return h_; }
  /// eta(x) = tail_bracket * exp(-xi x) for x > 1.
  cplx tail_bracket() const noexcept { return bracket_; }

  /// The (0, 1) branch, valid for any x as an analytic expression.
  Jet inner_branch(double x) const {
    const cplx ep = ap_ * std::exp(omega_ * x), em = am_ * std::exp(-omega_ * x);
    return {ep + em, omega_ * (ep - em), omega_ * omega_ * (ep + em)};
  }
  Jet outer_branch(double x) const {
    const cplx e = bracket_ * std::exp(-xi_ * x);
    return {e, -xi_ * e, xi_ * xi_ * e};
  }

  Jet eta_jet(double x) const { return x <= 1.0 ? inner_branch(x) : outer_branch(x); }
  cplx eta(double x) const { return eta_jet(x).value; }
  cplx k(double x) const { return x > 0.0 && x < 1.0 ? inner_branch(x).value : cplx{}; }

  DomainFunction eta_function() const {
    auto self = *this;
    return {{0.0, 1.0}, [self](double x) { return self.inner_branch(x); },
            ExpTail(1.0, {{outer_branch(1.0).value, -xi_}})};
  }
  LatticeFunction k_function() const {
    auto self = *this;
    return {{0.0, 1.0}, [self](double x) { return self.inner_branch(x).value; }};
  }

 private:
  double xi_;
  cplx omega_, sp_, sm_, ap_, am_, bracket_, h_;
};

inline cplx closed_form_eta(double xi, double x, Branch b = Branch::Principal) { return Example(xi, b).eta(x); }

inline std::pair<cplx, LatticeFunction> closed_form_hk(double xi, Branch b = Branch::Principal) {
  const Example e(xi, b);
  return {e.h(), e.k_function()};
}

}  // namespace dissipext::chi
