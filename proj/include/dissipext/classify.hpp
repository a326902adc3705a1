#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "dissipext/eigen_extension.hpp"
#include "dissipext/extensions.hpp"
#include "dissipext/potential.hpp"
#include "dissipext/tolerances.hpp"

namespace dissipext {

enum class Regime {
  NotDissipative,
  SelfadjointRealBC,
  CnsNonCritical,
  CnsCriticalSelfadjointBC,
  CriticalDissipativeReducing,
  CnsCriticalDissipative,
};

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::NotDissipative: return "NotDissipative";
    case Regime::SelfadjointRealBC: return "SelfadjointRealBC";
    case Regime::CnsNonCritical: return "CnsNonCritical";
    case Regime::CnsCriticalSelfadjointBC: return "CnsCriticalSelfadjointBC";
    case Regime::CriticalDissipativeReducing: return "CriticalDissipativeReducing";
    case Regime::CnsCriticalDissipative: return "CnsCriticalDissipative";
  }
  return "?";
}

struct ClassificationReport {
  Regime regime = Regime::NotDissipative;
  double slack = 0.0;
  double tolerance = 0.0;
  bool vi_vanishes = false;
  /// Critical dissipative case: whether a candidate K was available (given
  /// or reconstructed) and the result of the conditions on it.
  bool candidate_checked = false;
  bool reconstructed = false;
  std::optional<KvReport> kv;
  std::optional<double> eigenvalue;
  std::optional<DomainFunction> eta;
  std::string note;
};

/// Regime of A_{h,k} from the slack, and in the critical dissipative case
/// from conditions (i)/(ii) on a candidate K (supplied, or rebuilt through
/// the eigenvalue construction).
inline ClassificationReport classify(const Potential& v, const ExtensionParams& p,
                                     const std::optional<DomainFunction>& candidate = std::nullopt,
                                     const Tolerances& tol = {}) {
  ClassificationReport r;
  r.slack = p.slack();
  r.tolerance = tol.criticality * (1.0 + p.h().magnitude());
  r.vi_vanishes = v.imag_vanishes(tol.vi_floor);
  if (r.slack < -r.tolerance) {
    r.regime = Regime::NotDissipative;
    return r;
  }
  if (r.slack > r.tolerance) {
    r.regime = Regime::CnsNonCritical;
    return r;
  }
  const double im_h = p.h().is_dirichlet() ? 0.0 : p.h().value().imag();
  if (im_h <= r.tolerance && p.k_is_zero()) {
    r.regime = r.vi_vanishes ? Regime::SelfadjointRealBC : Regime::CnsCriticalSelfadjointBC;
    return r;
  }
  r.regime = Regime::CnsCriticalDissipative;
  if (im_h <= r.tolerance) {
    r.note = "critical with real h but k != 0";
    return r;
  }

  std::optional<DomainFunction> k_fn = candidate;
  if (!k_fn) {
    if (auto rebuilt = reconstruct(v, p, tol)) {
      k_fn = rebuilt->eta;
      r.reconstructed = true;
    }
  }
  if (!k_fn) {
    r.note = "no certificate";
    return r;
  }
  r.candidate_checked = true;
  try {
    const KvReport kv = check_kv_conditions(v, p, *k_fn, tol);
    r.kv = kv;
    if (kv.passed()) {
      r.regime = Regime::CriticalDissipativeReducing;
      r.eigenvalue = kv.z.real();
      r.eta = k_fn;
    }
  } catch (const DomainError& e) {
    r.note = std::string("candidate not in the domain: ") + e.what();
  } catch (const PreconditionError& e) {
    r.note = e.what();
  }
  return r;
}

}  // namespace dissipext
