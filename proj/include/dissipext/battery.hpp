#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "dissipext/extensions.hpp"
#include "dissipext/functions.hpp"
#include "dissipext/potential.hpp"

namespace dissipext::battery {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); }

/// Step potential with 1-4 pieces; at least one piece absorbing.
inline Potential random_step_potential(Rng& rng) {
  const int n = 1 + static_cast<int>(uniform(rng, 0.0, 4.0));
  std::vector<double> bp{0.0};
  std::vector<cplx> vals;
  bool any = false;
  for (int i = 0; i < n; ++i) {
    bp.push_back(bp.back() + uniform(rng, 0.3, 1.2));
    const bool absorbing = uniform(rng, 0.0, 1.0) < 0.7 || (i == n - 1 && !any);
    any = any || absorbing;
    vals.emplace_back(uniform(rng, -2.0, 2.0), absorbing ? uniform(rng, 0.2, 2.0) : 0.0);
  }
  return Potential::step(bp, vals);
}

/// Step k supported on the absorbing pieces of v.
inline LatticeFunction random_k(Rng& rng, const Potential& v) {
  std::vector<cplx> kv;
  for (std::size_t i = 0; i < v.values().size(); ++i) {
    kv.push_back(v.values()[i].imag() > 0.0 ? cplx(uniform(rng, -1, 1), uniform(rng, -1, 1)) : cplx{});
  }
  return StepFunction(v.breakpoints(), kv);
}

/// Admissible (h, k): Im h = 1/4 ||V_I^{-1/2} k||^2 + extra.
inline ExtensionParams random_admissible(Rng& rng, const Potential& v, double extra) {
  const LatticeFunction k = random_k(rng, v);
  const double w = weighted_k_norm(v, k);
  return {v, BoundaryParameter::finite(cplx(uniform(rng, -2, 2), 0.25 * w + extra)), k};
}

/// C^3 bump sin^4 on (a, b), zero outside.
inline Jet bump(double x, double a, double b) {
  if (x <= a || x >= b) return {};
  const double w = std::numbers::pi / (b - a);
  const double s = std::sin(w * (x - a)), c = std::cos(w * (x - a));
  return {s * s * s * s, 4 * w * s * s * s * c, w * w * (12 * s * s * c * c - 4 * s * s * s * s)};
}

struct Bump {
  double a, b;
  cplx amplitude;
};

/// sum_j c_j exp(-r_j x) + sum of bumps, with the last coefficient fixed by
/// the boundary condition of p.
inline DomainFunction make_domain_function(const std::vector<cplx>& rates, std::vector<cplx> coeffs,
                                           const std::vector<Bump>& bumps, const BoundaryParameter& h, double end) {
  cplx rest{}, last_factor{};
  const std::size_t m = rates.size() - 1;
  if (h.is_dirichlet()) {
    for (std::size_t j = 0; j < m; ++j) rest += coeffs[j];
    coeffs[m] = -rest;
  } else {
    const cplx hv = h.value();
    for (std::size_t j = 0; j < m; ++j) rest += coeffs[j] * (hv + rates[j]);
    last_factor = -rates[m] - hv;
    coeffs[m] = rest / last_factor;
  }
  std::vector<double> lat{0.0, end};
  for (const auto& b : bumps) {
    lat.push_back(b.a);
    lat.push_back(b.b);
  }
  lat = merge_lattices({lat});
  std::vector<ExpTerm> terms;
  for (std::size_t j = 0; j <= m; ++j) terms.push_back({coeffs[j], -rates[j]});
  const ExpTail tail(0.0, terms);
  return {lat,
          [tail, bumps](double x) {
            Jet j = tail.jet(x);
            for (const auto& b : bumps) {
              const Jet q = bump(x, b.a, b.b);
              j.value += b.amplitude * q.value;
              j.first += b.amplitude * q.first;
              j.second += b.amplitude * q.second;
            }
            return j;
          },
          tail.rebased(lat.back())};
}

inline DomainFunction random_domain_function(Rng& rng, const BoundaryParameter& h, double support) {
  const int m = 2 + static_cast<int>(uniform(rng, 0.0, 2.0));
  std::vector<cplx> rates, coeffs;
  for (int j = 0; j < m; ++j) {
    rates.emplace_back(uniform(rng, 0.5, 3.0), uniform(rng, -2.0, 2.0));
    coeffs.emplace_back(uniform(rng, -1, 1), uniform(rng, -1, 1));
  }
  if (!h.is_dirichlet() && std::abs(rates.back() + h.value()) < 0.2) rates.back() += 1.0;
  std::vector<Bump> bumps;
  const int nb = static_cast<int>(uniform(rng, 0.0, 3.0));
  for (int i = 0; i < nb; ++i) {
    const double a = uniform(rng, 0.05, support);
    bumps.push_back({a, a + uniform(rng, 0.2, 1.0), cplx(uniform(rng, -1, 1), uniform(rng, -1, 1))});
  }
  double end = support;
  for (const auto& b : bumps) end = std::max(end, b.b);
  return make_domain_function(rates, coeffs, bumps, h, end);
}

/// Element of D_0: bumps inside pieces of v where V_I = 0 (zero function if
/// there are none).
inline DomainFunction random_d0_function(Rng& rng, const Potential& v) {
  std::vector<Bump> bumps;
  const auto& bp = v.breakpoints();
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    if (v.values()[i].imag() == 0.0) bumps.push_back({bp[i], bp[i + 1], cplx(uniform(rng, -1, 1), uniform(rng, -1, 1))});
  }
  const double L = v.support_end();
  const double a = L + uniform(rng, 0.0, 0.5);
  bumps.push_back({a, a + uniform(rng, 0.3, 1.0), cplx(uniform(rng, -1, 1), 0.5)});
  std::vector<double> lat{0.0};
  for (const auto& b : bumps) {
    lat.push_back(b.a);
    lat.push_back(b.b);
  }
  lat = merge_lattices({lat});
  return {lat,
          [bumps](double x) {
            Jet j;
            for (const auto& b : bumps) {
              const Jet q = bump(x, b.a, b.b);
              j.value += b.amplitude * q.value;
              j.first += b.amplitude * q.first;
              j.second += b.amplitude * q.second;
            }
            return j;
          },
          ExpTail{}};
}

/// Smooth right-hand side on [a, b]: a few random cosines.
inline LatticeFunction random_rhs(Rng& rng, double a, double b) {
  struct Mode {
    cplx c;
    double w, phase;
  };
  std::vector<Mode> modes;
  for (int i = 0; i < 3; ++i) {
    modes.push_back({cplx(uniform(rng, -1, 1), uniform(rng, -1, 1)), uniform(rng, 0.0, 6.0), uniform(rng, 0.0, 6.3)});
  }
  return {{a, b}, [modes](double x) {
            cplx s{};
            for (const auto& m : modes) s += m.c * std::cos(m.w * x + m.phase);
            return s;
          }};
}

}  // namespace dissipext::battery
