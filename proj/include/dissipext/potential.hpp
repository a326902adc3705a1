#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dissipext/errors.hpp"
#include "dissipext/functions.hpp"
#include "dissipext/quadrature.hpp"

namespace dissipext {

enum class PotentialKind { Step, Sampled };

/// Which coefficient q the equation -u'' + q u = lambda u uses.
enum class Coefficient { FullV, RealPartOnly, ConjugateV };

inline const char* to_string(Coefficient c) {
  switch (c) {
    case Coefficient::FullV: return "FullV";
    case Coefficient::RealPartOnly: return "RealPartOnly";
    case Coefficient::ConjugateV: return "ConjugateV";
  }
  return "?";
}

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

namespace detail {

inline void check_lattice(std::span<const double> xs, const char* what) {
  if (xs.size() < 2) throw InvalidInput(std::string(what) + ": need at least two breakpoints");
  if (xs.front() != 0.0) throw InvalidInput(std::string(what) + ": first breakpoint must be 0");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i])) throw InvalidInput(std::string(what) + ": non-finite breakpoint");
    if (i > 0 && !(xs[i] > xs[i - 1])) {
      throw InvalidInput(std::string(what) + ": breakpoints must be strictly increasing (index " +
                         std::to_string(i) + ")");
    }
  }
}

}  // namespace detail

/// Bounded complex potential V = V_R + i V_I, V_I >= 0, vanishing beyond the
/// last breakpoint L. Step potentials are constant on each piece
/// [x_j, x_{j+1}); sampled potentials interpolate linearly between samples.
class Potential {
 public:
  static Potential step(std::vector<double> breakpoints, std::vector<cplx> values) {
    detail::check_lattice(breakpoints, "potential");
    if (values.size() + 1 != breakpoints.size()) {
      throw InvalidInput("potential: values.length must equal breakpoints.length - 1");
    }
    validate_values(values);
    return Potential(PotentialKind::Step, std::move(breakpoints), std::move(values));
  }

  static Potential sampled(std::vector<double> grid, std::vector<cplx> samples) {
    detail::check_lattice(grid, "sampled potential");
    if (samples.size() != grid.size()) {
      throw InvalidInput("sampled potential: samples.length must equal grid.length");
    }
    validate_values(samples);
    return Potential(PotentialKind::Sampled, std::move(grid), std::move(samples));
  }

  static Potential zero(double support = 1.0) { return step({0.0, support}, {cplx{}}); }

  PotentialKind kind() const noexcept { return kind_; }
  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<cplx>& values() const noexcept { return values_; }
  double support_end() const noexcept { return breakpoints_.back(); }

  cplx operator()(double x) const {
    if (x < 0.0) x = 0.0;
    const double L = breakpoints_.back();
    if (kind_ == PotentialKind::Step) {
      if (x >= L) return {};
      return values_[piece_index(x)];
    }
    if (x > L) return {};
    const std::size_t i = std::min(piece_index(x), breakpoints_.size() - 2);
    const double t = (x - breakpoints_[i]) / (breakpoints_[i + 1] - breakpoints_[i]);
    return values_[i] * (1.0 - t) + values_[i + 1] * t;
  }

  cplx coefficient(double x, Coefficient c) const {
    const cplx v = (*this)(x);
    switch (c) {
      case Coefficient::FullV: return v;
      case Coefficient::RealPartOnly: return {v.real(), 0.0};
      case Coefficient::ConjugateV: return std::conj(v);
    }
    return v;
  }

  double real_part(double x) const { return (*this)(x).real(); }
  double imag_part(double x) const { return (*this)(x).imag(); }

  double sup_abs() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  /// V_I vanishes identically (below `floor` for sampled potentials).
  bool imag_vanishes(double floor = 1e-14) const {
    const double f = kind_ == PotentialKind::Step ? 0.0 : floor;
    return std::all_of(values_.begin(), values_.end(), [f](cplx v) { return v.imag() <= f; });
  }

  /// Same function on a finer lattice (extra points outside (0, L) ignored).
  Potential refined(std::span<const double> extra) const {
    std::vector<double> pts(breakpoints_);
    for (double x : extra) {
      if (x > 0.0 && x < support_end()) pts.push_back(x);
    }
    pts = merge_lattices({pts});
    std::vector<cplx> vals;
    if (kind_ == PotentialKind::Step) {
      for (std::size_t i = 0; i + 1 < pts.size(); ++i) vals.push_back((*this)(0.5 * (pts[i] + pts[i + 1])));
    } else {
      for (double x : pts) vals.push_back(x == support_end() ? values_.back() : (*this)(x));
    }
    return Potential(kind_, std::move(pts), std::move(vals));
  }

  /// V_I as a lattice function (zero beyond L).
  LatticeFunction imag_function() const {
    auto self = *this;
    return {breakpoints_, [self](double x) { return cplx{self.imag_part(x), 0.0}; }};
  }

  /// Whether V_I vanishes on the open piece (a, b) of the lattice.
  bool imag_vanishes_on(double a, double b, double floor = 1e-14) const {
    if (a >= support_end()) return true;
    if (kind_ == PotentialKind::Step) return imag_part(0.5 * (a + b)) == 0.0;
    return imag_part(a) <= floor && imag_part(std::min(b, support_end())) <= floor &&
           imag_part(0.5 * (a + b)) <= floor;
  }

 private:
  Potential(PotentialKind kind, std::vector<double> bp, std::vector<cplx> values)
      : kind_(kind), breakpoints_(std::move(bp)), values_(std::move(values)) {}

  static void validate_values(std::span<const cplx> values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i].real()) || !std::isfinite(values[i].imag())) {
        throw InvalidInput("potential: non-finite value at index " + std::to_string(i));
      }
      if (values[i].imag() < 0.0) {
        throw InvalidInput("potential: Im V < 0 at index " + std::to_string(i));
      }
    }
  }

  std::size_t piece_index(double x) const {
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    return static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - breakpoints_.begin()) - 1));
  }

  PotentialKind kind_;
  std::vector<double> breakpoints_;
  std::vector<cplx> values_;
};

/// Piecewise-constant complex function, zero beyond the last breakpoint.
class StepFunction {
 public:
  StepFunction() : breakpoints_{0.0, 1.0}, values_{cplx{}} {}
  StepFunction(std::vector<double> breakpoints, std::vector<cplx> values)
      : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
    if (breakpoints_.size() < 2 || values_.size() + 1 != breakpoints_.size()) {
      throw InvalidInput("step function: values.length must equal breakpoints.length - 1");
    }
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
      if (!(breakpoints_[i] > breakpoints_[i - 1])) {
        throw InvalidInput("step function: breakpoints must be strictly increasing");
      }
    }
    if (breakpoints_.front() < 0.0) throw InvalidInput("step function: negative breakpoint");
  }

  static StepFunction zero() { return {}; }

  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<cplx>& values() const noexcept { return values_; }

  cplx operator()(double x) const {
    if (x < breakpoints_.front() || x >= breakpoints_.back()) return {};
    auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
    return values_[static_cast<std::size_t>(it - breakpoints_.begin()) - 1];
  }

  bool is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](cplx v) { return v == cplx{}; });
  }

  LatticeFunction as_function() const {
    auto self = *this;
    return {breakpoints_, [self](double x) { return self(x); }};
  }

  operator LatticeFunction() const { return as_function(); }  // NOLINT(google-explicit-constructor)

 private:
  std::vector<double> breakpoints_;
  std::vector<cplx> values_;
};

struct PotentialParts {
  Potential real_part;
  Potential imag_part;  // V_I stored as real values
};

/// V -> (V_R, V_I) on the same lattice.
inline PotentialParts split_parts(const Potential& v) {
  std::vector<cplx> re, im;
  for (const auto& z : v.values()) {
    re.emplace_back(z.real(), 0.0);
    im.emplace_back(z.imag(), 0.0);
  }
  if (v.kind() == PotentialKind::Step) {
    return {Potential::step(v.breakpoints(), std::move(re)), Potential::step(v.breakpoints(), std::move(im))};
  }
  return {Potential::sampled(v.breakpoints(), std::move(re)), Potential::sampled(v.breakpoints(), std::move(im))};
}

/// x0 = inf ess supp V_I; +inf when V_I == 0.
inline double vi_support_infimum(const Potential& v, double floor = 1e-14) {
  const auto& bp = v.breakpoints();
  const auto& vals = v.values();
  if (v.kind() == PotentialKind::Step) {
    for (std::size_t i = 0; i < vals.size(); ++i) {
      if (vals[i].imag() > 0.0) return bp[i];
    }
    return kInfinity;
  }
  for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
    if (vals[i].imag() > floor || vals[i + 1].imag() > floor) return bp[i];
  }
  return kInfinity;
}

/// ||V_I^{-1/2} k||^2 = int_E |k|^2 / V_I, or +inf when k does not vanish
/// where V_I does (k outside Ran V_I^{1/2} in this representation).
inline double weighted_k_norm(const Potential& v, const LatticeFunction& k, double floor = 1e-14,
                              QuadratureOptions opts = {}) {
  if (!k.tail().empty()) return kInfinity;
  const double hi = std::max(v.support_end(), k.end());
  const auto lat = clip_lattice(merge_lattices({v.breakpoints(), k.lattice()}), 0.0, hi);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < lat.size(); ++i) {
    const double a = lat[i], b = lat[i + 1];
    if (b <= k.start() || a >= k.end()) continue;
    const std::vector<double> piece{a, b};
    if (v.imag_vanishes_on(a, b, floor)) {
      const double mass = integrate([&](double x) { return std::norm(k(x)); }, piece, a, b, opts);
      if (mass > 0.0) return kInfinity;
      continue;
    }
    total += integrate(
        [&](double x) {
          const double vi = v.imag_part(x);
          const double kk = std::norm(k(x));
          if (kk == 0.0) return 0.0;
          return vi > 0.0 ? kk / vi : kInfinity;
        },
        piece, a, b, opts);
  }
  return total;
}

}  // namespace dissipext
