#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "dissipext/errors.hpp"
#include "dissipext/quadrature.hpp"

namespace dissipext {

/// Value and first two derivatives at a point.
struct Jet {
  cplx value{};
  cplx first{};
  cplx second{};
};

/// One term a * exp(r * (x - origin)) of an exponential tail.
struct ExpTerm {
  cplx amplitude{};
  cplx rate{};
};

/// Finite sum of decaying exponentials, used for x >= origin. All L^2 tails
/// in this library are of this form because potentials have compact support.
class ExpTail {
 public:
  ExpTail() = default;
  ExpTail(double origin, std::vector<ExpTerm> terms) : origin_(origin), terms_(std::move(terms)) {
    for (const auto& t : terms_) {
      if (!(t.rate.real() < 0.0)) throw InvalidInput("exponential tail must decay (Re rate < 0)");
    }
  }

  double origin() const noexcept { return origin_; }
  const std::vector<ExpTerm>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  Jet jet(double x) const {
    Jet j;
    for (const auto& t : terms_) {
      const cplx e = t.amplitude * std::exp(t.rate * (x - origin_));
      j.value += e;
      j.first += t.rate * e;
      j.second += t.rate * t.rate * e;
    }
    return j;
  }
  cplx value(double x) const { return jet(x).value; }

  /// Same function, amplitudes referred to a new origin.
  ExpTail rebased(double origin) const {
    ExpTail out;
    out.origin_ = origin;
    out.terms_.reserve(terms_.size());
    for (const auto& t : terms_) {
      out.terms_.push_back({t.amplitude * std::exp(t.rate * (origin - origin_)), t.rate});
    }
    return out;
  }

  /// Multiply term j by factor(rate_j); derivatives are factor = r, r^2.
  template <typename F>
  ExpTail transformed(F&& factor) const {
    ExpTail out = *this;
    for (auto& t : out.terms_) t.amplitude *= factor(t.rate);
    return out;
  }

  ExpTail scaled(cplx c) const {
    return transformed([c](cplx) { return c; });
  }

  /// Sum of two tails, referred to origin max(a.origin, b.origin); terms with
  /// equal rates are merged so that cancellations happen in the amplitudes.
  friend ExpTail operator+(const ExpTail& a, const ExpTail& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    const double o = std::max(a.origin_, b.origin_);
    ExpTail out = a.rebased(o);
    const ExpTail bb = b.rebased(o);
    for (const auto& t : bb.terms_) {
      auto same = std::find_if(out.terms_.begin(), out.terms_.end(), [&](const ExpTerm& e) { return e.rate == t.rate; });
      if (same != out.terms_.end()) {
        same->amplitude += t.amplitude;
      } else {
        out.terms_.push_back(t);
      }
    }
    return out;
  }

 private:
  double origin_ = 0.0;
  std::vector<ExpTerm> terms_;
};

/// Closed form of  int_from^inf conj(f) g  for two exponential tails.
inline cplx tail_inner(const ExpTail& f, const ExpTail& g, double from) {
  const ExpTail fa = f.rebased(from), ga = g.rebased(from);
  cplx sum{};
  for (const auto& s : fa.terms()) {
    for (const auto& t : ga.terms()) {
      sum += std::conj(s.amplitude) * t.amplitude / -(std::conj(s.rate) + t.rate);
    }
  }
  return sum;
}

/// A function on [0, inf): an arbitrary evaluator on the lattice range
/// [front, back] (zero before front), and an exponential tail (possibly
/// empty, i.e. zero) beyond back. Values may jump at lattice points.
class LatticeFunction {
 public:
  using Body = std::function<cplx(double)>;

  LatticeFunction() : lattice_{0.0, 1.0}, body_([](double) { return cplx{}; }) {}
  LatticeFunction(std::vector<double> lattice, Body body, ExpTail tail = {})
      : lattice_(std::move(lattice)), body_(std::move(body)), tail_(std::move(tail)) {
    if (lattice_.size() < 2 || !std::is_sorted(lattice_.begin(), lattice_.end())) {
      throw InvalidInput("lattice needs at least two sorted breakpoints");
    }
    if (!tail_.empty() && tail_.origin() != lattice_.back()) tail_ = tail_.rebased(lattice_.back());
  }

  static LatticeFunction zero() { return {}; }

  const std::vector<double>& lattice() const noexcept { return lattice_; }
  double start() const noexcept { return lattice_.front(); }
  double end() const noexcept { return lattice_.back(); }
  const ExpTail& tail() const noexcept { return tail_; }

  cplx operator()(double x) const {
    if (x < lattice_.front()) return {};
    if (x > lattice_.back()) return tail_.empty() ? cplx{} : tail_.value(x);
    return body_(x);
  }

  LatticeFunction scaled(cplx c) const {
    auto b = body_;
    return {lattice_, [b, c](double x) { return c * b(x); }, tail_.scaled(c)};
  }

  /// a*f + b*g on the merged lattice.
  friend LatticeFunction combine(cplx a, const LatticeFunction& f, cplx b, const LatticeFunction& g) {
    auto lat = merge_lattices({f.lattice_, g.lattice_});
    return {std::move(lat), [f, g, a, b](double x) { return a * f(x) + b * g(x); },
            f.tail_.scaled(a) + g.tail_.scaled(b)};
  }
  friend LatticeFunction operator-(const LatticeFunction& f, const LatticeFunction& g) {
    return combine(1.0, f, -1.0, g);
  }
  friend LatticeFunction operator+(const LatticeFunction& f, const LatticeFunction& g) {
    return combine(1.0, f, 1.0, g);
  }

  /// Pointwise product with a function that has no tail of its own; the
  /// result vanishes beyond the multiplier's lattice.
  LatticeFunction multiplied_by(const LatticeFunction& m) const {
    auto self = *this;
    auto lat = merge_lattices({lattice_, m.lattice_});
    const double hi = m.end();
    std::vector<double> clipped;
    for (double x : lat) {
      if (x <= hi) clipped.push_back(x);
    }
    if (clipped.size() < 2) clipped = {m.start(), hi};
    return {std::move(clipped), [self, m](double x) { return self(x) * m(x); }};
  }

 private:
  std::vector<double> lattice_;
  Body body_;
  ExpTail tail_;
};

/// <f, g> = int_0^inf conj(f) g, anti-linear in the first slot.
inline cplx inner(const LatticeFunction& f, const LatticeFunction& g, QuadratureOptions opts = {}) {
  const double lo = std::min(f.start(), g.start());
  const double hi = std::max(f.end(), g.end());
  const auto lat = merge_lattices({f.lattice(), g.lattice()});
  cplx body = integrate([&](double x) { return std::conj(f(x)) * g(x); }, lat, lo, hi, opts);
  if (!f.tail().empty() && !g.tail().empty()) body += tail_inner(f.tail(), g.tail(), hi);
  return body;
}

inline double norm_squared(const LatticeFunction& f, QuadratureOptions opts = {}) {
  return inner(f, f, opts).real();
}
inline double norm(const LatticeFunction& f, QuadratureOptions opts = {}) {
  return std::sqrt(std::max(0.0, norm_squared(f, opts)));
}

/// Largest |f| over lattice points and a uniform sample of [start, end].
inline double sup_norm(const LatticeFunction& f, int samples = 400) {
  double m = 0.0;
  for (double x : f.lattice()) m = std::max(m, std::abs(f(x)));
  const double a = f.start(), b = f.end();
  for (int i = 0; i <= samples; ++i) m = std::max(m, std::abs(f(a + (b - a) * i / samples)));
  return m;
}

/// A twice differentiable function on [0, inf) with access to f, f', f''.
/// Represents elements of operator domains; the body is evaluated on
/// [0, lattice.back()] and the exponential tail beyond.
class DomainFunction {
 public:
  using JetFn = std::function<Jet(double)>;

  DomainFunction() : lattice_{0.0, 1.0}, body_([](double) { return Jet{}; }) {}
  DomainFunction(std::vector<double> lattice, JetFn body, ExpTail tail)
      : lattice_(std::move(lattice)), body_(std::move(body)), tail_(std::move(tail)) {
    if (lattice_.size() < 2 || lattice_.front() != 0.0 ||
        !std::is_sorted(lattice_.begin(), lattice_.end())) {
      throw InvalidInput("domain function lattice must be sorted and start at 0");
    }
    if (!tail_.empty() && tail_.origin() != lattice_.back()) tail_ = tail_.rebased(lattice_.back());
  }

  const std::vector<double>& lattice() const noexcept { return lattice_; }
  double body_end() const noexcept { return lattice_.back(); }
  const ExpTail& tail() const noexcept { return tail_; }

  Jet jet(double x) const {
    if (x > lattice_.back()) return tail_.jet(x);
    return body_(x);
  }
  cplx value(double x) const { return jet(x).value; }
  cplx operator()(double x) const { return value(x); }
  cplx origin_value() const { return body_(0.0).value; }
  cplx origin_derivative() const { return body_(0.0).first; }

  LatticeFunction values() const {
    auto self = *this;
    return {lattice_, [self](double x) { return self.body_(x).value; }, tail_};
  }
  LatticeFunction derivatives() const {
    auto self = *this;
    return {lattice_, [self](double x) { return self.body_(x).first; },
            tail_.transformed([](cplx r) { return r; })};
  }
  LatticeFunction second_derivatives() const {
    auto self = *this;
    return {lattice_, [self](double x) { return self.body_(x).second; },
            tail_.transformed([](cplx r) { return r * r; })};
  }

  DomainFunction scaled(cplx c) const {
    auto b = body_;
    return {lattice_,
            [b, c](double x) {
              Jet j = b(x);
              return Jet{c * j.value, c * j.first, c * j.second};
            },
            tail_.scaled(c)};
  }

  friend DomainFunction operator+(const DomainFunction& f, const DomainFunction& g) {
    auto lat = merge_lattices({f.lattice_, g.lattice_});
    return {std::move(lat),
            [f, g](double x) {
              Jet a = f.jet(x), b = g.jet(x);
              return Jet{a.value + b.value, a.first + b.first, a.second + b.second};
            },
            f.tail_ + g.tail_};
  }
  friend DomainFunction operator-(const DomainFunction& f, const DomainFunction& g) {
    return f + g.scaled(-1.0);
  }

 private:
  std::vector<double> lattice_;
  JetFn body_;
  ExpTail tail_;
};

}  // namespace dissipext
