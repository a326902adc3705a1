#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "dissipext/errors.hpp"
#include "dissipext/functions.hpp"
#include "dissipext/potential.hpp"

namespace dissipext {

struct CauchyData {
  double x = 0.0;
  cplx value{};
  cplx derivative{};
};

/// sinh(z)/z, entire; series below |z| < 1e-6 where the quotient cancels.
template <typename Real>
std::complex<Real> sinhc(std::complex<Real> z) {
  if (std::abs(z) < Real(1e-6)) {
    const auto z2 = z * z;
    return Real(1) + z2 / Real(6) * (Real(1) + z2 / Real(20));
  }
  return std::sinh(z) / z;
}

/// Exact propagator of (u, u') across a constant piece of signed length l
/// for -u'' + q u = lambda u; `shift` is q - lambda = omega^2.
template <typename Real>
struct TransferMatrix {
  std::complex<Real> a11, a12, a21, a22;

  static TransferMatrix across(std::complex<Real> shift, Real length) {
    const auto omega = std::sqrt(shift);
    const auto z = omega * length;
    const auto ch = std::cosh(z);
    const auto s = sinhc(z) * length;  // sinh(omega l) / omega
    return {ch, s, shift * s, ch};
  }

  std::complex<Real> determinant() const { return a11 * a22 - a12 * a21; }

  CauchyData apply(const CauchyData& c, double x_new) const {
    return {x_new, a11 * c.value + a12 * c.derivative, a21 * c.value + a22 * c.derivative};
  }
};

/// Cauchy data after a constant piece of length `length` (negative runs
/// backward): with omega = sqrt(q - lambda), the matrix
/// [[cosh(omega l), sinh(omega l)/omega], [omega sinh(omega l), cosh(omega l)]].
inline CauchyData propagate_piece(cplx q, cplx lambda, double length, const CauchyData& start) {
  return TransferMatrix<double>::across(q - lambda, length).apply(start, start.x + length);
}

/// Dormand-Prince 5(4) for the first-order system y = (u, u'),
/// y' = (u', (q(x) - lambda) u). `shift(x)` returns q(x) - lambda.
template <typename Shift>
CauchyData dopri5(Shift&& shift, const CauchyData& start, double x_end, double rtol,
                  std::size_t max_steps = 2'000'000) {
  using State = std::array<cplx, 2>;
  auto rhs = [&](double x, const State& y) { return State{y[1], shift(x) * y[0]}; };
  const double span = x_end - start.x;
  if (span == 0.0) return start;
  const double dir = span > 0 ? 1.0 : -1.0;
  double x = start.x;
  State y{start.value, start.derivative};
  double h = dir * std::min(std::abs(span), 0.01);
  const double atol = 1e-300;

  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  auto axpy = [](const State& y0, std::initializer_list<std::pair<double, const State*>> terms, double hh) {
    State out = y0;
    for (const auto& [c, k] : terms) {
      out[0] += hh * c * (*k)[0];
      out[1] += hh * c * (*k)[1];
    }
    return out;
  };

  State k1 = rhs(x, y);
  for (std::size_t step = 0; step < max_steps; ++step) {
    if ((x_end - x) * dir <= 0.0) break;
    const bool last = (x + h - x_end) * dir >= 0.0 || std::abs(x_end - x - h) <= 1e-12 * std::abs(span);
    if (last) h = x_end - x;
    const State k2 = rhs(x + c2 * h, axpy(y, {{a21, &k1}}, h));
    const State k3 = rhs(x + c3 * h, axpy(y, {{a31, &k1}, {a32, &k2}}, h));
    const State k4 = rhs(x + c4 * h, axpy(y, {{a41, &k1}, {a42, &k2}, {a43, &k3}}, h));
    const State k5 = rhs(x + c5 * h, axpy(y, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}, h));
    const State k6 = rhs(x + h, axpy(y, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}, h));
    const State yn = axpy(y, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}}, h);
    const State k7 = rhs(x + h, yn);
    double err = 0.0;
    const double scale =
        atol + rtol * std::max({std::abs(y[0]), std::abs(y[1]), std::abs(yn[0]), std::abs(yn[1])});
    for (int i = 0; i < 2; ++i) {
      const cplx e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      err = std::max(err, std::abs(e) / scale);
    }
    if (!std::isfinite(err)) throw IntegrationFailure("adaptive integrator produced non-finite values");
    if (err <= 1.0) {
      x = last ? x_end : x + h;
      y = yn;
      k1 = k7;
    }
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= err <= 1.0 ? factor : std::min(1.0, factor);
    if (x != x_end && std::abs(h) < 1e-14 * std::abs(span)) {
      throw IntegrationFailure("adaptive integrator step size underflow near x = " + std::to_string(x));
    }
  }
  if ((x_end - x) * dir > 0.0) throw IntegrationFailure("adaptive integrator exceeded max steps");
  return {x_end, y[0], y[1]};
}

enum class IvpMethod { Auto, TransferMatrix, Adaptive };

struct IvpOptions {
  IvpMethod method = IvpMethod::Auto;
  double rtol = 1e-10;
  double max_node_spacing = 1.0 / 16.0;
};

inline std::vector<double> uniform_grid(double a, double b, std::size_t points) {
  std::vector<double> g;
  if (points < 2) return {a, b};
  g.reserve(points);
  for (std::size_t i = 0; i < points; ++i) {
    g.push_back(i + 1 == points ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  return g;
}

namespace detail {

/// Propagate Cauchy data from start to x_end, stopping at every lattice
/// point so each leg has a smooth (step: constant) coefficient.
inline CauchyData propagate_across(const Potential& v, Coefficient coef, cplx lambda,
                                   const CauchyData& start, double x_end, const IvpOptions& opts) {
  if (x_end == start.x) return start;
  const double lo = std::min(start.x, x_end), hi = std::max(start.x, x_end);
  std::vector<double> bp(v.breakpoints());
  auto stops = clip_lattice(bp, lo, hi);
  if (x_end < start.x) std::reverse(stops.begin(), stops.end());
  CauchyData c = start;
  const bool exact = v.kind() == PotentialKind::Step && opts.method != IvpMethod::Adaptive;
  for (std::size_t i = 0; i + 1 < stops.size(); ++i) {
    const double a = stops[i], b = stops[i + 1];
    if (exact) {
      const cplx q = v.coefficient(0.5 * (a + b), coef);
      c = TransferMatrix<double>::across(q - lambda, b - a).apply(c, b);
    } else {
      const double mid = 0.5 * (a + b);
      const bool step = v.kind() == PotentialKind::Step;
      auto shift = [&](double x) {
        // constant on step pieces; evaluate at the midpoint so that the
        // endpoint stages never see the neighbouring piece
        return v.coefficient(step ? mid : x, coef) - lambda;
      };
      c = dopri5(shift, CauchyData{a, c.value, c.derivative}, b, opts.rtol);
    }
    c.x = b;
  }
  return c;
}

}  // namespace detail

/// Solution of -u'' + q u = lambda u, q in {V, V_R, conj V}, tabulated at
/// nodes (breakpoints, requested grid, fill points). Evaluation between nodes
/// re-propagates from the upstream node, i.e. in the direction the solution
/// was integrated, which keeps decaying solutions stable.
class SolutionTrace {
 public:
  SolutionTrace(Potential v, Coefficient coef, cplx lambda, std::vector<CauchyData> nodes,
                std::vector<double> grid, bool backward, IvpOptions opts)
      : v_(std::move(v)), coef_(coef), lambda_(lambda), nodes_(std::move(nodes)),
        grid_(std::move(grid)), backward_(backward), opts_(opts) {}

  cplx lambda() const noexcept { return lambda_; }
  Coefficient coefficient() const noexcept { return coef_; }
  const Potential& potential() const noexcept { return v_; }
  const std::vector<CauchyData>& nodes() const noexcept { return nodes_; }
  bool backward() const noexcept { return backward_; }
  double lower() const { return nodes_.front().x; }
  double upper() const { return nodes_.back().x; }

  /// The requested output grid with (u, u') at each point.
  const std::vector<double>& grid() const noexcept { return grid_; }
  std::vector<CauchyData> samples() const {
    std::vector<CauchyData> out;
    out.reserve(grid_.size());
    for (double x : grid_) out.push_back(at(x));
    return out;
  }

  /// Declare u(x) = u(origin) exp(rate (x - origin)) for x >= origin (valid
  /// when origin >= L and the Cauchy data at origin match that exponential).
  void set_tail(double origin, cplx rate) {
    tail_origin_ = origin;
    tail_rate_ = rate;
  }
  std::optional<cplx> tail_rate() const { return tail_rate_; }
  double tail_origin() const { return tail_origin_; }

  bool covers(double x) const {
    return (x >= lower() && x <= upper()) || (tail_rate_ && x >= tail_origin_);
  }

  CauchyData at(double x) const {
    if (tail_rate_ && x >= tail_origin_) {
      const CauchyData o = node_at(tail_origin_);
      const cplx e = o.value * std::exp(*tail_rate_ * (x - tail_origin_));
      return {x, e, *tail_rate_ * e};
    }
    return node_at(x);
  }

  cplx shift(double x) const { return v_.coefficient(x, coef_) - lambda_; }

  /// (u, u', u'') with u'' = (q(x) - lambda) u from the equation.
  Jet jet(double x) const {
    const CauchyData c = at(x);
    return {c.value, c.derivative, shift(x) * c.value};
  }

  SolutionTrace scaled(cplx c) const {
    SolutionTrace out = *this;
    for (auto& n : out.nodes_) {
      n.value *= c;
      n.derivative *= c;
    }
    return out;
  }

  /// Rescale so that u(0) equals `target` exactly.
  SolutionTrace normalized_at_origin(cplx target) const {
    if (lower() != 0.0) throw PreconditionError("trace does not start at x = 0");
    SolutionTrace out = scaled(target / nodes_.front().value);
    out.nodes_.front().value = target;
    return out;
  }

  /// View as an element of L^2(0, inf); needs coverage of [0, tail origin].
  DomainFunction as_domain_function() const {
    if (!tail_rate_) throw PreconditionError("trace has no L2 tail");
    if (lower() != 0.0 || upper() < tail_origin_) throw PreconditionError("trace does not cover [0, tail]");
    std::vector<double> lat{0.0, tail_origin_};
    for (double b : v_.breakpoints()) {
      if (b > 0.0 && b < tail_origin_) lat.push_back(b);
    }
    lat = merge_lattices({lat});
    auto self = *this;
    const CauchyData o = node_at(tail_origin_);
    return {std::move(lat), [self](double x) { return self.jet(x); },
            ExpTail(tail_origin_, {{o.value, *tail_rate_}})};
  }

 private:
  CauchyData node_at(double x) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), x,
                               [](const CauchyData& c, double v) { return c.x < v; });
    if (it != nodes_.end() && it->x == x) return *it;
    std::size_t from;
    if (it == nodes_.begin()) {
      from = 0;
    } else if (it == nodes_.end()) {
      from = nodes_.size() - 1;
    } else {
      const auto right = static_cast<std::size_t>(it - nodes_.begin());
      from = backward_ ? right : right - 1;
    }
    return detail::propagate_across(v_, coef_, lambda_, nodes_[from], x, opts_);
  }

  Potential v_;
  Coefficient coef_;
  cplx lambda_;
  std::vector<CauchyData> nodes_;
  std::vector<double> grid_;
  bool backward_;
  IvpOptions opts_;
  std::optional<cplx> tail_rate_;
  double tail_origin_ = 0.0;
};

/// Integrate -u'' + q u = lambda u from `start` to x_end (either direction).
/// Step potentials chain exact transfer matrices; sampled potentials (or
/// IvpMethod::Adaptive) use Dormand-Prince between lattice points.
inline SolutionTrace solve_ivp(const Potential& v, Coefficient coef, cplx lambda, const CauchyData& start,
                               double x_end, std::span<const double> grid = {}, IvpOptions opts = {}) {
  if (!std::isfinite(start.value.real()) || !std::isfinite(start.value.imag()) ||
      !std::isfinite(start.derivative.real()) || !std::isfinite(start.derivative.imag())) {
    throw InvalidInput("non-finite Cauchy data");
  }
  const double lo = std::min(start.x, x_end), hi = std::max(start.x, x_end);
  std::vector<double> pts{lo, hi};
  for (double b : v.breakpoints()) {
    if (b > lo && b < hi) pts.push_back(b);
  }
  std::vector<double> out_grid;
  for (double g : grid) {
    if (g >= lo && g <= hi) {
      pts.push_back(g);
      out_grid.push_back(g);
    }
  }
  std::sort(out_grid.begin(), out_grid.end());
  if (hi > lo) {
    const auto fill = static_cast<std::size_t>(std::ceil((hi - lo) / opts.max_node_spacing));
    for (std::size_t i = 1; i < fill; ++i) pts.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(fill));
  }
  pts = merge_lattices({pts});
  const bool backward = x_end < start.x;
  if (backward) std::reverse(pts.begin(), pts.end());

  std::vector<CauchyData> nodes;
  nodes.reserve(pts.size());
  CauchyData c = start;
  nodes.push_back(c);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    c = detail::propagate_across(v, coef, lambda, c, pts[i], opts);
    c.x = pts[i];
    nodes.push_back(c);
  }
  if (backward) std::reverse(nodes.begin(), nodes.end());
  return SolutionTrace(v, coef, lambda, std::move(nodes), std::move(out_grid), backward, opts);
}

/// W(u, v)(x) = u(x) v'(x) - u'(x) v(x).
inline cplx wronskian(const SolutionTrace& u, const SolutionTrace& v, double x) {
  if (u.lambda() != v.lambda() || u.coefficient() != v.coefficient()) {
    throw PreconditionError("wronskian: traces solve different equations");
  }
  if (!u.covers(x) || !v.covers(x)) throw PreconditionError("wronskian: x outside the traces");
  const CauchyData a = u.at(x), b = v.at(x);
  return a.value * b.derivative - a.derivative * b.value;
}

/// Points strictly inside each lattice piece of [a, b], at least 2h away
/// from the piece ends, for difference stencils of half-width 2h.
inline std::vector<double> interior_samples(std::span<const double> lattice, double a, double b,
                                            std::size_t per_piece, double h) {
  const auto pieces = clip_lattice(lattice, a, b);
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < pieces.size(); ++i) {
    const double pa = pieces[i], pb = pieces[i + 1];
    if (pb - pa <= 5 * h) continue;
    for (std::size_t s = 0; s < per_piece; ++s) {
      out.push_back(pa + 2 * h + (pb - pa - 4 * h) * (static_cast<double>(s) + 0.5) / static_cast<double>(per_piece));
    }
  }
  return out;
}

/// Fourth-order central difference of a first derivative.
template <typename F>
cplx difference_of_derivative(F&& deriv, double x, double h) {
  return (deriv(x - 2 * h) - 8.0 * deriv(x - h) + 8.0 * deriv(x + h) - deriv(x + 2 * h)) / (12.0 * h);
}

/// Relative residual of -u'' + (q - lambda) u with u'' from a fourth-order
/// difference of u' (sampled strictly inside lattice pieces). Independent of
/// how at() computes the solution; used as a certificate.
inline double differential_residual(const SolutionTrace& t, double a, double b, std::size_t samples_per_piece = 24) {
  const double h = 1e-3;
  const auto& bp = t.potential().breakpoints();
  double worst = 0.0, scale = 0.0;
  for (double x : interior_samples(bp, a, b, samples_per_piece, h)) {
    const cplx d2 = difference_of_derivative([&](double y) { return t.at(y).derivative; }, x, h);
    const CauchyData c = t.at(x);
    const cplx sh = t.shift(x);
    worst = std::max(worst, std::abs(-d2 + sh * c.value));
    scale = std::max(scale, std::abs(c.value) * (1.0 + std::abs(sh)));
  }
  return scale > 0.0 ? worst / scale : worst;
}

}  // namespace dissipext
