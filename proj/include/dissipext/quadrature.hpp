#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <span>
#include <utility>
#include <vector>

namespace dissipext {

using cplx = std::complex<double>;

/// Gauss-Legendre rule on [-1, 1], nodes found by Newton iteration on P_N.
template <typename Real, std::size_t N>
struct GaussLegendre {
  std::array<Real, N> nodes{};
  std::array<Real, N> weights{};

  GaussLegendre() {
    for (std::size_t i = 0; i < N; ++i) {
      Real x = std::cos(std::numbers::pi_v<Real> * (Real(i) + Real(0.75)) / (Real(N) + Real(0.5)));
      Real dp = 0;
      for (int it = 0; it < 100; ++it) {
        Real p0 = 1, p1 = x;
        for (std::size_t k = 2; k <= N; ++k) {
          Real pk = ((Real(2 * k) - 1) * x * p1 - Real(k - 1) * p0) / Real(k);
          p0 = p1;
          p1 = pk;
        }
        dp = Real(N) * (x * p1 - p0) / (x * x - 1);
        Real dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < std::numeric_limits<Real>::epsilon()) break;
      }
      nodes[N - 1 - i] = x;
      weights[N - 1 - i] = 2 / ((1 - x * x) * dp * dp);
    }
  }

  static const GaussLegendre& instance() {
    static const GaussLegendre rule;
    return rule;
  }

  /// Integrate f over [a, b] with a single panel.
  template <typename F>
  auto panel(F&& f, Real a, Real b) const {
    const Real mid = (a + b) / 2, half = (b - a) / 2;
    decltype(f(a)) sum{};
    for (std::size_t i = 0; i < N; ++i) sum += weights[i] * f(mid + half * nodes[i]);
    return sum * half;
  }
};

using GaussLegendre7 = GaussLegendre<double, 7>;

struct QuadratureOptions {
  double max_panel = 1.0 / 16.0;
};

/// Sorted union of breakpoint lists with near-duplicates merged.
inline std::vector<double> merge_lattices(std::initializer_list<std::span<const double>> lists) {
  std::vector<double> out;
  for (auto l : lists) out.insert(out.end(), l.begin(), l.end());
  std::sort(out.begin(), out.end());
  std::vector<double> merged;
  for (double x : out) {
    if (merged.empty() || x - merged.back() > 1e-14 * std::max(1.0, std::abs(x))) merged.push_back(x);
  }
  return merged;
}

/// Breakpoints of `lattice` strictly inside (a, b), bracketed by a and b.
inline std::vector<double> clip_lattice(std::span<const double> lattice, double a, double b) {
  std::vector<double> pts{a};
  for (double x : lattice) {
    if (x > a && x < b) pts.push_back(x);
  }
  pts.push_back(b);
  return merge_lattices({pts});
}

/// Composite Gauss-Legendre (order 7) over [a, b]; every lattice piece is
/// split into panels no longer than opts.max_panel and integrated separately,
/// so integrands may jump at lattice points.
template <typename F>
auto integrate(F&& f, std::span<const double> lattice, double a, double b,
               QuadratureOptions opts = {}) {
  using R = decltype(f(a));
  if (!(b > a)) return R{};
  const auto& rule = GaussLegendre7::instance();
  const auto pts = clip_lattice(lattice, a, b);
  R total{};
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double lo = pts[i], hi = pts[i + 1];
    const auto panels = static_cast<std::size_t>(std::max(1.0, std::ceil((hi - lo) / opts.max_panel)));
    const double w = (hi - lo) / static_cast<double>(panels);
    for (std::size_t p = 0; p < panels; ++p) {
      const double pa = lo + w * static_cast<double>(p);
      const double pb = (p + 1 == panels) ? hi : pa + w;
      total += rule.panel(f, pa, pb);
    }
  }
  return total;
}

/// Running integral of f from a to each point of `targets` (sorted, >= a).
template <typename F>
std::vector<decltype(std::declval<F>()(0.0))> cumulative_integral(
    F&& f, std::span<const double> lattice, double a, std::span<const double> targets,
    QuadratureOptions opts = {}) {
  using R = decltype(f(a));
  std::vector<R> out;
  out.reserve(targets.size());
  R acc{};
  double from = a;
  for (double t : targets) {
    if (t > from) {
      acc += integrate(f, lattice, from, t, opts);
      from = t;
    }
    out.push_back(acc);
  }
  return out;
}

}  // namespace dissipext
