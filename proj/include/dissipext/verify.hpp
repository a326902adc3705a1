#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dissipext/battery.hpp"
#include "dissipext/chi_example.hpp"
#include "dissipext/classify.hpp"
#include "dissipext/defect.hpp"
#include "dissipext/eigen_extension.hpp"
#include "dissipext/green.hpp"

namespace dissipext::verify {

struct Metric {
  std::string label;
  double value = 0.0;
  double bound = 0.0;
  bool ok() const { return value <= bound; }
};

struct Check {
  int id = 0;
  std::string name;
  std::vector<Metric> metrics;
  std::vector<std::string> failures;   // boolean conditions that did not hold

  bool passed() const {
    return failures.empty() && std::all_of(metrics.begin(), metrics.end(), [](const Metric& m) { return m.ok(); });
  }
  void record(const std::string& label, double value, double bound) {
    for (auto& m : metrics) {
      if (m.label == label) {
        m.value = std::max(m.value, value);
        return;
      }
    }
    metrics.push_back({label, value, bound});
  }
  void require(bool cond, const std::string& what) {
    if (!cond) failures.push_back(what);
  }
  /// max over metrics of value / bound
  double worst_ratio() const {
    double w = 0.0;
    for (const auto& m : metrics) w = std::max(w, m.bound > 0.0 ? m.value / m.bound : m.value);
    return w;
  }
};

struct Settings {
  std::uint64_t seed = 42;
  double scale = 1.0;   // multiplies every bound below
};

namespace detail {

inline const cplx I(0.0, 1.0);

/// Chi well plus 20 seeded random step potentials, each with a lambda < 0.
inline std::vector<std::pair<Potential, double>> construction_battery(std::uint64_t seed) {
  std::vector<std::pair<Potential, double>> out;
  for (double xi : {0.5, 1.0, 2.0}) out.emplace_back(chi::potential(), -xi * xi);
  battery::Rng rng(seed);
  for (int i = 0; i < 20; ++i) {
    auto v = battery::random_step_potential(rng);
    const double lambda = -battery::uniform(rng, 0.1, 4.0);
    out.emplace_back(std::move(v), lambda);
  }
  return out;
}

inline Potential green_potential() {
  return Potential::step({0.0, 0.6, 1.4, 2.5}, {cplx(1.0, 0.5), cplx(-1.5, 0.0), cplx(0.7, 2.0)});
}

inline Potential defect_potential() {
  return Potential::step({0.0, 0.5, 1.2, 2.0}, {cplx(1.0, 0.3), cplx(-2.0, 0.0), cplx(0.5, 1.0)});
}

/// fourth-order one-sided derivative from u at x, x + dir h, ..., x + 4 dir h
inline cplx one_sided(const std::vector<CauchyData>& u, double h, double dir) {
  return -dir * (25.0 * u[0].value - 48.0 * u[1].value + 36.0 * u[2].value - 16.0 * u[3].value + 3.0 * u[4].value) /
         (12.0 * h);
}

template <class F>
void guarded(Check& c, F&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    c.failures.push_back(std::string("exception: ") + e.what());
  }
}

}  // namespace detail

inline Check chi_oracle(const Settings& s) {
  Check c{1, "chi oracle reproduction", {}, {}};
  detail::guarded(c, [&] {
    for (double xi : {0.5, 1.0, 2.0}) {
      const chi::Example e(xi);
      const auto r = construct_eigen_extension(chi::potential(), -xi * xi);
      c.record("h relative", std::abs(r.h - e.h()) / std::abs(e.h()), 1e-8 * s.scale);
      double sup = 0.0;
      for (double x : uniform_grid(0.0, 1.0 + 5.0 / xi, 4001)) sup = std::max(sup, std::abs(r.eta(x) - e.eta(x)));
      c.record("eta sup", sup, 1e-8 * s.scale);
      c.record("k L2", norm(r.k - e.k_function()), 1e-8 * s.scale);
    }
  });
  return c;
}

inline Check criticality(const Settings& s) {
  Check c{2, "criticality identity", {}, {}};
  detail::guarded(c, [&] {
    for (const auto& [v, lambda] : detail::construction_battery(s.seed)) {
      const auto r = construct_eigen_extension(v, lambda);
      c.record("|slack|/(1+|h|)", std::abs(r.slack) / (1.0 + std::abs(r.h)), 1e-9 * s.scale);
    }
  });
  return c;
}

inline Check eigen_certificate(const Settings& s) {
  Check c{3, "eigen certificate", {}, {}};
  detail::guarded(c, [&] {
    for (const auto& [v, lambda] : detail::construction_battery(s.seed)) {
      const auto r = construct_eigen_extension(v, lambda);
      c.record("A eta residual", r.eigen_residual, 1e-8 * s.scale);
      c.record("A* eta residual", r.adjoint_residual, 1e-8 * s.scale);
      c.require(r.kv.cond_i && r.kv.cond_ii, "Kv conditions at lambda = " + std::to_string(lambda));
      c.record("|z - lambda|/(1+|lambda|)", std::abs(r.kv.z - lambda) / (1.0 + std::abs(lambda)), 1e-8 * s.scale);
      c.record("|Im z|", std::abs(r.kv.z.imag()), 1e-9 * s.scale);
    }
  });
  return c;
}

inline Check boundary_flux(const Settings& s) {
  Check c{4, "boundary flux identity", {}, {}};
  detail::guarded(c, [&] {
    for (const auto& [v, lambda] : detail::construction_battery(s.seed)) {
      const auto g = solve_adjoint_eigenfunction(v, lambda);
      c.record("flux relative", check_boundary_flux(g, lambda).residual, 1e-9 * s.scale);
    }
    const auto g = solve_adjoint_eigenfunction(Potential::zero(), -1.0);
    auto gs = g.scaled(1.0 / g.at(0.0).value);
    gs.set_tail(g.tail_origin(), *g.tail_rate());
    const auto r = check_boundary_flux(gs, -1.0);
    c.record("free lhs + 1", std::abs(r.lhs + 1.0), 1e-12 * s.scale);
    c.record("free rhs + 1", std::abs(r.rhs + 1.0), 1e-12 * s.scale);
  });
  return c;
}

inline Check quadratic_form(const Settings& s) {
  Check c{5, "quadratic form decomposition", {}, {}};
  detail::guarded(c, [&] {
    battery::Rng rng(s.seed);
    int count = 0;
    for (int pv = 0; pv < 5; ++pv) {
      const auto v = battery::random_step_potential(rng);
      for (int pp = 0; pp < 5; ++pp) {
        const auto p = battery::random_admissible(rng, v, pp == 0 ? 0.0 : battery::uniform(rng, 0.0, 1.0));
        for (int i = 0; i < 8; ++i) {
          const auto f = battery::random_domain_function(rng, p.h(), v.support_end());
          const auto q = form_imaginary(v, p, f);
          c.record("|direct - decomposed|/scale", std::abs(q.direct - q.decomposed) / q.scale, 1e-10 * s.scale);
          const double shortfall = p.slack() * std::norm(f.origin_value()) - q.direct;
          c.record("(slack|f0|^2 - direct)/scale", std::max(0.0, shortfall / q.scale), 1e-10 * s.scale);
          ++count;
        }
      }
    }
    c.require(count == 200, "200 functions");
  });
  return c;
}

inline Check defect_suite(const Settings& s) {
  Check c{6, "defect solution suite", {}, {}};
  detail::guarded(c, [&] {
    using detail::I;
    const auto v = detail::defect_potential();
    const std::vector<cplx> lattice{I, -I, 2.0 * I, -2.0 * I, cplx(1, 1), cplx(1, -1), cplx(-1, 0.5), cplx(-1, -0.5)};
    std::vector<DefectSolution> ds;
    for (cplx l : lattice) {
      ds.push_back(weyl_solution(v, l));
      c.record("equation residual", differential_residual(ds.back().trace, 0.0, v.support_end()), 1e-9 * s.scale);
    }
    int pairs = 0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      for (std::size_t j : {(i + 1) % ds.size(), (i + 3) % ds.size()}) {
        const auto r = verify_resolvent_identity(ds[i], ds[j]);
        c.record("resolvent residual", r.equation_residual, 1e-8 * s.scale);
        c.require(r.origin_ok, "psi(0) = 0");
        c.record("distance / bound", r.distance / r.bound, 1.0 + 1e-6 * s.scale);
        ++pairs;
      }
    }
    c.require(pairs == 16, "16 pairs");
  });
  return c;
}

inline Check green_suite(const Settings& s) {
  Check c{7, "Green's function suite", {}, {}};
  detail::guarded(c, [&] {
    const auto v = detail::green_potential();
    battery::Rng rng(s.seed);
    using battery::uniform;
    const double fd = 1e-3;
    for (int trial = 0; trial < 10; ++trial) {
      const cplx h(uniform(rng, -1, 1), 0.0);
      const double x0 = uniform(rng, 0.8, 2.4);
      const cplx lambda(uniform(rng, -2, 2), -uniform(rng, 0.3, 2.0));
      const auto pair = interval_green_pair(v, BoundaryParameter::finite(h), x0, lambda);
      const auto g = battery::random_rhs(rng, 0.0, x0);
      c.record("interval residual", green_residual(pair, g, 0.0, x0), 1e-6 * s.scale);
      std::vector<double> xs;
      for (int i = 0; i < 5; ++i) xs.push_back(x0 - i * fd);
      const auto u = apply_green(pair, g, xs);
      const cplx flux = green_flux(pair, g);
      c.record("interval flux", std::abs(flux - detail::one_sided(u, fd, -1.0)) / std::max(1.0, std::abs(flux)),
               1e-8 * s.scale);
    }
    for (int trial = 0; trial < 10; ++trial) {
      const double x0 = trial % 2 == 0 ? 0.0 : uniform(rng, 0.3, 3.0);
      const cplx lambda(uniform(rng, -2, 2), -uniform(rng, 0.3, 2.0));
      const auto pair = halfline_green_pair(v, x0, lambda);
      const auto g = battery::random_rhs(rng, x0, x0 + uniform(rng, 1.0, 3.0));
      c.record("half-line residual", green_residual(pair, g, x0, g.end() + 2.0), 1e-6 * s.scale);
      std::vector<double> xs;
      for (int i = 0; i < 5; ++i) xs.push_back(x0 + i * fd);
      const auto u = apply_green(pair, g, xs);
      const cplx flux = green_flux(pair, g);
      c.record("half-line flux", std::abs(flux - detail::one_sided(u, fd, 1.0)) / std::max(1.0, std::abs(flux)),
               1e-8 * s.scale);
    }
  });
  return c;
}

inline Check branch_invariance(const Settings& s) {
  Check c{8, "branch invariance", {}, {}};
  detail::guarded(c, [&] {
    for (double xi : {0.5, 1.0, 2.0}) {
      const chi::Example a(xi), b(xi, chi::Branch::Negated);
      c.record("h", std::abs(a.h() - b.h()), 1e-13 * s.scale);
      for (double x : uniform_grid(0.0, 1.0 + 5.0 / xi, 401)) {
        c.record("eta", std::abs(a.eta(x) - b.eta(x)), 1e-13 * s.scale);
        c.record("k", std::abs(a.k(x) - b.k(x)), 1e-13 * s.scale);
      }
      const auto [sp, sm] = chi::sigma_pm(xi);
      c.record("sigma+ sigma- - i", std::abs(sp * sm - detail::I), 1e-14 * s.scale);
    }
  });
  return c;
}

inline Check classification(const Settings& s) {
  Check c{9, "classification trichotomy", {}, {}};
  detail::guarded(c, [&] {
    const Tolerances tol = Tolerances{}.scaled(s.scale);
    const auto v = chi::potential();
    const auto r1 = classify(v, ExtensionParams::with_zero_k(v, BoundaryParameter::finite(detail::I)), {}, tol);
    c.require(r1.regime == Regime::CnsNonCritical, "slack 1 -> CnsNonCritical");
    const auto r2 = classify(v, ExtensionParams::with_zero_k(v, BoundaryParameter::dirichlet()), {}, tol);
    c.require(r2.regime == Regime::CnsCriticalSelfadjointBC, "Dirichlet -> CnsCriticalSelfadjointBC");
    const chi::Example e(1.0);
    const ExtensionParams p(v, BoundaryParameter::finite(e.h()), e.k_function());
    const auto r3 = classify(v, p, {}, tol);
    c.require(r3.regime == Regime::CriticalDissipativeReducing, "chi critical -> CriticalDissipativeReducing");
    if (r3.eigenvalue) c.record("|eigenvalue + 1|", std::abs(*r3.eigenvalue + 1.0), 1e-8 * s.scale);
    for (cplx d : {cplx(1e-3, 0.0), cplx(0.0, 1e-3), cplx(-1e-3, 0.0), cplx(0.0, -1e-3)}) {
      const ExtensionParams q(v, BoundaryParameter::finite(e.h() + d), e.k_function());
      c.require(classify(v, q, {}, tol).regime != Regime::CriticalDissipativeReducing, "perturbed h demoted");
      c.require(classify(v, q, e.eta_function(), tol).regime != Regime::CriticalDissipativeReducing,
                "perturbed h demoted with eta given");
    }
  });
  return c;
}

inline std::vector<Check> run_all(const Settings& s = {}) {
  const std::vector<std::function<Check(const Settings&)>> suite{
      chi_oracle, criticality, eigen_certificate, boundary_flux, quadratic_form,
      defect_suite, green_suite, branch_invariance, classification};
  std::vector<Check> out;
  for (const auto& f : suite) out.push_back(f(s));
  return out;
}

}  // namespace dissipext::verify
