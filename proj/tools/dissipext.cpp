#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "dissipext/chi_example.hpp"
#include "dissipext/classify.hpp"
#include "dissipext/defect.hpp"
#include "dissipext/eigen_extension.hpp"
#include "dissipext/green.hpp"
#include "dissipext/io.hpp"
#include "dissipext/verify.hpp"

using namespace dissipext;
using io::json;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kCertificateFailure = 2;

double tolerance_scale() {
  const char* env = std::getenv("DISSIPEXT_TOL_SCALE");
  if (env == nullptr || *env == '\0') return 1.0;
  const double s = io::parse_real(env, "DISSIPEXT_TOL_SCALE");
  if (!(s > 0.0)) throw InvalidInput("DISSIPEXT_TOL_SCALE must be positive");
  return s;
}

Potential potential_or_chi(const std::string& path) { return path.empty() ? chi::potential() : io::load_potential(path); }

/// Points on [a, b] plus the potential breakpoints inside, sorted.
std::vector<double> output_grid(const Potential& v, double a, double b, std::size_t points) {
  auto xs = uniform_grid(a, b, points);
  for (double x : v.breakpoints()) {
    if (x > a && x < b) xs.push_back(x);
  }
  return merge_lattices({xs});
}

void write_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << j.dump(2) << '\n';
}

void emit(const std::string& path, const json& j) {
  if (path.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    write_json(path, j);
  }
}

std::vector<io::TraceRow> jet_rows(const DomainFunction& f, std::span<const double> xs) {
  std::vector<io::TraceRow> rows;
  for (double x : xs) {
    const Jet j = f.jet(x);
    rows.push_back({x, j.value, j.first});
  }
  return rows;
}

/// k = V_I eta sampled per potential piece, both one-sided limits at
/// interior breakpoints; k' from V_I' eta + V_I eta'.
std::vector<io::TraceRow> k_rows(const Potential& v, const DomainFunction& eta, std::size_t points) {
  const auto& bp = v.breakpoints();
  const double L = v.support_end();
  std::vector<io::TraceRow> rows;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    const double a = bp[i], b = bp[i + 1];
    const auto n = std::max<std::size_t>(9, static_cast<std::size_t>(points * (b - a) / L));
    double via = 0.0, slope = 0.0;
    if (v.kind() == PotentialKind::Step) {
      via = v.values()[i].imag();
    } else {
      slope = (v.values()[i + 1].imag() - v.values()[i].imag()) / (b - a);
    }
    for (double x : uniform_grid(a, b, n)) {
      const double vi = v.kind() == PotentialKind::Step ? via : v.values()[i].imag() + slope * (x - a);
      const Jet j = eta.jet(x);
      rows.push_back({x, vi * j.value, slope * j.value + vi * j.first});
    }
  }
  return rows;
}

json kv_json(const KvReport& kv) {
  return {{"cond_i", kv.cond_i},
          {"cond_ii", kv.cond_ii},
          {"z", io::to_json(kv.z)},
          {"z_real", kv.z_real},
          {"eigen_residual", kv.eigen_residual},
          {"membership_residual", kv.membership_residual},
          {"passed", kv.passed()}};
}

json flux_json(const FluxReport& f) {
  return {{"lhs", io::to_json(f.lhs)},
          {"rhs", io::to_json(f.rhs)},
          {"residual", f.residual},
          {"agrees", f.agrees},
          {"imaginary_nonzero", f.imaginary_nonzero}};
}

json construction_json(const EigenExtensionResult& r) {
  return {{"lambda", r.lambda},
          {"h", io::to_json(r.h)},
          {"eta_origin", io::to_json(r.eta.origin_value())},
          {"k_weighted_norm_squared", r.params.weighted_k_norm_squared()},
          {"slack", r.slack},
          {"residuals",
           {{"absorption", r.absorption_residual},
            {"eigen", r.eigen_residual},
            {"adjoint", r.adjoint_residual},
            {"symmetric_identity", r.symmetric_identity}}},
          {"certificates",
           {{"absorption", r.absorption_ok},
            {"slack", r.slack_ok},
            {"eigen", r.eigen_ok},
            {"adjoint", r.adjoint_ok},
            {"flux", r.flux.agrees},
            {"kv", r.kv.passed()}}},
          {"flux", flux_json(r.flux)},
          {"kv", kv_json(r.kv)},
          {"passed", r.passed()}};
}

struct Options {
  std::string potential;
  std::string h;
  std::string k = "zero";
  std::string candidate;
  std::string lambda;
  std::string rhs;
  std::string kernel = "interval";
  std::string out;
  std::string prefix;
  double xi = 1.0;
  double x0 = 1.0;
  std::size_t points = 2000;
  std::uint64_t seed = 42;
};

int run_classify(const Options& o, const Tolerances& tol) {
  const Potential v = potential_or_chi(o.potential);
  const BoundaryParameter h = io::parse_boundary(o.h);
  const LatticeFunction k = io::load_grid_function(o.k);
  const ExtensionParams p(v, h, k, tol);
  std::optional<DomainFunction> candidate;
  if (!o.candidate.empty()) {
    candidate = io::sampled_domain_function(io::read_trace_csv(o.candidate), v.breakpoints()).function;
  }
  const auto r = classify(v, p, candidate, tol);
  json j{{"regime", to_string(r.regime)},
         {"slack", r.slack},
         {"tolerance", r.tolerance},
         {"im_h", h.is_dirichlet() ? json(nullptr) : json(h.value().imag())},
         {"dirichlet", h.is_dirichlet()},
         {"k_weighted_norm_squared", p.weighted_k_norm_squared()},
         {"vi_vanishes", r.vi_vanishes},
         {"candidate_checked", r.candidate_checked},
         {"reconstructed", r.reconstructed},
         {"kv", r.kv ? kv_json(*r.kv) : json(nullptr)},
         {"eigenvalue", r.eigenvalue ? json(*r.eigenvalue) : json(nullptr)},
         {"note", r.note}};
  emit(o.out, j);
  return kOk;
}

int run_construct(const Options& o, const Tolerances& tol) {
  const Potential v = potential_or_chi(o.potential);
  const double lambda = io::parse_real(o.lambda, "lambda");
  if (!(lambda < 0.0)) throw InvalidInput("construct: --lambda must be negative");
  const double xi = std::sqrt(-lambda);
  const auto xs = output_grid(v, 0.0, v.support_end() + 5.0 / xi, o.points);
  const auto r = construct_eigen_extension(v, lambda, xs, tol);
  const std::string p = o.prefix.empty() ? "construct" : o.prefix;
  io::write_trace_csv(p + ".eta.csv", io::header_line(lambda, "ConjugateV"), jet_rows(r.eta, xs));
  io::write_plot_csv(p + ".eta.plot.csv", jet_rows(r.eta, xs));
  io::write_trace_csv(p + ".k.csv", io::header_line(lambda, "k = V_I eta"), k_rows(v, r.eta, o.points));
  json j = construction_json(r);
  j["potential"] = io::potential_to_json(v);
  write_json(p + ".report.json", j);
  std::printf("h = %.17g,%.17g  %s\n", r.h.real(), r.h.imag(), r.passed() ? "certified" : "CERTIFICATE FAILURE");
  return r.passed() ? kOk : kCertificateFailure;
}

int run_example(const Options& o, const Tolerances& tol) {
  if (!(o.xi > 0.0)) throw InvalidInput("example: --xi must be positive");
  const chi::Example e(o.xi);
  const Potential v = chi::potential();
  const double end = 1.0 + 5.0 / o.xi;
  const auto xs = output_grid(v, 0.0, end, o.points);
  const DomainFunction eta = e.eta_function();
  const std::string p = o.prefix.empty() ? "example" : o.prefix;
  io::write_trace_csv(p + ".eta.csv", io::header_line(e.lambda(), "closed form"), jet_rows(eta, xs));
  io::write_plot_csv(p + ".eta.plot.csv", jet_rows(eta, xs));

  const auto r = construct_eigen_extension(v, e.lambda(), xs, tol);
  double sup = 0.0;
  for (double x : xs) sup = std::max(sup, std::abs(r.eta(x) - e.eta(x)));
  const double dh = std::abs(r.h - e.h()) / std::abs(e.h());
  const double dk = norm(r.k - e.k_function());
  const double bound = 1e-8 * tolerance_scale();
  const bool ok = dh <= bound && sup <= bound && dk <= bound && r.passed();
  const auto [sp, sm] = chi::sigma_pm(o.xi);
  json j{{"xi", o.xi},
         {"lambda", e.lambda()},
         {"closed_form", {{"h", io::to_json(e.h())}, {"sigma_plus", io::to_json(sp)}, {"sigma_minus", io::to_json(sm)}}},
         {"numeric", {{"h", io::to_json(r.h)}, {"certified", r.passed()}}},
         {"delta", {{"h_relative", dh}, {"eta_sup", sup}, {"k_l2", dk}}},
         {"bound", bound},
         {"passed", ok}};
  write_json(p + ".compare.json", j);
  std::printf("xi = %g: |dh|/|h| = %.3g, sup|d eta| = %.3g, ||dk|| = %.3g  %s\n", o.xi, dh, sup, dk,
              ok ? "ok" : "MISMATCH");
  return ok ? kOk : kCertificateFailure;
}

int run_defect(const Options& o, const Tolerances& tol) {
  const Potential v = potential_or_chi(o.potential);
  const cplx lambda = io::parse_complex(o.lambda, "lambda");
  if (lambda.imag() == 0.0) throw InvalidInput("defect: --lambda needs a nonzero imaginary part");
  const cplx kappa = upper_sqrt(std::conj(lambda));
  const auto xs = output_grid(v, 0.0, v.support_end() + 5.0 / kappa.imag(), o.points);
  const auto d = weyl_solution(v, lambda, xs, tol);
  const std::string out = o.out.empty() ? "defect.csv" : o.out;
  io::write_trace_csv(out, io::header_line(std::conj(lambda), "RealPartOnly"), io::rows_of(d.trace, xs));
  const double residual = differential_residual(d.trace, 0.0, v.support_end());
  const bool ok = residual <= tol.ode_residual;
  json j{{"lambda", io::to_json(lambda)},
         {"kappa", io::to_json(d.kappa)},
         {"tail_coefficient", io::to_json(d.tail_coefficient)},
         {"norm", d.norm()},
         {"residual", residual},
         {"passed", ok}};
  std::cout << j.dump(2) << '\n';
  return ok ? kOk : kCertificateFailure;
}

int run_green(const Options& o, const Tolerances& tol) {
  const Potential v = potential_or_chi(o.potential);
  const cplx lambda = io::parse_complex(o.lambda, "lambda");
  if (o.rhs.empty()) throw InvalidInput("green: --rhs is required");
  const LatticeFunction g = io::load_grid_function(o.rhs);
  std::optional<GreenPair> pair;
  double a = 0.0, b = 0.0;
  if (o.kernel == "interval") {
    if (o.h.empty()) throw InvalidInput("green: the interval kernel needs --h");
    pair.emplace(interval_green_pair(v, io::parse_boundary(o.h), o.x0, lambda, tol));
    b = o.x0;
  } else if (o.kernel == "halfline") {
    if (o.x0 < 0.0) throw InvalidInput("green: --x0 must be nonnegative");
    const double reach = std::max(g.end(), o.x0) + 5.0 / std::max(upper_sqrt(lambda).imag(), 0.1);
    pair.emplace(halfline_green_pair(v, o.x0, lambda, reach, tol));
    a = o.x0;
    b = reach;
  } else {
    throw InvalidInput("green: --kernel must be interval or halfline");
  }
  const auto xs = output_grid(v, a, b, o.points);
  const auto u = apply_green(*pair, g, xs);
  std::vector<io::TraceRow> rows;
  for (const auto& c : u) rows.push_back({c.x, c.value, c.derivative});
  const std::string out = o.out.empty() ? "green.csv" : o.out;
  io::write_trace_csv(out, io::header_line(lambda, "RealPartOnly"), rows);
  const double residual = green_residual(*pair, g, a, o.kernel == "interval" ? b : std::max(a, g.end()) + 1.0);
  const bool ok = residual <= 1e-6 * tolerance_scale();
  json j{{"kernel", o.kernel},
         {"lambda", io::to_json(lambda)},
         {"x0", o.x0},
         {"wronskian", io::to_json(pair->wronskian)},
         {"flux", io::to_json(green_flux(*pair, g))},
         {"residual", residual},
         {"passed", ok}};
  std::cout << j.dump(2) << '\n';
  return ok ? kOk : kCertificateFailure;
}

int run_verify(const Options& o, double scale) {
  const auto checks = verify::run_all({.seed = o.seed, .scale = scale});
  bool all = true;
  std::printf("%-4s %-32s %-6s %s\n", "#", "check", "result", "worst/bound");
  for (const auto& c : checks) {
    std::printf("%-4d %-32s %-6s %.3g\n", c.id, c.name.c_str(), c.passed() ? "pass" : "FAIL", c.worst_ratio());
    for (const auto& m : c.metrics) {
      if (!m.ok()) std::printf("     %s = %.3e > %.1e\n", m.label.c_str(), m.value, m.bound);
    }
    for (const auto& f : c.failures) std::printf("     failed: %s\n", f.c_str());
    all = all && c.passed();
  }
  return all ? kOk : kCertificateFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dissipative extensions of half-line Schroedinger operators"};
  app.set_help_flag("--help", "print this help and exit");
  app.require_subcommand(1);
  Options o;

  auto* classify_cmd = app.add_subcommand("classify", "regime of A_{h,k}");
  classify_cmd->add_option("--potential", o.potential, "potential JSON (default: i on (0,1))");
  classify_cmd->add_option("--h", o.h, "boundary parameter RE,IM or inf")->required();
  classify_cmd->add_option("--k", o.k, "k: zero, step JSON, or CSV grid");
  classify_cmd->add_option("--candidate", o.candidate, "candidate K as CSV x,u,u'");
  classify_cmd->add_option("--out", o.out, "report path (default: stdout)");

  auto* construct_cmd = app.add_subcommand("construct", "extension with eigenvalue lambda < 0");
  construct_cmd->add_option("--potential", o.potential, "potential JSON (default: i on (0,1))");
  construct_cmd->add_option("--lambda", o.lambda, "eigenvalue")->required();
  construct_cmd->add_option("--grid", o.points, "output points on [0, L + 5/xi]");
  construct_cmd->add_option("--out-prefix", o.prefix, "output prefix");

  auto* example_cmd = app.add_subcommand("example", "closed-form well i on (0,1) against the solver");
  example_cmd->add_option("--xi", o.xi, "decay rate, lambda = -xi^2")->required();
  example_cmd->add_option("--grid", o.points, "output points on [0, 1 + 5/xi]");
  example_cmd->add_option("--out-prefix", o.prefix, "output prefix");

  auto* defect_cmd = app.add_subcommand("defect", "defect solution phi_lambda");
  defect_cmd->add_option("--potential", o.potential, "potential JSON (default: i on (0,1))");
  defect_cmd->add_option("--lambda", o.lambda, "RE,IM with IM != 0")->required();
  defect_cmd->add_option("--grid", o.points, "output points");
  defect_cmd->add_option("--out", o.out, "trace CSV");

  auto* green_cmd = app.add_subcommand("green", "solve (A - lambda) u = g with a Green's function");
  green_cmd->add_option("--potential", o.potential, "potential JSON (default: i on (0,1))");
  green_cmd->add_option("--kernel", o.kernel, "interval or halfline");
  green_cmd->add_option("--h", o.h, "boundary parameter at 0 (interval kernel)");
  green_cmd->add_option("--x0", o.x0, "interval end, or start of the half-line")->required();
  green_cmd->add_option("--lambda", o.lambda, "RE,IM")->required();
  green_cmd->add_option("--rhs", o.rhs, "right-hand side: step JSON or CSV grid")->required();
  green_cmd->add_option("--grid", o.points, "output points");
  green_cmd->add_option("--out", o.out, "trace CSV");

  auto* verify_cmd = app.add_subcommand("verify", "invariant suite over the built-in battery");
  verify_cmd->add_option("--seed", o.seed, "seed for the randomized battery");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (o.points < 2) throw InvalidInput("--grid needs at least 2 points");
    const double scale = tolerance_scale();
    const Tolerances tol = Tolerances{}.scaled(scale);
    if (*classify_cmd) return run_classify(o, tol);
    if (*construct_cmd) return run_construct(o, tol);
    if (*example_cmd) return run_example(o, tol);
    if (*defect_cmd) return run_defect(o, tol);
    if (*green_cmd) return run_green(o, tol);
    if (*verify_cmd) return run_verify(o, scale);
  } catch (const InvalidInput& e) {
    std::fprintf(stderr, "dissipext: %s\n", e.what());
    return kInputError;
  } catch (const Unsupported& e) {
    std::fprintf(stderr, "dissipext: %s\n", e.what());
    return kInputError;
  } catch (const PreconditionError& e) {
    std::fprintf(stderr, "dissipext: %s\n", e.what());
    return kInputError;
  } catch (const Error& e) {
    std::fprintf(stderr, "dissipext: %s\n", e.what());
    return kCertificateFailure;
  }
  return kInputError;
}
