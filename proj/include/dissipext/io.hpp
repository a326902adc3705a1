#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "dissipext/errors.hpp"
#include "dissipext/extensions.hpp"
#include "dissipext/functions.hpp"
#include "dissipext/ode.hpp"
#include "dissipext/potential.hpp"

namespace dissipext::io {

using json = nlohmann::json;

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline double parse_real(std::string_view s, std::string_view what) {
  auto trim = [](std::string_view t) {
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.remove_prefix(1);
    while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.remove_suffix(1);
    return t;
  };
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw InvalidInput(std::string(what) + ": expected a real number, got '" + std::string(s) + "'");
  }
  return v;
}

/// "RE,IM" (a lone "RE" is accepted as real).
inline cplx parse_complex(std::string_view s, std::string_view what = "complex argument") {
  const auto comma = s.find(',');
  if (comma == std::string_view::npos) return parse_real(s, what);
  return {parse_real(s.substr(0, comma), what), parse_real(s.substr(comma + 1), what)};
}

/// "RE,IM" or "inf".
inline BoundaryParameter parse_boundary(std::string_view s) {
  if (s == "inf" || s == "Inf" || s == "infinity") return BoundaryParameter::dirichlet();
  return BoundaryParameter::finite(parse_complex(s, "--h"));
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json(const std::string& text, const std::string& path) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t pos = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n');
    throw InvalidInput(path + ":" + std::to_string(line) + ": malformed JSON (" + e.what() + ")");
  }
}

namespace detail {

inline std::vector<double> real_array(const json& j, const std::string& field, const std::string& path) {
  if (!j.contains(field) || !j[field].is_array()) throw InvalidInput(path + ": missing array field '" + field + "'");
  std::vector<double> out;
  for (std::size_t i = 0; i < j[field].size(); ++i) {
    const auto& e = j[field][i];
    if (!e.is_number()) throw InvalidInput(path + ": " + field + "[" + std::to_string(i) + "] is not a number");
    out.push_back(e.get<double>());
  }
  return out;
}

inline std::vector<cplx> complex_array(const json& j, const std::string& field, const std::string& path) {
  if (!j.contains(field) || !j[field].is_array()) throw InvalidInput(path + ": missing array field '" + field + "'");
  std::vector<cplx> out;
  for (std::size_t i = 0; i < j[field].size(); ++i) {
    const auto& e = j[field][i];
    const std::string where = path + ": " + field + "[" + std::to_string(i) + "]";
    if (e.is_number()) {
      out.emplace_back(e.get<double>(), 0.0);
    } else if (e.is_array() && e.size() == 2 && e[0].is_number() && e[1].is_number()) {
      out.emplace_back(e[0].get<double>(), e[1].get<double>());
    } else {
      throw InvalidInput(where + " must be [re, im]");
    }
  }
  return out;
}

inline std::string describe(const std::string& path, const InvalidInput& e) { return path + ": " + e.what(); }

}  // namespace detail

inline Potential potential_from_json(const json& j, const std::string& path = "potential") {
  if (!j.is_object()) throw InvalidInput(path + ": expected a JSON object");
  const std::string kind = j.value("kind", std::string("step"));
  try {
    if (kind == "sampled") {
      return Potential::sampled(detail::real_array(j, "grid", path), detail::complex_array(j, "values", path));
    }
    if (kind != "step") throw InvalidInput("unknown kind '" + kind + "'");
    return Potential::step(detail::real_array(j, "breakpoints", path), detail::complex_array(j, "values", path));
  } catch (const InvalidInput& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw InvalidInput(detail::describe(path, e));
  }
}

inline Potential load_potential(const std::string& path) { return potential_from_json(parse_json(read_file(path), path), path); }

inline json potential_to_json(const Potential& v) {
  json j;
  json vals = json::array();
  for (const auto& z : v.values()) vals.push_back(to_json(z));
  if (v.kind() == PotentialKind::Sampled) {
    j["kind"] = "sampled";
    j["grid"] = v.breakpoints();
  } else {
    j["breakpoints"] = v.breakpoints();
  }
  j["values"] = vals;
  return j;
}

/// One row of a trace file: x, u, u'.
struct TraceRow {
  double x;
  cplx value, derivative;
};

struct TraceFile {
  std::string header;   // text after '#', may be empty
  std::vector<TraceRow> rows;
  bool has_derivative = true;
};

inline constexpr const char* kTraceColumns = "x,re_u,im_u,re_uprime,im_uprime";

inline std::string header_line(cplx lambda, const std::string& coefficient) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "# lambda=%.17g,%.17g coefficient=", lambda.real(), lambda.imag());
  return buf + coefficient;
}

inline void write_rows(std::ostream& out, const std::string& header, const std::vector<TraceRow>& rows) {
  if (!header.empty()) out << header << '\n';
  out << kTraceColumns << '\n';
  char buf[256];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g\n", r.x, r.value.real(), r.value.imag(),
                  r.derivative.real(), r.derivative.imag());
    out << buf;
  }
}

inline void write_trace_csv(const std::string& path, const std::string& header, const std::vector<TraceRow>& rows) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  write_rows(out, header, rows);
}

inline std::vector<TraceRow> rows_of(const SolutionTrace& t, std::span<const double> xs) {
  std::vector<TraceRow> rows;
  for (double x : xs) {
    const auto c = t.at(x);
    rows.push_back({x, c.value, c.derivative});
  }
  return rows;
}

/// x, |u|, Re u, Im u for plotting.
inline void write_plot_csv(const std::string& path, const std::vector<TraceRow>& rows) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path);
  out << "x,abs,re,im\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", r.x, std::abs(r.value), r.value.real(),
                  r.value.imag());
    out << buf;
  }
}

/// Reads x,re,im[,re',im'] rows; '#' lines are comments (the first kept as
/// header); a non-numeric first data line is taken as the column header.
inline TraceFile read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open " + path);
  TraceFile f;
  std::string line;
  int lineno = 0;
  int columns = 0;
  bool seen_columns = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (f.header.empty()) f.header = line.substr(1);
      continue;
    }
    std::vector<std::string_view> cells;
    std::string_view rest(line);
    while (true) {
      const auto c = rest.find(',');
      cells.push_back(rest.substr(0, c));
      if (c == std::string_view::npos) break;
      rest.remove_prefix(c + 1);
    }
    if (!seen_columns) {
      seen_columns = true;
      const char first = cells[0].empty() ? ' ' : cells[0][0];
      if (std::isalpha(static_cast<unsigned char>(first))) continue;
    }
    const int n = static_cast<int>(cells.size());
    if (n != 3 && n != 5) {
      throw InvalidInput(path + ":" + std::to_string(lineno) + ": expected 3 or 5 columns, got " + std::to_string(n));
    }
    if (columns == 0) columns = n;
    if (n != columns) throw InvalidInput(path + ":" + std::to_string(lineno) + ": inconsistent column count");
    double v[5] = {0, 0, 0, 0, 0};
    static const char* names[] = {"x", "re_u", "im_u", "re_uprime", "im_uprime"};
    for (int i = 0; i < n; ++i) {
      try {
        v[i] = parse_real(cells[static_cast<std::size_t>(i)], names[i]);
      } catch (const InvalidInput& e) {
        throw InvalidInput(path + ":" + std::to_string(lineno) + ": " + e.what());
      }
    }
    if (!f.rows.empty() && v[0] < f.rows.back().x) {
      throw InvalidInput(path + ":" + std::to_string(lineno) + ": x must be nondecreasing");
    }
    f.rows.push_back({v[0], {v[1], v[2]}, {v[3], v[4]}});
  }
  if (f.rows.size() < 2) throw InvalidInput(path + ": need at least two data rows");
  f.has_derivative = columns == 5;
  return f;
}

namespace detail {

/// Derivative at nodes[at] of the polynomial through (nodes, values).
inline cplx lagrange_derivative(std::span<const double> xs, std::span<const cplx> ys, std::size_t at) {
  const std::size_t n = xs.size();
  cplx d{};
  const double x = xs[at];
  for (std::size_t j = 0; j < n; ++j) {
    double w = 0.0;
    if (j == at) {
      for (std::size_t m = 0; m < n; ++m) {
        if (m != j) w += 1.0 / (x - xs[m]);
      }
    } else {
      double num = 1.0, den = 1.0;
      for (std::size_t m = 0; m < n; ++m) {
        if (m != j) den *= xs[j] - xs[m];
        if (m != j && m != at) num *= x - xs[m];
      }
      w = num / den;
    }
    d += w * ys[j];
  }
  return d;
}

/// Derivatives of `ys` at every node of one smooth segment from a stencil of
/// width `w` (or fewer nodes if the segment is short).
inline std::vector<cplx> segment_derivatives(std::span<const double> xs, std::span<const cplx> ys, std::size_t w) {
  const std::size_t n = xs.size();
  std::vector<cplx> d(n);
  if (n < 2) return d;
  const std::size_t width = std::min(w, n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = i >= width / 2 ? i - width / 2 : 0;
    lo = std::min(lo, n - width);
    d[i] = lagrange_derivative(xs.subspan(lo, width), ys.subspan(lo, width), i - lo);
  }
  return d;
}

/// Split rows into segments at repeated x (a jump) and at `cuts`.
inline std::vector<std::pair<std::size_t, std::size_t>> segments(const std::vector<TraceRow>& rows,
                                                                 std::span<const double> cuts) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  std::size_t start = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const bool jump = rows[i].x == rows[i - 1].x;
    const bool cut = std::any_of(cuts.begin(), cuts.end(), [&](double c) { return rows[i - 1].x == c; }) &&
                     i - 1 > start;
    if (jump) {
      out.emplace_back(start, i);
      start = i;
    } else if (cut) {
      out.emplace_back(start, i);
      start = i - 1;
    }
  }
  out.emplace_back(start, rows.size());
  return out;
}

}  // namespace detail

/// Sampled grid function for k or a right-hand side: cubic Hermite between
/// rows when u' columns are present, linear otherwise; a repeated x marks a
/// jump (left limit first). Zero outside the sampled range.
inline LatticeFunction grid_function(const TraceFile& f) {
  const auto rows = f.rows;
  std::vector<double> lat;
  for (const auto& r : rows) {
    if (lat.empty() || r.x != lat.back()) lat.push_back(r.x);
  }
  if (lat.size() < 2) throw InvalidInput("grid function needs two distinct abscissae");
  const bool hermite = f.has_derivative;
  return {lat, [rows, hermite](double x) {
            // rightmost row with x_i <= x (so the right limit at a jump)
            auto it = std::upper_bound(rows.begin(), rows.end(), x, [](double v, const TraceRow& r) { return v < r.x; });
            if (it == rows.begin()) return cplx{};
            std::size_t i = static_cast<std::size_t>(it - rows.begin()) - 1;
            if (i + 1 >= rows.size()) return x == rows.back().x ? rows.back().value : cplx{};
            const auto& a = rows[i];
            const auto& b = rows[i + 1];
            const double hgap = b.x - a.x;
            const double t = (x - a.x) / hgap;
            if (!hermite) return a.value * (1.0 - t) + b.value * t;
            const double t2 = t * t, t3 = t2 * t;
            return (2 * t3 - 3 * t2 + 1) * a.value + (t3 - 2 * t2 + t) * hgap * a.derivative +
                   (-2 * t3 + 3 * t2) * b.value + (t3 - t2) * hgap * b.derivative;
          }};
}

inline LatticeFunction step_function_from_json(const json& j, const std::string& path) {
  try {
    return StepFunction(detail::real_array(j, "breakpoints", path), detail::complex_array(j, "values", path));
  } catch (const InvalidInput& e) {
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    throw InvalidInput(detail::describe(path, e));
  }
}

/// k or right-hand side from "zero", a JSON step function, or a CSV grid file.
inline LatticeFunction load_grid_function(const std::string& source) {
  if (source == "zero") return LatticeFunction::zero();
  const auto dot = source.rfind('.');
  const std::string ext = dot == std::string::npos ? "" : source.substr(dot);
  if (ext == ".json") return step_function_from_json(parse_json(read_file(source), source), source);
  return grid_function(read_trace_csv(source));
}

/// A domain function from (x, u, u') samples: u'' at the rows by a five
/// point difference of u' within each smooth segment (segments end at
/// `cuts`, e.g. potential breakpoints), quintic Hermite interpolation
/// between rows, and u(x_last) exp(s (x - x_last)), s = u'/u, beyond.
struct SampledDomainFunction {
  DomainFunction function;
  double second_derivative_error = 0.0;   // five- vs three-point difference
};

inline SampledDomainFunction sampled_domain_function(const TraceFile& f, std::span<const double> cuts) {
  if (!f.has_derivative) throw InvalidInput("domain function file needs u' columns");
  const auto& rows = f.rows;
  if (rows.front().x != 0.0) throw InvalidInput("domain function samples must start at x = 0");
  for (double c : cuts) {
    if (c > 0.0 && c < rows.back().x &&
        std::none_of(rows.begin(), rows.end(), [c](const TraceRow& r) { return r.x == c; })) {
      throw InvalidInput("domain function samples must include the potential breakpoint x = " + std::to_string(c));
    }
  }
  // one-sided limits of u'' at rows shared by two segments
  std::vector<cplx> d2l(rows.size()), d2r(rows.size());
  double err = 0.0;
  std::size_t prev_end = rows.size();
  for (const auto& [a, b] : detail::segments(rows, cuts)) {
    std::vector<double> xs;
    std::vector<cplx> ds;
    for (std::size_t i = a; i < b; ++i) {
      xs.push_back(rows[i].x);
      ds.push_back(rows[i].derivative);
    }
    const auto five = detail::segment_derivatives(xs, ds, 5);
    const auto three = detail::segment_derivatives(xs, ds, 3);
    for (std::size_t i = a; i < b; ++i) {
      d2r[i] = five[i - a];
      if (i != prev_end) d2l[i] = five[i - a];
      err = std::max(err, std::abs(five[i - a] - three[i - a]));
    }
    prev_end = b - 1;
  }
  const TraceRow last = rows.back();
  if (last.value == cplx{}) throw InvalidInput("domain function samples end at a zero; no exponential tail");
  const cplx s = last.derivative / last.value;
  if (!(s.real() < 0.0)) throw InvalidInput("domain function samples do not decay at the last row");
  std::vector<double> lat;
  for (const auto& r : rows) {
    if (lat.empty() || r.x != lat.back()) lat.push_back(r.x);
  }
  auto body = [rows, d2l, d2r](double x) {
    auto it = std::upper_bound(rows.begin(), rows.end(), x, [](double v, const TraceRow& r) { return v < r.x; });
    std::size_t i = it == rows.begin() ? 0 : static_cast<std::size_t>(it - rows.begin()) - 1;
    if (i + 1 >= rows.size()) return Jet{rows.back().value, rows.back().derivative, d2l.back()};
    const double h = rows[i + 1].x - rows[i].x;
    const double t = (x - rows[i].x) / h;
    // quintic Hermite basis on [0, 1] and its derivatives
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double H0 = 1 - 10 * t3 + 15 * t4 - 6 * t5, H1 = t - 6 * t3 + 8 * t4 - 3 * t5,
                 H2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5), H3 = 10 * t3 - 15 * t4 + 6 * t5,
                 H4 = -4 * t3 + 7 * t4 - 3 * t5, H5 = 0.5 * (t3 - 2 * t4 + t5);
    const double D0 = -30 * t2 + 60 * t3 - 30 * t4, D1 = 1 - 18 * t2 + 32 * t3 - 15 * t4,
                 D2 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4), D3 = 30 * t2 - 60 * t3 + 30 * t4,
                 D4 = -12 * t2 + 28 * t3 - 15 * t4, D5 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
    const double S0 = -60 * t + 180 * t2 - 120 * t3, S1 = -36 * t + 96 * t2 - 60 * t3,
                 S2 = 0.5 * (2 - 18 * t + 36 * t2 - 20 * t3), S3 = 60 * t - 180 * t2 + 120 * t3,
                 S4 = -24 * t + 84 * t2 - 60 * t3, S5 = 0.5 * (6 * t - 24 * t2 + 20 * t3);
    const auto& a = rows[i];
    const auto& b = rows[i + 1];
    const cplx ua = a.value, pa = h * a.derivative, qa = h * h * d2r[i];
    const cplx ub = b.value, pb = h * b.derivative, qb = h * h * d2l[i + 1];
    return Jet{H0 * ua + H1 * pa + H2 * qa + H3 * ub + H4 * pb + H5 * qb,
               (D0 * ua + D1 * pa + D2 * qa + D3 * ub + D4 * pb + D5 * qb) / h,
               (S0 * ua + S1 * pa + S2 * qa + S3 * ub + S4 * pb + S5 * qb) / (h * h)};
  };
  return {DomainFunction(lat, body, ExpTail(last.x, {{last.value, s}})), err};
}

}  // namespace dissipext::io
