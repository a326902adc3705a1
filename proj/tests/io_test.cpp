#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "dissipext/chi_example.hpp"
#include "dissipext/eigen_extension.hpp"
#include "dissipext/io.hpp"

using namespace dissipext;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("dissipext_io_" + name)).string();
}

void write(const std::string& path, const std::string& text) { std::ofstream(path) << text; }

}  // namespace

TEST(ParseArgs, ComplexAndBoundary) {
  EXPECT_EQ(io::parse_complex("0,1"), cplx(0.0, 1.0));
  EXPECT_EQ(io::parse_complex("-1.5"), cplx(-1.5, 0.0));
  EXPECT_EQ(io::parse_complex(" 2e-1 , -3 "), cplx(0.2, -3.0));
  EXPECT_THROW(io::parse_complex("1,x"), InvalidInput);
  EXPECT_THROW(io::parse_complex(""), InvalidInput);
  EXPECT_TRUE(io::parse_boundary("inf").is_dirichlet());
  EXPECT_EQ(io::parse_boundary("0.5,1").value(), cplx(0.5, 1.0));
}

TEST(PotentialJson, RoundTrip) {
  const auto v = Potential::step({0.0, 0.5, 2.0}, {cplx(1.0, 0.25), cplx(-2.0, 0.0)});
  const auto back = io::potential_from_json(io::potential_to_json(v));
  EXPECT_EQ(back.breakpoints(), v.breakpoints());
  EXPECT_EQ(back.values(), v.values());
  const auto s = Potential::sampled({0.0, 1.0, 2.0}, {cplx(0.0, 1.0), cplx(1.0, 0.5), cplx(0.0)});
  const auto sb = io::potential_from_json(io::potential_to_json(s));
  EXPECT_EQ(sb.kind(), PotentialKind::Sampled);
  EXPECT_EQ(sb.values(), s.values());
}

TEST(PotentialJson, Diagnostics) {
  const auto p = temp_path("bad.json");
  write(p, "{\n  \"breakpoints\": [0, 1],\n  \"values\": [[0, 1],\n}\n");
  try {
    io::load_potential(p);
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find(":4:"), std::string::npos) << e.what();
  }
  write(p, "{\"breakpoints\": [0, 1], \"values\": [[0, \"a\"]]}");
  try {
    io::load_potential(p);
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("values[0]"), std::string::npos) << e.what();
  }
  write(p, "{\"breakpoints\": [0, 1], \"values\": [[0, -1]]}");
  EXPECT_THROW(io::load_potential(p), InvalidInput);
  EXPECT_THROW(io::load_potential(temp_path("missing.json")), InvalidInput);
  std::remove(p.c_str());
}

TEST(TraceCsv, RoundTripIsExact) {
  const auto p = temp_path("trace.csv");
  std::vector<io::TraceRow> rows{{0.0, {1.0, -0.1}, {0.3, 1e-17}}, {0.5, {M_PI, 2.0}, {-1.0 / 3.0, 0.0}}};
  io::write_trace_csv(p, io::header_line(cplx(-1.0, 0.0), "ConjugateV"), rows);
  const auto f = io::read_trace_csv(p);
  EXPECT_EQ(f.header, " lambda=-1,0 coefficient=ConjugateV");
  ASSERT_EQ(f.rows.size(), 2u);
  EXPECT_EQ(f.rows[1].value, rows[1].value);
  EXPECT_EQ(f.rows[1].derivative, rows[1].derivative);
  EXPECT_EQ(f.rows[0].derivative, rows[0].derivative);
  std::remove(p.c_str());
}

TEST(TraceCsv, LineDiagnostics) {
  const auto p = temp_path("badtrace.csv");
  write(p, "x,re_u,im_u\n0,1,0\n0.5,1,oops\n");
  try {
    io::read_trace_csv(p);
    FAIL();
  } catch (const InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find(":3:"), std::string::npos) << e.what();
  }
  write(p, "0,1,0\n1,2\n");
  EXPECT_THROW(io::read_trace_csv(p), InvalidInput);
  write(p, "1,1,0\n0,2,0\n");
  EXPECT_THROW(io::read_trace_csv(p), InvalidInput);
  std::remove(p.c_str());
}

TEST(GridFunction, JumpAndHermite) {
  io::TraceFile f;
  f.rows = {{0.0, 1.0, 0.0}, {1.0, 1.0, 0.0}, {1.0, 3.0, 0.0}, {2.0, 3.0, 0.0}};
  const auto g = io::grid_function(f);
  EXPECT_EQ(g(0.5), cplx(1.0));
  EXPECT_EQ(g(1.0), cplx(3.0));
  EXPECT_EQ(g(1.5), cplx(3.0));
  EXPECT_EQ(g(2.5), cplx{});
  io::TraceFile c;
  for (int i = 0; i <= 10; ++i) {
    const double x = 0.1 * i;
    c.rows.push_back({x, x * x * x, 3 * x * x});
  }
  const auto cubic = io::grid_function(c);
  EXPECT_LT(std::abs(cubic(0.37) - 0.37 * 0.37 * 0.37), 1e-15);
}

TEST(SampledDomainFunction, ReproducesClosedFormEta) {
  const chi::Example e(1.0);
  io::TraceFile f;
  auto xs = uniform_grid(0.0, 1.0, 401);
  const auto outer = uniform_grid(1.0, 6.0, 1601);
  xs.insert(xs.end(), outer.begin() + 1, outer.end());
  for (double x : xs) {
    const Jet j = e.eta_jet(x);
    f.rows.push_back({x, j.value, j.first});
  }
  const std::vector<double> cuts{1.0};
  const auto s = io::sampled_domain_function(f, cuts);
  for (double x : {0.0011, 0.5, 0.99949, 1.0007, 3.3, 8.0}) {
    const Jet a = s.function.jet(x), b = e.eta_jet(x);
    EXPECT_LT(std::abs(a.value - b.value), 1e-12) << x;
    EXPECT_LT(std::abs(a.second - b.second), 1e-8) << x;
  }
  const ExtensionParams p(chi::potential(), BoundaryParameter::finite(e.h()), e.k_function());
  const auto kv = check_kv_conditions(chi::potential(), p, s.function);
  EXPECT_TRUE(kv.passed()) << kv.eigen_residual << " " << kv.membership_residual;
  f.rows.erase(f.rows.begin() + 400);
  EXPECT_THROW(io::sampled_domain_function(f, cuts), InvalidInput);
}

TEST(LoadGridFunction, FormatsAgree) {
  EXPECT_EQ(norm(io::load_grid_function("zero")), 0.0);
  const auto pj = temp_path("k.json");
  write(pj, "{\"breakpoints\": [0, 1], \"values\": [[2, 0]]}");
  EXPECT_EQ(io::load_grid_function(pj)(0.5), cplx(2.0));
  std::remove(pj.c_str());
}
