#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "phdisk/cli.hpp"
#include "phdisk/io.hpp"
#include "support.hpp"

using namespace phdisk;
using namespace phdisk::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path tmp(const std::string& name) {
  const fs::path dir = fs::path(PHDISK_TEST_TMP);
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::ifstream is(p);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(is, line)) {
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    rows.push_back(cells);
  }
  return rows;
}

json run_config(const json& j, const fs::path& dir) {
  auto cfg = cli::parse_config(j, dir);
  return cli::run(cfg);
}

}  // namespace

TEST_CASE("PHD1 round trip is exact") {
  auto g = make_grid(16, 8);
  std::mt19937_64 rng(1);
  auto f = random_band_limited(g, rng, 5);
  f.set_masked(3, 4);
  const auto path = tmp("f.phd");
  write_grid_function(path, f);
  CHECK(fs::file_size(path) == 12 + 16 * g->size());
  CHECK(slurp(path).substr(0, 4) == "PHD1");
  auto back = read_grid_function(path);
  CHECK(back.grid().n_r() == 8);
  CHECK(back.grid().n_theta() == 16);
  CHECK(back.masked(3, 4));
  CHECK(back.masked_count() == 1);
  for (int j = 0; j < 8; ++j)
    for (int k = 0; k < 16; ++k)
      if (!(j == 3 && k == 4)) CHECK(back(j, k) == f(j, k));

  auto b = sample_boundary(16, [](double t) { return std::polar(2.0, t); });
  write_boundary_function(tmp("b.phd"), b);
  auto bb = read_boundary_function(tmp("b.phd"));
  for (int k = 0; k < 16; ++k) CHECK(bb[k] == b[k]);
  CHECK_THROWS_AS(read_boundary_function(path), InvalidArgument);
}

TEST_CASE("CSV round trip is exact") {
  auto g = make_grid(8, 4);
  auto f = sample(g, [](cplx z) { return std::exp(z) / 3.0; });
  write_grid_function(tmp("f.csv"), f);
  auto back = read_grid_function(tmp("f.csv"));
  CHECK(back.grid().n_r() == 4);
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(back.values()[i] == f.values()[i]);
  CHECK(read_csv(tmp("f.csv")).front() == std::vector<std::string>{"r", "theta", "re", "im"});
}

TEST_CASE("malformed files are rejected") {
  {
    std::ofstream os(tmp("bad.phd"), std::ios::binary);
    os << "PHD2xxxxxxxx";
  }
  CHECK_THROWS_AS(read_grid_function(tmp("bad.phd")), InvalidArgument);
  {
    std::ofstream os(tmp("short.phd"), std::ios::binary);
    os.write("PHD1\x04\0\0\0\x08\0\0\0", 12);
  }
  CHECK_THROWS_AS(read_grid_function(tmp("short.phd")), Error);
  CHECK_THROWS_AS(read_grid_function(tmp("missing.phd")), InvalidArgument);
}

TEST_CASE("slices") {
  auto g = make_grid(16, 8);
  emit_slice(sample(g, [](cplx z) { return cplx(std::exp(z.real())); }), {Slice::Kind::radius, 1.0}, tmp("s1.csv"));
  auto rows = read_csv(tmp("s1.csv"));
  CHECK(rows.size() == 17);
  CHECK(rows[0] == std::vector<std::string>{"coordinate", "re", "im", "abs", "masked"});
  for (int k = 0; k < 16; ++k) CHECK(std::stod(rows[k + 1][1]) == doctest::Approx(std::exp(std::cos(g->theta(k)))));

  emit_slice(sample(g, [](cplx z) { return std::norm(z) - 1.0; }), {Slice::Kind::angle, 0.0}, tmp("s2.csv"));
  rows = read_csv(tmp("s2.csv"));
  CHECK(rows.size() == 9);
  for (int j = 0; j < 8; ++j) {
    CHECK(std::stod(rows[j + 1][0]) == doctest::Approx(g->radius(j)));
    CHECK(std::stod(rows[j + 1][1]) == doctest::Approx(g->radius(j) * g->radius(j) - 1.0));
  }

  auto m = sample(g, [](cplx z) { return 1.0 / (z - 1.0); });
  emit_slice(m, {Slice::Kind::radius, 1.0}, tmp("s3.csv"));
  rows = read_csv(tmp("s3.csv"));
  CHECK(rows[1].back() == "masked");
  CHECK(rows[2].back() == "");
  CHECK_THROWS_AS(emit_slice(m, {Slice::Kind::angle, 0.1}, tmp("s4.csv")), InvalidArgument);
}

TEST_CASE("config validation") {
  CHECK_THROWS_AS(cli::parse_config(json{{"command", "nope"}}), InvalidArgument);
  CHECK_THROWS_AS(cli::parse_config(json::array()), InvalidArgument);
  CHECK_THROWS_AS(cli::parse_config(json{{"command", "transform"}, {"grid", {{"n_theta", 6}, {"n_r", 4}}}}),
                  InvalidArgument);
  CHECK_THROWS_AS(cli::parse_config(json{{"command", "transform"}, {"solver", {{"tol", -1.0}}}}), InvalidArgument);
  CHECK_THROWS_AS(cli::parse_config(json{{"command", "transform"}, {"format", "xml"}}), InvalidArgument);
  auto c = cli::parse_config(json{{"command", "selftest"}, {"solver", {{"max_iter", 7}}}});
  CHECK(c.solver.max_iter == 7);
}

TEST_CASE("error classification") {
  CHECK(cli::describe_error(ConvergenceError("x", {1.0, 2.0})).first == 2);
  CHECK(cli::describe_error(ConvergenceError("x", {1.0})).second["error"]["type"] == "convergence");
  CHECK(cli::describe_error(InvalidArgument("x")).first == 1);
  CHECK(cli::describe_error(MaskedValueError("x")).second["error"]["type"] == "masked_value");
  CHECK(cli::describe_error(std::runtime_error("x")).first == 1);
}

TEST_CASE("thread cap from the environment") {
  unsetenv("PHDISK_THREADS");
  CHECK(cli::threads_from_env() == 1);
  setenv("PHDISK_THREADS", "4", 1);
  CHECK(cli::threads_from_env() == 4);
  setenv("PHDISK_THREADS", "four", 1);
  CHECK_THROWS_AS(cli::threads_from_env(), InvalidArgument);
  unsetenv("PHDISK_THREADS");
}

TEST_CASE("selftest command") {
  const auto dir = tmp("selftest");
  auto doc = run_config(json{{"command", "selftest"}, {"outputs", dir.string()}}, dir);
  CHECK(doc["ok"] == true);
  CHECK(doc["report"]["passed"] == true);
  CHECK(fs::exists(dir / "report.json"));
  CHECK(json::parse(slurp(dir / "report.json"))["version"] == cli::version());
}

TEST_CASE("transform command is reproducible") {
  const auto dir = tmp("transform");
  fs::create_directories(dir);
  auto g = make_grid(32, 16);
  write_grid_function(dir / "h.phd", sample(g, [](cplx z) { return z * std::conj(z) + 1.0; }));
  json j{{"command", "transform"},
         {"inputs", {{"h", "h.phd"}}},
         {"params", {{"op", "cauchy"}}},
         {"outputs", "out1"},
         {"emit_slices", json::array({json{{"field", "result"}, {"radius", 1.0}}})}};
  auto doc = run_config(j, dir);
  j["outputs"] = "out2";
  run_config(j, dir);
  const std::string name = fs::path(doc["outputs"]["result"].get<std::string>()).filename();
  CHECK(slurp(dir / "out1" / name) == slurp(dir / "out2" / name));
  CHECK(doc["outputs"]["slices"].size() == 1);

  // constant input, explicit grid
  auto d2 = run_config(json{{"command", "transform"},
                            {"grid", {{"n_theta", 32}, {"n_r", 16}}},
                            {"inputs", {{"h", 1.0}}},
                            {"params", {{"op", "cauchy"}}},
                            {"outputs", "out3"}},
                       dir);
  auto c = read_grid_function(d2["outputs"]["result"].get<std::string>());
  CHECK(max_abs_diff(c, sample(c.grid_ptr(), [](cplx z) { return std::conj(z); })) < 1e-12);
  CHECK_THROWS_AS(run_config(json{{"command", "transform"},
                                  {"grid", {{"n_theta", 32}, {"n_r", 16}}},
                                  {"inputs", {{"h", 1.0}}},
                                  {"params", {{"op", "fourier"}}},
                                  {"outputs", "out4"}},
                             dir),
                  InvalidArgument);
}

TEST_CASE("solve-riesz and solve-conductivity commands") {
  const auto dir = tmp("solvers");
  fs::create_directories(dir);
  write_boundary_function(dir / "psi.phd", sample_boundary(64, [](double t) { return cplx(std::cos(t)); }));

  auto doc = run_config(json{{"command", "solve-riesz"},
                             {"grid", {{"n_theta", 64}, {"n_r", 64}}},
                             {"inputs", {{"alpha", 0.0}, {"psi", "psi.phd"}}},
                             {"outputs", "riesz"}},
                        dir);
  auto w = read_grid_function(doc["outputs"]["w"].get<std::string>());
  auto tr = boundary_trace(w);
  for (int k = 0; k < 64; ++k) CHECK(std::abs(tr[k] - std::polar(1.0, 2 * kPi * k / 64)) < 1e-12);
  // hardy norm of z over the L^2(T) norm of cos
  const double rmax = 63.0 / 64.0;
  CHECK(doc["report"]["measured_constant"].get<double>() ==
        doctest::Approx(std::sqrt(2 * rmax) * rmax).epsilon(1e-10));

  auto dc = run_config(json{{"command", "solve-conductivity"},
                            {"grid", {{"n_theta", 64}, {"n_r", 64}}},
                            {"inputs", {{"sigma", 1.0}, {"psi", "psi.phd"}}},
                            {"format", "csv"},
                            {"outputs", "cond"}},
                       dir);
  const std::string upath = dc["outputs"]["u"].get<std::string>();
  CHECK(fs::path(upath).extension() == ".csv");
  auto u = read_grid_function(upath);
  CHECK(max_abs_diff(u, sample(u.grid_ptr(), [](cplx z) { return cplx(z.real()); })) < 1e-8);

  CHECK_THROWS_AS(run_config(json{{"command", "solve-riesz"},
                                  {"grid", {{"n_theta", 64}, {"n_r", 64}}},
                                  {"solver", {{"max_iter", 1}}},
                                  {"inputs", {{"alpha", 0.5}, {"psi", 1.0}}},
                                  {"outputs", "fail"}},
                             dir),
                  ConvergenceError);
}

TEST_CASE("diagnose command") {
  const auto dir = tmp("diagnose");
  auto doc = run_config(json{{"command", "diagnose"},
                             {"grid", {{"n_theta", 64}, {"n_r", 16}}},
                             {"inputs", {{"weight", 2.0}}},
                             {"params", {{"name", "ap"}, {"p", 2.0}}},
                             {"outputs", dir.string()}},
                        dir);
  CHECK(doc["report"]["ap_constant"] == 1.0);
}
