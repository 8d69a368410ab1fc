#include "phdisk/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "phdisk/diagnostics.hpp"
#include "phdisk/similarity.hpp"
#include "phdisk/transforms.hpp"

#ifndef PHDISK_VERSION
#define PHDISK_VERSION "0.0.0"
#endif

namespace phdisk::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

const std::vector<std::string>& commands() {
  static const std::vector<std::string> c{"transform",      "factorize",          "solve-dbar", "solve-beltrami",
                                          "solve-riesz",    "solve-conductivity", "diagnose",   "selftest"};
  return c;
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("config: field '") + key + "' has the wrong type (" + e.what() + ")");
  }
}

json vec_json(const std::vector<double>& v) { return json(v); }

json report_json(const SolveReport& r) {
  json j;
  j["iterations"] = r.iterations;
  j["increment_history"] = vec_json(r.increment_history);
  j["final_damping"] = r.final_damping;
  j["residual_beltrami"] = r.residual_beltrami;
  j["boundary_mismatch"] = r.boundary_mismatch;
  j["normalization_defects"] = vec_json(r.normalization_defects);
  j["measured_constant"] = r.measured_constant;
  for (const auto& [k, v] : r.extras) j["extras"][k] = v;
  return j;
}

json report_json(const DiagnosticReport& r) {
  json j;
  j["name"] = r.name;
  j["labels"] = r.labels;
  j["measured"] = vec_json(r.measured);
  j["bound"] = vec_json(r.bound);
  j["satisfied"] = r.satisfied;
  j["slack"] = r.slack;
  j["all_satisfied"] = r.all_satisfied();
  for (const auto& [k, v] : r.tables) j["tables"][k] = vec_json(v);
  for (const auto& [k, v] : r.extras) j["extras"][k] = v;
  return j;
}

double max_abs_diff(const GridFunction& a, const GridFunction& b, double rho = 1.0) {
  double m = 0.0;
  const auto& g = a.grid();
  for (int j = 0; j < g.n_r() && g.radius(j) <= rho + 1e-12; ++j)
    for (int k = 0; k < g.n_theta(); ++k) {
      if (a.masked(j, k) || b.masked(j, k)) continue;
      m = std::max(m, std::abs(a(j, k) - b(j, k)));
    }
  return m;
}

double max_abs_diff(const BoundaryFunction& a, const BoundaryFunction& b) {
  double m = 0.0;
  for (int k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

// State shared by the command handlers of one run.
class Session {
 public:
  Session(const RunConfig& cfg, const RunOptions& opts, std::ostream* log) : cfg_(cfg), opts_(opts), log_(log) {
    if (cfg.n_theta > 0) grid_ = make_grid(cfg.n_theta, cfg.n_r);
  }

  const RunConfig& config() const { return cfg_; }
  const json& params() const { return cfg_.params; }

  GridPtr grid() {
    if (!grid_) throw InvalidArgument("config: grid dimensions are required (no grid input file to infer them from)");
    return grid_;
  }

  bool has_input(const std::string& name) const { return cfg_.inputs.contains(name); }

  GridFunction grid_input(const std::string& name, std::optional<cplx> fallback = std::nullopt) {
    if (!has_input(name)) {
      if (fallback) return constant(*fallback);
      throw InvalidArgument("config: missing grid input '" + name + "'");
    }
    const json& spec = cfg_.inputs.at(name);
    if (spec.is_string()) {
      const auto f = read_grid_function(resolve(spec.get<std::string>()));
      if (!grid_) grid_ = f.grid_ptr();
      if (f.grid().n_r() != grid_->n_r() || f.grid().n_theta() != grid_->n_theta())
        throw InvalidArgument("input '" + name + "' has shape " + std::to_string(f.grid().n_r()) + "x" +
                              std::to_string(f.grid().n_theta()) + ", expected " + std::to_string(grid_->n_r()) +
                              "x" + std::to_string(grid_->n_theta()));
      return GridFunction(grid_, std::vector<cplx>(f.values().begin(), f.values().end()), f.mask());
    }
    return constant(constant_of(spec, name));
  }

  BoundaryFunction boundary_input(const std::string& name, std::optional<cplx> fallback = std::nullopt) {
    if (!has_input(name)) {
      if (fallback) return BoundaryFunction(std::vector<cplx>(grid()->n_theta(), *fallback));
      throw InvalidArgument("config: missing boundary input '" + name + "'");
    }
    const json& spec = cfg_.inputs.at(name);
    if (spec.is_string()) {
      auto b = read_boundary_function(resolve(spec.get<std::string>()));
      if (grid_ && b.size() != grid_->n_theta())
        throw InvalidArgument("input '" + name + "' has " + std::to_string(b.size()) + " samples, expected " +
                              std::to_string(grid_->n_theta()));
      return b;
    }
    return BoundaryFunction(std::vector<cplx>(grid()->n_theta(), constant_of(spec, name)));
  }

  void write(const std::string& name, const GridFunction& f) {
    const auto path = out_path(name);
    write_grid_function(path, f);
    outputs_[name] = path.string();
    fields_.emplace(name, f);
    note("wrote " + path.string());
  }

  void write(const std::string& name, const BoundaryFunction& b) {
    const auto path = out_path(name);
    write_boundary_function(path, b);
    outputs_[name] = path.string();
    note("wrote " + path.string());
  }

  void emit_slices() {
    for (const auto& req : cfg_.emit_slices) {
      auto it = fields_.find(req.field);
      if (it == fields_.end())
        throw InvalidArgument("emit_slices: '" + req.field + "' is not a grid output of this command");
      const std::string tag = req.slice.kind == Slice::Kind::radius ? "radius" : "angle";
      std::ostringstream name;
      name << "slice_" << req.field << "_" << tag << "_" << req.slice.value << ".csv";
      const auto path = cfg_.output_dir / name.str();
      emit_slice(it->second, req.slice, path);
      outputs_["slices"].push_back(path.string());
      note("wrote " + path.string());
    }
  }

  const json& outputs() const { return outputs_; }

  void note(const std::string& msg) const {
    if (opts_.verbose && log_) *log_ << "phdisk: " << msg << '\n';
  }

 private:
  GridFunction constant(cplx c) { return GridFunction::sample(grid(), [c](cplx) { return c; }); }

  static cplx constant_of(const json& spec, const std::string& name) {
    if (spec.is_number()) return spec.get<double>();
    if (spec.is_array() && spec.size() == 2 && spec[0].is_number() && spec[1].is_number())
      return {spec[0].get<double>(), spec[1].get<double>()};
    throw InvalidArgument("config: input '" + name + "' must be a file path, a number or [re, im]");
  }

  fs::path resolve(const std::string& p) const {
    fs::path path(p);
    if (path.is_relative()) path = cfg_.base_dir / path;
    if (!fs::exists(path)) throw InvalidArgument("input file '" + path.string() + "' does not exist");
    return path;
  }

  fs::path out_path(const std::string& name) const {
    return cfg_.output_dir / (name + (cfg_.format == "csv" ? ".csv" : ".phd1"));
  }

  const RunConfig& cfg_;
  const RunOptions& opts_;
  std::ostream* log_;
  GridPtr grid_;
  json outputs_ = json::object();
  std::map<std::string, GridFunction> fields_;
};

json cmd_transform(Session& s) {
  const auto op = get_or<std::string>(s.params(), "op", "");
  json r;
  r["op"] = op;
  if (op == "poisson" || op == "conjugate_function") {
    const auto u = s.boundary_input("psi");
    if (op == "poisson") {
      s.write("result", poisson_extend(u, s.grid()));
    } else {
      const auto v = conjugate_function(u);
      r["input_norm"] = boundary_lp_norm(u, 2.0);
      r["output_norm"] = boundary_lp_norm(v, 2.0);
      s.write("result", v);
    }
    return r;
  }
  const auto h = s.grid_input("h");
  GridFunction out(h.grid_ptr());
  if (op == "cauchy") {
    out = cauchy(h);
  } else if (op == "beurling") {
    out = beurling(h);
  } else if (op == "reflect") {
    out = reflect_transform(h);
  } else if (op == "green") {
    out = green_potential(h);
  } else if (op == "harmonic_conjugate") {
    r["harmonicity_defect"] = harmonicity_defect(h);
    out = harmonic_conjugate(h);
  } else if (op == "cauchy_renormalized") {
    const double R = get_or<double>(s.params(), "R", 1.0);
    const int n_eval = get_or<int>(s.params(), "eval_n_r", static_cast<int>(std::lround(h.grid().n_r() * R)));
    const auto eval = make_scaled_grid(h.grid().n_theta(), n_eval, R);
    out = cauchy_renormalized(h, R, eval);
    r["outer_radius"] = R;
    r["l2_norm_on_D_R"] = cauchy_renormalized_l2_norm(h, R);
  } else {
    throw InvalidArgument("transform: unknown op '" + op +
                          "' (cauchy, beurling, reflect, green, poisson, harmonic_conjugate, conjugate_function, "
                          "cauchy_renormalized)");
  }
  r["input_l2_norm"] = area_lp_norm(h, 2.0);
  r["output_interior_l2_norm"] = interior_l2_norm(out);
  s.write("result", out);
  return r;
}

json cmd_factorize(Session& s) {
  const auto w = s.grid_input("w");
  const auto alpha = s.grid_input("alpha");
  const auto norm = normalization_from_string(get_or<std::string>(s.params(), "normalization", "real_on_T"));
  const auto f = factorize(w, alpha, norm, s.config().solver.zero_threshold);
  s.write("s", f.s);
  s.write("F", f.F);
  json r;
  r["normalization"] = to_string(f.normalization);
  r["degenerate"] = f.degenerate;
  r["residual_holo"] = f.residual_holo;
  r["residual_beltrami"] = f.residual_beltrami;
  r["input_residual_beltrami"] = f.degenerate ? 0.0 : residual_beltrami(w, alpha);
  r["note"] = "Sobolev norms of e^s are grid-dependent diagnostics";
  return r;
}

json cmd_solve_dbar(Session& s) {
  const auto a = s.grid_input("a", 0.0);
  const auto psi = s.boundary_input("psi", 0.0);
  const auto sol = solve_dbar(a, psi, get_or<double>(s.params(), "lambda", 0.0), get_or<double>(s.params(), "theta0", 0.0));
  s.write("A", sol.A);
  json r;
  r["dbar_residual"] = sol.dbar_residual;
  r["trace_residual"] = sol.trace_residual;
  r["mean_residual"] = sol.mean_residual;
  return r;
}

json cmd_solve_beltrami(Session& s) {
  const auto alpha = s.grid_input("alpha");
  const auto F = s.grid_input("F", 1.0);
  const auto psi = s.boundary_input("psi", 0.0);
  const auto variant = get_or<std::string>(s.params(), "variant", "imag");
  const double lambda = get_or<double>(s.params(), "lambda", 0.0);
  ParametrizeResult res = variant == "imag"   ? parametrize_imag(alpha, F, psi, lambda, s.config().solver)
                          : variant == "real" ? parametrize_real(alpha, F, psi, lambda, s.config().solver)
                                              : throw InvalidArgument("solve-beltrami: variant must be imag or real");
  s.write("s", res.s);
  s.write("w", reconstruct(res.s, F));
  auto r = report_json(res.report);
  r["variant"] = variant;
  return r;
}

json cmd_solve_riesz(Session& s) {
  const auto alpha = s.grid_input("alpha", 0.0);
  const auto psi = s.boundary_input("psi");
  const auto res = solve_riesz(alpha, psi, get_or<double>(s.params(), "c", 0.0), s.config().solver);
  s.write("w", res.w);
  s.write("psi_sharp", res.psi_sharp);
  return report_json(res.report);
}

json cmd_solve_conductivity(Session& s) {
  const auto sigma = s.grid_input("sigma");
  const auto psi = s.boundary_input("psi");
  const auto res = solve_conductivity(sigma, psi, s.config().solver);
  s.write("u", res.u);
  s.write("v", res.v);
  s.write("w", res.w);
  return report_json(res.report);
}

json cmd_diagnose(Session& s) {
  const auto& p = s.params();
  const auto name = get_or<std::string>(p, "name", "");
  const auto& cfg = s.config().solver;
  json r;
  r["diagnostic"] = name;
  if (name == "bmo") {
    const auto h = s.boundary_input("h");
    const auto res = bmo_oscillation(h, ArcFamily::dyadic(get_or<int>(p, "levels", h.size())));
    r["seminorm"] = res.seminorm;
    r["per_arc"] = vec_json(res.per_arc);
  } else if (name == "ap") {
    const auto w = s.boundary_input("weight");
    r["ap_constant"] = ap_constant(w, get_or<double>(p, "p", cfg.p), ArcFamily::dyadic(get_or<int>(p, "levels", w.size())));
  } else if (name == "jn") {
    const auto arc = get_or<std::vector<double>>(p, "arc", {0.0, 2.0 * kPi});
    if (arc.size() != 2) throw InvalidArgument("diagnose jn: arc must be [start, end]");
    r = report_json(jn_exp_check(s.boundary_input("h"), {arc[0], arc[1]}));
  } else if (name == "exp_integrability") {
    ExpIntegrabilityOptions opt;
    opt.exclude_boundary_ring = get_or<bool>(p, "exclude_boundary_ring", false);
    opt.lambdas = get_or<std::vector<double>>(p, "lambdas", opt.lambdas);
    r = report_json(exp_integrability_report(s.grid_input("f"), get_or<std::vector<double>>(p, "ells", {1.0}), opt));
  } else if (name == "equicontinuity") {
    r = report_json(equicontinuity_modulus(s.grid_input("beta"),
                                           get_or<std::vector<double>>(p, "side_lengths", {0.5, 0.25, 0.125, 0.0625})));
  } else if (name == "c2_growth") {
    r = report_json(c2_growth_curve(s.grid_input("h"), get_or<std::vector<double>>(p, "radii", {1.0, 10.0, 100.0})));
  } else if (name == "multiplier") {
    r["ratio"] = multiplier_ratio(s.grid_input("f"), s.grid_input("g"), get_or<double>(p, "p", cfg.p),
                                  get_or<double>(p, "gamma", cfg.gamma));
  } else if (name == "trace_convergence") {
    r = report_json(trace_convergence(s.grid_input("w"), get_or<double>(p, "p", cfg.p)));
  } else if (name == "boundary_sobolev") {
    r["seminorm"] = boundary_sobolev_seminorm(s.boundary_input("g"));
  } else if (name == "weighted_conjugate") {
    r["ratio"] = weighted_conjugate_ratio(s.boundary_input("psi"), s.boundary_input("weight"));
  } else {
    throw InvalidArgument("diagnose: unknown name '" + name +
                          "' (bmo, ap, jn, exp_integrability, equicontinuity, c2_growth, multiplier, "
                          "trace_convergence, boundary_sobolev, weighted_conjugate)");
  }
  r["diagnostic"] = name;
  return r;
}

json cmd_selftest(Session& s) {
  const auto g = s.config().n_theta > 0 ? s.grid() : make_grid(64, 64);
  const int n = g->n_theta();
  auto grid_fn = [&](std::function<cplx(cplx)> f) { return GridFunction::sample(g, f); };
  auto bnd_fn = [&](std::function<cplx(double)> f) { return BoundaryFunction::sample(n, f); };
  const auto one = grid_fn([](cplx) { return cplx(1.0); });
  const auto z = grid_fn([](cplx w) { return w; });
  const auto zbar = grid_fn([](cplx w) { return std::conj(w); });
  const auto r2m1 = grid_fn([](cplx w) { return cplx(std::norm(w) - 1.0); });
  const auto zero = grid_fn([](cplx) { return cplx(0.0); });

  json checks = json::array();
  bool ok = true;
  auto check = [&](const std::string& name, double err, double tol) {
    const bool pass = err <= tol;
    ok = ok && pass;
    checks.push_back({{"name", name}, {"error", err}, {"tolerance", tol}, {"pass", pass}});
    s.note(name + (pass ? " ok" : " FAILED"));
  };
  check("cauchy of indicator is conj(z)", max_abs_diff(cauchy(one), zbar), 1e-10);
  check("cauchy of t is |z|^2 - 1", max_abs_diff(cauchy(z), r2m1), 1e-10);
  check("beurling of indicator vanishes", max_abs_diff(beurling(one), zero), 1e-10);
  check("beurling of t is conj(z)", max_abs_diff(beurling(z), zbar), 1e-10);
  check("reflection of 1 is -z", max_abs_diff(reflect_transform(one), -1.0 * z), 1e-10);
  check("green potential of 4 is |z|^2 - 1", max_abs_diff(green_potential(4.0 * one), r2m1), 1e-10);
  const auto cos3 = bnd_fn([](double t) { return cplx(std::cos(3 * t)); });
  const auto sin3 = bnd_fn([](double t) { return cplx(std::sin(3 * t)); });
  check("conjugate function of cos 3t is sin 3t", max_abs_diff(conjugate_function(cos3), sin3), 1e-12);
  check("conjugate function of 1 vanishes",
        max_abs_diff(conjugate_function(bnd_fn([](double) { return cplx(1.0); })), bnd_fn([](double) { return cplx(0.0); })),
        1e-12);
  const auto u = bnd_fn([](double t) { return cplx(std::cos(t) + 3 * std::sin(2 * t)); });
  check("poisson extension of cos t + 3 sin 2t",
        max_abs_diff(poisson_extend(u, g), grid_fn([](cplx w) {
                       const double r = std::abs(w), t = std::arg(w);
                       return cplx(r * std::cos(t) + 3 * r * r * std::sin(2 * t));
                     })),
        1e-12);
  check("solve_dbar with a = 1 gives conj(z) - z",
        max_abs_diff(solve_dbar(one, bnd_fn([](double) { return cplx(0.0); }), 0.0, 0.0).A, zbar - z), 1e-10);
  check("solve_dbar with lambda = 2 pi gives i",
        max_abs_diff(solve_dbar(zero, bnd_fn([](double) { return cplx(0.0); }), 2 * kPi, 0.0).A,
                     grid_fn([](cplx) { return cplx(0.0, 1.0); })),
        1e-12);
  const auto riesz = solve_riesz(zero, bnd_fn([](double t) { return cplx(std::cos(t)); }), 0.0, s.config().solver);
  check("M. Riesz case returns z", max_abs_diff(riesz.w, z), 1e-10);

  json r;
  r["grid"] = {{"n_theta", g->n_theta()}, {"n_r", g->n_r()}};
  r["checks"] = checks;
  r["passed"] = ok;
  return r;
}

using Handler = std::function<json(Session&)>;

const std::map<std::string, Handler>& handlers() {
  static const std::map<std::string, Handler> h{
      {"transform", cmd_transform},         {"factorize", cmd_factorize},
      {"solve-dbar", cmd_solve_dbar},       {"solve-beltrami", cmd_solve_beltrami},
      {"solve-riesz", cmd_solve_riesz},     {"solve-conductivity", cmd_solve_conductivity},
      {"diagnose", cmd_diagnose},           {"selftest", cmd_selftest},
  };
  return h;
}

}  // namespace

const char* version() { return PHDISK_VERSION; }

RunConfig parse_config(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw InvalidArgument("config: top level must be a JSON object");
  RunConfig c;
  c.source = j;
  c.base_dir = base_dir;
  c.command = get_or<std::string>(j, "command", "");
  if (std::find(commands().begin(), commands().end(), c.command) == commands().end())
    throw InvalidArgument("config: unknown command '" + c.command + "'");

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    c.n_theta = get_or<int>(g, "n_theta", 0);
    c.n_r = get_or<int>(g, "n_r", 0);
    make_grid(c.n_theta, c.n_r);  // validates
  }
  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    c.solver.tol = get_or<double>(s, "tol", c.solver.tol);
    c.solver.max_iter = get_or<int>(s, "max_iter", c.solver.max_iter);
    c.solver.damping = get_or<double>(s, "damping", c.solver.damping);
    c.solver.zero_threshold = get_or<double>(s, "zero_threshold", c.solver.zero_threshold);
    c.solver.p = get_or<double>(s, "p", c.solver.p);
    c.solver.gamma = get_or<double>(s, "gamma", c.solver.gamma);
  }
  c.solver.validate();
  if (j.contains("inputs")) {
    if (!j.at("inputs").is_object()) throw InvalidArgument("config: inputs must be an object");
    c.inputs = j.at("inputs");
  }
  if (j.contains("params")) {
    if (!j.at("params").is_object()) throw InvalidArgument("config: params must be an object");
    c.params = j.at("params");
  }
  c.output_dir = get_or<std::string>(j, "outputs", ".");
  if (c.output_dir.is_relative()) c.output_dir = base_dir / c.output_dir;
  c.format = get_or<std::string>(j, "format", "phd1");
  if (c.format != "phd1" && c.format != "csv") throw InvalidArgument("config: format must be phd1 or csv");
  if (j.contains("emit_slices")) {
    for (const auto& e : j.at("emit_slices")) {
      SliceRequest req;
      req.field = get_or<std::string>(e, "field", "");
      if (e.contains("radius") == e.contains("angle"))
        throw InvalidArgument("emit_slices: each entry needs exactly one of radius or angle");
      req.slice.kind = e.contains("radius") ? Slice::Kind::radius : Slice::Kind::angle;
      req.slice.value = get_or<double>(e, e.contains("radius") ? "radius" : "angle", 0.0);
      c.emit_slices.push_back(req);
    }
  }
  return c;
}

int threads_from_env() {
  const char* v = std::getenv("PHDISK_THREADS");
  if (!v || !*v) return 1;
  char* end = nullptr;
  const long n = std::strtol(v, &end, 10);
  if (*end != '\0' || n < 1) throw InvalidArgument(std::string("PHDISK_THREADS must be a positive integer, got '") + v + "'");
  return static_cast<int>(n);
}

json run(const RunConfig& config, const RunOptions& options, std::ostream* log) {
  std::error_code ec;
  fs::create_directories(config.output_dir, ec);
  if (!fs::is_directory(config.output_dir))
    throw InvalidArgument("output directory '" + config.output_dir.string() + "' cannot be created");

  Session session(config, options, log);
  session.note("running " + config.command);
  json doc;
  doc["version"] = version();
  doc["command"] = config.command;
  doc["config"] = config.source;
  // The numerical kernels run on one thread; the cap is recorded as given.
  doc["threads"] = {{"requested", options.threads}, {"used", 1}};
  doc["report"] = handlers().at(config.command)(session);
  session.emit_slices();
  doc["outputs"] = session.outputs();
  doc["ok"] = config.command != "selftest" || doc["report"]["passed"].get<bool>();

  const auto path = config.output_dir / "report.json";
  std::ofstream os(path);
  if (!os) throw Error("cannot write '" + path.string() + "'");
  os << doc.dump(2) << '\n';
  session.note("wrote " + path.string());
  return doc;
}

std::pair<int, json> describe_error(const std::exception& e) {
  json err;
  err["message"] = e.what();
  int code = 1;
  if (const auto* c = dynamic_cast<const ConvergenceError*>(&e)) {
    err["type"] = "convergence";
    err["increment_history"] = c->history();
    code = 2;
  } else if (dynamic_cast<const MaskedValueError*>(&e)) {
    err["type"] = "masked_value";
  } else if (dynamic_cast<const InvalidArgument*>(&e)) {
    err["type"] = "validation";
  } else if (dynamic_cast<const json::exception*>(&e)) {
    err["type"] = "config_parse";
  } else {
    err["type"] = "error";
  }
  return {code, json{{"error", err}}};
}

}  // namespace phdisk::cli
