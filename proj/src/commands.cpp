#include "chung/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <sstream>

#include "chung/config.hpp"
#include "chung/errors.hpp"
#include "chung/io.hpp"
#include "chung/optimizers.hpp"
#include "chung/pl_engine.hpp"
#include "chung/rates.hpp"
#include "chung/report.hpp"
#include "chung/verify_suites.hpp"

namespace chung {

namespace {

// verify_pl failed on the configured problem.
struct ProblemVerificationError : std::runtime_error {
  json report;
  explicit ProblemVerificationError(json r) : std::runtime_error("problem verification failed"), report(std::move(r)) {}
};

json load_config(const GlobalOptions& o) {
  if (o.config.empty()) throw ConfigError("--config is required for this command");
  return load_json_file(o.config);
}

std::string out_path(const GlobalOptions& o, const std::string& name) {
  std::filesystem::create_directories(o.out);
  return (std::filesystem::path(o.out) / name).string();
}

// Writes to <out>/name when --out is set, otherwise to the stream.
void emit(const GlobalOptions& o, std::ostream& out, const std::string& name, const std::string& content) {
  if (o.out.empty())
    out << content;
  else
    write_text(out_path(o, name), content);
}

std::uint64_t require_seed(const GlobalOptions& o, const Section* top, const std::string& what) {
  if (o.seed) return *o.seed;
  if (top && top->has("seed")) {
    const long s = top->integer("seed");
    if (s < 0) throw ConfigError("seed must be nonnegative");
    return static_cast<std::uint64_t>(s);
  }
  throw ConfigError(what + " is randomized and needs an explicit --seed");
}

json constants_json(const DerivedConstants& dc) {
  json j;
  j["delta"] = number_json(dc.delta);
  j["zeta"] = number_json(dc.zeta);
  j["xi"] = number_json(dc.xi);
  j["rho"] = number_json(dc.rho);
  j["omega"] = number_json(dc.omega);
  j["q"] = number_json(dc.q);
  j["frak_p"] = number_json(dc.frak_p);
  j["alpha_cap"] = number_json(dc.alpha_cap);
  return j;
}

json method_json(const MethodConstants& mc) {
  json j;
  j["method"] = method_name(mc.method);
  j["theta"] = mc.theta;
  j["L"] = mc.L;
  j["mu"] = mc.mu;
  j["A"] = mc.A;
  j["sigma"] = mc.sigma;
  j["N"] = mc.N;
  j["rho"] = number_json(mc.rho);
  j["omega"] = number_json(mc.omega);
  j["zeta"] = number_json(mc.zeta);
  j["zeta_bar"] = number_json(mc.zeta_bar);
  j["xi"] = number_json(mc.xi);
  j["xi_bar"] = number_json(mc.xi_bar);
  j["alpha_cap"] = number_json(mc.alpha_cap);
  j["smoothness_cap"] = number_json(mc.smoothness_cap);
  return j;
}

// --- simulate-recursion ----------------------------------------------------

struct SeriesSpec {
  std::string id;
  Family family;
  bool auto_alpha = false;
  double alpha = 0.0, gamma = 0.0, p = 1.0, beta = 1.0;
};

SeriesSpec parse_series(const Section& s) {
  SeriesSpec sp;
  const std::string fam = s.string("family");
  try {
    sp.family = parse_family(fam);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(s.path() + ": " + e.what());
  }
  sp.id = s.string("id", fam);
  if (s.has("alpha") && s.raw().at("alpha").is_string() && s.raw().at("alpha").get<std::string>() == "auto") {
    if (sp.family != Family::polynomial) throw ConfigError(s.path() + ".alpha: \"auto\" needs the polynomial family");
    sp.auto_alpha = true;
  } else {
    sp.alpha = s.number("alpha");
  }
  if (sp.family == Family::polynomial) {
    sp.p = s.number("p");
    if (!sp.auto_alpha) sp.gamma = s.number("gamma");
  } else if (sp.family == Family::exponential) {
    sp.beta = s.number("beta", 1.0);
    sp.p = s.number("p", 1.0);
  } else if (sp.family == Family::cosine) {
    sp.p = s.number("p", 1.0);
  }
  s.finish();
  return sp;
}

StepSchedule make_schedule(const SeriesSpec& sp, const PLParams& pl, double delta, long K, long K_max) {
  try {
    switch (sp.family) {
      case Family::constant: return StepSchedule::constant(sp.alpha);
      case Family::polynomial: {
        if (!sp.auto_alpha) return StepSchedule::polynomial(sp.alpha, sp.gamma, sp.p);
        const PolyChoice ch = feasible_poly_parameters(pl, delta, sp.p, K_max);
        return StepSchedule::polynomial(ch.alpha, ch.gamma, sp.p);
      }
      case Family::exponential: return StepSchedule::exponential(sp.alpha, sp.beta, sp.p, K);
      case Family::cosine: return StepSchedule::cosine(sp.alpha, sp.p, K);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError("schedule '" + sp.id + "': " + e.what());
  }
  throw ConfigError("unreachable schedule family");
}

std::string theta_tag(double theta) {
  std::ostringstream os;
  os.precision(6);
  os << theta;
  return os.str();
}

}  // namespace

int cmd_simulate_recursion(const GlobalOptions& o, std::ostream& out, std::ostream&) {
  const Section top(load_config(o), "config");
  const PLParams base = parse_pl(top.section("pl"), 0.5);
  std::vector<double> thetas = top.has("thetas") ? top.numbers("thetas") : std::vector<double>{base.theta};
  const double y0 = top.number("y0");
  const double delta = top.number("delta", 1.0);
  std::vector<long> grid = top.integers("K_grid");
  std::vector<SeriesSpec> series;
  for (const auto& s : top.sections("schedules")) series.push_back(parse_series(s));
  top.finish();
  if (grid.empty() || series.empty() || thetas.empty()) throw ConfigError("K_grid, schedules and thetas must be non-empty");
  if (!(y0 >= 0.0)) throw ConfigError("y0 must be nonnegative");
  for (long K : grid)
    if (K < 1) throw ConfigError("K_grid entries must be positive");
  const long K_max = *std::max_element(grid.begin(), grid.end());

  // values[(theta, series)][grid index]
  std::vector<std::vector<double>> values;
  std::vector<std::string> ids;
  for (double th : thetas) {
    PLParams pl = base;
    pl.theta = th;
    try {
      pl.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("thetas: ") + e.what());
    }
    for (const auto& sp : series) {
      ids.push_back(sp.id + "@theta=" + theta_tag(th));
      std::vector<double> ys;
      if (sp.family == Family::constant || sp.family == Family::polynomial) {
        const auto traj = simulate_pl_recursion(pl, make_schedule(sp, pl, delta, K_max, K_max), y0, K_max);
        for (long K : grid) ys.push_back(traj[K]);
      } else {
        for (long K : grid) ys.push_back(simulate_pl_recursion(pl, make_schedule(sp, pl, delta, K, K_max), y0, K).back());
      }
      values.push_back(std::move(ys));
    }
  }
  std::ostringstream csv;
  csv << "K,schedule_id,y_K\n";
  for (std::size_t g = 0; g < grid.size(); ++g)
    for (std::size_t s = 0; s < ids.size(); ++s) csv << grid[g] << ',' << ids[s] << ',' << fmt17(values[s][g]) << '\n';
  emit(o, out, "simulate_recursion.csv", csv.str());
  return exit_ok;
}

// --- bound -------------------------------------------------------------------

int cmd_bound(const GlobalOptions& o, std::ostream& out, std::ostream&) {
  const Section top(load_config(o), "config");
  const std::string theorem = top.string("theorem");
  const auto slash = theorem.find('/');
  if (slash == std::string::npos) throw ConfigError("theorem must look like sgd/const");
  Method m;
  Family fam;
  try {
    m = parse_method(theorem.substr(0, slash));
    const std::string f = theorem.substr(slash + 1);
    const std::map<std::string, std::string> short_names{
        {"exp", "exponential"}, {"cos", "cosine"}, {"const", "constant"}, {"poly", "polynomial"}};
    fam = parse_family(short_names.count(f) ? short_names.at(f) : f);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("theorem: ") + e.what());
  }
  const bool tuned = top.boolean("tuned", false);
  const MethodConstants mc = parse_method_constants(m, top.section("constants"));
  const long K = top.integer("K");
  const double y0 = top.number("y0");
  if (K < 1) throw ConfigError("K must be positive");
  if (!(y0 >= 0.0)) throw ConfigError("y0 must be nonnegative");

  BoundResult b;
  if (tuned) {
    const Section t = top.section("tuning");
    switch (fam) {
      case Family::constant: {
        const double beta = t.number("beta");
        t.finish();
        top.finish();
        b = bound_const_tuned(mc, beta, y0, K);
        break;
      }
      case Family::cosine: {
        const double beta = t.number("beta"), p = t.number("p", 1.0);
        t.finish();
        top.finish();
        b = bound_cos_tuned(mc, p, beta, y0, K);
        break;
      }
      case Family::polynomial: {
        const double a = m == Method::sgd ? t.number("alpha") : t.number("beta");
        const double gamma = t.number("gamma");
        t.finish();
        top.finish();
        b = bound_poly_tuned(mc, a, gamma, y0, K);
        break;
      }
      case Family::exponential: throw ConfigError("no tuned form of the exponential bound");
    }
  } else {
    const Section s = top.section("schedule");
    if (s.string("family") != family_name(fam)) throw ConfigError("schedule.family does not match the theorem");
    const PolyCase pc = parse_poly_case(top.string("case", "auto"));
    if (fam == Family::exponential) {
      const double beta = s.raw().contains("beta") && s.raw().at("beta").is_number() ? s.raw().at("beta").get<double>() : 1.0;
      if (!(static_cast<double>(K) > beta)) throw PreconditionError({"K must exceed beta"});
    }
    const StepSchedule sched = parse_schedule(s, K);
    top.finish();
    switch (fam) {
      case Family::exponential: b = bound_exp(mc, sched, y0); break;
      case Family::cosine: b = bound_cos(mc, sched, y0); break;
      case Family::constant: b = bound_const(mc, sched, y0, K); break;
      case Family::polynomial: b = bound_poly(mc, sched, y0, K, pc); break;
    }
  }
  json j;
  j["theorem"] = theorem;
  j["tuned"] = tuned;
  j["K"] = K;
  j["value"] = number_json(b.value);
  j["noise_term"] = number_json(b.noise_term);
  j["init_term"] = number_json(b.init_term);
  j["regime"] = b.regime;
  j["constants"] = constants_json(b.constants);
  j["method_constants"] = method_json(mc);
  json d = json::object();
  for (const auto& [k, v] : b.details) d[k] = number_json(v);
  j["details"] = d;
  emit(o, out, "bound.json", j.dump(2) + "\n");
  return exit_ok;
}

// --- run ---------------------------------------------------------------------

int cmd_run(const GlobalOptions& o, std::ostream& out, std::ostream& err) {
  json cfg = load_config(o);
  if (cfg.is_object() && cfg.contains("kind") && cfg["kind"] == "manifest") {
    if (!cfg.contains("config")) throw ConfigError("manifest has no config");
    cfg = cfg["config"];
  }
  const Section top(cfg, "config");
  const std::string method = top.string("method");
  if (method != "gd" && method != "sgd" && method != "rr") throw ConfigError("method must be gd, sgd or rr");
  const Problem pb = parse_problem(top.section("problem"));
  const long K = top.integer("K");
  if (K < 0) throw ConfigError("K must be nonnegative");
  const StepSchedule sched = parse_schedule(top.section("schedule"), K);
  Vec x0;
  if (!top.has("x0")) throw ConfigError("config: missing key 'x0'");
  if (top.raw().at("x0").is_array())
    x0 = top.numbers("x0");
  else
    x0 = Vec(static_cast<std::size_t>(pb.dim), top.number("x0"));
  if (static_cast<int>(x0.size()) != pb.dim) throw ConfigError("x0 has wrong dimension");
  const long samples = top.integer("verify_samples", 2000);

  NoiseModel noise;
  std::vector<std::uint64_t> seeds{0};
  std::optional<std::uint64_t> seed;
  if (method != "gd") {
    if (method == "sgd") noise = parse_noise(top.section("noise"));
    if (top.has("seeds") && !top.has("num_seeds")) {
      seeds = parse_seeds(top, 0);
      if (o.seed || top.has("seed")) seed = require_seed(o, &top, "run");
    } else {
      seed = require_seed(o, &top, "run with " + method);
      seeds = parse_seeds(top, *seed);
    }
  }
  top.finish();

  if (!o.skip_verify) {
    const auto checks = verify_pl(pb, samples, seed.value_or(0));
    if (!all_passed(checks)) throw ProblemVerificationError(to_json(checks));
  }

  Trajectory tr;
  if (method == "gd")
    tr = gd_run(pb, sched, x0, K);
  else if (method == "sgd")
    tr = sgd_run(pb, noise, sched, x0, K, seeds, o.threads);
  else
    tr = rr_run(pb, sched, x0, K, seeds, o.threads);

  if (o.out.empty()) {
    std::ostringstream csv;
    csv << "k,mean_gap,stderr\n";
    for (long k = 0; k < tr.length(); ++k) csv << k << ',' << fmt17(tr.mean[k]) << ',' << fmt17(tr.stderr_[k]) << '\n';
    out << csv.str();
    return exit_ok;
  }
  write_trajectory_csv(out_path(o, "trajectories.csv"), tr);
  write_mean_csv(out_path(o, "mean.csv"), tr);

  json resolved = cfg;
  if (method != "gd") {
    resolved.erase("num_seeds");
    resolved["seeds"] = seeds;
    if (seed) resolved["seed"] = *seed;
  }
  json man;
  man["kind"] = "manifest";
  man["command"] = "run";
  man["version"] = kVersion;
  man["config_hash"] = config_hash(resolved);
  man["seeds"] = tr.seeds;
  man["schedule"] = sched.describe();
  man["problem"] = pb.name;
  long left = 0;
  for (bool b : tr.left_region) left += b ? 1 : 0;
  man["runs_left_region"] = left;
  man["config"] = resolved;
  write_text(out_path(o, "manifest.json"), man.dump(2) + "\n");
  if (left > 0) err << "warning: " << left << " run(s) left the certified region\n";
  return exit_ok;
}

// --- verify ------------------------------------------------------------------

int cmd_verify(const GlobalOptions& o, std::ostream& out, std::ostream&) {
  if (o.positional.size() != 1) throw ConfigError("verify needs one suite: chung, bounds, inequalities or assumptions");
  const std::string suite = o.positional[0];
  std::optional<Section> top;
  if (!o.config.empty()) top.emplace(load_json_file(o.config), "config");
  auto num = [&](const std::optional<long>& flag, const std::string& key, long fallback) {
    if (flag) return *flag;
    if (top && top->has(key)) return top->integer(key);
    return fallback;
  };
  std::vector<CheckResult> checks;
  json extra = json::object();
  if (suite == "inequalities") {
    const long K_max = num(o.kmax, "K_max", 512);
    std::vector<double> r_grid{0.25, 0.5, 1.0, 1.5, 2.0, 3.0};
    if (top && top->has("r_grid")) r_grid = top->numbers("r_grid");
    if (top) top->finish();
    checks = verify_inequalities_suite(K_max, r_grid);
    extra["K_max"] = K_max;
  } else if (suite == "bounds" || suite == "chung" || suite == "assumptions") {
    const std::uint64_t seed = require_seed(o, top ? &*top : nullptr, "verify " + suite);
    if (suite == "bounds") {
      const long draws = num(o.draws, "draws", 1000);
      if (top) top->finish();
      json stats = json::array();
      for (const auto& name : domination_suite_names()) {
        const DominationStats st = run_domination_suite(name, draws, seed, o.threads);
        checks.push_back(st.to_check());
        stats.push_back({{"suite", st.name},
                         {"draws", st.draws},
                         {"dominated", st.dominated},
                         {"rejected", st.rejected},
                         {"worst_margin", number_json(st.worst_margin)}});
      }
      extra["draws"] = draws;
      extra["domination"] = stats;
    } else if (suite == "chung") {
      const long draws = num(o.draws, "draws", 100);
      if (top) top->finish();
      checks = verify_chung_suite(draws, seed);
      extra["draws"] = draws;
    } else {
      const long samples = num(o.draws, "samples", 2000);
      if (top) top->finish();
      checks = verify_assumptions_suite(seed, samples, o.threads);
      extra["samples"] = samples;
    }
    extra["seed"] = seed;
  } else {
    throw ConfigError("unknown suite '" + suite + "'");
  }
  json j;
  j["suite"] = suite;
  j["passed"] = all_passed(checks);
  j["checks"] = to_json(checks);
  for (auto it = extra.begin(); it != extra.end(); ++it) j[it.key()] = it.value();
  emit(o, out, "verify_" + suite + ".json", j.dump(2) + "\n");
  return all_passed(checks) ? exit_ok : exit_verify_failed;
}

// --- fit / heatmap -----------------------------------------------------------

namespace {

// Series keyed by name, in first-appearance order.
struct SeriesSet {
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::pair<double, double>>> points;
  void add(const std::string& name, double x, double y) {
    if (!points.count(name)) order.push_back(name);
    points[name].emplace_back(x, y);
  }
};

SeriesSet read_series(const std::string& path) {
  CsvTable t;
  try {
    t = read_csv(path);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  SeriesSet set;
  try {
    if (t.column("schedule_id") >= 0 && t.column("K") >= 0 && t.column("y_K") >= 0) {
      const int ck = t.column("K"), cs = t.column("schedule_id"), cy = t.column("y_K");
      for (const auto& r : t.rows) set.add(r[cs], parse_double(r[ck]), parse_double(r[cy]));
    } else if (t.column("k") >= 0 && t.column("mean_gap") >= 0) {
      const int ck = t.column("k"), cy = t.column("mean_gap");
      for (const auto& r : t.rows) {
        const double k = parse_double(r[ck]);
        if (k >= 1.0) set.add("mean_gap", k, parse_double(r[cy]));
      }
    } else if (t.column("K") >= 0 && t.column("y") >= 0) {
      const int ck = t.column("K"), cy = t.column("y");
      for (const auto& r : t.rows) set.add("y", parse_double(r[ck]), parse_double(r[cy]));
    } else {
      throw ConfigError(path + ": expected columns K,schedule_id,y_K or k,mean_gap,stderr or K,y");
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return set;
}

}  // namespace

int cmd_fit(const GlobalOptions& o, std::ostream& out, std::ostream&) {
  if (o.positional.size() != 1) throw ConfigError("fit needs one input CSV");
  const SeriesSet set = read_series(o.positional[0]);
  json arr = json::array();
  for (const auto& name : set.order) {
    auto pts = set.points.at(name);
    std::sort(pts.begin(), pts.end());
    RateFit f;
    try {
      f = fit_loglog(pts);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("series '" + name + "': " + e.what());
    }
    arr.push_back({{"series", name},
                   {"slope", number_json(f.slope)},
                   {"intercept", number_json(f.intercept)},
                   {"r_squared", number_json(f.r_squared)},
                   {"window_lo", f.window_lo},
                   {"window_hi", f.window_hi},
                   {"points", pts.size()}});
  }
  emit(o, out, "fit.json", arr.dump(2) + "\n");
  return exit_ok;
}

int cmd_heatmap(const GlobalOptions& o, std::ostream& out, std::ostream&) {
  Method m;
  try {
    m = parse_method(o.method);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (o.p_cells < 2 || o.theta_cells < 1) throw ConfigError("grid needs at least 2 p cells and 1 theta cell");
  std::vector<double> p_grid;
  for (long j = 1; j <= o.p_cells; ++j) p_grid.push_back(static_cast<double>(j) / static_cast<double>(o.p_cells));
  const Heatmap h = heatmap_grid(p_grid, linspace(0.5, 1.0, o.theta_cells), m);
  emit(o, out, "heatmap_" + method_name(m) + ".csv", h.to_csv());
  if (!o.out.empty()) {
    json arr = json::array();
    for (std::size_t i = 0; i < h.theta_grid.size(); ++i) {
      const auto& row = h.values[i];
      const auto best = std::max_element(row.begin(), row.end()) - row.begin();
      arr.push_back({{"theta", h.theta_grid[i]}, {"argmax_p", h.p_grid[best]}, {"optimal_p", optimal_p(h.theta_grid[i], m)}});
    }
    out << arr.dump(2) << "\n";
  }
  return exit_ok;
}

int dispatch(const std::string& command, const GlobalOptions& o, std::ostream& out, std::ostream& err) {
  try {
    if (command == "simulate-recursion") return cmd_simulate_recursion(o, out, err);
    if (command == "bound") return cmd_bound(o, out, err);
    if (command == "run") return cmd_run(o, out, err);
    if (command == "verify") return cmd_verify(o, out, err);
    if (command == "fit") return cmd_fit(o, out, err);
    if (command == "heatmap") return cmd_heatmap(o, out, err);
    err << "unknown command '" << command << "'\n";
    return exit_config;
  } catch (const PreconditionError& e) {
    json j;
    j["error"] = "precondition";
    j["failures"] = e.failures();
    out << j.dump(2) << "\n";
    err << e.what() << "\n";
    return exit_precondition;
  } catch (const ProblemVerificationError& e) {
    json j;
    j["error"] = "problem verification";
    j["checks"] = e.report;
    out << j.dump(2) << "\n";
    err << e.what() << "\n";
    return exit_problem_verification;
  } catch (const NumericError& e) {
    err << "numeric failure at index " << e.index() << ": " << e.what() << "\n";
    return exit_numeric;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return exit_config;
  }
}

}  // namespace chung
