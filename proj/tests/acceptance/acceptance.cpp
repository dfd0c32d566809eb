// Acceptance criteria 1-8. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "chung/chung_core.hpp"
#include "chung/commands.hpp"
#include "chung/io.hpp"
#include "chung/optimizers.hpp"
#include "chung/pl_engine.hpp"
#include "chung/rates.hpp"
#include "chung/rng.hpp"
#include "chung/verify_suites.hpp"

using namespace chung;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int hw_threads() { return std::max(1, static_cast<int>(std::thread::hardware_concurrency())); }

struct Outcome {
  bool passed = true;
  std::string detail;
};

std::string fmt(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", prec, v);
  return buf;
}

std::string sci(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// --- 1: recursion landscape -------------------------------------------------

Outcome criterion1() {
  Outcome o;
  const fs::path dir = fs::temp_directory_path() / "chung_acceptance_landscape";
  fs::remove_all(dir);
  GlobalOptions g;
  g.config = std::string(CHUNG_TEST_CONFIGS) + "/landscape.json";
  g.out = dir.string();
  std::ostringstream out, err;
  const auto t0 = Clock::now();
  const int rc = dispatch("simulate-recursion", g, out, err);
  const double secs = seconds_since(t0);
  if (rc != exit_ok) return {false, "simulate-recursion exit " + std::to_string(rc) + ": " + err.str()};

  const CsvTable t = read_csv((dir / "simulate_recursion.csv").string());
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  for (const auto& r : t.rows) series[r[1]].emplace_back(parse_double(r[0]), parse_double(r[2]));

  const std::vector<std::pair<std::string, double>> polys{
      {"poly_p=1/2", 0.5}, {"poly_p=2/3", 2.0 / 3.0}, {"poly_p=4/5", 0.8}, {"poly_p=1", 1.0}};
  std::ostringstream d;
  for (const auto& [tag, theta] : std::vector<std::pair<std::string, double>>{{"0.5", 0.5}, {"0.666667", 2.0 / 3.0}, {"1", 1.0}}) {
    const double p_opt = optimal_p(theta, Method::sgd);
    const double target = -rate_exponent_sgd(p_opt, theta);
    double best = 1e300, best_p = 0.0;
    d << " theta=" << tag << ":";
    for (const auto& [id, p] : polys) {
      const double s = fit_loglog(series.at(id + "@theta=" + tag)).slope;
      d << " p" << fmt(p, 2) << "=" << fmt(s, 3);
      if (s < best) {
        best = s;
        best_p = p;
      }
    }
    const double se = fit_loglog(series.at("exp@theta=" + tag)).slope;
    d << " exp=" << fmt(se, 3);
    const bool at_opt = std::fabs(best_p - p_opt) < 1e-9;
    const bool on_target = std::fabs(best - target) <= 0.05;
    const bool exp_close = std::fabs(se - best) <= 0.1;
    if (!at_opt || !on_target || !exp_close) {
      o.passed = false;
      d << " [";
      if (!at_opt) d << "best p=" << fmt(best_p, 3) << " not " << fmt(p_opt, 3) << ";";
      if (!on_target) d << "best slope off target " << fmt(target, 3) << ";";
      if (!exp_close) d << "exp not within 0.1 of best;";
      d << "]";
    }
  }
  if (secs >= 120.0) o.passed = false;
  o.detail = "runtime " + fmt(secs, 1) + "s;" + d.str();
  fs::remove_all(dir);
  return o;
}

// --- 2: bound domination ----------------------------------------------------

Outcome criterion2() {
  Outcome o;
  long violations = 0, suites = 0;
  double worst = 1e300;
  std::string worst_name;
  for (const auto& name : domination_suite_names()) {
    const DominationStats st = run_domination_suite(name, 1000, 0, hw_threads());
    ++suites;
    violations += st.draws - st.dominated;
    if (st.draws != 1000) {
      o.passed = false;
      o.detail += name + " produced " + std::to_string(st.draws) + " draws; ";
    }
    if (st.worst_margin < worst) {
      worst = st.worst_margin;
      worst_name = name;
    }
  }
  if (violations > 0) o.passed = false;
  o.detail += std::to_string(suites) + " suites x 1000 draws, " + std::to_string(violations) +
              " violations, worst relative margin " + sci(worst) + " (" + worst_name + ")";
  return o;
}

// --- 3: oracle equivalence --------------------------------------------------

Outcome criterion3() {
  Outcome o;
  bool saw_oracle = false, saw_tight = false;
  for (const auto& c : verify_chung_suite(100, 3)) {
    if (c.check != "expansion_oracle" && c.check != "constant_spec_tight") continue;
    (c.check == "expansion_oracle" ? saw_oracle : saw_tight) = true;
    o.passed = o.passed && c.passed;
    o.detail += c.check + (c.passed ? " ok" : " FAILED") + " (margin " + sci(c.margin) + "); ";
  }
  o.passed = o.passed && saw_oracle && saw_tight;
  return o;
}

// --- 4: technical inequalities ----------------------------------------------

Outcome criterion4() {
  Outcome o;
  long n = 0, failed = 0;
  for (const auto& c : tech_inequality_suite(512, {0.25, 0.5, 1.0, 1.5, 2.0, 3.0})) {
    ++n;
    if (!c.passed) {
      ++failed;
      o.detail += c.check + " failed; ";
    }
  }
  RngStream r(4, 0);
  for (int t = 0; t < 100; ++t) {
    const auto c = integral_test_sandwich(r.uniform(0.05, 3.0), r.log_uniform(0.05, 100.0), r.integer(0, 50), 2000);
    ++n;
    if (!c.passed) {
      ++failed;
      o.detail += c.check + " failed; ";
    }
  }
  o.passed = failed == 0;
  o.detail += std::to_string(n) + " checks, " + std::to_string(failed) + " failed";
  return o;
}

// --- 5: SGD noisy rate ------------------------------------------------------

Outcome criterion5() {
  const auto t0 = Clock::now();
  const Problem q = make_quadratic(1.0, 1.0, 1);
  const NoiseModel noise{NoiseKind::additive_gaussian, 1.0, 0.0};
  std::vector<std::uint64_t> seeds(2000);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = 5000 + i;
  std::vector<std::pair<double, double>> pts;
  for (int e = 8; e <= 14; ++e) {
    const long K = 1L << e;
    const double alpha = 2.0 * std::log(static_cast<double>(K)) / static_cast<double>(K);
    const auto tr = sgd_run(q, noise, StepSchedule::constant(alpha), {1.0}, K, seeds, hw_threads());
    pts.emplace_back(static_cast<double>(K), tr.mean.back());
  }
  const RateFit f = fit_loglog(pts, 0, static_cast<long>(pts.size()) - 1);
  const double secs = seconds_since(t0);
  Outcome o;
  o.passed = std::fabs(f.slope + 1.0) <= 0.15 && secs < 300.0;
  o.detail = "slope " + fmt(f.slope) + " (r^2 " + fmt(f.r_squared) + "), 2000 seeds, runtime " + fmt(secs, 1) + "s";
  return o;
}

// --- 6: RR vs SGD noise floor -----------------------------------------------

// Mean gap over the last half of the run, averaged over seeds.
double floor_level(const Trajectory& tr) {
  const long n = tr.length();
  double s = 0.0;
  long c = 0;
  for (long k = n / 2; k < n; ++k, ++c) s += tr.mean[k];
  return s / static_cast<double>(c);
}

double floor_exponent(const std::function<double(double)>& level, const std::vector<double>& alphas, std::string& detail) {
  std::vector<std::pair<double, double>> pts;
  for (double a : alphas) {
    const double y = level(a);
    pts.emplace_back(a, y);
    detail += " a=" + fmt(a, 2) + ":" + sci(y);
  }
  return fit_loglog(pts, 0, static_cast<long>(pts.size()) - 1).slope;
}

Outcome criterion6() {
  const Problem mix = make_curvature_mix({0.5, 1.5}, {1.0, -1.0 / 3.0}, 1.0);
  const std::vector<double> alphas{0.02, 0.04, 0.08};
  std::vector<std::uint64_t> seeds(200);
  for (std::size_t i = 0; i < seeds.size(); ++i) seeds[i] = 600 + i;
  const int th = hw_threads();
  auto steps = [](double a) { return static_cast<long>(std::ceil(30.0 / a)); };

  std::string ds, dr, di;
  const double es = floor_exponent(
      [&](double a) {
        return floor_level(sgd_run(mix, {NoiseKind::sampled_component, 0.0, 0.0}, StepSchedule::constant(a), {0.0},
                                   steps(a), seeds, th));
      },
      alphas, ds);
  const double er = floor_exponent(
      [&](double a) { return floor_level(rr_run(mix, StepSchedule::constant(a), {0.0}, steps(a), seeds, th)); }, alphas,
      dr);
  // Shared-Hessian components, reported for comparison only.
  const Problem same = make_quadratic(1.0, 1.0, 1, 2, 1.0);
  const double ei = floor_exponent(
      [&](double a) { return floor_level(rr_run(same, StepSchedule::constant(a), {0.0}, steps(a), seeds, th)); },
      alphas, di);

  Outcome o;
  o.passed = std::fabs(es - 1.0) <= 0.2 && std::fabs(er - 2.0) <= 0.3;
  o.detail = "sgd exponent " + fmt(es, 3) + ", rr exponent " + fmt(er, 3) + " (info: shared-Hessian rr " + fmt(ei, 3) +
             "); sgd floors" + ds + "; rr floors" + dr;
  return o;
}

// --- 7: noise-free adaptivity -----------------------------------------------

Outcome criterion7() {
  Outcome o;
  const MethodConstants mc = sgd_constants(0.5, 1.0, 1.0, 0.0, 1.0);
  const double rho = mc.rho;
  const double beta = 2.0;
  const double poly_alpha = 4.0, poly_gamma = std::ceil(poly_alpha / mc.alpha_cap);
  std::map<std::string, std::vector<double>> ratios;
  bool exp_ok = true;
  for (int e = 10; e <= 16; ++e) {
    const long K = 1L << e;
    const double Kd = static_cast<double>(K), lk = std::log(Kd);
    const double a_tuned = std::min(tuned_alpha(mc, beta, K), mc.alpha_cap);
    const double log_order = std::pow(Kd, 1.0 - rho) * std::pow(lk, rho);
    ratios["constant"].push_back(step_sum(StepSchedule::constant(a_tuned), K) / log_order);
    ratios["cosine"].push_back(step_sum(StepSchedule::cosine(a_tuned, 1.0, K), K) / log_order);
    ratios["polynomial"].push_back(step_sum(StepSchedule::polynomial(poly_alpha, poly_gamma, rho), K) /
                                   std::pow(Kd, 1.0 - rho));
    const double ea = mc.alpha_cap, eb = 1.0;
    const double lower = ea * (1.0 - eb / Kd) * Kd / std::log(Kd / eb);
    exp_ok = exp_ok && step_sum(StepSchedule::exponential(ea, eb, 1.0, K), K) >= lower * (1.0 - 1e-12);
  }
  if (!exp_ok) {
    o.passed = false;
    o.detail += "exponential sum below its lower bound; ";
  }
  for (const auto& [name, r] : ratios) {
    const double band = *std::max_element(r.begin(), r.end()) / *std::min_element(r.begin(), r.end());
    o.detail += name + " band " + fmt(band, 3) + "; ";
    if (!(band <= 2.0)) o.passed = false;
  }

  // GD against the noise-free bound at every iterate.
  long checked = 0, violations = 0;
  const long K = 4096;
  const std::vector<Problem> problems{make_quadratic(1.0, 1.0, 1), make_quadratic(0.2, 1.0, 4),
                                      make_power_family(2.0 / 3.0, 1.0, 2.0), make_power_family(0.75, 0.5, 1.5)};
  for (const Problem& pb : problems) {
    const double cap = 1.0 / pb.smoothness_L;
    const std::vector<StepSchedule> scheds{StepSchedule::constant(cap), StepSchedule::polynomial(cap * 8.0, 8.0, 1.0),
                                           StepSchedule::exponential(cap, 1.0, 1.0, K),
                                           StepSchedule::cosine(cap, 1.0, K)};
    const Vec x0(static_cast<std::size_t>(pb.dim), pb.domain_radius * 0.9);
    for (const auto& s : scheds) {
      const auto tr = gd_run(pb, s, x0, K);
      double sum = 0.0;
      for (long k = 0; k <= K; ++k) {
        const double bound = noise_free_bound(pb.pl_theta, pb.pl_mu, tr.gaps[0][0], sum);
        ++checked;
        if (tr.gaps[0][k] > bound * (1.0 + 1e-10) + 1e-300) ++violations;
        if (k < K) sum += step_value(s, k);
      }
    }
  }
  if (violations > 0) o.passed = false;
  o.detail += "gd noise-free domination " + std::to_string(checked - violations) + "/" + std::to_string(checked);
  return o;
}

// --- 8: heatmap argmax ------------------------------------------------------

Outcome criterion8() {
  Outcome o;
  const long n = 101;
  std::vector<double> ps;
  for (long j = 1; j <= n; ++j) ps.push_back(static_cast<double>(j) / static_cast<double>(n));
  const auto thetas = linspace(0.5, 1.0, 51);
  double worst = 0.0;
  for (Method m : {Method::sgd, Method::rr}) {
    const Heatmap h = heatmap_grid(ps, thetas, m);
    for (std::size_t i = 0; i < thetas.size(); ++i) {
      const auto& row = h.values[i];
      const std::size_t best = std::max_element(row.begin(), row.end()) - row.begin();
      const double off = std::fabs(ps[best] - optimal_p(thetas[i], m));
      worst = std::max(worst, off);
      if (off > 1.0 / static_cast<double>(n) + 1e-12) o.passed = false;
    }
  }
  o.detail = "101x51 grid, largest argmax offset " + fmt(worst, 5) + " (cell " + fmt(1.0 / n, 5) + ")";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"1 recursion landscape slopes", criterion1}, {"2 bound domination", criterion2},
      {"3 oracle equivalence", criterion3},         {"4 technical inequalities", criterion4},
      {"5 SGD noisy rate", criterion5},             {"6 RR vs SGD noise floor", criterion6},
      {"7 noise-free adaptivity", criterion7},      {"8 heatmap argmax", criterion8}};
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s criterion %s: %s\n", o.passed ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
    failed += o.passed ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
