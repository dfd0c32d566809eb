#include "chung/verify_suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <stdexcept>

#include "chung/chung_core.hpp"
#include "chung/errors.hpp"
#include "chung/numeric.hpp"
#include "chung/optimizers.hpp"
#include "chung/parallel.hpp"
#include "chung/pl_engine.hpp"
#include "chung/rng.hpp"

namespace chung {

namespace {

constexpr double kDomTol = 1e-10;

struct Outcome {
  double y = 0.0;
  double bound = 0.0;
};

using Drawer = std::function<std::optional<Outcome>(RngStream&)>;

std::optional<double> worst_case(const PLParams& pl, const StepSchedule& s, double y0, long K) {
  try {
    return simulate_pl_recursion(pl, s, y0, K).back();
  } catch (const NumericError&) {
    return std::nullopt;
  }
}

double draw_theta(RngStream& r) {
  const double u = r.uniform();
  if (u < 0.2) return 0.5;
  if (u < 0.3) return 1.0;
  return r.uniform(0.5, 1.0);
}

long draw_K(RngStream& r, double lo, double hi) {
  return std::max(static_cast<long>(std::ceil(lo)), std::lround(r.log_uniform(lo, hi)));
}

double draw_y0(RngStream& r) { return r.log_uniform(1e-3, 10.0); }

MethodConstants draw_method(RngStream& r, Method m) {
  const double th = draw_theta(r);
  const double L = r.log_uniform(0.2, 5.0);
  const double mu = L * r.uniform(0.05, 1.0);
  const double A = r.uniform() < 0.5 ? 0.0 : r.log_uniform(0.01, 2.0);
  const double sigma = r.log_uniform(0.05, 3.0);
  if (m == Method::sgd) return sgd_constants(th, L, mu, A, sigma);
  return rr_constants(th, L, mu, A, sigma, r.integer(1, 16));
}

PLParams draw_pl(RngStream& r, double theta_lo) {
  PLParams p;
  p.theta = theta_lo <= 0.5 ? draw_theta(r) : r.uniform(theta_lo, 1.0);
  p.l1 = r.uniform() < 0.5 ? 0.0 : r.log_uniform(0.01, 1.0);
  p.l2 = r.log_uniform(0.2, 2.0);
  p.l3 = r.log_uniform(0.01, 1.0);
  p.tau = r.uniform(1.5, 3.5);
  return p;
}

// Smallest integer K >= 3 with K >= g(K), for increasing concave g.
long smallest_fixed_point(const std::function<double(double)>& g, long limit) {
  double K = 3.0;
  for (int i = 0; i < 2000; ++i) {
    double next = std::max(3.0, std::ceil(g(K)));
    if (next <= K) return static_cast<long>(K);
    K = next;
    if (K > static_cast<double>(limit)) return limit + 1;
  }
  return limit + 1;
}

// K-threshold of the tuned constant and cosine theorems.
long tuned_min_K(const MethodConstants& mc, double beta) {
  const double c = beta * mc.n_factor() / std::pow(mc.alpha_cap, 1.0 / mc.rho);
  const double sn = mc.method == Method::sgd ? 1.0 : std::sqrt(static_cast<double>(mc.N));
  return smallest_fixed_point([&](double K) { return c * std::log(sn * K); }, 20000);
}

Outcome make_outcome(double y, const BoundResult& b) { return Outcome{y, b.value}; }

// --- theorem suites ------------------------------------------------------

std::optional<Outcome> draw_exp(RngStream& r, Method m) {
  const MethodConstants mc = draw_method(r, m);
  const double y0 = draw_y0(r);
  const double alpha = mc.alpha_cap * r.uniform(0.05, 1.0);
  const double beta = r.log_uniform(0.5, 8.0);
  const double p = r.log_uniform(0.25, 3.0);
  const long K = draw_K(r, std::floor(beta) + 1.0, 4000.0);
  const auto s = StepSchedule::exponential(alpha, beta, p, K);
  const BoundResult b = bound_exp(mc, s, y0);
  auto y = worst_case(mc.pl(), s, y0, K);
  if (!y) return std::nullopt;
  return make_outcome(*y, b);
}

std::optional<Outcome> draw_cos(RngStream& r, Method m) {
  const MethodConstants mc = draw_method(r, m);
  const double y0 = draw_y0(r);
  const double p = r.log_uniform(0.25, 3.0);
  if (r.uniform() < 0.5) {
    const double bmin = std::pow(2.0, std::max(1.0, p / mc.rho)) * mc.omega / mc.xi_bar;
    const double beta = bmin * r.uniform(1.0, 3.0);
    const long Kmin = tuned_min_K(mc, beta);
    if (Kmin > 20000) return std::nullopt;
    const long K = std::lround(static_cast<double>(Kmin) * r.uniform(1.0, 2.0));
    const BoundResult b = bound_cos_tuned(mc, p, beta, y0, K);
    const auto s = StepSchedule::cosine(b.details.at("alpha"), p, K);
    auto y = worst_case(mc.pl(), s, y0, K);
    if (!y) return std::nullopt;
    return make_outcome(*y, b);
  }
  const double alpha = mc.alpha_cap * r.uniform(0.05, 1.0);
  const long K = draw_K(r, 2.0, 4000.0);
  const auto s = StepSchedule::cosine(alpha, p, K);
  const BoundResult b = bound_cos(mc, s, y0);
  auto y = worst_case(mc.pl(), s, y0, K);
  if (!y) return std::nullopt;
  return make_outcome(*y, b);
}

std::optional<Outcome> draw_const(RngStream& r, Method m) {
  const MethodConstants mc = draw_method(r, m);
  const double y0 = draw_y0(r);
  if (r.uniform() < 0.5) {
    const double beta = mc.omega / mc.xi_bar * r.uniform(1.0, 3.0);
    const long Kmin = tuned_min_K(mc, beta);
    if (Kmin > 20000) return std::nullopt;
    const long K = std::lround(static_cast<double>(Kmin) * r.uniform(1.0, 2.0));
    const BoundResult b = bound_const_tuned(mc, beta, y0, K);
    const auto s = StepSchedule::constant(b.details.at("alpha"));
    auto y = worst_case(mc.pl(), s, y0, K);
    if (!y) return std::nullopt;
    return make_outcome(*y, b);
  }
  const double alpha = mc.alpha_cap * r.uniform(0.05, 1.0);
  const long K = draw_K(r, 1.0, 4000.0);
  const auto s = StepSchedule::constant(alpha);
  const BoundResult b = bound_const(mc, s, y0, K);
  auto y = worst_case(mc.pl(), s, y0, K);
  if (!y) return std::nullopt;
  return make_outcome(*y, b);
}

double case_exponent(RngStream& r, PolyCase c, double rho) {
  switch (c) {
    case PolyCase::a: return rho * r.uniform(0.2, 0.95);
    case PolyCase::b: return rho;
    case PolyCase::c: return rho + (1.0 - rho) * r.uniform(0.05, 0.95);
    case PolyCase::d:
    case PolyCase::automatic: break;
  }
  return 1.0;
}

// Randomly inflated feasible parameters for the polynomial lemma; extra_cap
// is an additional bound on alpha / gamma^p.
StepSchedule draw_poly_schedule(RngStream& r, const PLParams& pl, double delta, PolyCase c, double p, long K,
                                double extra_cap) {
  const DerivedConstants dc = derive_constants(pl, delta);
  PolyChoice ch = feasible_poly_parameters(pl, delta, p, K);
  if (c == PolyCase::b) {
    ch.alpha *= r.uniform(1.0, 2.0);
    ch.gamma = std::max(ch.gamma, std::pow(ch.alpha / dc.alpha_cap, 1.0 / p));
  }
  ch.gamma = std::max(ch.gamma, std::pow(ch.alpha / extra_cap, 1.0 / p));
  ch.gamma *= r.uniform(1.0, 2.0);
  return StepSchedule::polynomial(ch.alpha, ch.gamma, p);
}

std::optional<Outcome> draw_poly(RngStream& r, Method m) {
  const MethodConstants mc = draw_method(r, m);
  const double y0 = draw_y0(r);
  const double rho = mc.rho, om = mc.omega;
  if (r.uniform() < 0.5) {
    if (m == Method::sgd) {
      const double alpha = std::pow(2.0 * om / mc.xi, rho) * r.uniform(1.0, 2.0);
      const double gamma = std::pow(alpha / mc.alpha_cap, 1.0 / rho) * r.uniform(1.0, 2.0);
      const long K = draw_K(r, 1.0, 4000.0);
      const BoundResult b = bound_poly_tuned(mc, alpha, gamma, y0, K);
      auto y = worst_case(mc.pl(), StepSchedule::polynomial(alpha, gamma, rho), y0, K);
      if (!y) return std::nullopt;
      return make_outcome(*y, b);
    }
    const double beta = 2.0 * om / mc.xi_bar * r.uniform(1.0, 2.0);
    const double sn = std::sqrt(static_cast<double>(mc.N));
    const double c = beta * mc.n_factor() / std::pow(mc.alpha_cap, 1.0 / rho);
    const long Kmin = smallest_fixed_point([&](double K) { return std::max(2.0 * c * std::log(sn * K), 3.0); }, 20000);
    if (Kmin > 20000) return std::nullopt;
    const long K = std::lround(static_cast<double>(Kmin) * r.uniform(1.0, 2.0));
    const double glo = c * std::log(sn * static_cast<double>(K));
    const double gamma = glo + (static_cast<double>(K) / 2.0 - glo) * r.uniform();
    const BoundResult b = bound_poly_tuned(mc, beta, gamma, y0, K);
    const double alpha = b.details.at("alpha");
    auto y = worst_case(mc.pl(), StepSchedule::polynomial(alpha, gamma, rho), y0, K);
    if (!y) return std::nullopt;
    return make_outcome(*y, b);
  }
  PolyCase c = PolyCase::b;
  const double u = r.uniform();
  if (mc.theta == 0.5)
    c = u < 0.5 ? PolyCase::a : PolyCase::b;
  else
    c = u < 0.25 ? PolyCase::a : u < 0.5 ? PolyCase::b : u < 0.75 ? PolyCase::c : PolyCase::d;
  const PLParams pl = mc.pl();
  const double p = c == PolyCase::b ? derive_constants(pl, mc.delta()).rho : case_exponent(r, c, rho);
  const long K = draw_K(r, 1.0, 4000.0);
  const auto s = draw_poly_schedule(r, pl, mc.delta(), c, p, K, mc.smoothness_cap);
  const BoundResult b = bound_poly(mc, s, y0, K, c);
  auto y = worst_case(pl, s, y0, K);
  if (!y) return std::nullopt;
  return make_outcome(*y, b);
}

// --- lemma suites --------------------------------------------------------

std::optional<Outcome> draw_lemma_poly(RngStream& r, PolyCase c) {
  const double theta_lo = c == PolyCase::c ? 0.55 : c == PolyCase::d ? 0.6 : 0.5;
  const PLParams pl = draw_pl(r, theta_lo);
  const double delta = r.log_uniform(0.2, 2.0);
  const double y0 = r.log_uniform(1e-3, 5.0);
  const DerivedConstants dc = derive_constants(pl, delta);
  const double p = case_exponent(r, c, dc.rho);
  const long K = draw_K(r, 1.0, 4000.0);
  const auto s = draw_poly_schedule(r, pl, delta, c, p, K, kInf);
  const BoundResult b = bound_poly(pl, delta, s, y0, K, c);
  auto y = worst_case(pl, s, y0, K);
  if (!y) return std::nullopt;
  return make_outcome(*y, b);
}

std::optional<Outcome> draw_lemma_const(RngStream& r) {
  const PLParams pl = draw_pl(r, 0.5);
  const double delta = r.log_uniform(0.2, 2.0);
  const double y0 = r.log_uniform(1e-3, 5.0);
  const DerivedConstants dc = derive_constants(pl, delta);
  const double alpha = dc.alpha_cap * r.uniform(0.05, 1.0);
  const long K = draw_K(r, 1.0, 4000.0);
  const auto s = StepSchedule::constant(alpha);
  const BoundResult b = lemma_bound_const(pl, delta, s, y0, K);
  auto y = worst_case(pl, s, y0, K);
  if (!y) return std::nullopt;
  return make_outcome(*y, b);
}

// Classical recursion with equality; the worst margin over all k <= K-1 is
// reported through the outcome with the smallest normalized slack.
std::optional<Outcome> draw_classical(RngStream& r, ClassicalVariant variant, bool nu_one) {
  ClassicalParams p;
  p.q = r.log_uniform(0.05, 2.0);
  p.d = r.log_uniform(0.01, 10.0);
  if (nu_one) {
    p.nu = 1.0;
    p.c = p.q * r.uniform(1.05, 4.0);
    if (variant == ClassicalVariant::sigma) {
      p.varsigma = r.log_uniform(0.2, 3.0);
      p.c = (1.0 + p.varsigma) * p.q * r.uniform(1.0, 3.0);
    }
    p.gamma = p.c * r.uniform(1.0, 3.0);
  } else {
    p.c = r.log_uniform(0.05, 2.0);
    p.nu = r.uniform(0.1, 0.95);
    double g = std::pow(p.c, 1.0 / p.nu);
    if (variant == ClassicalVariant::sigma) {
      p.varsigma = r.log_uniform(0.2, 3.0);
      g = std::max(g, std::pow((1.0 + p.varsigma) * p.q / p.c, 1.0 / (1.0 - p.nu)));
    } else {
      g = std::max(g, std::pow(p.q / p.c, 1.0 / (1.0 - p.nu)));
    }
    if (!(g < 1e6)) return std::nullopt;
    p.gamma = g * r.uniform(1.01, 3.0);
  }
  validate_classical(p, variant);
  const double a0 = r.log_uniform(1e-3, 10.0);
  const long K = draw_K(r, 1.0, 4000.0);
  double a = a0;
  Outcome worst{0.0, kInf};
  double worst_m = kInf;
  for (long k = 0; k < K; ++k) {
    const double x = static_cast<double>(k) + p.gamma;
    a = (1.0 - p.c / std::pow(x, p.nu)) * a + p.d / std::pow(x, p.nu + p.q);
    const double bound = classical_bound(p, a0, k, variant);
    const double m = (bound - a) / std::max(1.0, bound);
    if (m < worst_m) {
      worst_m = m;
      worst = Outcome{a, bound};
    }
  }
  return worst;
}

std::map<std::string, Drawer> drawers() {
  std::map<std::string, Drawer> d;
  d["sgd_exp"] = [](RngStream& r) { return draw_exp(r, Method::sgd); };
  d["sgd_cos"] = [](RngStream& r) { return draw_cos(r, Method::sgd); };
  d["sgd_const"] = [](RngStream& r) { return draw_const(r, Method::sgd); };
  d["sgd_poly"] = [](RngStream& r) { return draw_poly(r, Method::sgd); };
  d["rr_exp"] = [](RngStream& r) { return draw_exp(r, Method::rr); };
  d["rr_cos"] = [](RngStream& r) { return draw_cos(r, Method::rr); };
  d["rr_const"] = [](RngStream& r) { return draw_const(r, Method::rr); };
  d["rr_poly"] = [](RngStream& r) { return draw_poly(r, Method::rr); };
  d["lemma_poly_a"] = [](RngStream& r) { return draw_lemma_poly(r, PolyCase::a); };
  d["lemma_poly_b"] = [](RngStream& r) { return draw_lemma_poly(r, PolyCase::b); };
  d["lemma_poly_c"] = [](RngStream& r) { return draw_lemma_poly(r, PolyCase::c); };
  d["lemma_poly_d"] = [](RngStream& r) { return draw_lemma_poly(r, PolyCase::d); };
  d["lemma_const"] = [](RngStream& r) { return draw_lemma_const(r); };
  d["chung_nu_lt_1"] = [](RngStream& r) { return draw_classical(r, ClassicalVariant::standard, false); };
  d["chung_nu_eq_1"] = [](RngStream& r) { return draw_classical(r, ClassicalVariant::standard, true); };
  d["chung_varsigma"] = [](RngStream& r) { return draw_classical(r, ClassicalVariant::sigma, r.uniform() < 0.2); };
  return d;
}

std::uint64_t name_key(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

CheckResult DominationStats::to_check() const {
  CheckResult c;
  c.check = name + " (" + std::to_string(dominated) + "/" + std::to_string(draws) + " dominated)";
  c.passed = dominated == draws && draws > 0;
  c.witness_index = worst_draw;
  c.witness_value = worst_y;
  c.margin = draws > 0 ? worst_margin : 0.0;
  return c;
}

std::vector<std::string> domination_suite_names() {
  return {"sgd_exp",      "sgd_cos",      "sgd_const",    "sgd_poly",     "rr_exp",      "rr_cos",
          "rr_const",     "rr_poly",      "lemma_poly_a", "lemma_poly_b", "lemma_poly_c", "lemma_poly_d",
          "lemma_const",  "chung_nu_lt_1", "chung_nu_eq_1", "chung_varsigma"};
}

DominationStats run_domination_suite(const std::string& name, long draws, std::uint64_t seed, int threads) {
  const auto all = drawers();
  const auto it = all.find(name);
  if (it == all.end()) throw std::invalid_argument("unknown domination suite '" + name + "'");
  const Drawer& draw = it->second;
  struct Slot {
    std::optional<Outcome> out;
    long rejected = 0;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(draws));
  const std::uint64_t key = seed ^ name_key(name);
  parallel_for(draws, threads, [&](long i) {
    RngStream r(key, static_cast<std::uint64_t>(i));
    for (int attempt = 0; attempt < 1000; ++attempt) {
      std::optional<Outcome> o;
      try {
        o = draw(r);
      } catch (const PreconditionError&) {
        o.reset();
      } catch (const std::invalid_argument&) {
        o.reset();
      } catch (const NumericError&) {
        o.reset();
      }
      if (o) {
        slots[i].out = o;
        return;
      }
      ++slots[i].rejected;
    }
  });
  DominationStats st;
  st.name = name;
  st.draws = draws;
  for (long i = 0; i < draws; ++i) {
    st.rejected += slots[i].rejected;
    if (!slots[i].out) {
      // No admissible draw found: counts as undominated.
      if (st.worst_margin > -kInf) {
        st.worst_margin = -kInf;
        st.worst_draw = i;
      }
      continue;
    }
    const Outcome& o = *slots[i].out;
    const double m = (o.bound - o.y) / std::max(1.0, o.bound);
    if (m >= -kDomTol) ++st.dominated;
    if (m < st.worst_margin) {
      st.worst_margin = m;
      st.worst_draw = i;
      st.worst_y = o.y;
      st.worst_bound = o.bound;
    }
  }
  return st;
}

std::vector<CheckResult> verify_bounds_suite(long draws, std::uint64_t seed, int threads) {
  std::vector<CheckResult> out;
  for (const auto& name : domination_suite_names()) out.push_back(run_domination_suite(name, draws, seed, threads).to_check());
  return out;
}

std::vector<CheckResult> verify_inequalities_suite(long K_max, const std::vector<double>& r_grid) {
  return tech_inequality_suite(K_max, r_grid);
}

// --- chung suite ---------------------------------------------------------

namespace {

RecursionSpec random_spec(RngStream& r, long K) {
  const double u = r.uniform();
  if (u < 0.3) return constant_recursion_spec(r.uniform(0.01, 1.0), r.log_uniform(1e-3, 1.0), K);
  if (u < 0.7) {
    ClassicalParams p;
    p.c = r.log_uniform(0.05, 2.0);
    p.nu = r.uniform() < 0.3 ? 1.0 : r.uniform(0.1, 1.0);
    p.q = r.log_uniform(0.05, 2.0);
    p.d = r.log_uniform(0.01, 10.0);
    p.gamma = std::pow(p.c, 1.0 / p.nu) * r.uniform(1.0, 3.0);
    return classical_spec(p, K);
  }
  PLParams pl;
  pl.theta = r.uniform(0.5, 1.0);
  pl.l1 = 0.0;
  pl.l2 = r.log_uniform(0.2, 2.0);
  pl.l3 = r.log_uniform(0.01, 1.0);
  pl.tau = r.uniform(1.5, 3.0);
  const DerivedConstants dc = derive_constants(pl, 1.0);
  const double alpha = dc.alpha_cap * r.uniform(0.05, 1.0);
  if (u < 0.85) return relaxed_recursion_transform(pl, 1.0, StepSchedule::cosine(alpha, r.uniform(0.5, 2.0), K), K);
  const double beta = r.uniform(0.5, 0.99) * static_cast<double>(K);
  if (K < 2) return relaxed_recursion_transform(pl, 1.0, StepSchedule::constant(alpha), K);
  return relaxed_recursion_transform(pl, 1.0, StepSchedule::exponential(alpha, beta, r.uniform(0.5, 2.0), K), K);
}

// Up to 64 indices in [0, top], always including both ends.
std::vector<long> sample_indices(RngStream& r, long top) {
  std::vector<long> out;
  if (top < 0) return out;
  if (top < 64) {
    for (long k = 0; k <= top; ++k) out.push_back(k);
    return out;
  }
  out.push_back(0);
  for (int i = 0; i < 62; ++i) out.push_back(r.integer(1, top - 1));
  out.push_back(top);
  std::sort(out.begin(), out.end());
  return out;
}

double rel_gap(double a, double b) { return std::fabs(a - b) / std::max({1e-300, std::fabs(a), std::fabs(b)}); }

}  // namespace

std::vector<CheckResult> verify_chung_suite(long draws, std::uint64_t seed) {
  std::vector<CheckResult> out;
  {
    MarginTracker t("constant_spec_tight");
    const RecursionSpec spec = constant_recursion_spec(0.5, 0.25, 50);
    const CertifiedLambda cert = find_lambda_constant(spec);
    const auto exact = iterate_recursion_exact(spec, 1.0, 50);
    for (long k = 0; k <= std::min<long>(cert.horizon, 49); ++k) {
      const double g = general_bound(spec, cert, 1.0, k);
      t.observe(k, -rel_gap(g, exact[k + 1]), g, 1e-12);
    }
    out.push_back(t.result());
  }
  RngStream r(seed, 0x636875);
  MarginTracker oracle("expansion_oracle"), dom("general_bound_domination"), fg("forgetting_bound");
  MarginTracker ext("extension_propagation");
  for (long i = 0; i < draws; ++i) {
    const long K = draw_K(r, 1.0, 1e4);
    const RecursionSpec spec = random_spec(r, K);
    const double a0 = r.log_uniform(1e-3, 10.0);
    const auto exact = iterate_recursion_exact(spec, a0, K);
    const double e = expansion_bound(spec, a0, K);
    oracle.observe(i, -rel_gap(e, exact[K]), e, 1e-10);

    const CertifiedLambda cert = find_lambda_constant(spec);
    const long top = std::min(cert.horizon, K - 1);
    const double lam = cert.lambda;
    const double r0 = spec.r(spec.b(0));
    for (long k : sample_indices(r, top)) {
      const double g = general_bound(spec, cert, a0, k);
      dom.observe(i, (g - exact[k + 1]) / std::max(1.0, std::fabs(g)), g, 1e-10);
      const double rk1 = spec.r(spec.b(k + 1));
      if (r0 > 0.0) {
        const double fbound = lam * rk1 + positive_part(a0 / r0 - lam) * forgetting_factor(spec, lam, k) * rk1;
        fg.observe(i, (fbound - g) / std::max(1.0, std::fabs(fbound)), g, 1e-10);
      }
    }
    if (K >= 2) {
      // Start the extension from a_{Kbar+1} <= B + C prod_{k0}^{Kbar}.
      const long Kbar = r.integer(0, K - 2);
      double B = 0.0;
      for (long k = Kbar + 1; k <= K - 1; ++k) B = std::max(B, spec.r(spec.b(k)));
      long k0 = r.integer(0, Kbar + 1);
      double prod = contraction_product(spec, k0, Kbar);
      if (!(prod > 0.0)) {
        k0 = Kbar + 1;
        prod = 1.0;
      }
      const double C = positive_part(exact[Kbar + 1] - B) / prod;
      for (long KK : sample_indices(r, K - Kbar - 2)) {
        KK += Kbar + 2;
        const double eb = extend_bound(spec, B, C, k0, Kbar, KK);
        ext.observe(i, (eb - exact[KK]) / std::max(1.0, std::fabs(eb)), eb, 1e-10);
      }
    }
  }
  out.push_back(oracle.result());
  out.push_back(dom.result());
  out.push_back(fg.result());
  out.push_back(ext.result());
  {
    MarginTracker lam_eq("classical_lambda_agrees"), lead_eq("classical_leading_term_agrees");
    MarginTracker below("general_below_classical");
    for (long i = 0; i < draws; ++i) {
      ClassicalParams p;
      p.nu = r.uniform() < 0.5 ? 1.0 : r.uniform(0.1, 0.95);
      p.q = r.log_uniform(0.05, 2.0);
      p.d = r.log_uniform(0.01, 10.0);
      if (p.nu == 1.0) {
        p.c = p.q * r.uniform(1.05, 4.0);
        p.gamma = p.c * r.uniform(1.0, 3.0);
      } else {
        p.c = r.log_uniform(0.05, 2.0);
        const double g = std::max(std::pow(p.c, 1.0 / p.nu), std::pow(p.q / p.c, 1.0 / (1.0 - p.nu)));
        if (!(g < 1e6)) continue;
        p.gamma = g * r.uniform(1.01, 3.0);
      }
      const long K = draw_K(r, 2.0, 2000.0);
      const RecursionSpec spec = classical_spec(p, K);
      const CertifiedLambda cert = find_lambda_constant(spec);
      const double lam = classical_lambda(p);
      lam_eq.observe(i, 1e-9 - rel_gap(cert.lambda, lam), cert.lambda, 0.0);
      const double a0 = r.log_uniform(1e-3, 10.0);
      for (long k : sample_indices(r, std::min(cert.horizon, K - 1))) {
        const double x1 = static_cast<double>(k) + 1.0 + p.gamma;
        const double tg = cert.lambda * spec.r(x1);
        const double tc = lam * p.d / p.c * std::pow(x1, -p.q);
        lead_eq.observe(i, 1e-9 - rel_gap(tg, tc), tg, 0.0);
        const double g = general_bound(spec, cert, a0, k);
        const double cb = classical_bound(p, a0, k, ClassicalVariant::standard);
        below.observe(i, (cb - g) / std::max(1.0, std::fabs(cb)), g, 1e-10);
      }
    }
    out.push_back(lam_eq.result());
    out.push_back(lead_eq.result());
    out.push_back(below.result());
  }
  {
    CheckResult c;
    c.check = "cosine_rate_nonconvex_detected";
    const long K = 20;
    FunctionDescriptor f;
    f.f = [K](double x) { return 1.0 + std::cos(x * std::numbers::pi / static_cast<double>(K)); };
    const ConvexityReport rep = check_convexity(f, Interval{0.0, static_cast<double>(K)}, 201);
    c.passed = !rep.convex;
    c.witness_value = rep.witness.value_or(-1.0);
    c.margin = rep.worst;
    out.push_back(c);
  }
  {
    CheckResult c;
    c.check = "classical_rate_convex";
    FunctionDescriptor f;
    f.f = [](double x) { return 0.5 * std::pow(x, -0.75); };
    const ConvexityReport rep = check_convexity(f, Interval{1.0, kInf}, 401);
    c.passed = rep.convex;
    c.margin = rep.worst;
    out.push_back(c);
  }
  return out;
}

// --- assumptions suite ---------------------------------------------------

double chi_square_critical(double dof, double z) {
  const double a = 2.0 / (9.0 * dof);
  return dof * std::pow(1.0 - a + z * std::sqrt(a), 3.0);
}

double permutation_chi_square(long N, long epochs, std::uint64_t seed, long* cells) {
  long fact = 1;
  for (long i = 2; i <= N; ++i) fact *= i;
  std::vector<long> counts(static_cast<std::size_t>(fact), 0);
  for (long e = 0; e < epochs; ++e) {
    const auto perm = rr_permutation(seed, e, N);
    // Lehmer code as the cell index.
    long idx = 0;
    for (long i = 0; i < N; ++i) {
      long smaller = 0;
      for (long j = i + 1; j < N; ++j)
        if (perm[j] < perm[i]) ++smaller;
      long f = 1;
      for (long m = 2; m <= N - 1 - i; ++m) f *= m;
      idx += smaller * f;
    }
    ++counts[idx];
  }
  const double expect = static_cast<double>(epochs) / static_cast<double>(fact);
  double chi = 0.0;
  for (long c : counts) chi += (c - expect) * (c - expect) / expect;
  if (cells) *cells = fact;
  return chi;
}

std::vector<CheckResult> verify_assumptions_suite(std::uint64_t seed, long samples, int threads) {
  std::vector<CheckResult> out;
  auto append = [&](const std::string& prefix, std::vector<CheckResult> rs) {
    for (auto& c : rs) {
      c.check = prefix + ":" + c.check;
      out.push_back(std::move(c));
    }
  };
  append("quadratic_1d", verify_pl(make_quadratic(1.0, 1.0, 1), samples, seed));
  append("quadratic_3d", verify_pl(make_quadratic(0.5, 2.0, 3), samples, seed));
  append("power_2/3", verify_pl(make_power_family(2.0 / 3.0, 1.0, 2.0), samples, seed));
  append("power_3/4", verify_pl(make_power_family(0.75, 0.5, 1.5), samples, seed));
  const Problem pair = make_quadratic(1.0, 1.0, 1, 2, 1.0);
  append("finite_sum_n2", verify_pl(pair, samples, seed));
  const Problem mix = make_curvature_mix({0.5, 1.5}, {1.0, -1.0 / 3.0}, 1.0);
  append("curvature_mix", verify_pl(mix, samples, seed));
  {
    // A PL constant claimed twice too large must be rejected.
    Problem inflated = make_quadratic(1.0, 1.0, 1);
    inflated.pl_mu = 2.0;
    const auto rs = verify_pl(inflated, samples, seed);
    CheckResult c = rs[0];
    c.check = "inflated_mu_rejected";
    c.passed = !rs[0].passed;
    out.push_back(c);
  }
  NoiseModel gauss{NoiseKind::additive_gaussian, 1.0, 0.0};
  append("gaussian_noise", verify_variance(make_quadratic(1.0, 1.0, 2), gauss, 20, 10000, seed));
  NoiseModel gauss_a{NoiseKind::additive_gaussian, 0.5, 0.8};
  append("state_noise", verify_variance(make_quadratic(1.0, 2.0, 3), gauss_a, 20, 5000, seed));
  NoiseModel none{};
  append("finite_sum_n2", verify_variance(pair, none, samples, 0, seed));
  NoiseModel sample_pair{NoiseKind::sampled_component, 1.0, 0.0};
  append("component_sampling", verify_variance(mix, sample_pair, 20, 5000, seed));

  {
    const Problem q = make_quadratic(1.0, 1.0, 1);
    const auto sched = StepSchedule::constant(0.1);
    const auto tr = sgd_run(q, gauss, sched, {1.0}, 200, [&] {
      std::vector<std::uint64_t> s;
      for (std::uint64_t i = 0; i < 400; ++i) s.push_back(seed + i);
      return s;
    }(), threads);
    CheckResult c = descent_check(tr, descent_coefficients(Method::sgd, 1.0, 1.0, 0.0, 1.0, 1), sched);
    c.check = "sgd_descent_inequality";
    out.push_back(c);
  }
  {
    const auto sched = StepSchedule::constant(0.2);
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < 400; ++i) seeds.push_back(seed + i);
    const auto tr = rr_run(mix, sched, {1.0}, 200, seeds, threads);
    PLParams pl = descent_coefficients(Method::rr, mix.smoothness_L, mix.pl_mu, 0.0, mix.dispersion_sigma, mix.N);
    pl.theta = 0.5;
    CheckResult c = descent_check(tr, pl, sched);
    c.check = "rr_descent_inequality";
    out.push_back(c);
  }
  {
    MarginTracker mono("gd_monotone"), nf("gd_noise_free_bound");
    struct Case {
      Problem pb;
      double x0;
    };
    std::vector<Case> cases{{make_quadratic(1.0, 1.0, 1), 1.0},
                            {make_quadratic(0.3, 1.0, 1), 2.0},
                            {make_power_family(2.0 / 3.0, 1.0, 2.0), 1.5},
                            {make_power_family(0.75, 0.5, 1.5), 1.2}};
    long idx = 0;
    for (const auto& cs : cases) {
      const double a = 1.0 / cs.pb.smoothness_L;
      for (const auto& sched : {StepSchedule::constant(a), StepSchedule::polynomial(a * 4.0, 4.0, 1.0),
                                StepSchedule::cosine(a, 1.0, 500)}) {
        const auto tr = gd_run(cs.pb, sched, {cs.x0}, 500);
        const auto& g = tr.gaps[0];
        for (long k = 0; k + 1 < static_cast<long>(g.size()); ++k, ++idx) {
          mono.observe(idx, (g[k] - g[k + 1]) / std::max(1.0, g[k]), g[k + 1], 1e-15);
          const double b = noise_free_bound(cs.pb.pl_theta, cs.pb.pl_mu, g[0], step_sum(sched, k + 1));
          nf.observe(idx, (b - g[k + 1]) / std::max(1.0, b), g[k + 1], 1e-12);
        }
      }
    }
    out.push_back(mono.result());
    out.push_back(nf.result());
  }
  for (long N = 2; N <= 5; ++N) {
    long cells = 0;
    const double chi = permutation_chi_square(N, 100000, seed, &cells);
    const double crit = chi_square_critical(static_cast<double>(cells - 1), 3.090232);
    CheckResult c;
    c.check = "permutation_uniformity_N" + std::to_string(N);
    c.passed = chi <= crit;
    c.witness_value = chi;
    c.margin = (crit - chi) / crit;
    out.push_back(c);
  }
  return out;
}

}  // namespace chung
