#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chung/numeric.hpp"
#include "chung/pl_engine.hpp"

namespace chung {

namespace {

constexpr double kCaseTol = 1e-12;
constexpr double kRel = 1e-12;

// a >= b allowing relative round-off, so parameters placed exactly on a
// threshold are accepted.
bool at_least(double a, double b) { return a >= b - kRel * std::fabs(b); }

bool is_case_a(double p, double rho) { return p < rho - kCaseTol; }
bool is_case_b(double p, double rho) { return std::fabs(p - rho) <= kCaseTol; }
bool is_case_c(double theta, double p, double rho) { return theta > 0.5 && p > rho + kCaseTol && p < 1.0 - kCaseTol; }
bool is_case_d(double theta, double p) { return theta > 0.5 && std::fabs(p - 1.0) <= kCaseTol; }

// min over x in [lo, hi] of log(x^e / log(x)^m), x > 1; the map is unimodal
// with its minimum at log x = m / e.
double log_ratio_min(double e, double m, double lo, double hi) {
  double x = std::clamp(std::exp(m / e), lo, hi);
  return e * std::log(x) - m * std::log(std::log(x));
}

bool case_d_ok(const PLParams& pl, double alpha, double gamma, long K) {
  if (!(gamma >= std::numbers::e)) return false;
  const double th = pl.theta, e = pl.tau - 1.0;
  const double hi = gamma + static_cast<double>(std::max(K, 1L) - 1);
  if (!at_least(gamma * std::log(gamma), alpha * th * pl.l2)) return false;
  if (pl.l1 > 0.0) {
    double need = std::log(pl.l1 * std::pow(alpha, e) / (th * pl.l2));
    if (!at_least(log_ratio_min(e, 1.0, gamma, hi), need)) return false;
  }
  if (pl.l3 > 0.0) {
    double need = std::log(pl.l3 * std::pow(alpha, e) / pl.l2);
    if (!at_least(log_ratio_min(e, 2.0 * th / (2.0 * th - 1.0), gamma, hi), need)) return false;
  }
  return true;
}

}  // namespace

std::string poly_case_name(PolyCase c) {
  switch (c) {
    case PolyCase::a: return "a";
    case PolyCase::b: return "b";
    case PolyCase::c: return "c";
    case PolyCase::d: return "d";
    case PolyCase::automatic: return "auto";
  }
  return "auto";
}

PolyCase parse_poly_case(const std::string& s) {
  if (s == "a") return PolyCase::a;
  if (s == "b") return PolyCase::b;
  if (s == "c") return PolyCase::c;
  if (s == "d") return PolyCase::d;
  if (s == "auto") return PolyCase::automatic;
  throw std::invalid_argument("unknown polynomial case '" + s + "'");
}

PolyCase select_poly_case(double theta, double p, double rho) {
  if (is_case_b(p, rho)) return PolyCase::b;
  if (is_case_a(p, rho)) return PolyCase::a;
  if (is_case_c(theta, p, rho)) return PolyCase::c;
  if (is_case_d(theta, p)) return PolyCase::d;
  throw PreconditionError({"no polynomial case covers p=" + std::to_string(p) + " at theta=" + std::to_string(theta)});
}

double poly_case_d_gamma0(const PLParams& pl, double alpha, long K) {
  pl.validate();
  if (!(pl.theta > 0.5)) throw std::invalid_argument("case (d) needs theta > 1/2");
  double lo = std::numbers::e, hi = lo;
  if (case_d_ok(pl, alpha, hi, K)) return hi;
  while (!case_d_ok(pl, alpha, hi, K)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw NumericError("case (d) gamma0 search did not terminate", -1);
  }
  for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    if (case_d_ok(pl, alpha, mid, K))
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

BoundResult bound_poly(const PLParams& pl, double delta, const StepSchedule& schedule, double y0, long K, PolyCase which) {
  if (schedule.family() != Family::polynomial) throw std::invalid_argument("expected a polynomial schedule");
  const DerivedConstants dc = derive_constants(pl, delta);
  const double alpha = schedule.alpha(), gamma = schedule.gamma(), p = schedule.p();
  const double th = pl.theta, tau = pl.tau, rho = dc.rho;
  if (which == PolyCase::automatic) which = select_poly_case(th, p, rho);

  PreconditionList pre;
  pre.require(K >= 1, "K must be at least 1");
  switch (which) {
    case PolyCase::a: pre.require(is_case_a(p, rho), "case (a) needs p < rho"); break;
    case PolyCase::b: pre.require(is_case_b(p, rho), "case (b) needs p = rho"); break;
    case PolyCase::c: pre.require(is_case_c(th, p, rho), "case (c) needs theta > 1/2 and rho < p < 1"); break;
    case PolyCase::d: pre.require(is_case_d(th, p), "case (d) needs theta > 1/2 and p = 1"); break;
    case PolyCase::automatic: break;
  }
  pre.raise();

  const double u1 = p * (tau - 1.0) / (2.0 * th);
  const double u2 = dc.omega;
  const double u3 = th > 0.5 ? (1.0 - p) / (2.0 * th - 1.0) : kInf;
  const double x = static_cast<double>(K) + gamma;
  const double a0 = alpha / std::pow(gamma, p);
  const double lead = 4.0 * dc.zeta * std::pow(alpha, (tau - 1.0) / (2.0 * th));
  const double c = dc.xi * std::pow(alpha, 1.0 / rho);

  double noise = 0.0, init = 0.0;
  BoundResult r;
  switch (which) {
    case PolyCase::a: {
      const double gmin = std::pow(2.0 * u1 / c, 1.0 / (1.0 - p / rho));
      pre.require(a0 <= dc.alpha_cap * (1.0 + kRel), "alpha/gamma^p exceeds alpha_cap");
      pre.require(at_least(gamma, gmin), "gamma below case (a) threshold");
      pre.raise();
      noise = lead * std::pow(x, -u1);
      init = y0 * safe_exp(-c * static_cast<double>(K) / std::pow(x, p / rho));
      r.details["gamma_min"] = gmin;
      break;
    }
    case PolyCase::b: {
      const double amin = std::pow(2.0 * u2 / dc.xi, rho);
      pre.require(a0 <= dc.alpha_cap * (1.0 + kRel), "alpha/gamma^p exceeds alpha_cap");
      pre.require(at_least(alpha, amin), "alpha below case (b) threshold");
      pre.raise();
      noise = lead * std::pow(x, -u2);
      init = y0 * std::exp(-c * std::log(x / gamma));
      r.details["alpha_min"] = amin;
      break;
    }
    case PolyCase::c: {
      const double e = tau - 1.0;
      const double amin = 2.0 * u3 / (th * pl.l2);
      const double g1 = pl.l1 > 0.0 ? std::pow(std::pow(alpha, e) * pl.l1 / (th * pl.l2), 1.0 / (tau * p - 1.0)) : 0.0;
      const double g2 = pl.l3 > 0.0 ? std::pow(std::pow(alpha, e) * pl.l3 / pl.l2, 1.0 / (tau * p - u3 - 1.0)) : 0.0;
      const double gmin = std::max({g1, g2, alpha * th * pl.l2});
      pre.require(at_least(alpha, amin), "alpha below case (c) threshold");
      pre.require(at_least(gamma, gmin), "gamma below case (c) threshold");
      pre.raise();
      noise = 4.0 * std::pow(x, -u3);
      init = y0 * std::exp(-alpha * th * pl.l2 * std::log(x / gamma));
      r.details["alpha_min"] = amin;
      r.details["gamma_min"] = gmin;
      break;
    }
    case PolyCase::d: {
      const double amin = 2.0 / (th * (2.0 * th - 1.0) * pl.l2);
      pre.require(at_least(alpha, amin), "alpha below case (d) threshold");
      pre.raise();
      const double g0 = poly_case_d_gamma0(pl, alpha, K);
      pre.require(case_d_ok(pl, alpha, gamma, K), "gamma below case (d) gamma0");
      pre.raise();
      noise = 4.0 * std::pow(std::log(x), -1.0 / (2.0 * th - 1.0));
      init = y0 * std::exp(-alpha * th * pl.l2 * std::log(std::log(x) / std::log(gamma)));
      r.details["alpha_min"] = amin;
      r.details["gamma0"] = g0;
      break;
    }
    case PolyCase::automatic: break;
  }
  r.noise_term = noise;
  r.init_term = init;
  r.value = noise + init;
  r.regime = "case " + poly_case_name(which);
  r.constants = dc;
  r.details["u1"] = u1;
  r.details["u2"] = u2;
  r.details["u3"] = u3;
  return r;
}

BoundResult bound_poly(const MethodConstants& mc, const StepSchedule& schedule, double y0, long K, PolyCase which) {
  if (schedule.family() != Family::polynomial) throw std::invalid_argument("expected a polynomial schedule");
  const double a0 = schedule.alpha() / std::pow(schedule.gamma(), schedule.p());
  std::vector<std::string> failures;
  if (a0 > mc.smoothness_cap * (1.0 + kRel)) failures.push_back("alpha_0 exceeds smoothness cap");
  BoundResult r;
  try {
    r = bound_poly(mc.pl(), mc.delta(), schedule, y0, K, which);
  } catch (const PreconditionError& e) {
    failures.insert(failures.end(), e.failures().begin(), e.failures().end());
  }
  if (!failures.empty()) throw PreconditionError(failures);
  r.constants.alpha_cap = mc.alpha_cap;
  return r;
}

double rr_poly_tuned_alpha(const MethodConstants& mc, double beta, long K) {
  const double sn = std::sqrt(static_cast<double>(mc.N));
  return std::pow(beta * std::log(sn * static_cast<double>(K)) * mc.n_factor(), mc.rho);
}

BoundResult bound_poly_tuned(const MethodConstants& mc, double alpha_or_beta, double gamma, double y0, long K) {
  const double th = mc.theta, rho = mc.rho, om = mc.omega;
  const double Kd = static_cast<double>(K), x = Kd + gamma;
  PreconditionList pre;
  pre.require(K >= 1, "K must be at least 1");
  pre.require(gamma > 0.0, "gamma must be positive");
  pre.raise();
  BoundResult r;
  if (mc.method == Method::sgd) {
    const double alpha = alpha_or_beta;
    pre.require(at_least(alpha, std::pow(2.0 * om / mc.xi, rho)), "alpha below tuning threshold");
    pre.require(alpha / std::pow(gamma, rho) <= mc.alpha_cap * (1.0 + kRel), "alpha/gamma^p exceeds alpha_cap");
    pre.raise();
    r.noise_term = 4.0 * mc.zeta * std::pow(alpha, 1.0 / (2.0 * th)) * std::pow(x, -om);
    r.init_term = y0 * std::pow(x / gamma, -2.0 * om);
    r.details["alpha"] = alpha;
  } else {
    const double beta = alpha_or_beta;
    const double sn = std::sqrt(static_cast<double>(mc.N));
    const double lg = std::log(sn * Kd);
    const double alpha = rr_poly_tuned_alpha(mc, beta, K);
    pre.require(at_least(beta, 2.0 * om / mc.xi_bar), "beta below tuning threshold");
    pre.require(lg >= 1.0, "sqrt(N) K must be at least e");
    pre.require(at_least(gamma, beta * lg * mc.n_factor() / std::pow(mc.alpha_cap, 1.0 / rho)),
                "gamma below tuned lower bound");
    pre.require(Kd >= 2.0 * gamma, "K must be at least 2 gamma");
    pre.raise();
    r.noise_term = 4.0 * mc.zeta_bar * std::pow(beta, om) * std::pow(lg / (sn * x), om);
    r.init_term = y0 * std::pow(sn * Kd, -2.0 * om);
    r.details["alpha"] = alpha;
    r.details["beta"] = beta;
  }
  r.value = r.noise_term + r.init_term;
  r.regime = "case b";
  r.constants = derive_constants(mc.pl(), mc.delta());
  r.constants.alpha_cap = mc.alpha_cap;
  r.details["gamma"] = gamma;
  return r;
}

PolyChoice feasible_poly_parameters(const PLParams& pl, double delta, double p, long K) {
  const DerivedConstants dc = derive_constants(pl, delta);
  const double th = pl.theta, tau = pl.tau, rho = dc.rho;
  PolyChoice ch;
  ch.which = select_poly_case(th, p, rho);
  switch (ch.which) {
    case PolyCase::a: {
      ch.alpha = 1.0;
      const double u1 = p * (tau - 1.0) / (2.0 * th);
      const double c = dc.xi * std::pow(ch.alpha, 1.0 / rho);
      const double gmin = std::pow(2.0 * u1 / c, 1.0 / (1.0 - p / rho));
      ch.gamma = std::max({gmin, std::pow(ch.alpha / dc.alpha_cap, 1.0 / p), 1.0});
      break;
    }
    case PolyCase::b:
      ch.alpha = std::pow(2.0 * dc.omega / dc.xi, rho);
      ch.gamma = std::max(std::pow(ch.alpha / dc.alpha_cap, 1.0 / p), 1.0);
      break;
    case PolyCase::c: {
      const double u3 = (1.0 - p) / (2.0 * th - 1.0);
      ch.alpha = std::max(2.0 * u3 / (th * pl.l2), 1.0);
      const double e = tau - 1.0;
      const double g1 = pl.l1 > 0.0 ? std::pow(std::pow(ch.alpha, e) * pl.l1 / (th * pl.l2), 1.0 / (tau * p - 1.0)) : 0.0;
      const double g2 = pl.l3 > 0.0 ? std::pow(std::pow(ch.alpha, e) * pl.l3 / pl.l2, 1.0 / (tau * p - u3 - 1.0)) : 0.0;
      ch.gamma = std::max({g1, g2, ch.alpha * th * pl.l2, 1.0});
      break;
    }
    case PolyCase::d:
      ch.alpha = std::max(2.0 / (th * (2.0 * th - 1.0) * pl.l2), 1.0);
      ch.gamma = poly_case_d_gamma0(pl, ch.alpha, K);
      break;
    case PolyCase::automatic: break;
  }
  return ch;
}

}  // namespace chung
