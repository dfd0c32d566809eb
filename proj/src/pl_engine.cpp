#include "chung/pl_engine.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chung/numeric.hpp"

namespace chung {

namespace {

constexpr double kPi = std::numbers::pi;

void check_theta(double theta) {
  if (!(theta >= 0.5 && theta <= 1.0)) throw std::invalid_argument("theta must lie in [1/2, 1]");
}

double half_cosine(long k, long K) {
  double c = std::cos(static_cast<double>(k) / static_cast<double>(K) * (kPi / 2.0));
  return c * c;
}

}  // namespace

void PLParams::validate() const {
  check_theta(theta);
  if (!(tau > 1.0)) throw std::invalid_argument("tau must exceed 1");
  if (!(l2 > 0.0)) throw std::invalid_argument("l2 must be positive");
  if (!(l1 >= 0.0) || !(l3 >= 0.0)) throw std::invalid_argument("l1 and l3 must be nonnegative");
}

double frak_p(double theta) {
  check_theta(theta);
  if (theta == 0.5) return 1.0;
  double e = 2.0 * theta - 1.0;
  return std::pow(e, e);
}

DerivedConstants derive_constants(const PLParams& params, double delta) {
  params.validate();
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be positive");
  const double th = params.theta, tau = params.tau;
  DerivedConstants dc;
  dc.delta = delta;
  dc.zeta = std::max((2.0 * th - 1.0) * delta, std::pow(params.l3 / params.l2, 1.0 / (2.0 * th)));
  dc.xi = th * params.l2 * std::pow(dc.zeta, 2.0 * th - 1.0);  // pow(0, 0) = 1
  const double den = (2.0 * th - 1.0) * tau + 1.0;
  dc.rho = 2.0 * th / den;
  dc.omega = (tau - 1.0) / den;
  dc.q = (tau - 1.0) / (2.0 * th);
  dc.frak_p = frak_p(th);
  double cap1 = kInf;
  if (params.l1 > 0.0)
    cap1 = std::pow(th * dc.frak_p * params.l2 * std::pow(delta, 2.0 * th - 1.0) / params.l1,
                    2.0 * th / (tau - 1.0));
  dc.alpha_cap = std::min(cap1, std::pow(dc.xi, -dc.rho));
  return dc;
}

std::string method_name(Method m) { return m == Method::sgd ? "sgd" : "rr"; }

Method parse_method(const std::string& s) {
  if (s == "sgd") return Method::sgd;
  if (s == "rr") return Method::rr;
  throw std::invalid_argument("unknown method '" + s + "'");
}

PLParams descent_coefficients(Method m, double L, double mu, double A, double sigma, long N) {
  PLParams p;
  if (m == Method::sgd) {
    p.l1 = A * L / 2.0;
    p.l2 = mu;
    p.l3 = L * sigma * sigma / 2.0;
    p.tau = 2.0;
  } else {
    const double n = static_cast<double>(N);
    p.l1 = A * L * L / (2.0 * n);
    p.l2 = mu / 2.0;
    p.l3 = L * L * sigma * sigma / (2.0 * n);
    p.tau = 3.0;
  }
  return p;
}

PLParams MethodConstants::pl() const {
  PLParams p = descent_coefficients(method, L, mu, A, sigma, N);
  p.theta = theta;
  return p;
}

double MethodConstants::delta() const {
  return method == Method::sgd ? 1.0 : std::pow(static_cast<double>(N), -1.0 / (2.0 * theta));
}

double MethodConstants::n_factor() const {
  return method == Method::sgd ? 1.0 : std::pow(static_cast<double>(N), 1.0 - 1.0 / (2.0 * theta));
}

namespace {

void check_problem_constants(double theta, double L, double mu, double A, double sigma) {
  check_theta(theta);
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("L must be positive");
  if (!(mu > 0.0) || !std::isfinite(mu)) throw std::invalid_argument("mu must be positive");
  if (!(A >= 0.0) || !(sigma >= 0.0)) throw std::invalid_argument("A and sigma must be nonnegative");
}

}  // namespace

MethodConstants sgd_constants(double theta, double L, double mu, double A, double sigma) {
  check_problem_constants(theta, L, mu, A, sigma);
  MethodConstants mc;
  mc.method = Method::sgd;
  mc.theta = theta;
  mc.L = L;
  mc.mu = mu;
  mc.A = A;
  mc.sigma = sigma;
  mc.N = 1;
  mc.rho = 2.0 * theta / (4.0 * theta - 1.0);
  mc.omega = 1.0 / (4.0 * theta - 1.0);
  mc.zeta = std::max(2.0 * theta - 1.0, std::pow(L * sigma * sigma / (2.0 * mu), 1.0 / (2.0 * theta)));
  mc.zeta_bar = mc.zeta;
  mc.xi = theta * mu * std::pow(mc.zeta, 2.0 * theta - 1.0);
  mc.xi_bar = mc.xi;
  double cap1 = A > 0.0 ? std::pow(2.0 * theta * frak_p(theta) * mu / (A * L), 2.0 * theta) : kInf;
  mc.smoothness_cap = 1.0 / L;
  mc.alpha_cap = std::min({cap1, std::pow(mc.xi, -mc.rho), mc.smoothness_cap});
  return mc;
}

MethodConstants rr_constants(double theta, double L, double mu, double A, double sigma, long N) {
  check_problem_constants(theta, L, mu, A, sigma);
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  MethodConstants mc;
  mc.method = Method::rr;
  mc.theta = theta;
  mc.L = L;
  mc.mu = mu;
  mc.A = A;
  mc.sigma = sigma;
  mc.N = N;
  const double n = static_cast<double>(N);
  mc.rho = theta / (3.0 * theta - 1.0);
  mc.omega = 1.0 / (3.0 * theta - 1.0);
  mc.zeta_bar = std::max(2.0 * theta - 1.0, std::pow(L * L * sigma * sigma / mu, 1.0 / (2.0 * theta)));
  mc.zeta = std::pow(n, -1.0 / (2.0 * theta)) * mc.zeta_bar;
  mc.xi_bar = theta * mu * std::pow(mc.zeta_bar, 2.0 * theta - 1.0) / 2.0;
  mc.xi = mc.xi_bar / std::pow(n, 1.0 - 1.0 / (2.0 * theta));
  double cap1 = A > 0.0 ? std::pow(theta * frak_p(theta) * mu * std::pow(n, 1.0 / (2.0 * theta)) / (A * L * L), theta)
                        : kInf;
  mc.smoothness_cap = 1.0 / (2.0 * L);
  mc.alpha_cap = std::min({cap1, std::pow(std::pow(n, 1.0 - 1.0 / (2.0 * theta)) / mc.xi_bar, mc.rho),
                           mc.smoothness_cap});
  return mc;
}

std::vector<double> simulate_pl_recursion(const PLParams& params, const StepSchedule& schedule, double y0, long K) {
  params.validate();
  if (!(y0 >= 0.0)) throw std::invalid_argument("y0 must be nonnegative");
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  if (schedule.has_horizon() && K > schedule.horizon()) throw std::invalid_argument("K exceeds schedule horizon");
  std::vector<double> y(static_cast<std::size_t>(K) + 1);
  y[0] = y0;
  const double two_theta = 2.0 * params.theta;
  for (long k = 0; k < K; ++k) {
    const double a = step_value(schedule, k);
    const double at = std::pow(a, params.tau);
    const double yk = y[k];
    double next = (1.0 + params.l1 * at) * yk - params.l2 * a * std::pow(yk, two_theta) + params.l3 * at;
    if (!(next >= 0.0)) {
      if (std::isnan(next)) throw NumericError("worst-case trajectory is not finite", k + 1);
      throw NumericError("worst-case trajectory turned negative at k=" + std::to_string(k + 1), k + 1);
    }
    y[k + 1] = next;
  }
  return y;
}

RecursionSpec relaxed_recursion_transform(const PLParams& params, double delta, const StepSchedule& schedule, long K) {
  const DerivedConstants dc = derive_constants(params, delta);
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  if (schedule.has_horizon() && schedule.horizon() != K)
    throw std::invalid_argument("schedule horizon differs from K");
  if (step_max(schedule, K) > dc.alpha_cap) throw PreconditionError({"alpha exceeds alpha_cap"});

  // eta(x) is the step size as a function of the transformed index b.
  std::function<double(double)> eta, deta;
  std::function<double(long)> b;
  Interval I;
  const double alpha = schedule.alpha();
  switch (schedule.family()) {
    case Family::constant:
      eta = [alpha](double) { return alpha; };
      deta = [](double) { return 0.0; };
      b = [](long k) { return static_cast<double>(k); };
      I = {0.0, kInf};
      break;
    case Family::polynomial: {
      const double p = schedule.p(), g = schedule.gamma();
      eta = [alpha, p](double x) { return alpha * std::pow(x, -p); };
      deta = [alpha, p](double x) { return -p * alpha * std::pow(x, -p - 1.0); };
      b = [g](long k) { return static_cast<double>(k) + g; };
      I = {g, kInf};
      break;
    }
    case Family::exponential: {
      const double lg = schedule.log_decay();
      eta = [alpha, lg](double x) { return alpha * std::exp(lg * x); };
      deta = [alpha, lg](double x) { return lg * alpha * std::exp(lg * x); };
      b = [](long k) { return static_cast<double>(k); };
      I = {0.0, static_cast<double>(K)};
      break;
    }
    case Family::cosine: {
      const double p = schedule.p(), q = dc.q;
      eta = [alpha, q](double x) { return alpha * std::pow(x, 1.0 / q); };
      deta = [alpha, q](double x) { return alpha / q * std::pow(x, 1.0 / q - 1.0); };
      b = [p, q, K](long k) {
        if (k >= K) return 0.0;
        return std::pow(half_cosine(k, K), p * q);
      };
      I = {0.0, 1.0};
      break;
    }
  }

  const double xi = dc.xi, zeta = dc.zeta, rho = dc.rho, tau = params.tau, q = dc.q;
  RecursionSpec spec;
  spec.s.f = [eta, xi, rho](double x) { return std::pow(eta(x), -1.0 / rho) / xi; };
  spec.s.df = [eta, deta, xi, rho](double x) {
    return -(1.0 / rho) * std::pow(eta(x), -1.0 / rho - 1.0) * deta(x) / xi;
  };
  spec.s.label = "eta^(-1/rho)/xi";
  if (zeta > 0.0) {
    spec.t.f = [eta, xi, zeta, tau](double x) { return std::pow(eta(x), -tau) / (2.0 * zeta * xi); };
    spec.t.df = [eta, deta, xi, zeta, tau](double x) {
      return -tau * std::pow(eta(x), -tau - 1.0) * deta(x) / (2.0 * zeta * xi);
    };
  } else {
    spec.t = constant_function(kInf);
  }
  spec.t.label = "eta^(-tau)/(2 zeta xi)";
  spec.r_exact = [eta, zeta, q](double x) { return 2.0 * zeta * std::pow(eta(x), q); };
  spec.b = b;
  spec.I = I;
  spec.K = K;
  return spec;
}

// ---------------------------------------------------------------------------
// Exponential, cosine and constant step bounds.

namespace {

void require_family(const StepSchedule& s, Family f) {
  if (s.family() != f) throw std::invalid_argument("expected a " + family_name(f) + " schedule");
}

DerivedConstants snapshot(const MethodConstants& mc) {
  DerivedConstants dc = derive_constants(mc.pl(), mc.delta());
  dc.alpha_cap = mc.alpha_cap;
  return dc;
}

BoundResult finish(double noise, double init, std::string regime, DerivedConstants dc) {
  BoundResult r;
  r.noise_term = noise;
  r.init_term = init;
  r.value = noise + init;
  r.regime = std::move(regime);
  r.constants = dc;
  return r;
}

}  // namespace

BoundResult lemma_bound_exp(const PLParams& pl, double delta, const StepSchedule& schedule, double y0) {
  require_family(schedule, Family::exponential);
  const DerivedConstants dc = derive_constants(pl, delta);
  const double alpha = schedule.alpha(), p = schedule.p(), beta = schedule.beta();
  const double K = static_cast<double>(schedule.horizon());
  PreconditionList pre;
  pre.require(alpha <= dc.alpha_cap, "alpha exceeds alpha_cap");
  pre.raise();
  const double c = dc.xi, nu = 1.0 / dc.rho, q = dc.q;
  const double lg = std::log(K / beta);
  const double b1 = std::pow(2.0 * p * q * lg / (c * K), q / nu);
  const double b2 = std::pow(alpha, q) * std::pow(beta / K, p * q);
  const double noise = 4.0 * dc.zeta * std::max(b1, b2);
  const double init = y0 * safe_exp(-(c * std::pow(alpha, nu) / (p * nu)) * (1.0 - std::pow(beta / K, p * nu)) * K / lg);
  BoundResult r = finish(noise, init, b1 >= b2 ? "exp:log-branch" : "exp:endpoint-branch", dc);
  r.details["branch1"] = b1;
  r.details["branch2"] = b2;
  return r;
}

BoundResult bound_exp(const MethodConstants& mc, const StepSchedule& schedule, double y0) {
  require_family(schedule, Family::exponential);
  const double alpha = schedule.alpha(), p = schedule.p(), beta = schedule.beta();
  const double K = static_cast<double>(schedule.horizon());
  PreconditionList pre;
  pre.require(alpha <= mc.alpha_cap, "alpha exceeds alpha_cap");
  pre.require(K > beta, "K must exceed beta");
  pre.raise();
  const double th = mc.theta, rho = mc.rho, om = mc.omega;
  const double lg = std::log(K / beta);
  const double tail = (1.0 - std::pow(beta / K, p / rho)) * K / lg;
  double b1, b2, init;
  if (mc.method == Method::sgd) {
    b1 = std::pow(mc.zeta, rho) / std::pow(mc.mu, om) * std::pow(p * lg / (th * th * K), om);
    b2 = mc.zeta * std::pow(alpha, 1.0 / (2.0 * th)) * std::pow(beta / K, p / (2.0 * th));
    init = y0 * safe_exp(-(rho * mc.xi * std::pow(alpha, 1.0 / rho) / p) * tail);
  } else {
    const double n = static_cast<double>(mc.N), sn = std::sqrt(n);
    b1 = std::pow(mc.zeta_bar, rho) / std::pow(mc.mu / 2.0, om) * std::pow(2.0 * p * lg / (th * th * sn * K), om);
    b2 = mc.zeta_bar * std::pow(alpha, 1.0 / th) / std::pow(n, 1.0 / (2.0 * th)) * std::pow(beta / K, p / th);
    init = y0 * safe_exp(-(rho * mc.xi_bar * std::pow(alpha, 1.0 / rho) / (p * mc.n_factor())) * tail);
  }
  BoundResult r = finish(4.0 * std::max(b1, b2), init, b1 >= b2 ? "exp:log-branch" : "exp:endpoint-branch",
                         snapshot(mc));
  r.details["branch1"] = b1;
  r.details["branch2"] = b2;
  // Splitting index of the relaxed recursion (lambda = 2).
  const DerivedConstants& dc = r.constants;
  const double c = dc.xi, nu = 1.0 / dc.rho, q = dc.q;
  const double xbar = std::log(c * std::pow(alpha, nu) * K / (2.0 * p * q * lg)) * K / (nu * p * lg);
  r.details["K_bar"] = std::floor(xbar);
  if (mc.method == Method::rr) {
    const double sn = std::sqrt(static_cast<double>(mc.N));
    bool rate_ok = p >= rho && K >= 2.0 * beta &&
                   K / lg >= 2.0 * p * std::log(sn * K) / (th * mc.xi_bar * std::pow(alpha, 1.0 / rho)) * mc.n_factor();
    r.details["rate_condition"] = rate_ok ? 1.0 : 0.0;
  }
  return r;
}

BoundResult lemma_bound_cos(const PLParams& pl, double delta, const StepSchedule& schedule, double y0) {
  require_family(schedule, Family::cosine);
  const DerivedConstants dc = derive_constants(pl, delta);
  const double alpha = schedule.alpha(), p = schedule.p();
  const double K = static_cast<double>(schedule.horizon());
  PreconditionList pre;
  pre.require(alpha <= dc.alpha_cap, "alpha exceeds alpha_cap");
  pre.require(schedule.horizon() >= 2, "K must be at least 2");
  pre.raise();
  const double c = dc.xi, nu = 1.0 / dc.rho, q = dc.q;
  const double D = std::max(1.0, 2.0 * p * q * kPi * kPi);
  const double base = 2.0 * D / (c * K);
  const double b1 = std::pow(base, q / nu);
  const double b2 = 2.0 * std::pow(kPi * kPi / 4.0, p * q) * std::pow(alpha, q / (2.0 * p * nu + 1.0)) *
                    std::pow(base, 2.0 * p * q / (2.0 * p * nu + 1.0));
  const double noise = 2.0 * dc.zeta * std::max(b1, b2);
  const double init = y0 * safe_exp(-c * std::pow(alpha, nu) * K / std::pow(2.0, std::max(1.0, p * nu)));
  BoundResult r = finish(noise, init, b1 >= b2 ? "cos:horizon-branch" : "cos:tail-branch", dc);
  r.details["D"] = D;
  r.details["branch1"] = b1;
  r.details["branch2"] = b2;
  return r;
}

BoundResult bound_cos(const MethodConstants& mc, const StepSchedule& schedule, double y0) {
  require_family(schedule, Family::cosine);
  const double alpha = schedule.alpha(), p = schedule.p();
  const double K = static_cast<double>(schedule.horizon());
  PreconditionList pre;
  pre.require(alpha <= mc.alpha_cap, "alpha exceeds alpha_cap");
  pre.require(schedule.horizon() >= 2, "K must be at least 2");
  pre.raise();
  const double th = mc.theta, rho = mc.rho, om = mc.omega;
  const double e1 = 1.0 / (2.0 * p + rho), e2 = 2.0 * p * om / (2.0 * p + rho);
  const double decay = std::pow(2.0, std::max(1.0, p / rho));
  double b1, b2, init, D, D2 = 0.0;
  if (mc.method == Method::sgd) {
    D = std::max(1.0, p * kPi * kPi / th);
    const double base = 2.0 * D / (th * K);
    b1 = 2.0 * std::pow(mc.zeta, rho) / std::pow(mc.mu, om) * std::pow(base, om);
    b2 = 4.0 * std::pow(kPi / 2.0, p / th) *
         std::pow(std::pow(mc.zeta, 2.0 * p * rho + rho) * std::pow(alpha, om) / std::pow(mc.mu, 2.0 * p * om), e1) *
         std::pow(base, e2);
    init = y0 * safe_exp(-mc.xi * std::pow(alpha, 1.0 / rho) * K / decay);
  } else {
    const double sn = std::sqrt(static_cast<double>(mc.N));
    D = std::max(1.0, 2.0 * p * kPi * kPi / th);
    // Exponent p/theta on pi^2/4, as produced by the exp/cos lemma with q = 1/theta.
    D2 = 4.0 * std::pow(kPi * kPi / 4.0, p / th) *
         std::pow(std::pow(mc.zeta_bar, 2.0 * p * rho + rho) / std::pow(mc.mu / 2.0, 2.0 * p * om), e1);
    const double base = 2.0 * D / (th * sn * K);
    b1 = 2.0 * std::pow(mc.zeta_bar, rho) / std::pow(mc.mu / 2.0, om) * std::pow(base, om);
    b2 = D2 * std::pow(alpha / sn, om * e1) * std::pow(base, e2);
    init = y0 * safe_exp(-mc.xi_bar * std::pow(alpha, 1.0 / rho) * K / (mc.n_factor() * decay));
  }
  BoundResult r = finish(std::max(b1, b2), init, b1 >= b2 ? "cos:horizon-branch" : "cos:tail-branch", snapshot(mc));
  r.details["D"] = D;
  if (mc.method == Method::rr) r.details["D2"] = D2;
  r.details["branch1"] = b1;
  r.details["branch2"] = b2;
  return r;
}

BoundResult lemma_bound_const(const PLParams& pl, double delta, const StepSchedule& schedule, double y0, long K) {
  require_family(schedule, Family::constant);
  const DerivedConstants dc = derive_constants(pl, delta);
  const double alpha = schedule.alpha();
  PreconditionList pre;
  pre.require(alpha <= dc.alpha_cap, "alpha exceeds alpha_cap");
  pre.require(K >= 1, "K must be at least 1");
  pre.raise();
  const double noise = 2.0 * dc.zeta * std::pow(alpha, dc.omega / dc.rho);
  const double init = y0 * safe_exp(-dc.xi * std::pow(alpha, 1.0 / dc.rho) * static_cast<double>(K));
  return finish(noise, init, "const", dc);
}

BoundResult bound_const(const MethodConstants& mc, const StepSchedule& schedule, double y0, long K) {
  require_family(schedule, Family::constant);
  const double alpha = schedule.alpha();
  PreconditionList pre;
  pre.require(alpha <= mc.alpha_cap, "alpha exceeds alpha_cap");
  pre.require(K >= 1, "K must be at least 1");
  pre.raise();
  const double th = mc.theta, Kd = static_cast<double>(K);
  double noise, init;
  if (mc.method == Method::sgd) {
    noise = 2.0 * mc.zeta * std::pow(alpha, 1.0 / (2.0 * th));
    init = y0 * safe_exp(-mc.xi * std::pow(alpha, 1.0 / mc.rho) * Kd);
  } else {
    const double n = static_cast<double>(mc.N);
    noise = 2.0 * mc.zeta_bar * std::pow(alpha, 1.0 / th) / std::pow(n, 1.0 / (2.0 * th));
    init = y0 * safe_exp(-mc.xi_bar * std::pow(alpha, 1.0 / mc.rho) * Kd / mc.n_factor());
  }
  return finish(noise, init, "const", snapshot(mc));
}

double tuned_alpha(const MethodConstants& mc, double beta, long K) {
  const double Kd = static_cast<double>(K);
  if (mc.method == Method::sgd) return std::pow(beta * std::log(Kd) / Kd, mc.rho);
  const double sn = std::sqrt(static_cast<double>(mc.N));
  return std::pow(beta * std::log(sn * Kd) / Kd * mc.n_factor(), mc.rho);
}

namespace {

void tuned_preconditions(const MethodConstants& mc, double beta, double beta_min, long K) {
  const double Kd = static_cast<double>(K);
  PreconditionList pre;
  pre.require(K >= 2, "K must be at least 2");
  pre.require(beta >= beta_min * (1.0 - 1e-12), "beta below tuning threshold");
  double need;
  if (mc.method == Method::sgd)
    need = beta * std::log(Kd) / std::pow(mc.alpha_cap, 1.0 / mc.rho);
  else
    need = beta * std::log(std::sqrt(static_cast<double>(mc.N)) * Kd) * mc.n_factor() /
           std::pow(mc.alpha_cap, 1.0 / mc.rho);
  pre.require(Kd >= need * (1.0 - 1e-12), "K below tuned lower bound");
  pre.raise();
}

}  // namespace

BoundResult bound_const_tuned(const MethodConstants& mc, double beta, double y0, long K) {
  tuned_preconditions(mc, beta, mc.omega / mc.xi_bar, K);
  const double alpha = std::min(tuned_alpha(mc, beta, K), mc.alpha_cap);
  BoundResult r = bound_const(mc, StepSchedule::constant(alpha), y0, K);
  r.details["alpha"] = alpha;
  r.details["beta"] = beta;
  return r;
}

BoundResult bound_cos_tuned(const MethodConstants& mc, double p, double beta, double y0, long K) {
  const double beta_min = std::pow(2.0, std::max(1.0, p / mc.rho)) * mc.omega / mc.xi_bar;
  tuned_preconditions(mc, beta, beta_min, K);
  const double alpha = std::min(tuned_alpha(mc, beta, K), mc.alpha_cap);
  BoundResult r = bound_cos(mc, StepSchedule::cosine(alpha, p, K), y0);
  r.details["alpha"] = alpha;
  r.details["beta"] = beta;
  return r;
}

}  // namespace chung
