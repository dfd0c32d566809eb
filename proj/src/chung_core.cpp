#include "chung/chung_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace chung {

namespace {

double fd_step(double x) { return std::max(1e-6, 1e-6 * std::fabs(x)); }

void require_finite(double v, const char* what, double x) {
  if (!std::isfinite(v))
    throw std::domain_error(std::string(what) + " is not finite at x=" + std::to_string(x));
}

}  // namespace

double FunctionDescriptor::derivative(double x) const {
  if (df) return df(x);
  double h = fd_step(x);
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

FunctionDescriptor constant_function(double value, std::string label) {
  FunctionDescriptor d;
  d.f = [value](double) { return value; };
  d.df = [](double) { return 0.0; };
  d.label = label.empty() ? std::to_string(value) : std::move(label);
  return d;
}

double RecursionSpec::r(double x) const {
  if (r_exact) return r_exact(x);
  double tv = t(x);
  if (std::isinf(tv)) return 0.0;
  return s(x) / tv;
}

double RecursionSpec::u(double x) const {
  double tv = t(x);
  if (std::isinf(tv)) return 0.0;
  if (analytic_u()) return s.derivative(x) - s(x) * t.derivative(x) / tv;
  double h = fd_step(x);
  return (r(x + h) - r(x - h)) / (2.0 * h) * tv;
}

FunctionDescriptor RecursionSpec::r_descriptor() const {
  FunctionDescriptor d;
  RecursionSpec copy = *this;
  d.f = [copy](double x) { return copy.r(x); };
  if (analytic_u()) {
    d.df = [copy](double x) {
      double tv = copy.t(x);
      if (std::isinf(tv)) return 0.0;
      return copy.u(x) / tv;
    };
  }
  d.label = "r = s/t";
  return d;
}

void RecursionSpec::validate() const {
  if (K < 1) throw std::invalid_argument("recursion horizon must be >= 1");
  for (long k = 0; k <= K; ++k) {
    double bk = b(k);
    if (!I.contains(bk)) throw std::invalid_argument("b_" + std::to_string(k) + " lies outside I");
    if (k == K) break;  // s, t at the terminal index are never used
    double sv = s(bk);
    if (!(sv >= 1.0)) throw std::invalid_argument("s(b_" + std::to_string(k) + ") < 1");
    if (!(t(bk) > 0.0)) throw std::invalid_argument("t(b_" + std::to_string(k) + ") <= 0");
  }
}

RecursionSpec constant_recursion_spec(double contraction, double error, long K) {
  if (!(contraction > 0.0 && contraction <= 1.0)) throw std::invalid_argument("contraction must lie in (0,1]");
  RecursionSpec spec;
  spec.s = constant_function(1.0 / contraction, "1/alpha");
  spec.t = constant_function(error > 0.0 ? 1.0 / error : kInf, "1/beta");
  spec.b = [](long k) { return static_cast<double>(k); };
  spec.I = {0.0, kInf};
  spec.K = K;
  return spec;
}

std::vector<double> iterate_recursion_exact(const RecursionSpec& spec, double a0, long K) {
  if (!(a0 >= 0.0)) throw std::invalid_argument("a0 must be nonnegative");
  std::vector<double> a(static_cast<std::size_t>(K) + 1);
  a[0] = a0;
  for (long k = 0; k < K; ++k) {
    double bk = spec.b(k);
    double sv = spec.s(bk);
    if (!(sv >= 1.0)) throw std::invalid_argument("s(b_" + std::to_string(k) + ") < 1");
    a[k + 1] = (1.0 - 1.0 / sv) * a[k] + 1.0 / spec.t(bk);
  }
  return a;
}

double contraction_product(const RecursionSpec& spec, long k0, long k1) {
  double prod = 1.0;
  for (long i = std::max(k0, 0L); i <= k1; ++i) prod *= 1.0 - 1.0 / spec.s(spec.b(i));
  return prod;
}

double expansion_bound(const RecursionSpec& spec, double a0, long K) {
  if (!(a0 >= 0.0)) throw std::invalid_argument("a0 must be nonnegative");
  // Accumulate the suffix products from the back so each term costs O(1).
  CompensatedSum acc;
  double suffix = 1.0;  // prod_{i=k+1}^{K-1}
  for (long k = K - 1; k >= 0; --k) {
    double bk = spec.b(k);
    double sv = spec.s(bk);
    if (!(sv >= 1.0)) throw std::invalid_argument("s(b_" + std::to_string(k) + ") < 1");
    acc.add(suffix / spec.t(bk));
    suffix *= 1.0 - 1.0 / sv;
  }
  acc.add(a0 * suffix);
  return acc.value();
}

namespace {

constexpr double kConvexTol = 1e-9;

ConvexityReport convexity_on_points(const std::vector<double>& xs, const std::function<double(double)>& r) {
  ConvexityReport rep;
  std::vector<double> vals(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    vals[i] = r(xs[i]);
    require_finite(vals[i], "r", xs[i]);
  }
  for (std::size_t i = 1; i + 1 < xs.size(); ++i) {
    double h1 = xs[i] - xs[i - 1];
    double h2 = xs[i + 1] - xs[i];
    if (h1 <= 0.0 || h2 <= 0.0) continue;
    double s1 = (vals[i] - vals[i - 1]) / h1;
    double s2 = (vals[i + 1] - vals[i]) / h2;
    // Equals the usual second difference r(x-h) - 2r(x) + r(x+h) on a uniform grid.
    double second = (s2 - s1) * std::min(h1, h2);
    double normalized = second / std::max(1.0, std::fabs(vals[i]));
    if (normalized < rep.worst) {
      rep.worst = normalized;
      if (normalized < -kConvexTol) {
        rep.convex = false;
        rep.witness = xs[i];
      }
    }
  }
  return rep;
}

}  // namespace

ConvexityReport check_convexity(const FunctionDescriptor& r, Interval I, int samples) {
  if (samples < 3) throw std::invalid_argument("check_convexity needs at least 3 samples");
  double lo = I.lo, hi = I.hi;
  // Unbounded intervals are probed on a finite window.
  if (std::isinf(lo) && std::isinf(hi)) {
    lo = -1e3;
    hi = 1e3;
  } else if (std::isinf(hi)) {
    hi = lo + 1e3 * std::max(1.0, std::fabs(lo));
  } else if (std::isinf(lo)) {
    lo = hi - 1e3 * std::max(1.0, std::fabs(hi));
  }
  std::vector<double> xs(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) xs[i] = lo + (hi - lo) * i / (samples - 1);
  return convexity_on_points(xs, r.f);
}

ConvexityReport check_convexity_along(const RecursionSpec& spec, int subdivisions) {
  if (subdivisions < 1) throw std::invalid_argument("subdivisions must be >= 1");
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(spec.K) * subdivisions + 1);
  for (long k = 0; k < spec.K; ++k) {
    double a = spec.b(k), c = spec.b(k + 1);
    for (int j = 0; j < subdivisions; ++j) xs.push_back(a + (c - a) * j / subdivisions);
  }
  xs.push_back(spec.b(spec.K));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  RecursionSpec copy = spec;
  return convexity_on_points(xs, [copy](double x) { return copy.r(x); });
}

CertifiedLambda find_lambda_constant(const RecursionSpec& spec, double lambda_max) {
  CertifiedLambda cert;
  cert.finite_difference = !spec.analytic_u();
  const double tol = cert.finite_difference ? 1e-6 : 1e-9;
  double lam = 0.0;
  std::vector<double> needed;
  for (long k = 0; k < spec.K; ++k) {
    double bk = spec.b(k);
    double delta = spec.b(k + 1) - bk;
    double du = delta == 0.0 ? 0.0 : delta * spec.u(bk);
    require_finite(du, "(b_{k+1}-b_k) u(b_k)", bk);
    double slack = 1.0 + du;
    if (!(slack > 0.0)) break;
    double need = 1.0 / slack;
    if (need > lambda_max * (1.0 + tol)) break;
    needed.push_back(need);
    lam = std::max(lam, need);
    cert.horizon = k;
  }
  if (cert.horizon < 0) {
    cert.lambda = std::isfinite(lambda_max) ? lambda_max : 1.0;
    cert.margin = 0.0;
    return cert;
  }
  cert.lambda = lam;
  cert.margin = kInf;
  for (double need : needed) cert.margin = std::min(cert.margin, 1.0 / need - 1.0 / lam);
  // lambda_{k+1} >= needed_k, non-decreasing; lambda_0 := lambda_1.
  cert.sequence.resize(needed.size() + 1);
  double run = 0.0;
  for (std::size_t k = 0; k < needed.size(); ++k) {
    run = std::max(run, needed[k]);
    cert.sequence[k + 1] = run;
  }
  cert.sequence[0] = cert.sequence[1];
  return cert;
}

double general_bound(const RecursionSpec& spec, const CertifiedLambda& cert, double a0, long k,
                     bool use_sequence) {
  if (k < 0 || k > cert.horizon)
    throw std::out_of_range("general_bound: k=" + std::to_string(k) + " beyond certified horizon " +
                            std::to_string(cert.horizon));
  double lam0 = cert.lambda, lam1 = cert.lambda;
  if (use_sequence) {
    lam0 = cert.sequence.at(0);
    lam1 = cert.sequence.at(static_cast<std::size_t>(k) + 1);
  }
  double prod = contraction_product(spec, 0, k);
  return lam1 * spec.r(spec.b(k + 1)) + (a0 - lam0 * spec.r(spec.b(0))) * prod;
}

double extend_bound(const RecursionSpec& spec, double B, double C, long k0, long Kbar, long K) {
  for (long k = Kbar + 1; k <= K - 1; ++k) {
    double rk = spec.r(spec.b(k));
    if (rk > B * (1.0 + 1e-12))
      throw std::invalid_argument("extend_bound: r(b_" + std::to_string(k) + ") exceeds B");
  }
  if (C == 0.0) return B;
  return B + C * contraction_product(spec, k0, K - 1);
}

double forgetting_factor(const RecursionSpec& spec, double lambda, long k) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  double inv = std::isinf(lambda) ? 0.0 : 1.0 / lambda;
  double prod = 1.0;
  for (long i = 0; i <= k; ++i) prod *= 1.0 - inv / (spec.s(spec.b(i)) - 1.0 + inv);
  return prod;
}

void validate_classical(const ClassicalParams& p, ClassicalVariant variant) {
  if (!(p.c > 0 && p.d > 0 && p.q > 0 && p.gamma > 0))
    throw std::invalid_argument("classical parameters c, d, q, gamma must be positive");
  if (!(p.nu > 0.0 && p.nu <= 1.0)) throw std::invalid_argument("nu must lie in (0,1]");
  if (p.gamma < std::pow(p.c, 1.0 / p.nu)) throw std::invalid_argument("gamma < c^(1/nu)");
  if (variant == ClassicalVariant::sigma) {
    if (!(p.varsigma > 0.0)) throw std::invalid_argument("varsigma must be positive");
    if (p.nu == 1.0) {
      if (p.c < (1.0 + p.varsigma) * p.q) throw std::invalid_argument("c < (1+varsigma) q");
    } else if (p.gamma < std::pow((1.0 + p.varsigma) * p.q / p.c, 1.0 / (1.0 - p.nu))) {
      throw std::invalid_argument("gamma < ((1+varsigma) q / c)^(1/(1-nu))");
    }
    return;
  }
  if (p.nu == 1.0) {
    if (!(p.c > p.q)) throw std::invalid_argument("case nu=1 needs c > q");
  } else if (!(p.gamma > std::pow(p.q / p.c, 1.0 / (1.0 - p.nu)))) {
    throw std::invalid_argument("case nu<1 needs gamma > (q/c)^(1/(1-nu))");
  }
}

double classical_lambda(const ClassicalParams& p) {
  if (p.nu == 1.0) return p.c / (p.c - p.q);
  double cg = p.c * std::pow(p.gamma, 1.0 - p.nu);
  return cg / (cg - p.q);
}

double classical_bound(const ClassicalParams& p, double a0, long k, ClassicalVariant variant) {
  validate_classical(p, variant);
  const double x1 = static_cast<double>(k) + 1.0 + p.gamma;
  const double lam = classical_lambda(p);
  const double start = positive_part(a0 - lam * p.d / (p.c * std::pow(p.gamma, p.q)));
  if (variant == ClassicalVariant::sigma) {
    double lead = (1.0 + p.varsigma) * p.d / (p.varsigma * p.c) * std::pow(x1, -p.q);
    return lead + start * safe_exp(-p.c * (static_cast<double>(k) + 1.0) / std::pow(x1, p.nu));
  }
  if (p.nu == 1.0) {
    double lead = p.d / (p.c - p.q) * std::pow(x1, -p.q);
    return lead + start * safe_exp(p.c * (std::log(p.gamma) - std::log(x1)));
  }
  const double e = 1.0 - p.nu;
  double lead = lam * p.d / p.c * std::pow(x1, -p.q);
  // exp(c g^e / e) exp(-c x1^e / e), combined before exponentiating.
  return lead + start * safe_exp(-p.c * (std::pow(x1, e) - std::pow(p.gamma, e)) / e);
}

RecursionSpec classical_spec(const ClassicalParams& p, long K) {
  RecursionSpec spec;
  const double c = p.c, d = p.d, nu = p.nu, q = p.q;
  spec.s.f = [c, nu](double x) { return std::pow(x, nu) / c; };
  spec.s.df = [c, nu](double x) { return nu * std::pow(x, nu - 1.0) / c; };
  spec.s.label = "x^nu/c";
  spec.t.f = [d, nu, q](double x) { return std::pow(x, nu + q) / d; };
  spec.t.df = [d, nu, q](double x) { return (nu + q) * std::pow(x, nu + q - 1.0) / d; };
  spec.t.label = "x^(nu+q)/d";
  const double g = p.gamma;
  spec.b = [g](long k) { return static_cast<double>(k) + g; };
  spec.I = {g, kInf};
  spec.K = K;
  return spec;
}

}  // namespace chung
