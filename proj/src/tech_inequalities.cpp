#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chung/chung_core.hpp"

namespace chung {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTol = 1e-12;

// Normalized slack of "lhs <= rhs".
double slack(double lhs, double rhs) {
  return (rhs - lhs) / std::max({1.0, std::fabs(lhs), std::fabs(rhs)});
}

// 1 + cos(k pi / K), as 2 cos^2(k pi / (2K)).
double one_plus_cos(long k, long K) {
  double c = std::cos(static_cast<double>(k) / static_cast<double>(K) * (kPi / 2.0));
  return 2.0 * c * c;
}

double antiderivative(double x, double nu, double gamma) {
  if (nu == 1.0) return std::log(x + gamma);
  return std::pow(x + gamma, 1.0 - nu) / (1.0 - nu);
}

}  // namespace

CheckResult integral_test_sandwich(double nu, double gamma, long a, long b_max) {
  if (!(nu > 0.0 && gamma > 0.0) || a < 0 || b_max < a)
    throw std::invalid_argument("integral_test_sandwich: invalid arguments");
  MarginTracker t("integral_test nu=" + std::to_string(nu) + " gamma=" + std::to_string(gamma));
  auto f = [&](double x) { return std::pow(x + gamma, -nu); };
  const double fa = f(static_cast<double>(a));
  const double Fa = antiderivative(static_cast<double>(a), nu, gamma);
  CompensatedSum sum;
  for (long b = a; b <= b_max; ++b) {
    sum.add(f(static_cast<double>(b)));
    double s = sum.value();
    double lower = antiderivative(static_cast<double>(b) + 1.0, nu, gamma) - Fa;
    double upper = fa + antiderivative(static_cast<double>(b), nu, gamma) - Fa;
    t.observe(b, std::min(slack(lower, s), slack(s, upper)), s, kTol);
  }
  return t.result();
}

std::vector<CheckResult> tech_inequality_suite(long K_max, const std::vector<double>& r_grid) {
  if (K_max < 2) throw std::invalid_argument("tech_inequality_suite needs K_max >= 2");
  std::vector<CheckResult> out;

  {
    MarginTracker t("log1p_bound");
    const long M = 8 * K_max;
    for (long j = 0; j <= M; ++j) {
      double x = -1.0 + 11.0 * static_cast<double>(j) / static_cast<double>(M);
      t.observe(j, slack(std::log1p(x), x), x, kTol);
    }
    out.push_back(t.result());
  }
  {
    MarginTracker t("product_exp_bound");
    double prod = 1.0, sum = 0.0;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (long n = 1; n <= K_max; ++n) {
      double frac = std::fmod(static_cast<double>(n) * phi, 1.0);
      double x = -0.95 + 1.9 * frac;
      prod *= 1.0 + x;
      sum += x;
      double e = std::exp(sum);
      double m = e > 0.0 ? 1.0 - prod / e : 0.0;
      t.observe(n, m, prod, kTol);
    }
    out.push_back(t.result());
  }
  {
    MarginTracker t("power_difference");
    long idx = 0;
    for (double r : r_grid)
      for (int i = 1; i <= 128; ++i)
        for (int j = 1; j <= 128; ++j, ++idx) {
          double x = i / 32.0, y = j / 32.0;
          double lhs = std::pow(x, r) - std::pow(y, r);
          double rhs = r * std::pow(y, r) / x * (x - y);
          t.observe(idx, slack(rhs, lhs), lhs, kTol);
        }
    out.push_back(t.result());
  }
  {
    MarginTracker lo("cosine_sandwich_lower"), hi("cosine_sandwich_upper");
    MarginTracker shift("cosine_shift_lower"), incr("cosine_increment");
    long idx = 0;
    for (long K = 1; K <= K_max; ++K) {
      const double Kd = static_cast<double>(K);
      for (long k = 0; k <= K; ++k, ++idx) {
        double t1 = 1.0 - static_cast<double>(k) / Kd;
        double c = one_plus_cos(k, K);
        lo.observe(idx, slack(2.0 * t1 * t1, c), c, kTol);
        hi.observe(idx, slack(c, kPi * kPi / 2.0 * t1 * t1), c, kTol);
        if (K >= 2 && k <= K - 2) {
          double c1 = one_plus_cos(k + 1, K);
          shift.observe(idx, slack(0.5 * t1 * t1, c1), c1, kTol);
        }
        if (k <= K - 1) {
          // cos((k+1)pi/K) - cos(k pi/K) = -2 sin((2k+1)pi/(2K)) sin(pi/(2K))
          double diff = -2.0 * std::sin((2.0 * k + 1.0) * kPi / (2.0 * Kd)) * std::sin(kPi / (2.0 * Kd));
          incr.observe(idx, slack(-(kPi * kPi / Kd) * t1, diff), diff, kTol);
        }
      }
    }
    out.push_back(lo.result());
    out.push_back(hi.result());
    out.push_back(shift.result());
    out.push_back(incr.result());
  }
  {
    MarginTracker t("cosine_power_sum"), ident("cosine_sum_identity");
    long idx = 0;
    for (double r : r_grid)
      for (long K = 1; K <= K_max; ++K, ++idx) {
        CompensatedSum s, s1;
        for (long k = 0; k < K; ++k) {
          double h = one_plus_cos(k, K) / 2.0;
          s.add(std::pow(h, r));
          s1.add(h);
        }
        double bound = static_cast<double>(K) / std::pow(2.0, std::max(1.0, r));
        t.observe(idx, slack(bound, s.value()), s.value(), kTol);
        double exact = (static_cast<double>(K) + 1.0) / 2.0;
        double rel = std::fabs(s1.value() - exact) / exact;
        ident.observe(idx, -rel, s1.value(), kTol);
      }
    out.push_back(t.result());
    out.push_back(ident.result());
  }
  for (double nu : {0.5, 1.0, 1.5, 2.0})
    for (double gamma : {0.5, 1.0, 3.0, 10.0})
      for (long a : {0L, 1L, 7L}) out.push_back(integral_test_sandwich(nu, gamma, a, a + K_max));
  return out;
}

}  // namespace chung
