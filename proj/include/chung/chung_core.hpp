#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chung/numeric.hpp"
#include "chung/report.hpp"

namespace chung {

struct Interval {
  double lo = -kInf;
  double hi = kInf;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// A scalar function with an optional analytic derivative. Without one,
/// derivative() falls back to a central difference.
struct FunctionDescriptor {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::string label;

  double operator()(double x) const { return f(x); }
  bool has_analytic_derivative() const { return static_cast<bool>(df); }
  double derivative(double x) const;
};

FunctionDescriptor constant_function(double value, std::string label = "");

/// a_{k+1} <= (1 - 1/s(b_k)) a_k + 1/t(b_k), k = 0..K-1.
/// t may return +inf (no error term).
struct RecursionSpec {
  FunctionDescriptor s;
  FunctionDescriptor t;
  std::function<double(long)> b;
  Interval I;
  long K = 0;
  /// Closed form of r = s/t, used when set (e.g. where s and t both blow up).
  std::function<double(double)> r_exact;

  double r(double x) const;
  /// u = (log r)' s = r' t.
  double u(double x) const;
  bool analytic_u() const { return s.has_analytic_derivative() && t.has_analytic_derivative(); }
  FunctionDescriptor r_descriptor() const;

  /// Throws std::invalid_argument when b_k leaves I, s(b_k) < 1 or t(b_k) <= 0.
  void validate() const;
};

/// Spec of the constant recursion a_{k+1} <= (1 - a) a_k + c with b_k = k.
RecursionSpec constant_recursion_spec(double contraction, double error, long K);

std::vector<double> iterate_recursion_exact(const RecursionSpec& spec, double a0, long K);

/// Explicit expansion of the equality recursion, i.e. the value of a_K.
double expansion_bound(const RecursionSpec& spec, double a0, long K);

struct ConvexityReport {
  bool convex = true;
  std::optional<double> witness;
  double worst = 0.0;  // most negative normalized second difference
};

ConvexityReport check_convexity(const FunctionDescriptor& r, Interval I, int samples);
/// Checks r on the points b_0..b_K refined with `subdivisions` points per gap.
ConvexityReport check_convexity_along(const RecursionSpec& spec, int subdivisions = 8);

struct CertifiedLambda {
  double lambda = 1.0;
  /// lambda_0 .. lambda_{horizon+1}; the non-decreasing sequence alternative.
  std::vector<double> sequence;
  /// Largest k such that the lambda condition holds for every index 0..k;
  /// -1 when it already fails at k = 0.
  long horizon = -1;
  double margin = 0.0;
  bool finite_difference = false;
};

/// Certifies (b_{k+1} - b_k) u(b_k) >= -1 + 1/lambda for a prefix of indices.
/// With lambda_max finite, the prefix stops at the first index that would
/// need a larger lambda.
CertifiedLambda find_lambda_constant(const RecursionSpec& spec, double lambda_max = kInf);

/// Bound on a_{k+1}: lambda r(b_{k+1}) + (a_0 - lambda r(b_0)) prod_{i<=k} (1 - 1/s(b_i)).
double general_bound(const RecursionSpec& spec, const CertifiedLambda& cert, double a0, long k,
                     bool use_sequence = false);

/// B + C prod_{i=k0}^{K-1} (1 - 1/s(b_i)); requires r(b_k) <= B for k in [Kbar+1, K-1].
double extend_bound(const RecursionSpec& spec, double B, double C, long k0, long Kbar, long K);

double forgetting_factor(const RecursionSpec& spec, double lambda, long k);

/// Product prod_{i=k0}^{k1} (1 - 1/s(b_i)); 1 when k1 < k0.
double contraction_product(const RecursionSpec& spec, long k0, long k1);

enum class ClassicalVariant { standard, sigma };

/// a_{k+1} <= (1 - c/(k+gamma)^nu) a_k + d/(k+gamma)^(nu+q).
struct ClassicalParams {
  double c = 1.0;
  double d = 1.0;
  double nu = 1.0;
  double q = 1.0;
  double gamma = 1.0;
  double varsigma = 1.0;
};

/// Throws std::invalid_argument naming the violated case condition.
void validate_classical(const ClassicalParams& p, ClassicalVariant variant);
double classical_lambda(const ClassicalParams& p);
double classical_bound(const ClassicalParams& p, double a0, long k, ClassicalVariant variant);
RecursionSpec classical_spec(const ClassicalParams& p, long K);

/// Numeric confirmation of the cosine / log / power inequalities and the
/// integral-test sandwich used throughout the rate proofs.
std::vector<CheckResult> tech_inequality_suite(long K_max, const std::vector<double>& r_grid);

/// int_a^{b+1} f <= sum_{k=a}^{b} f(k) <= f(a) + int_a^b f for f(x) = (x+gamma)^(-nu),
/// checked for every b in [a, b_max].
CheckResult integral_test_sandwich(double nu, double gamma, long a, long b_max);

}  // namespace chung
