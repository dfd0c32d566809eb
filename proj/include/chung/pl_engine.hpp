#pragma once

#include <map>
#include <string>
#include <vector>

#include "chung/chung_core.hpp"
#include "chung/errors.hpp"
#include "chung/schedules.hpp"

namespace chung {

/// y_{k+1} <= (1 + l1 a_k^tau) y_k - l2 a_k y_k^(2 theta) + l3 a_k^tau.
struct PLParams {
  double l1 = 0.0;
  double l2 = 1.0;
  double l3 = 1.0;
  double tau = 2.0;
  double theta = 0.5;

  void validate() const;
};

struct DerivedConstants {
  double delta = 1.0;
  double zeta = 0.0;
  double xi = 0.0;
  double rho = 1.0;
  double omega = 1.0;
  double q = 1.0;
  double frak_p = 1.0;
  double alpha_cap = 0.0;
};

double frak_p(double theta);
DerivedConstants derive_constants(const PLParams& params, double delta);

enum class Method { sgd, rr };
std::string method_name(Method m);
Method parse_method(const std::string& s);

struct MethodConstants {
  Method method = Method::sgd;
  double theta = 0.5;
  double L = 1.0;
  double mu = 1.0;
  double A = 0.0;
  double sigma = 0.0;
  long N = 1;

  double rho = 1.0;
  double omega = 1.0;
  double zeta = 0.0;      // zeta_s, or zeta_r for RR
  double zeta_bar = 0.0;  // RR: zeta_bar_r; SGD: equals zeta
  double xi = 0.0;        // xi_s, or xi_r for RR
  double xi_bar = 0.0;    // RR: xi_bar_r; SGD: equals xi
  double alpha_cap = 0.0; // includes the 1/L (SGD) or 1/(2L) (RR) smoothness cap
  double smoothness_cap = 0.0;

  PLParams pl() const;
  double delta() const;
  double tau() const { return method == Method::sgd ? 2.0 : 3.0; }
  /// N^(1 - 1/(2 theta)) for RR, 1 for SGD.
  double n_factor() const;
};

MethodConstants sgd_constants(double theta, double L, double mu, double A, double sigma);
MethodConstants rr_constants(double theta, double L, double mu, double A, double sigma, long N);
PLParams descent_coefficients(Method m, double L, double mu, double A, double sigma, long N);

/// Worst-case equality recursion; throws NumericError if y turns negative.
std::vector<double> simulate_pl_recursion(const PLParams& params, const StepSchedule& schedule, double y0, long K);

/// Relaxed recursion y_{k+1} <= (1 - xi a_k^(1/rho)) y_k + 2 zeta xi a_k^tau written as a
/// Chung recursion over b_k. Throws PreconditionError when step_max exceeds alpha_cap.
RecursionSpec relaxed_recursion_transform(const PLParams& params, double delta, const StepSchedule& schedule, long K);

struct BoundResult {
  double value = 0.0;
  double noise_term = 0.0;
  double init_term = 0.0;
  std::string regime;
  DerivedConstants constants;
  std::map<std::string, double> details;
};

// Theorem-level bounds for SGD / RR at horizon K (taken from the schedule
// for exponential and cosine).
BoundResult bound_exp(const MethodConstants& mc, const StepSchedule& schedule, double y0);
BoundResult bound_cos(const MethodConstants& mc, const StepSchedule& schedule, double y0);
BoundResult bound_const(const MethodConstants& mc, const StepSchedule& schedule, double y0, long K);

/// alpha = [beta log K / K]^rho (SGD) or [beta log(sqrt(N) K) N^(1-1/(2 theta)) / K]^rho (RR).
double tuned_alpha(const MethodConstants& mc, double beta, long K);
BoundResult bound_const_tuned(const MethodConstants& mc, double beta, double y0, long K);
BoundResult bound_cos_tuned(const MethodConstants& mc, double p, double beta, double y0, long K);

// Lemma-level bounds on (PLParams, delta).
BoundResult lemma_bound_exp(const PLParams& pl, double delta, const StepSchedule& schedule, double y0);
BoundResult lemma_bound_cos(const PLParams& pl, double delta, const StepSchedule& schedule, double y0);
BoundResult lemma_bound_const(const PLParams& pl, double delta, const StepSchedule& schedule, double y0, long K);

enum class PolyCase { a, b, c, d, automatic };
std::string poly_case_name(PolyCase c);
PolyCase parse_poly_case(const std::string& s);
PolyCase select_poly_case(double theta, double p, double rho);

BoundResult bound_poly(const PLParams& pl, double delta, const StepSchedule& schedule, double y0, long K,
                       PolyCase c = PolyCase::automatic);
/// Method-level polynomial bound: the lemma on the method's coefficients plus
/// the smoothness cap on alpha_0.
BoundResult bound_poly(const MethodConstants& mc, const StepSchedule& schedule, double y0, long K,
                       PolyCase c = PolyCase::automatic);
/// Tuned polynomial bound with p = rho. SGD takes `alpha_or_beta` as alpha,
/// RR takes it as beta (alpha is then fixed by K).
BoundResult bound_poly_tuned(const MethodConstants& mc, double alpha_or_beta, double gamma, double y0, long K);
/// alpha used by the tuned RR polynomial bound.
double rr_poly_tuned_alpha(const MethodConstants& mc, double beta, long K);

/// Smallest gamma (>= e) for which the case-(d) linearization holds on k in [0, K-1].
double poly_case_d_gamma0(const PLParams& pl, double alpha, long K);

struct PolyChoice {
  double alpha = 0.0;
  double gamma = 0.0;
  PolyCase which = PolyCase::a;
};

/// A feasible (alpha, gamma) for the polynomial lemma at exponent p.
PolyChoice feasible_poly_parameters(const PLParams& pl, double delta, double p, long K);

}  // namespace chung
