#pragma once

#include <string>

namespace chung {

enum class Family { constant, polynomial, exponential, cosine };

std::string family_name(Family f);
Family parse_family(const std::string& name);

/// Step-size rule. Parameters are validated by the factory functions, so
/// an existing schedule is always well formed.
///
///  constant:    alpha_k = alpha
///  polynomial:  alpha_k = alpha / (k + gamma)^p
///  exponential: alpha_k = alpha * decay^k, decay = (beta / K)^(p / K)
///  cosine:      alpha_k = alpha * [(1 + cos(k pi / K)) / 2]^p
class StepSchedule {
 public:
  static StepSchedule constant(double alpha);
  static StepSchedule polynomial(double alpha, double gamma, double p);
  static StepSchedule exponential(double alpha, double beta, double p, long K);
  static StepSchedule cosine(double alpha, double p, long K);

  Family family() const { return family_; }
  double alpha() const { return alpha_; }
  double gamma() const { return gamma_; }
  double beta() const { return beta_; }
  double p() const { return p_; }
  long horizon() const { return K_; }
  bool has_horizon() const { return family_ == Family::exponential || family_ == Family::cosine; }
  bool is_decreasing() const { return family_ != Family::constant; }

  /// log of the per-step exponential decay factor, (p / K)(log beta - log K).
  double log_decay() const { return log_decay_; }

  std::string describe() const;

 private:
  StepSchedule() = default;

  Family family_ = Family::constant;
  double alpha_ = 0.0;
  double gamma_ = 0.0;
  double beta_ = 0.0;
  double p_ = 0.0;
  long K_ = 0;
  double log_decay_ = 0.0;
};

double step_value(const StepSchedule& s, long k);
double step_max(const StepSchedule& s, long K);

/// Sum of alpha_k for k in [0, K-1]; closed form where available.
double step_sum(const StepSchedule& s, long K);
/// The same sum by compensated direct summation.
double step_sum_direct(const StepSchedule& s, long K);

struct CapReport {
  bool passed = true;
  long violating_k = -1;
  double step = 0.0;
  double cap = 0.0;
};

CapReport validate_cap(const StepSchedule& s, double cap, long K);

}  // namespace chung
