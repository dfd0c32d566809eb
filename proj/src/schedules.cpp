#include "chung/schedules.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "chung/numeric.hpp"

namespace chung {

namespace {

void require_positive(double v, const char* name) {
  if (!std::isfinite(v) || !(v > 0.0))
    throw std::invalid_argument(std::string("schedule parameter ") + name + " must be finite and positive");
}

// (1 + cos(k pi / K)) / 2 written as cos^2(k pi / (2K)); accurate near k = K.
double half_cosine(long k, long K) {
  double c = std::cos(static_cast<double>(k) / static_cast<double>(K) * (std::numbers::pi / 2.0));
  return c * c;
}

}  // namespace

std::string family_name(Family f) {
  switch (f) {
    case Family::constant: return "constant";
    case Family::polynomial: return "polynomial";
    case Family::exponential: return "exponential";
    case Family::cosine: return "cosine";
  }
  return "unknown";
}

Family parse_family(const std::string& name) {
  if (name == "constant") return Family::constant;
  if (name == "polynomial") return Family::polynomial;
  if (name == "exponential") return Family::exponential;
  if (name == "cosine") return Family::cosine;
  throw std::invalid_argument("unknown schedule family '" + name + "'");
}

StepSchedule StepSchedule::constant(double alpha) {
  require_positive(alpha, "alpha");
  StepSchedule s;
  s.family_ = Family::constant;
  s.alpha_ = alpha;
  return s;
}

StepSchedule StepSchedule::polynomial(double alpha, double gamma, double p) {
  require_positive(alpha, "alpha");
  require_positive(gamma, "gamma");
  require_positive(p, "p");
  StepSchedule s;
  s.family_ = Family::polynomial;
  s.alpha_ = alpha;
  s.gamma_ = gamma;
  s.p_ = p;
  return s;
}

StepSchedule StepSchedule::exponential(double alpha, double beta, double p, long K) {
  require_positive(alpha, "alpha");
  require_positive(beta, "beta");
  require_positive(p, "p");
  if (K < 1) throw std::invalid_argument("exponential schedule needs K >= 1");
  if (!(static_cast<double>(K) > beta)) throw std::invalid_argument("exponential schedule needs K > beta");
  StepSchedule s;
  s.family_ = Family::exponential;
  s.alpha_ = alpha;
  s.beta_ = beta;
  s.p_ = p;
  s.K_ = K;
  s.log_decay_ = (p / static_cast<double>(K)) * (std::log(beta) - std::log(static_cast<double>(K)));
  return s;
}

StepSchedule StepSchedule::cosine(double alpha, double p, long K) {
  require_positive(alpha, "alpha");
  require_positive(p, "p");
  if (K < 1) throw std::invalid_argument("cosine schedule needs K >= 1");
  StepSchedule s;
  s.family_ = Family::cosine;
  s.alpha_ = alpha;
  s.p_ = p;
  s.K_ = K;
  return s;
}

std::string StepSchedule::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << family_name(family_) << "{alpha=" << alpha_;
  switch (family_) {
    case Family::constant: break;
    case Family::polynomial: os << ", gamma=" << gamma_ << ", p=" << p_; break;
    case Family::exponential: os << ", beta=" << beta_ << ", p=" << p_ << ", K=" << K_; break;
    case Family::cosine: os << ", p=" << p_ << ", K=" << K_; break;
  }
  os << "}";
  return os.str();
}

double step_value(const StepSchedule& s, long k) {
  if (k < 0) throw std::out_of_range("step index must be nonnegative");
  if (s.has_horizon() && k > s.horizon()) throw std::out_of_range("step index beyond schedule horizon");
  switch (s.family()) {
    case Family::constant: return s.alpha();
    case Family::polynomial: return s.alpha() / std::pow(static_cast<double>(k) + s.gamma(), s.p());
    case Family::exponential: return s.alpha() * std::exp(static_cast<double>(k) * s.log_decay());
    case Family::cosine:
      if (k == s.horizon()) return 0.0;
      return s.alpha() * std::pow(half_cosine(k, s.horizon()), s.p());
  }
  return 0.0;
}

double step_max(const StepSchedule& s, long K) {
  if (K < 1) throw std::invalid_argument("step_max needs K >= 1");
  return step_value(s, 0);
}

double step_sum_direct(const StepSchedule& s, long K) {
  if (K < 1) throw std::invalid_argument("step_sum needs K >= 1");
  CompensatedSum acc;
  for (long k = 0; k < K; ++k) acc.add(step_value(s, k));
  return acc.value();
}

double step_sum(const StepSchedule& s, long K) {
  if (K < 1) throw std::invalid_argument("step_sum needs K >= 1");
  switch (s.family()) {
    case Family::constant: return s.alpha() * static_cast<double>(K);
    case Family::exponential: {
      // alpha (1 - g^K) / (1 - g), with both differences via expm1.
      double lg = s.log_decay();
      return s.alpha() * std::expm1(static_cast<double>(K) * lg) / std::expm1(lg);
    }
    case Family::cosine:
      if (s.p() == 1.0 && K == s.horizon()) return s.alpha() * (static_cast<double>(K) + 1.0) / 2.0;
      return step_sum_direct(s, K);
    case Family::polynomial: return step_sum_direct(s, K);
  }
  return 0.0;
}

CapReport validate_cap(const StepSchedule& s, double cap, long K) {
  if (!(cap > 0.0)) throw std::invalid_argument("cap must be positive");
  CapReport r;
  r.cap = cap;
  // All non-constant families are non-increasing, so alpha_0 is the maximum.
  r.step = step_max(s, K);
  if (r.step > cap) {
    r.passed = false;
    r.violating_k = 0;
  }
  return r;
}

}  // namespace chung
