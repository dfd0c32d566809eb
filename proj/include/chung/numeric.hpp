#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

namespace chung {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline double positive_part(double x) { return std::max(x, 0.0); }

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

inline bool rel_close(double a, double b, double rel) {
  if (a == b) return true;
  return std::fabs(a - b) <= rel * std::max({1.0, std::fabs(a), std::fabs(b)});
}

// exp that saturates instead of overflowing for exponents beyond the double range.
inline double safe_exp(double x) {
  if (x > 709.0) return kInf;
  if (x < -745.0) return 0.0;
  return std::exp(x);
}

}  // namespace chung
