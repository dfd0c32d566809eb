#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace chung {

/// One entry of a verification report. witness_index is -1 when there is no
/// failing (or tightest) index to point at.
struct CheckResult {
  std::string check;
  bool passed = true;
  long witness_index = -1;
  double witness_value = 0.0;
  double margin = 0.0;
};

nlohmann::json to_json(const CheckResult& c);
nlohmann::json to_json(const std::vector<CheckResult>& checks);
bool all_passed(const std::vector<CheckResult>& checks);

/// Doubles that are not finite are written as the strings "inf", "-inf", "nan".
nlohmann::json number_json(double v);

// Accumulates a "lhs <= rhs" style check over many instances and keeps the
// tightest margin plus the first violation.
class MarginTracker {
 public:
  explicit MarginTracker(std::string name) { result_.check = std::move(name); result_.margin = 1e300; }

  // margin >= -tol counts as satisfied.
  void observe(long index, double margin, double value, double tol) {
    ++count_;
    if (margin < result_.margin) {
      result_.margin = margin;
      if (result_.passed) {
        result_.witness_index = index;
        result_.witness_value = value;
      }
    }
    if (margin < -tol && result_.passed) {
      result_.passed = false;
      result_.witness_index = index;
      result_.witness_value = value;
    }
  }

  long count() const { return count_; }
  CheckResult result() const {
    CheckResult r = result_;
    if (count_ == 0) r.margin = 0.0;
    return r;
  }

 private:
  CheckResult result_;
  long count_ = 0;
};

}  // namespace chung
