#include "chung/report.hpp"

#include <cmath>

namespace chung {

nlohmann::json number_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

nlohmann::json to_json(const CheckResult& c) {
  nlohmann::json j;
  j["check"] = c.check;
  j["passed"] = c.passed;
  if (c.witness_index >= 0)
    j["witness_index"] = c.witness_index;
  else
    j["witness_index"] = nullptr;
  j["witness_value"] = number_json(c.witness_value);
  j["margin"] = number_json(c.margin);
  return j;
}

nlohmann::json to_json(const std::vector<CheckResult>& checks) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& c : checks) arr.push_back(to_json(c));
  return arr;
}

bool all_passed(const std::vector<CheckResult>& checks) {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

}  // namespace chung
