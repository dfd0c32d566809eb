#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "chung/optimizers.hpp"
#include "chung/pl_engine.hpp"
#include "chung/schedules.hpp"

namespace chung {

using nlohmann::json;

// Read-only view of one JSON object. Every key read is recorded so finish()
// can reject keys nobody asked for.
class Section {
 public:
  Section(json j, std::string path);

  bool has(const std::string& key) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  long integer(const std::string& key) const;
  long integer(const std::string& key, long fallback) const;
  std::string string(const std::string& key) const;
  std::string string(const std::string& key, const std::string& fallback) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<long> integers(const std::string& key) const;
  Section section(const std::string& key) const;
  std::vector<Section> sections(const std::string& key) const;
  const json& raw() const { return j_; }

  /// Throws ConfigError naming every unused key.
  void finish() const;
  const std::string& path() const { return path_; }

 private:
  const json& get(const std::string& key) const;

  json j_;
  std::string path_;
  mutable std::set<std::string> used_;
};

json load_json_file(const std::string& path);

/// Schedule section: {family, alpha, gamma, p, beta}. K supplies the horizon
/// of exponential and cosine schedules.
StepSchedule parse_schedule(const Section& s, long K);
PLParams parse_pl(const Section& s, double theta_fallback = -1.0);
MethodConstants parse_method_constants(Method m, const Section& s);
Problem parse_problem(const Section& s);
NoiseModel parse_noise(const Section& s);
/// "seeds": [..] or "num_seeds" counted up from base_seed.
std::vector<std::uint64_t> parse_seeds(const Section& s, std::uint64_t base_seed);

/// FNV-1a over the canonical JSON dump, as 16 hex digits.
std::string config_hash(const json& j);

}  // namespace chung
