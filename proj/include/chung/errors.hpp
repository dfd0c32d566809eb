#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace chung {

/// A theorem or lemma precondition does not hold. Carries every failed
/// condition, not just the first.
class PreconditionError : public std::runtime_error {
 public:
  explicit PreconditionError(std::vector<std::string> failures)
      : std::runtime_error(join(failures)), failures_(std::move(failures)) {}
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  static std::string join(const std::vector<std::string>& f) {
    std::string s = "precondition failed:";
    for (const auto& x : f) s += " [" + x + "]";
    return s;
  }
  std::vector<std::string> failures_;
};

/// Numerical failure during an iteration, e.g. a worst-case trajectory turning negative.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, long index) : std::runtime_error(what), index_(index) {}
  long index() const { return index_; }

 private:
  long index_;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Collects failed conditions and throws them together.
class PreconditionList {
 public:
  void require(bool ok, const std::string& name) {
    if (!ok) failures_.push_back(name);
  }
  void raise() const {
    if (!failures_.empty()) throw PreconditionError(failures_);
  }
  bool ok() const { return failures_.empty(); }

 private:
  std::vector<std::string> failures_;
};

}  // namespace chung
