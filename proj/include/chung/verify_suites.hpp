#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "chung/report.hpp"

namespace chung {

/// Outcome of one randomized domination suite.
struct DominationStats {
  std::string name;
  long draws = 0;
  long dominated = 0;
  long rejected = 0;  // non-admissible candidates that were redrawn
  long worst_draw = -1;
  double worst_margin = 1e300;  // min over draws of (bound - y) / max(1, bound)
  double worst_y = 0.0;
  double worst_bound = 0.0;

  CheckResult to_check() const;
};

/// Names of all domination suites, in report order.
std::vector<std::string> domination_suite_names();
DominationStats run_domination_suite(const std::string& name, long draws, std::uint64_t seed, int threads = 1);

std::vector<CheckResult> verify_bounds_suite(long draws, std::uint64_t seed, int threads = 1);
std::vector<CheckResult> verify_chung_suite(long draws, std::uint64_t seed);
std::vector<CheckResult> verify_inequalities_suite(long K_max, const std::vector<double>& r_grid);
std::vector<CheckResult> verify_assumptions_suite(std::uint64_t seed, long samples, int threads = 1);

/// Pearson chi-square statistic of RR permutation frequencies over `epochs` epochs.
double permutation_chi_square(long N, long epochs, std::uint64_t seed, long* cells = nullptr);
/// Upper critical value of the chi-square distribution (Wilson-Hilferty) for
/// the given standard-normal quantile z.
double chi_square_critical(double dof, double z);

}  // namespace chung
