#pragma once

#include <string>
#include <utility>
#include <vector>

#include "chung/pl_engine.hpp"

namespace chung {

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  long window_lo = 0;  // indices into the point list, inclusive
  long window_hi = 0;
};

/// OLS of log2(y) on log2(K) over points[window_lo..window_hi]. A negative
/// window_lo selects the default window, the upper half of the points.
RateFit fit_loglog(const std::vector<std::pair<double, double>>& points, long window_lo = -1, long window_hi = -1);

/// min{p/(2 theta), (1-p)/(2 theta - 1)}, the second term +inf at theta = 1/2.
double rate_exponent_sgd(double p, double theta);
/// min{p/theta, (1-p)/(2 theta - 1)}; at (p, theta) = (1, 1/2) returns omega_r = 2.
double rate_exponent_rr(double p, double theta);
double rate_exponent(Method m, double p, double theta);
double optimal_p(double theta, Method m);

struct Heatmap {
  std::vector<double> p_grid;
  std::vector<double> theta_grid;
  /// values[i][j] for theta_grid[i], p_grid[j].
  std::vector<std::vector<double>> values;

  std::string to_csv() const;
};

Heatmap heatmap_grid(const std::vector<double>& p_grid, const std::vector<double>& theta_grid, Method m);

/// n evenly spaced points on [lo, hi].
std::vector<double> linspace(double lo, double hi, long n);

}  // namespace chung
