#include "chung/rates.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "chung/io.hpp"
#include "chung/numeric.hpp"

namespace chung {

RateFit fit_loglog(const std::vector<std::pair<double, double>>& points, long lo, long hi) {
  const long n = static_cast<long>(points.size());
  if (lo < 0) {
    lo = n / 2;
    hi = n - 1;
  }
  if (hi < 0) hi = n - 1;
  if (hi >= n || lo > hi || hi - lo + 1 < 3) throw std::invalid_argument("fit window needs at least 3 points");
  std::vector<double> xs, ys;
  for (long i = lo; i <= hi; ++i) {
    const auto [K, y] = points[i];
    if (!(K > 0.0)) throw std::invalid_argument("fit abscissa must be positive");
    if (!(y > 0.0)) throw std::invalid_argument("fit ordinate must be positive");
    xs.push_back(std::log2(K));
    ys.push_back(std::log2(y));
  }
  const double m = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= m;
  my /= m;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw std::invalid_argument("fit abscissae have zero variance");
  RateFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double e = ys[i] - (f.intercept + f.slope * xs[i]);
    sse += e * e;
  }
  f.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  f.window_lo = lo;
  f.window_hi = hi;
  return f;
}

namespace {

void check_domain(double p, double theta) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in (0, 1]");
  if (!(theta >= 0.5 && theta <= 1.0)) throw std::invalid_argument("theta must lie in [1/2, 1]");
}

double second_branch(double p, double theta) {
  if (theta == 0.5) return kInf;
  return (1.0 - p) / (2.0 * theta - 1.0);
}

}  // namespace

double rate_exponent_sgd(double p, double theta) {
  check_domain(p, theta);
  return std::min(p / (2.0 * theta), second_branch(p, theta));
}

double rate_exponent_rr(double p, double theta) {
  check_domain(p, theta);
  if (theta == 0.5 && p == 1.0) return 1.0 / (3.0 * theta - 1.0);
  return std::min(p / theta, second_branch(p, theta));
}

double rate_exponent(Method m, double p, double theta) {
  return m == Method::sgd ? rate_exponent_sgd(p, theta) : rate_exponent_rr(p, theta);
}

double optimal_p(double theta, Method m) {
  if (!(theta >= 0.5 && theta <= 1.0)) throw std::invalid_argument("theta must lie in [1/2, 1]");
  return m == Method::sgd ? 2.0 * theta / (4.0 * theta - 1.0) : theta / (3.0 * theta - 1.0);
}

Heatmap heatmap_grid(const std::vector<double>& p_grid, const std::vector<double>& theta_grid, Method m) {
  Heatmap h;
  h.p_grid = p_grid;
  h.theta_grid = theta_grid;
  for (double th : theta_grid) {
    std::vector<double> row;
    row.reserve(p_grid.size());
    for (double p : p_grid) row.push_back(rate_exponent(m, p, th));
    h.values.push_back(std::move(row));
  }
  return h;
}

std::string Heatmap::to_csv() const {
  std::ostringstream out;
  out << "theta,p,exponent\n";
  for (std::size_t i = 0; i < theta_grid.size(); ++i)
    for (std::size_t j = 0; j < p_grid.size(); ++j)
      out << fmt17(theta_grid[i]) << ',' << fmt17(p_grid[j]) << ',' << fmt17(values[i][j]) << '\n';
  return out.str();
}

std::vector<double> linspace(double lo, double hi, long n) {
  if (n < 1) throw std::invalid_argument("linspace needs n >= 1");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  if (n > 1) v.back() = hi;
  return v;
}

}  // namespace chung
