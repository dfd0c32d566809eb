#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "chung/pl_engine.hpp"
#include "chung/report.hpp"
#include "chung/schedules.hpp"

namespace chung {

using Vec = std::vector<double>;

struct Problem {
  std::string name;
  int dim = 1;
  std::function<double(const Vec&)> f;
  std::function<void(const Vec&, Vec&)> grad;
  /// Optional closed form of f - f_star, avoiding cancellation near the optimum.
  std::function<double(const Vec&)> gap_fn;
  /// Number of components; 0 for problems that are not finite sums.
  long N = 0;
  std::function<void(long, const Vec&, Vec&)> component_grad;
  std::function<double(long, const Vec&)> component_f;
  double f_star = 0.0;
  double pl_theta = 0.5;
  double pl_mu = 1.0;
  double smoothness_L = 1.0;
  double domain_radius = 1.0;
  /// Constants of the component-dispersion bound, certified on the domain.
  double dispersion_A = 0.0;
  double dispersion_sigma = 0.0;

  double gap(const Vec& x) const { return gap_fn ? gap_fn(x) : f(x) - f_star; }
};

/// additive_gaussian: g = grad f + z with isotropic z, total variance A gap + sigma^2.
/// sampled_component: g = grad f_i with i uniform (finite-sum problems only).
enum class NoiseKind { none, additive_gaussian, sampled_component };

struct NoiseModel {
  NoiseKind kind = NoiseKind::none;
  double sigma = 0.0;
  double A = 0.0;
};

std::string noise_kind_name(NoiseKind k);
NoiseKind parse_noise_kind(const std::string& s);

struct Trajectory {
  std::vector<std::uint64_t> seeds;
  std::vector<Vec> gaps;  // one series per seed, length K+1
  std::vector<bool> left_region;
  Vec mean;
  Vec stderr_;

  /// Mean and standard error across seeds, reduced in ascending seed order.
  void finalize();
  long length() const { return mean.empty() ? 0 : static_cast<long>(mean.size()); }
};

Trajectory gd_run(const Problem& problem, const StepSchedule& schedule, const Vec& x0, long K);
Trajectory sgd_run(const Problem& problem, const NoiseModel& noise, const StepSchedule& schedule, const Vec& x0,
                   long K, const std::vector<std::uint64_t>& seeds, int threads = 1);
/// K counts epochs; each epoch takes N inner steps of size alpha_k / N.
Trajectory rr_run(const Problem& problem, const StepSchedule& schedule, const Vec& x0, long K,
                  const std::vector<std::uint64_t>& seeds, int threads = 1);

/// The permutation used by rr_run for (seed, epoch).
std::vector<long> rr_permutation(std::uint64_t seed, long epoch, long N);

/// f(x) = x^T diag(lambda) x / 2 with lambda spread over [mu, L]. With N >= 1
/// the objective splits into components (x - x_i)^T D (x - x_i) / 2 whose
/// gradient offsets have mean zero and mean square sigma^2.
Problem make_quadratic(double mu, double L, int dim, long N = 0, double sigma = 1.0);
/// One-dimensional finite sum of a_i (x - c_i)^2 / 2 with distinct curvatures.
/// The dispersion bound is certified with A = 0 on [-radius, radius].
Problem make_curvature_mix(const Vec& curvatures, const Vec& centers, double radius);
/// f(x) = c |x|^(1/(1-theta)), satisfying the PL inequality with equality.
Problem make_power_family(double theta, double c, double radius);

std::vector<CheckResult> verify_pl(const Problem& problem, long sample_count, std::uint64_t seed);
std::vector<CheckResult> verify_variance(const Problem& problem, const NoiseModel& noise, long sample_count,
                                         long draws, std::uint64_t seed);

/// Gap bound for noise-free GD after steps summing to step_sum.
double noise_free_bound(double theta, double mu, double gap0, double step_sum);

/// Mean-series check of y_{k+1} <= (1 + l1 a^tau) y_k - l2 a y_k^(2 theta) + l3 a^tau
/// with 3 standard errors of slack.
CheckResult descent_check(const Trajectory& traj, const PLParams& pl, const StepSchedule& schedule);

void write_trajectory_csv(const std::string& path, const Trajectory& traj);
void write_mean_csv(const std::string& path, const Trajectory& traj);

}  // namespace chung
