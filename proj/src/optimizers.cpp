#include "chung/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "chung/errors.hpp"
#include "chung/io.hpp"
#include "chung/numeric.hpp"
#include "chung/parallel.hpp"
#include "chung/rng.hpp"

namespace chung {

namespace {

constexpr std::uint64_t kNoiseStream = 1;
constexpr std::uint64_t kSampleStream = 2;
constexpr std::uint64_t kPermStream = 3;

double norm2(const Vec& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

bool outside(const Vec& x, double R) {
  for (double v : x)
    if (std::fabs(v) > R) return true;
  return false;
}

void check_steps(const StepSchedule& schedule, long K, double cap, const char* what) {
  if (K < 1) throw std::invalid_argument("K must be >= 1");
  if (schedule.has_horizon() && K > schedule.horizon()) throw std::invalid_argument("K exceeds schedule horizon");
  if (step_max(schedule, K) > cap * (1.0 + 1e-12)) throw PreconditionError({what});
}

// Stochastic gradient at x for iteration k. `g` holds grad f(x) on entry
// unless the noise kind samples a component.
void stochastic_gradient(const Problem& pb, const NoiseModel& noise, const Vec& x, std::uint64_t seed, long k,
                         Vec& g) {
  switch (noise.kind) {
    case NoiseKind::none:
      pb.grad(x, g);
      break;
    case NoiseKind::additive_gaussian: {
      pb.grad(x, g);
      const double var = noise.A * std::max(pb.gap(x), 0.0) + noise.sigma * noise.sigma;
      const double sd = std::sqrt(var / pb.dim);
      CounterRng rng(seed, kNoiseStream);
      const std::uint64_t base = static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(pb.dim);
      for (int j = 0; j < pb.dim; ++j) g[j] += sd * rng.normal(base + j);
      break;
    }
    case NoiseKind::sampled_component: {
      CounterRng rng(seed, kSampleStream);
      const long i = static_cast<long>(rng.below(static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(pb.N)));
      pb.component_grad(i, x, g);
      break;
    }
  }
}

}  // namespace

std::string noise_kind_name(NoiseKind k) {
  switch (k) {
    case NoiseKind::none: return "none";
    case NoiseKind::additive_gaussian: return "additive_gaussian";
    case NoiseKind::sampled_component: return "sampled_component";
  }
  return "none";
}

NoiseKind parse_noise_kind(const std::string& s) {
  if (s == "none") return NoiseKind::none;
  if (s == "additive_gaussian") return NoiseKind::additive_gaussian;
  if (s == "sampled_component") return NoiseKind::sampled_component;
  throw std::invalid_argument("unknown noise kind '" + s + "'");
}

void Trajectory::finalize() {
  const std::size_t n = gaps.size();
  if (n == 0) {
    mean.clear();
    stderr_.clear();
    return;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return seeds[a] < seeds[b]; });
  const std::size_t len = gaps[0].size();
  mean.assign(len, 0.0);
  stderr_.assign(len, 0.0);
  for (std::size_t k = 0; k < len; ++k) {
    CompensatedSum s;
    for (std::size_t i : order) s.add(gaps[i][k]);
    const double m = s.value() / static_cast<double>(n);
    mean[k] = m;
    if (n > 1) {
      CompensatedSum v;
      for (std::size_t i : order) {
        double d = gaps[i][k] - m;
        v.add(d * d);
      }
      stderr_[k] = std::sqrt(v.value() / static_cast<double>(n - 1) / static_cast<double>(n));
    }
  }
}

Trajectory gd_run(const Problem& pb, const StepSchedule& schedule, const Vec& x0, long K) {
  check_steps(schedule, K, 1.0 / pb.smoothness_L, "step exceeds 1/L");
  if (static_cast<int>(x0.size()) != pb.dim) throw std::invalid_argument("x0 has wrong dimension");
  Trajectory tr;
  tr.seeds = {0};
  Vec x = x0, g(pb.dim);
  Vec gaps(static_cast<std::size_t>(K) + 1);
  bool left = outside(x, pb.domain_radius);
  gaps[0] = pb.gap(x);
  for (long k = 0; k < K; ++k) {
    const double a = step_value(schedule, k);
    pb.grad(x, g);
    for (int j = 0; j < pb.dim; ++j) x[j] -= a * g[j];
    left = left || outside(x, pb.domain_radius);
    gaps[k + 1] = pb.gap(x);
  }
  tr.gaps.push_back(std::move(gaps));
  tr.left_region.push_back(left);
  tr.finalize();
  return tr;
}

Trajectory sgd_run(const Problem& pb, const NoiseModel& noise, const StepSchedule& schedule, const Vec& x0, long K,
                   const std::vector<std::uint64_t>& seeds, int threads) {
  check_steps(schedule, K, 1.0 / pb.smoothness_L, "step exceeds 1/L");
  if (seeds.empty()) throw std::invalid_argument("seed list is empty");
  if (static_cast<int>(x0.size()) != pb.dim) throw std::invalid_argument("x0 has wrong dimension");
  if (noise.kind == NoiseKind::sampled_component && pb.N < 1)
    throw std::invalid_argument("sampled_component noise needs a finite-sum problem");
  Vec steps(static_cast<std::size_t>(K));
  for (long k = 0; k < K; ++k) steps[k] = step_value(schedule, k);

  Trajectory tr;
  tr.seeds = seeds;
  tr.gaps.assign(seeds.size(), Vec(static_cast<std::size_t>(K) + 1));
  std::vector<char> left(seeds.size(), 0);
  parallel_for(static_cast<long>(seeds.size()), threads, [&](long s) {
    Vec x = x0, g(pb.dim);
    Vec& gaps = tr.gaps[s];
    bool out = outside(x, pb.domain_radius);
    gaps[0] = pb.gap(x);
    for (long k = 0; k < K; ++k) {
      stochastic_gradient(pb, noise, x, seeds[s], k, g);
      for (int j = 0; j < pb.dim; ++j) x[j] -= steps[k] * g[j];
      out = out || outside(x, pb.domain_radius);
      gaps[k + 1] = pb.gap(x);
    }
    left[s] = out;
  });
  tr.left_region.assign(left.begin(), left.end());
  tr.finalize();
  return tr;
}

std::vector<long> rr_permutation(std::uint64_t seed, long epoch, long N) {
  std::vector<long> perm(static_cast<std::size_t>(N));
  std::iota(perm.begin(), perm.end(), 0L);
  CounterRng rng(seed, kPermStream);
  const std::uint64_t base = static_cast<std::uint64_t>(epoch) * static_cast<std::uint64_t>(N);
  for (long i = N - 1; i > 0; --i) {
    long j = static_cast<long>(rng.below(base + static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(i + 1)));
    std::swap(perm[i], perm[j]);
  }
  return perm;
}

Trajectory rr_run(const Problem& pb, const StepSchedule& schedule, const Vec& x0, long K,
                  const std::vector<std::uint64_t>& seeds, int threads) {
  if (pb.N < 1 || !pb.component_grad) throw std::invalid_argument("rr_run needs a finite-sum problem");
  check_steps(schedule, K, 1.0 / (2.0 * pb.smoothness_L), "step exceeds 1/(2L)");
  if (seeds.empty()) throw std::invalid_argument("seed list is empty");
  if (static_cast<int>(x0.size()) != pb.dim) throw std::invalid_argument("x0 has wrong dimension");
  const double n = static_cast<double>(pb.N);
  Vec steps(static_cast<std::size_t>(K));
  for (long k = 0; k < K; ++k) steps[k] = step_value(schedule, k) / n;

  Trajectory tr;
  tr.seeds = seeds;
  tr.gaps.assign(seeds.size(), Vec(static_cast<std::size_t>(K) + 1));
  std::vector<char> left(seeds.size(), 0);
  parallel_for(static_cast<long>(seeds.size()), threads, [&](long s) {
    Vec x = x0, g(pb.dim);
    Vec& gaps = tr.gaps[s];
    bool out = outside(x, pb.domain_radius);
    gaps[0] = pb.gap(x);
    for (long k = 0; k < K; ++k) {
      const auto perm = rr_permutation(seeds[s], k, pb.N);
      for (long i : perm) {
        pb.component_grad(i, x, g);
        for (int j = 0; j < pb.dim; ++j) x[j] -= steps[k] * g[j];
      }
      out = out || outside(x, pb.domain_radius);
      gaps[k + 1] = pb.gap(x);
    }
    left[s] = out;
  });
  tr.left_region.assign(left.begin(), left.end());
  tr.finalize();
  return tr;
}

Problem make_quadratic(double mu, double L, int dim, long N, double sigma) {
  if (!(mu > 0.0) || !(L > 0.0)) throw std::invalid_argument("mu and L must be positive");
  if (mu > L) throw std::invalid_argument("mu must not exceed L");
  if (dim < 1 || N < 0 || !(sigma >= 0.0)) throw std::invalid_argument("invalid quadratic dimensions");
  auto lam = std::make_shared<Vec>(static_cast<std::size_t>(dim));
  for (int j = 0; j < dim; ++j) (*lam)[j] = dim == 1 ? mu : mu + (L - mu) * j / (dim - 1.0);

  Problem pb;
  pb.name = "quadratic";
  pb.dim = dim;
  pb.pl_theta = 0.5;
  pb.pl_mu = mu;
  pb.smoothness_L = L;
  pb.domain_radius = 10.0;
  auto half_quad = [lam](const Vec& x) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) s += (*lam)[j] * x[j] * x[j];
    return 0.5 * s;
  };
  pb.grad = [lam](const Vec& x, Vec& g) {
    for (std::size_t j = 0; j < x.size(); ++j) g[j] = (*lam)[j] * x[j];
  };
  pb.gap_fn = half_quad;

  if (N >= 1) {
    // Offsets along the first axis: D x_i = sigma s_i e_0 with mean(s) = 0, mean(s^2) = 1.
    auto centers = std::make_shared<Vec>(static_cast<std::size_t>(N), 0.0);
    double ms = 0.0;
    for (long i = 0; i < N; ++i) ms += std::pow(i - (N - 1) / 2.0, 2);
    ms /= static_cast<double>(N);
    CompensatedSum fstar;
    for (long i = 0; i < N; ++i) {
      double s = ms > 0.0 ? (i - (N - 1) / 2.0) / std::sqrt(ms) : 0.0;
      (*centers)[i] = sigma * s / (*lam)[0];
      fstar.add(0.5 * (*lam)[0] * (*centers)[i] * (*centers)[i]);
    }
    pb.N = N;
    pb.f_star = fstar.value() / static_cast<double>(N);
    pb.dispersion_sigma = N >= 2 ? sigma : 0.0;
    pb.component_grad = [lam, centers](long i, const Vec& x, Vec& g) {
      for (std::size_t j = 0; j < x.size(); ++j) g[j] = (*lam)[j] * x[j];
      g[0] = (*lam)[0] * (x[0] - (*centers)[i]);
    };
    pb.component_f = [lam, centers, half_quad](long i, const Vec& x) {
      Vec y = x;
      y[0] -= (*centers)[i];
      return half_quad(y);
    };
  }
  const double fs = pb.f_star;
  pb.f = [half_quad, fs](const Vec& x) { return half_quad(x) + fs; };
  return pb;
}

Problem make_curvature_mix(const Vec& a, const Vec& c, double radius) {
  if (a.size() != c.size() || a.empty()) throw std::invalid_argument("curvatures and centers must match");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  for (double v : a)
    if (!(v > 0.0)) throw std::invalid_argument("curvatures must be positive");
  const long N = static_cast<long>(a.size());
  const double n = static_cast<double>(N);
  double abar = 0.0, ac = 0.0, Lmax = 0.0;
  for (long i = 0; i < N; ++i) {
    abar += a[i];
    ac += a[i] * c[i];
    Lmax = std::max(Lmax, a[i]);
  }
  abar /= n;
  const double xstar = ac / n / abar;
  auto comps = std::make_shared<std::pair<Vec, Vec>>(a, c);

  Problem pb;
  pb.name = "curvature_mix";
  pb.dim = 1;
  pb.N = N;
  pb.pl_theta = 0.5;
  pb.pl_mu = abar;
  pb.smoothness_L = Lmax;
  pb.domain_radius = radius;
  pb.component_f = [comps](long i, const Vec& x) {
    double d = x[0] - comps->second[i];
    return 0.5 * comps->first[i] * d * d;
  };
  pb.component_grad = [comps](long i, const Vec& x, Vec& g) { g[0] = comps->first[i] * (x[0] - comps->second[i]); };
  pb.f = [comps, n](const Vec& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < comps->first.size(); ++i) {
      double d = x[0] - comps->second[i];
      s += 0.5 * comps->first[i] * d * d;
    }
    return s / n;
  };
  pb.f_star = pb.f(Vec{xstar});
  pb.gap_fn = [abar, xstar](const Vec& x) { return 0.5 * abar * (x[0] - xstar) * (x[0] - xstar); };
  pb.grad = [abar, xstar](const Vec& x, Vec& g) { g[0] = abar * (x[0] - xstar); };
  // The dispersion is a convex quadratic in x, so its maximum on the domain is at an endpoint.
  auto dispersion = [&](double x) {
    double s = 0.0;
    for (long i = 0; i < N; ++i) {
      double d = a[i] * (x - c[i]) - abar * (x - xstar);
      s += d * d;
    }
    return s / n;
  };
  pb.dispersion_A = 0.0;
  pb.dispersion_sigma = std::sqrt(std::max(dispersion(-radius), dispersion(radius)));
  return pb;
}

Problem make_power_family(double theta, double c, double radius) {
  if (!(theta >= 0.5 && theta < 1.0)) throw std::invalid_argument("power family needs theta in [1/2, 1)");
  if (!(c > 0.0)) throw std::invalid_argument("c must be positive");
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
  const double q = 1.0 / (1.0 - theta);
  Problem pb;
  pb.name = "power";
  pb.dim = 1;
  pb.pl_theta = theta;
  pb.pl_mu = q * q * std::pow(c, 2.0 * (1.0 - theta)) / 2.0;
  pb.smoothness_L = q * (q - 1.0) * c * std::pow(radius, q - 2.0);
  pb.domain_radius = radius;
  pb.f = [c, q](const Vec& x) { return c * std::pow(std::fabs(x[0]), q); };
  pb.gap_fn = pb.f;
  pb.grad = [c, q](const Vec& x, Vec& g) {
    double ax = std::fabs(x[0]);
    g[0] = ax == 0.0 ? 0.0 : std::copysign(c * q * std::pow(ax, q - 1.0), x[0]);
  };
  return pb;
}

std::vector<CheckResult> verify_pl(const Problem& pb, long sample_count, std::uint64_t seed) {
  if (sample_count < 1) throw std::invalid_argument("sample_count must be >= 1");
  RngStream rng(seed, 11);
  MarginTracker pl("pl_inequality"), lower("gap_nonnegative"), avg("finite_sum_average");
  const double R = pb.domain_radius, s2mu = std::sqrt(2.0 * pb.pl_mu);
  Vec x(pb.dim), g(pb.dim), gi(pb.dim);
  for (long s = 0; s < sample_count; ++s) {
    for (int j = 0; j < pb.dim; ++j) x[j] = rng.uniform(-R, R);
    const double gap = pb.gap(x);
    lower.observe(s, gap / std::max(1.0, std::fabs(pb.f(x))), gap, 1e-12);
    pb.grad(x, g);
    const double lhs = std::sqrt(norm2(g));
    const double rhs = s2mu * std::pow(std::max(gap, 0.0), pb.pl_theta);
    pl.observe(s, (lhs - rhs) / std::max(rhs, 1e-300), lhs, 1e-9);
    if (pb.N >= 1 && pb.component_f) {
      CompensatedSum fs;
      Vec gs(pb.dim, 0.0);
      for (long i = 0; i < pb.N; ++i) {
        fs.add(pb.component_f(i, x));
        pb.component_grad(i, x, gi);
        for (int j = 0; j < pb.dim; ++j) gs[j] += gi[j];
      }
      const double fx = pb.f(x);
      double err = std::fabs(fs.value() / static_cast<double>(pb.N) - fx) / std::max(1.0, std::fabs(fx));
      for (int j = 0; j < pb.dim; ++j)
        err = std::max(err, std::fabs(gs[j] / static_cast<double>(pb.N) - g[j]) / std::max(1.0, std::fabs(g[j])));
      avg.observe(s, -err, fx, 1e-9);
    }
  }
  std::vector<CheckResult> out{pl.result(), lower.result()};
  if (pb.N >= 1 && pb.component_f) out.push_back(avg.result());
  return out;
}

std::vector<CheckResult> verify_variance(const Problem& pb, const NoiseModel& noise, long sample_count, long draws,
                                         std::uint64_t seed) {
  if (sample_count < 1) throw std::invalid_argument("sample_count must be >= 1");
  if (noise.kind != NoiseKind::none && draws < 30) throw std::invalid_argument("need at least 30 draws");
  if (noise.kind == NoiseKind::sampled_component && pb.N < 1)
    throw std::invalid_argument("sampled_component noise needs a finite-sum problem");
  RngStream states(seed, 21);
  MarginTracker var("noise_variance"), zero("noise_mean_zero"), disp("component_dispersion");
  const double R = pb.domain_radius;
  Vec x(pb.dim), g(pb.dim), gs(pb.dim), gi(pb.dim);
  for (long s = 0; s < sample_count; ++s) {
    for (int j = 0; j < pb.dim; ++j) x[j] = states.uniform(-R, R);
    const double gap = std::max(pb.gap(x), 0.0);
    pb.grad(x, g);
    if (noise.kind != NoiseKind::none) {
      CompensatedSum m1, m2;
      Vec mean(pb.dim, 0.0), sq(pb.dim, 0.0);
      std::vector<double> vals(static_cast<std::size_t>(draws));
      for (long d = 0; d < draws; ++d) {
        // A private seed per (state, draw) keeps draws independent across states.
        const std::uint64_t key = splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(s)));
        stochastic_gradient(pb, noise, x, key, d, gs);
        double e2 = 0.0;
        for (int j = 0; j < pb.dim; ++j) {
          double e = gs[j] - g[j];
          e2 += e * e;
          mean[j] += e;
          sq[j] += e * e;
        }
        vals[d] = e2;
        m1.add(e2);
      }
      const double nd = static_cast<double>(draws);
      const double avg = m1.value() / nd;
      for (double v : vals) m2.add((v - avg) * (v - avg));
      const double se = std::sqrt(m2.value() / (nd - 1.0) / nd);
      const double bound = noise.A * gap + noise.sigma * noise.sigma;
      var.observe(s, (bound + 3.0 * se - avg) / std::max(1.0, bound), avg, 1e-12);
      for (int j = 0; j < pb.dim; ++j) {
        const double mj = mean[j] / nd;
        const double sdj = std::sqrt(std::max(sq[j] / nd - mj * mj, 0.0) / nd);
        zero.observe(s, (5.0 * sdj - std::fabs(mj)) / std::max(1.0, std::sqrt(bound)), mj, 1e-12);
      }
    }
    if (pb.N >= 1 && pb.component_grad) {
      double d2 = 0.0;
      for (long i = 0; i < pb.N; ++i) {
        pb.component_grad(i, x, gi);
        for (int j = 0; j < pb.dim; ++j) d2 += (gi[j] - g[j]) * (gi[j] - g[j]);
      }
      d2 /= static_cast<double>(pb.N);
      const double bound = pb.dispersion_A * gap + pb.dispersion_sigma * pb.dispersion_sigma;
      disp.observe(s, (bound - d2) / std::max(1.0, bound), d2, 1e-9);
    }
  }
  std::vector<CheckResult> out;
  if (noise.kind != NoiseKind::none) {
    out.push_back(var.result());
    out.push_back(zero.result());
  } else {
    CheckResult r;
    r.check = "noise_variance";
    r.passed = true;
    r.margin = noise.sigma * noise.sigma;
    out.push_back(r);
  }
  if (pb.N >= 1 && pb.component_grad) out.push_back(disp.result());
  return out;
}

double noise_free_bound(double theta, double mu, double gap0, double step_sum) {
  if (!(gap0 >= 0.0)) throw std::invalid_argument("gap0 must be nonnegative");
  if (gap0 == 0.0) return 0.0;
  if (theta == 0.5) return gap0 * std::exp(-mu * step_sum);
  const double e = 2.0 * theta - 1.0;
  return std::pow(std::pow(gap0, -e) + e * mu * step_sum, -1.0 / e);
}

CheckResult descent_check(const Trajectory& traj, const PLParams& pl, const StepSchedule& schedule) {
  MarginTracker t("descent_inequality");
  const long K = traj.length() - 1;
  for (long k = 0; k < K; ++k) {
    const double a = step_value(schedule, k);
    const double at = std::pow(a, pl.tau);
    const double y = traj.mean[k], y1 = traj.mean[k + 1];
    const double rhs = (1.0 + pl.l1 * at) * y - pl.l2 * a * std::pow(std::max(y, 0.0), 2.0 * pl.theta) + pl.l3 * at;
    const double slack = 3.0 * (traj.stderr_[k] + traj.stderr_[k + 1]);
    const double scale = std::max({std::fabs(rhs), std::fabs(y1), 1e-300});
    t.observe(k, (rhs + slack - y1) / scale, y1, 1e-12);
  }
  return t.result();
}

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
  std::ostringstream out;
  out << "k,seed,gap\n";
  for (std::size_t s = 0; s < traj.gaps.size(); ++s)
    for (std::size_t k = 0; k < traj.gaps[s].size(); ++k)
      out << k << ',' << traj.seeds[s] << ',' << fmt17(traj.gaps[s][k]) << '\n';
  write_text(path, out.str());
}

void write_mean_csv(const std::string& path, const Trajectory& traj) {
  std::ostringstream out;
  out << "k,mean_gap,stderr\n";
  for (std::size_t k = 0; k < traj.mean.size(); ++k)
    out << k << ',' << fmt17(traj.mean[k]) << ',' << fmt17(traj.stderr_[k]) << '\n';
  write_text(path, out.str());
}

}  // namespace chung
