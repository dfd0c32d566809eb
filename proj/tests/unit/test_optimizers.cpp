#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <set>
#include <stdexcept>

#include "chung/io.hpp"
#include "chung/numeric.hpp"
#include "chung/optimizers.hpp"
#include "chung/report.hpp"
#include "chung/rng.hpp"
#include "chung/verify_suites.hpp"

using namespace chung;

namespace {

std::vector<std::uint64_t> seed_range(std::uint64_t from, std::uint64_t n) {
  std::vector<std::uint64_t> s;
  for (std::uint64_t i = 0; i < n; ++i) s.push_back(from + i);
  return s;
}

}  // namespace

TEST_CASE("gd_run examples") {
  const Problem q = make_quadratic(1.0, 1.0, 1);
  const auto a = gd_run(q, StepSchedule::constant(0.5), {1.0}, 1);
  CHECK(a.gaps[0][1] == 0.125);
  const auto b = gd_run(q, StepSchedule::constant(1.0), {1.0}, 5);
  CHECK(b.gaps[0][0] == 0.5);
  for (long k = 1; k <= 5; ++k) CHECK(b.gaps[0][k] == 0.0);
  CHECK(noise_free_bound(1.0, 1.0, 1.0, 9.0) == doctest::Approx(0.1).epsilon(1e-15));
  CHECK_THROWS_AS(gd_run(q, StepSchedule::constant(1.5), {1.0}, 3), PreconditionError);
}

TEST_CASE("sgd_run without noise equals gd bitwise; seeds are reproducible") {
  const Problem q = make_quadratic(0.3, 2.0, 3);
  const auto sched = StepSchedule::polynomial(2.0, 6.0, 0.8);
  const auto g = gd_run(q, sched, {1.0, -1.0, 2.0}, 100);
  const auto s = sgd_run(q, NoiseModel{}, sched, {1.0, -1.0, 2.0}, 100, {3, 9});
  CHECK(s.gaps[0] == g.gaps[0]);
  CHECK(s.gaps[1] == g.gaps[0]);

  const NoiseModel n{NoiseKind::additive_gaussian, 1.0, 0.3};
  const auto a = sgd_run(q, n, sched, {1.0, 1.0, 1.0}, 200, {7});
  const auto b = sgd_run(q, n, sched, {1.0, 1.0, 1.0}, 200, {7});
  CHECK(a.gaps == b.gaps);
  const auto c = sgd_run(q, n, sched, {1.0, 1.0, 1.0}, 200, {8});
  CHECK(a.gaps != c.gaps);
}

TEST_CASE("property: parallel runs are bitwise identical to serial runs") {
  const Problem q = make_quadratic(1.0, 1.0, 2, 4, 1.0);
  const auto sched = StepSchedule::constant(0.2);
  const NoiseModel n{NoiseKind::additive_gaussian, 1.0, 0.0};
  const auto s1 = sgd_run(q, n, sched, {1.0, 1.0}, 300, seed_range(100, 64), 1);
  const auto s8 = sgd_run(q, n, sched, {1.0, 1.0}, 300, seed_range(100, 64), 8);
  CHECK(s1.gaps == s8.gaps);
  CHECK(s1.mean == s8.mean);
  CHECK(s1.stderr_ == s8.stderr_);
  const auto r1 = rr_run(q, sched, {1.0, 1.0}, 100, seed_range(5, 32), 1);
  const auto r8 = rr_run(q, sched, {1.0, 1.0}, 100, seed_range(5, 32), 8);
  CHECK(r1.gaps == r8.gaps);
}

TEST_CASE("rr_run examples") {
  const auto sched = StepSchedule::constant(0.4);
  const Problem one = make_quadratic(0.5, 1.0, 2, 1, 1.0);
  const Problem full = make_quadratic(0.5, 1.0, 2);
  CHECK(rr_run(one, sched, {1.0, -2.0}, 30, {0, 1}).gaps[1] == gd_run(full, sched, {1.0, -2.0}, 30).gaps[0]);

  // Identical components: N inner steps of alpha/N regardless of the permutation.
  const long N = 4;
  const Problem same = make_quadratic(0.5, 1.0, 2, N, 0.0);
  const auto rr = rr_run(same, sched, {1.0, -2.0}, 20, {1, 2, 3});
  const auto inner = gd_run(full, StepSchedule::constant(0.4 / N), {1.0, -2.0}, 20 * N);
  for (long k = 0; k <= 20; ++k) {
    CHECK(rr.gaps[0][k] == doctest::Approx(inner.gaps[0][k * N]).epsilon(1e-13));
    CHECK(rr.gaps[1][k] == rr.gaps[0][k]);
  }
  CHECK_THROWS_AS(rr_run(same, StepSchedule::constant(0.6), {1.0, 1.0}, 5, {1}), PreconditionError);
}

TEST_CASE("rr_permutation is a permutation") {
  for (long N : {1L, 2L, 5L, 17L}) {
    for (long e = 0; e < 20; ++e) {
      const auto p = rr_permutation(42, e, N);
      std::set<long> seen(p.begin(), p.end());
      CHECK(static_cast<long>(seen.size()) == N);
      CHECK(*seen.begin() == 0);
      CHECK(*seen.rbegin() == N - 1);
    }
  }
}

TEST_CASE("make_quadratic examples") {
  const Problem q = make_quadratic(1.0, 1.0, 1);
  Vec g(1);
  for (double x : {-3.0, -0.5, 0.25, 2.0}) {
    q.grad({x}, g);
    CHECK(std::fabs(g[0]) == doctest::Approx(std::sqrt(2.0 * q.pl_mu * q.gap({x}))));
  }
  const Problem pair = make_quadratic(1.0, 1.0, 1, 2, 1.0);
  Vec g0(1), g1(1);
  for (double x : {-1.0, 0.0, 0.7}) {
    pair.component_grad(0, {x}, g0);
    pair.component_grad(1, {x}, g1);
    pair.grad({x}, g);
    const double disp = 0.5 * ((g0[0] - g[0]) * (g0[0] - g[0]) + (g1[0] - g[0]) * (g1[0] - g[0]));
    CHECK(disp == doctest::Approx(1.0));
    CHECK(std::fabs(g0[0] - g1[0]) == doctest::Approx(2.0));
  }
  CHECK(pair.dispersion_A == 0.0);
  CHECK(pair.dispersion_sigma == doctest::Approx(1.0));
  CHECK(make_quadratic(0.5, 3.0, 3).smoothness_L == 3.0);
}

TEST_CASE("make_power_family examples") {
  CHECK(make_power_family(0.5, 0.5, 3.0).pl_mu == doctest::Approx(1.0));
  const Problem p = make_power_family(2.0 / 3.0, 1.0, 2.0);
  CHECK(p.pl_mu == doctest::Approx(4.5));
  Vec g(1);
  p.grad({0.0}, g);
  CHECK(g[0] == 0.0);
  CHECK(p.gap({0.0}) == 0.0);
}

TEST_CASE("make_curvature_mix certifies dispersion on its domain") {
  const Problem m = make_curvature_mix({0.5, 1.5}, {1.0, -1.0 / 3.0}, 1.0);
  CHECK(m.N == 2);
  CHECK(m.pl_mu == doctest::Approx(1.0));
  CHECK(m.smoothness_L == doctest::Approx(1.5));
  CHECK(m.dispersion_A == 0.0);
  CHECK(m.dispersion_sigma == doctest::Approx(1.0));
  Vec g(1);
  m.grad({0.0}, g);
  CHECK(g[0] == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("verify_pl examples") {
  const auto q = verify_pl(make_quadratic(1.0, 1.0, 1), 2000, 1);
  CHECK(all_passed(q));
  CHECK(all_passed(verify_pl(make_power_family(2.0 / 3.0, 1.0, 2.0), 10000, 2)));
  Problem inflated = make_quadratic(1.0, 1.0, 1);
  inflated.pl_mu = 2.0;
  const auto bad = verify_pl(inflated, 2000, 3);
  CHECK_FALSE(all_passed(bad));
}

TEST_CASE("verify_variance examples") {
  CHECK(all_passed(verify_variance(make_quadratic(1.0, 1.0, 3), {NoiseKind::additive_gaussian, 1.0, 0.0}, 10, 10000, 4)));
  const auto pair = verify_variance(make_quadratic(1.0, 1.0, 1, 2, 1.0), NoiseModel{}, 500, 0, 5);
  CHECK(all_passed(pair));
  const auto none = verify_variance(make_quadratic(1.0, 1.0, 1), NoiseModel{}, 10, 100, 6);
  CHECK(all_passed(none));
}

TEST_CASE("property: assumption suite (descent, monotonicity, noise-free bound, permutations)") {
  for (const auto& c : verify_assumptions_suite(9, 2000, 4)) {
    INFO(c.check << " margin " << c.margin);
    CHECK(c.passed);
  }
}

TEST_CASE("chi-square critical value") {
  // Tabulated upper 0.001 points. The cube-root approximation runs slightly
  // high at small dof, which only makes the uniformity test more lenient.
  CHECK(chi_square_critical(5.0, 3.090232) == doctest::Approx(20.515).epsilon(0.02));
  CHECK(chi_square_critical(5.0, 3.090232) >= 20.515);
  CHECK(chi_square_critical(23.0, 3.090232) == doctest::Approx(49.728).epsilon(0.005));
  CHECK(chi_square_critical(1.0, 3.090232) == doctest::Approx(10.828).epsilon(0.04));
  CHECK(chi_square_critical(1.0, 3.090232) >= 10.828);
}

TEST_CASE("trajectory CSV round-trips through read_csv") {
  const Problem q = make_quadratic(1.0, 1.0, 1);
  const auto tr = sgd_run(q, {NoiseKind::additive_gaussian, 0.7, 0.0}, StepSchedule::polynomial(1.0, 4.0, 0.6), {2.0},
                          50, {1, 2, 3});
  const auto dir = std::filesystem::temp_directory_path() / "chung_csv_roundtrip";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "mean.csv").string();
  write_mean_csv(path, tr);
  const CsvTable t = read_csv(path);
  REQUIRE(t.rows.size() == tr.mean.size());
  const int m = t.column("mean_gap"), s = t.column("stderr");
  for (std::size_t k = 0; k < tr.mean.size(); ++k) {
    CHECK(parse_double(t.rows[k][m]) == tr.mean[k]);
    CHECK(parse_double(t.rows[k][s]) == tr.stderr_[k]);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("fmt17 and parse_double round-trip") {
  RngStream r(3, 0);
  for (int t = 0; t < 1000; ++t) {
    const double v = r.log_uniform(1e-300, 1e300) * (t % 2 ? -1.0 : 1.0);
    CHECK(parse_double(fmt17(v)) == v);
  }
  CHECK(std::isinf(parse_double(fmt17(kInf))));
  CHECK_THROWS_AS(parse_double("1.0x"), std::invalid_argument);
}
