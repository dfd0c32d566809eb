#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chung/rng.hpp"
#include "chung/schedules.hpp"

using namespace chung;

TEST_CASE("step_value examples") {
  CHECK(step_value(StepSchedule::constant(0.1), 5) == 0.1);
  CHECK(step_value(StepSchedule::cosine(0.2, 1.0, 10), 0) == doctest::Approx(0.2).epsilon(1e-15));
  const auto e = StepSchedule::exponential(1.0, 1.0, 1.0, 100);
  CHECK(step_value(e, 100) == doctest::Approx(0.01).epsilon(1e-12));
  // (1/100)^(1/100) computed independently as 10^(-0.02)
  CHECK(step_value(e, 1) == doctest::Approx(std::pow(10.0, -0.02)).epsilon(1e-14));
  CHECK(step_value(e, 1) == doctest::Approx(0.954993).epsilon(1e-6));
}

TEST_CASE("step_max examples") {
  CHECK(step_max(StepSchedule::polynomial(2.0, 4.0, 0.5), 50) == 1.0);
  CHECK(step_max(StepSchedule::constant(0.3), 10) == 0.3);
  CHECK(step_max(StepSchedule::exponential(0.7, 1.0, 1.0, 100), 100) == 0.7);
}

TEST_CASE("step_sum examples") {
  CHECK(step_sum(StepSchedule::constant(0.5), 10) == doctest::Approx(5.0));
  CHECK(step_sum(StepSchedule::cosine(1.0, 1.0, 10), 10) == doctest::Approx(5.5).epsilon(1e-13));
  const auto e = StepSchedule::exponential(1.0, 1.0, 1.0, 100);
  double direct = 0.0;
  for (int k = 0; k < 100; ++k) direct += std::pow(0.01, k / 100.0);
  CHECK(step_sum(e, 100) == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("validate_cap examples") {
  const CapReport a = validate_cap(StepSchedule::constant(0.1), 0.05, 10);
  CHECK_FALSE(a.passed);
  CHECK(a.violating_k == 0);
  CHECK(validate_cap(StepSchedule::polynomial(1.0, 4.0, 1.0), 0.25, 10).passed);
  CHECK(validate_cap(StepSchedule::exponential(1.0, 1.0, 1.0, 100), 1.0, 100).passed);
}

TEST_CASE("invalid schedules are unconstructible") {
  CHECK_THROWS_AS(StepSchedule::constant(0.0), std::invalid_argument);
  CHECK_THROWS_AS(StepSchedule::constant(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(StepSchedule::polynomial(1.0, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(StepSchedule::polynomial(1.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(StepSchedule::exponential(1.0, 10.0, 1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(StepSchedule::cosine(1.0, 1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(parse_family("linear"), std::invalid_argument);
}

TEST_CASE("family names round-trip") {
  for (Family f : {Family::constant, Family::polynomial, Family::exponential, Family::cosine})
    CHECK(parse_family(family_name(f)) == f);
}

TEST_CASE("property: decreasing families are monotone") {
  RngStream r(11, 0);
  for (int t = 0; t < 200; ++t) {
    const long K = r.integer(2, 3000);
    const double alpha = r.log_uniform(0.01, 10.0), p = r.log_uniform(0.1, 3.0);
    const StepSchedule ss[] = {StepSchedule::polynomial(alpha, r.log_uniform(0.1, 100.0), p),
                               StepSchedule::exponential(alpha, r.uniform(0.1, 0.99) * K, p, K),
                               StepSchedule::cosine(alpha, p, K)};
    for (const auto& s : ss) {
      bool mono = true;
      for (long k = 0; k < K; ++k) mono = mono && step_value(s, k + 1) <= step_value(s, k);
      CHECK(mono);
    }
  }
}

TEST_CASE("property: endpoint exactness") {
  RngStream r(12, 0);
  for (int t = 0; t < 200; ++t) {
    const long K = r.integer(1, 1000000);
    const double alpha = r.log_uniform(0.01, 10.0), p = r.log_uniform(0.1, 3.0);
    const double beta = r.uniform(0.01, 0.99) * static_cast<double>(K);
    CHECK(step_value(StepSchedule::exponential(alpha, beta, p, K), K) ==
          doctest::Approx(alpha * std::pow(beta / K, p)).epsilon(1e-12));
    CHECK(step_value(StepSchedule::cosine(alpha, p, K), K) == 0.0);
  }
}

TEST_CASE("property: closed-form sums match direct summation") {
  RngStream r(13, 0);
  for (int t = 0; t < 60; ++t) {
    const long K = t < 3 ? 1000000 : r.integer(1, 20000);
    const double alpha = r.log_uniform(0.01, 10.0), p = r.log_uniform(0.1, 3.0);
    const StepSchedule ss[] = {StepSchedule::constant(alpha), StepSchedule::polynomial(alpha, r.log_uniform(0.5, 50.0), p),
                               StepSchedule::exponential(alpha, r.uniform(0.01, 0.99) * K, p, K),
                               StepSchedule::cosine(alpha, p, K)};
    for (const auto& s : ss) CHECK(step_sum(s, K) == doctest::Approx(step_sum_direct(s, K)).epsilon(1e-12));
  }
}

TEST_CASE("property: cosine and exponential sum lower bounds") {
  for (long K = 1; K <= 400; K += 3)
    for (double rr : {0.25, 0.5, 1.0, 1.5, 2.0, 3.0})
      CHECK(step_sum_direct(StepSchedule::cosine(1.0, rr, K), K) >= K / std::pow(2.0, std::max(1.0, rr)));
  RngStream r(14, 0);
  for (int t = 0; t < 300; ++t) {
    const long K = r.integer(3, 100000);
    const double alpha = r.log_uniform(0.01, 10.0), p = r.log_uniform(0.1, 3.0);
    const double beta = r.uniform(0.01, 0.99) * static_cast<double>(K);
    const double lower = alpha * (1.0 - std::pow(beta / K, p)) / p * K / std::log(K / beta);
    CHECK(step_sum(StepSchedule::exponential(alpha, beta, p, K), K) >= lower * (1.0 - 1e-12));
  }
}
