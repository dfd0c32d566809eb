#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "chung/chung_core.hpp"
#include "chung/pl_engine.hpp"
#include "chung/rng.hpp"
#include "chung/verify_suites.hpp"

using namespace chung;

namespace {

PLParams make_pl(double l1, double l2, double l3, double tau, double theta) {
  PLParams p;
  p.l1 = l1;
  p.l2 = l2;
  p.l3 = l3;
  p.tau = tau;
  p.theta = theta;
  return p;
}

}  // namespace

TEST_CASE("frak_p examples") {
  CHECK(frak_p(0.5) == 1.0);
  CHECK(frak_p(1.0) == 1.0);
  CHECK(frak_p(0.75) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-14));
}

TEST_CASE("derive_constants examples") {
  const auto a = derive_constants(make_pl(0.0, 1.0, 0.5, 2.0, 0.5), 1.0);
  CHECK(a.zeta == doctest::Approx(0.5));
  CHECK(a.xi == doctest::Approx(0.5));
  CHECK(a.rho == doctest::Approx(1.0));
  CHECK(a.omega == doctest::Approx(1.0));
  // q = omega / rho = (tau - 1) / (2 theta)
  CHECK(a.q == doctest::Approx(1.0));
  const auto b = derive_constants(make_pl(0.3, 0.7, 0.2, 2.0, 1.0), 1.0);
  CHECK(b.rho == doctest::Approx(2.0 / 3.0));
  CHECK(b.omega == doctest::Approx(1.0 / 3.0));
  const auto c = derive_constants(make_pl(0.0, 1.0, 1.0, 2.0, 2.0 / 3.0), 1.0);
  CHECK(c.rho == doctest::Approx(0.8));
  CHECK(c.omega == doctest::Approx(0.6));
}

TEST_CASE("method constants examples") {
  const auto s = sgd_constants(0.5, 1.0, 1.0, 0.0, 1.0);
  CHECK(s.zeta == doctest::Approx(0.5));
  CHECK(s.xi == doctest::Approx(0.5));
  CHECK(s.rho == doctest::Approx(1.0));
  CHECK(s.omega == doctest::Approx(1.0));
  CHECK(s.alpha_cap == doctest::Approx(1.0));

  const auto r = rr_constants(0.5, 1.0, 1.0, 0.0, 1.0, 4);
  CHECK(r.zeta_bar == doctest::Approx(1.0));
  CHECK(r.zeta == doctest::Approx(0.25));
  CHECK(r.xi_bar == doctest::Approx(0.25));
  CHECK(r.xi == doctest::Approx(0.25));
  CHECK(r.rho == doctest::Approx(1.0));
  CHECK(r.omega == doctest::Approx(2.0));

  const auto t = sgd_constants(1.0, 1.0, 1.0, 0.0, 1.0);
  CHECK(t.rho == doctest::Approx(2.0 / 3.0));
  CHECK(t.omega == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("descent_coefficients examples") {
  const auto s = descent_coefficients(Method::sgd, 1.0, 1.0, 0.0, 1.0, 1);
  CHECK(s.l1 == 0.0);
  CHECK(s.l2 == doctest::Approx(1.0));
  CHECK(s.l3 == doctest::Approx(0.5));
  CHECK(s.tau == 2.0);
  const auto r = descent_coefficients(Method::rr, 1.0, 1.0, 0.0, 1.0, 4);
  CHECK(r.l1 == 0.0);
  CHECK(r.l2 == doctest::Approx(0.5));
  CHECK(r.l3 == doctest::Approx(0.125));
  CHECK(r.tau == 3.0);
}

TEST_CASE("simulate_pl_recursion examples") {
  const auto pl = make_pl(1.0, 1.0, 1.0, 2.0, 0.5);
  for (double y : simulate_pl_recursion(pl, StepSchedule::constant(0.5), 1.0, 50)) CHECK(y == 1.0);
  const auto y = simulate_pl_recursion(pl, StepSchedule::constant(0.1), 1.0, 2000);
  CHECK(y[1] == doctest::Approx(0.92).epsilon(1e-15));
  CHECK(y.back() == doctest::Approx(1.0 / 9.0).epsilon(1e-12));
  for (double v : simulate_pl_recursion(make_pl(1.0, 1.0, 0.0, 2.0, 0.75), StepSchedule::constant(0.3), 0.0, 20))
    CHECK(v == 0.0);
  // A step large enough to overshoot below zero.
  CHECK_THROWS_AS(simulate_pl_recursion(make_pl(0.0, 1.0, 0.0, 2.0, 0.5), StepSchedule::constant(3.0), 1.0, 5),
                  NumericError);
}

TEST_CASE("relaxed transform at theta = 1/2 reduces to the direct linearization") {
  RngStream r(31, 0);
  for (int t = 0; t < 50; ++t) {
    const auto pl = make_pl(0.0, r.log_uniform(0.2, 2.0), r.log_uniform(0.01, 1.0), r.uniform(1.5, 3.0), 0.5);
    const auto dc = derive_constants(pl, 1.0);
    const long K = 200;
    const auto s = StepSchedule::cosine(dc.alpha_cap * r.uniform(0.1, 1.0), r.uniform(0.5, 2.0), K);
    const auto spec = relaxed_recursion_transform(pl, 1.0, s, K);
    for (long k = 0; k < K; ++k) {
      const double a = step_value(s, k);
      CHECK(1.0 / spec.s(spec.b(k)) == doctest::Approx(pl.l2 * a / 2.0).epsilon(1e-12));
      CHECK(1.0 / spec.t(spec.b(k)) == doctest::Approx(pl.l3 * std::pow(a, pl.tau)).epsilon(1e-12));
    }
  }
}

TEST_CASE("relaxed transform shapes") {
  const auto pl = make_pl(0.0, 1.0, 0.5, 2.0, 0.5);
  const auto c = relaxed_recursion_transform(pl, 1.0, StepSchedule::constant(0.2), 30);
  for (long k = 1; k < 30; ++k) {
    CHECK(c.s(c.b(k)) == doctest::Approx(c.s(c.b(0))));
    CHECK(c.t(c.b(k)) == doctest::Approx(c.t(c.b(0))));
  }
  const auto e = relaxed_recursion_transform(pl, 1.0, StepSchedule::exponential(1.0, 1.0, 1.0, 100), 100);
  double prev = 0.0;
  for (long k = 0; k <= 100; ++k) {
    const double u = e.u(e.b(k));
    CHECK(u < 0.0);
    if (k > 0) CHECK(u <= prev);
    prev = u;
  }
  CHECK_THROWS_AS(relaxed_recursion_transform(pl, 1.0, StepSchedule::constant(5.0), 10), PreconditionError);
}

TEST_CASE("bound_exp example") {
  const auto mc = sgd_constants(0.5, 1.0, 1.0, 0.0, 1.0);
  const auto b = bound_exp(mc, StepSchedule::exponential(1.0, 1.0, 1.0, 100), 1.0);
  // 2 p q log(K/beta) / (c K) with c = xi = 1/2, q = 1: log(100)/25.
  const double branch = std::log(100.0) / 25.0;
  CHECK(b.noise_term == doctest::Approx(2.0 * branch).epsilon(1e-12));
  CHECK(b.noise_term == doctest::Approx(0.3684).epsilon(1e-4));
  CHECK(b.init_term == doctest::Approx(2.15e-5).epsilon(1e-2));
  CHECK(b.value == doctest::Approx(b.noise_term + b.init_term));
  // endpoint branch zeta alpha (beta/K)^p with zeta = 1/2
  CHECK(b.details.at("branch2") == doctest::Approx(0.005).epsilon(1e-12));
  CHECK(bound_exp(mc, StepSchedule::exponential(1.0, 1.0, 1.0, 100), 0.0).init_term == 0.0);
  CHECK_THROWS_AS(bound_exp(mc, StepSchedule::exponential(1.5, 1.0, 1.0, 100), 1.0), PreconditionError);
}

TEST_CASE("bound_cos examples") {
  const auto mc = sgd_constants(0.5, 1.0, 1.0, 0.0, 1.0);
  const auto b = bound_cos(mc, StepSchedule::cosine(0.5, 1.0, 200), 1.0);
  CHECK(b.details.at("D") == doctest::Approx(2.0 * std::numbers::pi * std::numbers::pi));
  const auto z = bound_cos(mc, StepSchedule::cosine(0.5, 1.0, 200), 0.0);
  CHECK(z.init_term == 0.0);
  CHECK(z.value == z.noise_term);
  CHECK_THROWS_AS(bound_cos(mc, StepSchedule::cosine(0.5, 1.0, 1), 1.0), PreconditionError);
}

TEST_CASE("bound_const examples") {
  const auto mc = sgd_constants(0.5, 1.0, 1.0, 0.0, 1.0);
  const auto b = bound_const(mc, StepSchedule::constant(0.1), 1.0, 100);
  CHECK(b.value == doctest::Approx(0.1 + std::exp(-5.0)).epsilon(1e-14));
  CHECK(b.value == doctest::Approx(0.10674).epsilon(1e-4));
  CHECK(bound_const(mc, StepSchedule::constant(0.1), 0.0, 100).value == doctest::Approx(0.1));
  CHECK(tuned_alpha(mc, 2.0, 100) == doctest::Approx(2.0 * std::log(100.0) / 100.0));
  CHECK(tuned_alpha(mc, 2.0, 100) == doctest::Approx(0.09210).epsilon(1e-4));
  const auto t = bound_const_tuned(mc, 2.0, 1.0, 100);
  CHECK(t.details.at("alpha") == doctest::Approx(0.0921034).epsilon(1e-6));
  CHECK_THROWS_AS(bound_const_tuned(mc, 1.0, 1.0, 100), PreconditionError);
}

TEST_CASE("bound_poly examples") {
  const auto mc = sgd_constants(0.5, 1.0, 1.0, 0.0, 1.0);
  const auto t = bound_poly_tuned(mc, 4.0, 4.0, 1.0, 96);
  CHECK(t.value == doctest::Approx(8.0 / 100.0 + std::pow(25.0, -2.0)).epsilon(1e-14));
  CHECK(t.regime == "case b");

  const auto pl = make_pl(0.0, 1.0, 0.5, 2.0, 0.75);
  const auto ch = feasible_poly_parameters(pl, 1.0, 0.8, 1000);
  const auto c = bound_poly(pl, 1.0, StepSchedule::polynomial(ch.alpha, ch.gamma, 0.8), 1.0, 1000);
  CHECK(c.regime == "case c");
  CHECK(c.details.at("u3") == doctest::Approx(0.4));

  const auto pb = make_pl(0.0, 1.0, 0.5, 2.0, 0.5);
  const auto dc = derive_constants(pb, 1.0);
  const auto chb = feasible_poly_parameters(pb, 1.0, dc.rho, 500);
  const auto b = bound_poly(pb, 1.0, StepSchedule::polynomial(chb.alpha, chb.gamma, dc.rho), 0.0, 500);
  CHECK(b.regime == "case b");
  CHECK(b.value == doctest::Approx(4.0 * dc.zeta * std::pow(chb.alpha, (pb.tau - 1.0) / (2.0 * pb.theta)) *
                                   std::pow(500.0 + chb.gamma, -dc.omega)));

  CHECK(select_poly_case(0.5, 1.0, 1.0) == PolyCase::b);
  CHECK(select_poly_case(0.75, 1.0, 0.75) == PolyCase::d);
  CHECK(select_poly_case(0.75, 0.5, 0.75) == PolyCase::a);
  CHECK_THROWS_AS(bound_poly(pb, 1.0, StepSchedule::polynomial(1.0, 1.0, 0.5), 1.0, 10, PolyCase::b),
                  PreconditionError);
}

TEST_CASE("RR tuned polynomial selects case b") {
  const auto mc = rr_constants(0.5, 1.0, 1.0, 0.0, 1.0, 4);
  const auto b = bound_poly_tuned(mc, 16.0, 500.0, 1.0, 2000);
  CHECK(b.regime == "case b");
  CHECK(b.details.at("alpha") == doctest::Approx(rr_poly_tuned_alpha(mc, 16.0, 2000)));
}

TEST_CASE("property: constant consistency with descent coefficients") {
  RngStream r(41, 0);
  for (int t = 0; t < 200; ++t) {
    const double th = t % 5 == 0 ? 0.5 : r.uniform(0.5, 1.0);
    const double L = r.log_uniform(0.2, 5.0), mu = L * r.uniform(0.05, 1.0);
    const double A = r.uniform() < 0.5 ? 0.0 : r.log_uniform(0.01, 2.0), sigma = r.log_uniform(0.05, 3.0);
    const long N = r.integer(1, 16);
    for (Method m : {Method::sgd, Method::rr}) {
      const auto mc = m == Method::sgd ? sgd_constants(th, L, mu, A, sigma) : rr_constants(th, L, mu, A, sigma, N);
      const PLParams pl = descent_coefficients(m, L, mu, A, sigma, mc.N);
      const double delta = m == Method::sgd ? 1.0 : std::pow(static_cast<double>(N), -1.0 / (2.0 * th));
      CHECK(mc.delta() == doctest::Approx(delta).epsilon(1e-15));
      auto pl_th = pl;
      pl_th.theta = th;
      const auto dc = derive_constants(pl_th, delta);
      CHECK(dc.zeta == doctest::Approx(mc.zeta).epsilon(1e-14));
      CHECK(dc.xi == doctest::Approx(mc.xi).epsilon(1e-14));
      CHECK(dc.rho == doctest::Approx(mc.rho).epsilon(1e-14));
      CHECK(dc.omega == doctest::Approx(mc.omega).epsilon(1e-14));
    }
  }
}

TEST_CASE("property: u_k admissibility and l3 <= l2 zeta^(2 theta)") {
  RngStream r(42, 0);
  for (int t = 0; t < 500; ++t) {
    const auto pl = make_pl(r.log_uniform(0.01, 2.0), r.log_uniform(0.1, 3.0), r.log_uniform(0.01, 2.0),
                            r.uniform(1.2, 4.0), r.uniform(0.5, 1.0));
    const double delta = r.log_uniform(0.1, 3.0);
    const auto dc = derive_constants(pl, delta);
    CHECK(pl.l3 <= pl.l2 * std::pow(dc.zeta, 2.0 * pl.theta) * (1.0 + 1e-12));
    if (pl.theta == 0.5) continue;
    for (int i = 0; i < 10; ++i) {
      const double a = dc.alpha_cap * r.uniform(1e-4, 1.0);
      // Compared in logs: the right side over/underflows as theta -> 1/2.
      const double log_lhs = std::log(dc.zeta) + (pl.tau - 1.0) / (2.0 * pl.theta) * std::log(a);
      const double log_rhs =
          (std::log(pl.l1 / (pl.theta * pl.l2)) + (pl.tau - 1.0) * std::log(a)) / (2.0 * pl.theta - 1.0);
      CHECK(log_lhs >= log_rhs - 1e-10);
    }
  }
}

TEST_CASE("property: constant bound agrees with the general lemma on the transformed spec") {
  RngStream r(43, 0);
  for (int t = 0; t < 200; ++t) {
    const auto pl = make_pl(r.uniform() < 0.5 ? 0.0 : r.log_uniform(0.01, 1.0), r.log_uniform(0.2, 2.0),
                            r.log_uniform(0.01, 1.0), r.uniform(1.5, 3.0), r.uniform(0.5, 1.0));
    const double delta = r.log_uniform(0.2, 2.0);
    const auto dc = derive_constants(pl, delta);
    const long K = r.integer(1, 2000);
    const auto s = StepSchedule::constant(dc.alpha_cap * r.uniform(0.05, 1.0));
    const double y0 = r.log_uniform(1e-3, 5.0);
    const auto b = lemma_bound_const(pl, delta, s, y0, K);
    const auto spec = relaxed_recursion_transform(pl, delta, s, K);
    const auto cert = find_lambda_constant(spec);
    CHECK(cert.lambda == 1.0);
    CHECK(cert.lambda * spec.r(spec.b(K)) == doctest::Approx(b.noise_term).epsilon(1e-10));
    CHECK(general_bound(spec, cert, y0, K - 1) <= b.value * (1.0 + 1e-10));
  }
}

TEST_CASE("property: bound domination over randomized admissible draws") {
  for (const auto& name : domination_suite_names()) {
    if (name.rfind("chung", 0) == 0) continue;
    const auto st = run_domination_suite(name, 400, 2024, 4);
    INFO(name << " worst margin " << st.worst_margin << " at draw " << st.worst_draw);
    CHECK(st.dominated == st.draws);
  }
}
