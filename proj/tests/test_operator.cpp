// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "fpmix/operator.hpp"

using namespace fpmix;
using Catch::Approx;

namespace {

double max_abs(const std::vector<double> &x) {
  double m = 0.0;
  for (double v : x)
    m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> two_bumps(const VelocityGrid &g) {
  auto f = maxwellian(0.6, -1.5, 0.4, 1.0, g);
  const auto h = maxwellian(0.4, 2.0, 0.2, 1.0, g);
  for (std::size_t k = 0; k < f.size(); ++k)
    f[k] += h[k];
  return f;
}

/// Quadrature of v * rhs and v^2 * rhs.
std::pair<double, double> moment_rates(const std::vector<double> &rhs, const VelocityGrid &g) {
  double s1 = 0, s2 = 0;
  for (std::size_t k = 0; k < rhs.size(); ++k) {
    s1 += g.center(k) * rhs[k];
    s2 += g.center(k) * g.center(k) * rhs[k];
  }
  return {s1 * g.cell_width(), s2 * g.cell_width()};
}

} // namespace

TEST_CASE("context assembly", "[operator][context]") {
  SECTION("intra context") {
    const auto c = intra_context({2.0, 0.0, 1.0}, 1.0, 3.0);
    CHECK(c.target_u == 0.0);
    CHECK(c.target_T == 1.0);
    CHECK(c.rate == 6.0);
  }
  SECTION("inter context with delta = alpha = 1, gamma = 0 targets own moments") {
    PairParameters p{1.0, 1.0, 1.0, 1.0, 0.0};
    const Moments a{1.0, 0.3, 1.2}, b{2.0, -0.4, 3.0};
    const auto c = inter_context(p, PairRole::first, a, b, 1.0, 1.0, 1);
    CHECK(c.target_u == Approx(a.u));
    CHECK(c.target_T == Approx(a.T));
    CHECK(c.rate == Approx(2.0));
  }
  SECTION("symmetric7 with equal states targets the common moments") {
    const auto r = preset(PresetName::symmetric7, {2, 1, 1, 1, 1, 1, 1});
    const Moments s{1.0, 0.25, 1.7};
    for (auto role : {PairRole::first, PairRole::second}) {
      const auto c = inter_context(r.params, role, s, s, 2.0, 1.0, 1);
      CHECK(c.target_u == Approx(0.25));
      CHECK(c.target_T == Approx(1.7));
    }
  }
  SECTION("build_context dispatches on kind and role") {
    const auto r = preset(PresetName::symmetric7, {2, 1, 1, 1, 1, 1, 1});
    ContextRequest q;
    q.kind = ContextKind::inter;
    q.pair = r.params;
    q.role = PairRole::second;
    q.own = {1.0, -0.5, 2.0};
    q.partner = {1.0, 0.5, 1.0};
    q.m_own = 1.0;
    q.m_partner = 2.0;
    const auto c = build_context(q);
    const auto ref = inter_context(r.params, PairRole::second, q.partner, q.own, 2.0, 1.0, 1);
    CHECK(c.target_u == ref.target_u);
    CHECK(c.target_T == ref.target_T);
    CHECK(c.rate == ref.rate);
  }
  SECTION("inadmissible parameters propagate") {
    PairParameters p{2.0, 1.0, 0.5, 0.5, 0.0};
    CHECK_THROWS_AS(inter_context(p, PairRole::first, {1, 0, 1}, {1, 0, 1}, 1, 1, 1),
                    validation_error);
  }
}

TEST_CASE("Bernoulli function", "[operator]") {
  CHECK(bernoulli(0.0) == 1.0);
  for (double x : {-5.0, -1e-2, -9e-4, 9e-4, 1e-2, 3.0})
    CHECK(bernoulli(x) == Approx(x / std::expm1(x)).epsilon(1e-13));
  CHECK(bernoulli(-2.0) - bernoulli(2.0) == Approx(2.0));
  CHECK(chang_cooper_weight(1e-5) == Approx(0.5).epsilon(1e-5));
}

TEST_CASE("discrete Maxwellian is a steady state", "[operator][equilibrium]") {
  const VelocityGrid g(-10.0, 10.0, 200);
  const CollisionContext ctx{0.37, 1.3, 2.0, 4.0};
  const auto M = maxwellian(1.0, ctx.target_u, ctx.target_T, ctx.mass, g);
  CHECK(max_abs(fokker_planck_rhs(M, ctx, g)) < 1e-12);
  const auto next = implicit_collision_step(M, ctx, g, 0.1);
  for (std::size_t k = 0; k < M.size(); ++k)
    REQUIRE(next[k] == Approx(M[k]).epsilon(1e-12).margin(1e-300));
}

TEST_CASE("zero rate leaves f unchanged", "[operator]") {
  const VelocityGrid g(-10.0, 10.0, 64);
  const auto f = two_bumps(g);
  const CollisionContext ctx{0.0, 1.0, 1.0, 0.0};
  CHECK(max_abs(fokker_planck_rhs(f, ctx, g)) == 0.0);
  CHECK(implicit_collision_step(f, ctx, g, 1.0) == f);
}

TEST_CASE("flux form conserves mass exactly", "[operator][mass]") {
  const VelocityGrid g(-10.0, 10.0, 256);
  const auto f = two_bumps(g);
  for (const CollisionContext &ctx :
       {CollisionContext{0.0, 1.0, 1.0, 1.0}, CollisionContext{1.5, 0.3, 2.0, 7.0}}) {
    const auto rhs = fokker_planck_rhs(f, ctx, g);
    double s = 0.0;
    for (double x : rhs)
      s += x;
    CHECK(std::abs(s * g.cell_width()) < 1e-14);
    const auto flux = face_fluxes(f, ctx, g);
    CHECK(flux.front() == 0.0);
    CHECK(flux.back() == 0.0);
    const auto next = implicit_collision_step(f, ctx, g, 0.5);
    CHECK(density(next, g) == Approx(density(f, g)).epsilon(1e-14));
  }
}

TEST_CASE("implicit step preserves nonnegativity", "[operator][positivity][property]") {
  const VelocityGrid g(-8.0, 8.0, 128);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> f(g.size());
    for (auto &x : f)
      x = U(rng) < 0.3 ? 0.0 : U(rng);
    const CollisionContext ctx{4.0 * (U(rng) - 0.5), 0.05 + 3.0 * U(rng), 0.5 + U(rng),
                               10.0 * U(rng)};
    const double dt = std::pow(10.0, -4.0 + 7.0 * U(rng));
    const auto next = implicit_collision_step(f, ctx, g, dt);
    for (double x : next)
      REQUIRE(x >= 0.0);
  }
}

TEST_CASE("implicit step limits", "[operator]") {
  const VelocityGrid g(-10.0, 10.0, 256);
  const auto f = two_bumps(g);
  const CollisionContext ctx{0.2, 1.0, 1.0, 1.0};
  SECTION("small dt") {
    const auto next = implicit_collision_step(f, ctx, g, 1e-10);
    CHECK(l1_distance(next, f, g) < 1e-8);
  }
  SECTION("large rate dt approaches the context Maxwellian") {
    // The slowest mode of the operator decays at the rate itself, so one step
    // contracts the distance by about 1 / (1 + rate dt).
    const auto M = maxwellian(density(f, g), ctx.target_u, ctx.target_T, ctx.mass, g);
    const double d0 = l1_distance(f, M, g);
    const double d3 = l1_distance(implicit_collision_step(f, ctx, g, 1e3), M, g);
    CHECK(d3 < 1.5 * d0 / (1.0 + 1e3));
    CHECK(d3 > 0.05 * d0 / (1.0 + 1e3));
    CHECK(l1_distance(implicit_collision_step(f, ctx, g, 1e7), M, g) < 1e-6);
  }
  SECTION("non-positive dt is rejected") {
    CHECK_THROWS_AS(implicit_collision_step(f, ctx, g, 0.0), error);
  }
}

TEST_CASE("tridiagonal solver", "[operator]") {
  Tridiagonal A{{0.0, -1.0, -1.0}, {2.0, 2.0, 2.0}, {-1.0, -1.0, 0.0}};
  const std::vector<double> b{1.0, 0.0, 1.0};
  const auto x = solve_tridiagonal(A, b);
  CHECK(x[0] == Approx(1.0));
  CHECK(x[1] == Approx(1.0));
  CHECK(x[2] == Approx(1.0));
  Tridiagonal S{{0.0, 1.0}, {0.0, 1.0}, {1.0, 0.0}};
  CHECK_THROWS_AS(solve_tridiagonal(S, std::vector<double>{1.0, 1.0}), solver_failure);
}

TEST_CASE("collision matrix reproduces the rhs", "[operator]") {
  const VelocityGrid g(-6.0, 6.0, 40);
  const auto f = two_bumps(g);
  const CollisionContext ctx{0.3, 0.8, 1.5, 2.5};
  const auto L = collision_matrix(ctx, g);
  const auto rhs = fokker_planck_rhs(f, ctx, g);
  for (std::size_t k = 0; k < f.size(); ++k) {
    double y = L.diag[k] * f[k];
    if (k > 0)
      y += L.lower[k] * f[k - 1];
    if (k + 1 < f.size())
      y += L.upper[k] * f[k + 1];
    REQUIRE(y == Approx(rhs[k]).margin(1e-13));
  }
}

TEST_CASE("moment rates of the discrete operator converge at second order",
          "[operator][convergence]") {
  // Analytic rates for f = M(n, u0, T0/m): d/dt sum v f = rate n (u* - u0),
  // d/dt sum v^2 f = rate n (2 u0 (u* - u0) + 2 (D* - D0)) in one dimension.
  const double n = 1.0, u0 = 0.4, T0 = 1.0, m = 1.0;
  const CollisionContext ctx{-0.3, 1.6, m, 2.0};
  const double p_exact = ctx.rate * n * (ctx.target_u - u0);
  const double e_exact =
      ctx.rate * n * (2.0 * u0 * (ctx.target_u - u0) + 2.0 * (ctx.diffusivity() - T0 / m));
  std::vector<double> ep, ee;
  for (std::size_t cells : {100u, 200u, 400u}) {
    const VelocityGrid g(-12.0, 12.0, cells);
    const auto rhs = fokker_planck_rhs(maxwellian(n, u0, T0, m, g), ctx, g);
    const auto [p, e] = moment_rates(rhs, g);
    ep.push_back(std::abs(p - p_exact));
    ee.push_back(std::abs(e - e_exact));
  }
  for (std::size_t k = 0; k + 1 < ep.size(); ++k) {
    CHECK(std::log2(ep[k] / ep[k + 1]) > 1.9);
    CHECK(std::log2(ee[k] / ee[k + 1]) > 1.9);
  }
}

TEST_CASE("intra operator conserves momentum and energy to O(dv^2)", "[operator]") {
  const VelocityGrid g(-12.0, 12.0, 256);
  const auto f = two_bumps(g);
  const auto m = moments(f, g, 1.0);
  const auto ctx = intra_context(m, 1.0, 1.0);
  const auto [p, e] = moment_rates(fokker_planck_rhs(f, ctx, g), g);
  const double dv2 = g.cell_width() * g.cell_width();
  CHECK(std::abs(p) < 2.0 * dv2);
  CHECK(std::abs(e) < 2.0 * dv2);
}

TEST_CASE("calibrated step hits the prescribed moments", "[operator][calibration]") {
  const VelocityGrid g(-12.0, 12.0, 256);
  const auto f = maxwellian(1.0, 0.5, 1.0, 2.0, g);
  const CollisionContext ctx{0.0, 1.5, 2.0, 1.0};
  const double dt = 0.01;
  // Backward-Euler update of the continuous raw-moment equations
  // m1' = m1 + a (u* n - m1'), m2' = m2 + a (2 D* n + 2 u* m1' - 2 m2').
  const double a = dt * ctx.rate;
  const auto r0 = raw_moments(f, g);
  const double m1 = (r0.m1 + a * ctx.target_u * r0.m0) / (1.0 + a);
  const double m2 =
      (r0.m2 + 2.0 * a * (ctx.diffusivity() * r0.m0 + ctx.target_u * m1)) / (1.0 + 2.0 * a);
  const RawMoments target{r0.m0, m1, m2};
  const auto step = calibrated_collision_step(f, ctx, g, dt, target);
  const auto r = raw_moments(step.f, g);
  CHECK(r.m1 == Approx(target.m1).epsilon(1e-13));
  CHECK(r.m2 == Approx(target.m2).epsilon(1e-13));
  CHECK(r.m0 == Approx(r0.m0).epsilon(1e-14));
  CHECK(std::abs(step.ctx.target_u - ctx.target_u) < 0.05);
  for (double x : step.f)
    CHECK(x >= 0.0);
}

TEST_CASE("moment correction", "[operator][correction]") {
  const VelocityGrid g(-12.0, 12.0, 256);
  const auto f = maxwellian(1.0, 0.2, 1.0, 1.0, g);
  const auto r0 = raw_moments(f, g);
  const RawMoments target{r0.m0 * 1.001, r0.m1 + 0.002, r0.m2 * 0.999};
  const auto h = correct_moments(f, g, target);
  const auto r = raw_moments(h, g);
  CHECK(r.m0 == Approx(target.m0).epsilon(1e-14));
  CHECK(r.m1 == Approx(target.m1).epsilon(1e-13));
  CHECK(r.m2 == Approx(target.m2).epsilon(1e-14));
  for (double x : h)
    CHECK(x >= 0.0);
}
