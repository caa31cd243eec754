// SPDX-License-Identifier: Apache-2.0
#pragma once

// Exchange terms, entropy-dissipation bookkeeping and relaxation-rate fits.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "kinetics.hpp"
#include "moments.hpp"
#include "nspecies.hpp"
#include "operator.hpp"
#include "params.hpp"

namespace fpmix {

// ---------------------------------------------------------------------------
// Exchange terms

/// Momentum gained per unit time by the role-1 species:
/// m_1 c_12 n_1 n_2 (1 - delta)(u_2 - u_1). The role-2 species gains the
/// negative.
inline double exchange_momentum_analytic(const PairParameters &p,
                                         const Moments &first,
                                         const Moments &second, double m1,
                                         [[maybe_unused]] double m2) {
  return m1 * p.c_ij * first.n * second.n * (1.0 - p.delta) *
         (second.u - first.u);
}

/// Energy gained per unit time by the role-1 species:
/// c_12 n_1 n_2 [m_1 (1 - delta) u_1 (u_2 - u_1) + d gamma |u_1 - u_2|^2
///               + d (1 - alpha)(T_2 - T_1)].
inline double exchange_energy_analytic(const PairParameters &p,
                                       const Moments &first,
                                       const Moments &second, double m1,
                                       [[maybe_unused]] double m2, int d) {
  const double du = second.u - first.u;
  return p.c_ij * first.n * second.n *
         (m1 * (1.0 - p.delta) * first.u * du + d * p.gamma * du * du +
          d * (1.0 - p.alpha) * (second.T - first.T));
}

/// Mass, momentum and energy rates carried by one right-hand side.
struct ExchangeRates {
  double mass = 0.0;
  double momentum = 0.0;
  double energy = 0.0;
};

inline ExchangeRates exchange_numeric(std::span<const double> rhs,
                                      const VelocityGrid &grid, double mass) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < rhs.size(); ++k) {
    const double v = grid.center(k);
    s0 += rhs[k];
    s1 += v * rhs[k];
    s2 += v * v * rhs[k];
  }
  const double dv = grid.cell_width();
  return {s0 * dv, mass * s1 * dv, 0.5 * mass * s2 * dv};
}

struct ExchangeReport {
  double f_m_analytic = 0.0;
  double f_m_numeric = 0.0;
  double F_E_analytic = 0.0;
  double F_E_numeric = 0.0;
  double mass_rate = 0.0; ///< numeric mass rate of the role-1 operator

  double momentum_residual() const { return f_m_numeric - f_m_analytic; }
  double energy_residual() const { return F_E_numeric - F_E_analytic; }
};

/// Analytic and quadrature exchange rates into the role-1 species of pair k.
inline ExchangeReport exchange_report(const MixtureSystem &system,
                                      const DistributionState &state,
                                      std::size_t k) {
  const auto &pair = system.pairs().at(k);
  const auto &grid = system.grid();
  const double m1 = system.mass(pair.first), m2 = system.mass(pair.second);
  const auto a = moments(state.f[pair.first], grid, m1);
  const auto b = moments(state.f[pair.second], grid, m2);
  const auto params = system.resolve(k, a, b);
  const auto ctx = inter_context(params, PairRole::first, a, b, m1, m2,
                                 system.dimension());
  const auto rates =
      exchange_numeric(fokker_planck_rhs(state.f[pair.first], ctx, grid), grid, m1);
  ExchangeReport r;
  r.f_m_analytic = exchange_momentum_analytic(params, a, b, m1, m2);
  r.F_E_analytic = exchange_energy_analytic(params, a, b, m1, m2, system.dimension());
  r.f_m_numeric = rates.momentum;
  r.F_E_numeric = rates.energy;
  r.mass_rate = rates.mass;
  return r;
}

// ---------------------------------------------------------------------------
// Entropy dissipation

/// Discrete relative Fisher information of f with respect to the context's
/// Maxwellian, times rate * T/m:
///   rate D/dv sum_faces c (rho_{k+1} - rho_k)(ln rho_{k+1} - ln rho_k),
/// rho = f / M, c = B(x) M_k. Its negative is the entropy production of
/// the discrete operator.
inline double relative_fisher(std::span<const double> f,
                              const CollisionContext &ctx,
                              const VelocityGrid &grid) {
  if (ctx.rate == 0.0)
    return 0.0;
  const double dv = grid.cell_width();
  const double D = ctx.diffusivity();
  // Unnormalized Maxwellian in log form; the normalization cancels.
  auto logM = [&](std::size_t k) {
    const double c = grid.center(k) - ctx.target_u;
    return -c * c / (2.0 * D);
  };
  double s = 0.0;
  for (std::size_t k = 0; k + 1 < f.size(); ++k) {
    if (!(f[k] > 0.0) || !(f[k + 1] > 0.0))
      continue;
    const double x = (grid.face(k + 1) - ctx.target_u) * dv / D;
    const double lr0 = std::log(f[k]) - logM(k);
    const double lr1 = std::log(f[k + 1]) - logM(k + 1);
    // c (rho1 - rho0) = B(-x) f_{k+1} - B(x) f_k.
    const double jump = bernoulli(-x) * f[k + 1] - bernoulli(x) * f[k];
    s += jump * (lr1 - lr0);
  }
  return ctx.rate * D / dv * s;
}

/// Terms of the interspecies entropy production of one pair,
///   dH/dt|_pair = -fisher_12 - fisher_21 + moment_12 + moment_21 + constant,
/// with the lemma checks at the current moments.
struct PairEntropyTerms {
  std::size_t pair = 0;
  double fisher_12 = 0.0; ///< >= 0, enters with minus sign
  double fisher_21 = 0.0; ///< >= 0, enters with minus sign
  double moment_12 = 0.0; ///< c12 n1 n2 d (T1 + gamma1 |du|^2) / T12
  double moment_21 = 0.0; ///< c21 n1 n2 d (T2 + gamma2 |du|^2) / T21
  double constant = 0.0;  ///< -(1 + eps) c21 n1 n2 d
  InequalitySides lemma_temperature;
  InequalitySides lemma_heating;
  InequalitySides lemma_cross;

  /// moment_12 + moment_21 + constant; <= 0 under the h-theorem tier.
  double moment_balance() const { return moment_12 + moment_21 + constant; }
  double total() const { return moment_balance() - fisher_12 - fisher_21; }
};

struct EntropyReport {
  double H = 0.0;
  double dH_dt_numeric = 0.0; ///< sum rhs ln f dv of the full right-hand side
  std::vector<PairEntropyTerms> pairs;
  bool lemmas_hold = true;
  bool moment_balance_nonpositive = true;
};

inline EntropyReport entropy_dissipation_report(const DistributionState &state,
                                                const MixtureSystem &system) {
  const auto &grid = system.grid();
  const int d = system.dimension();
  EntropyReport rep;
  rep.H = total_entropy(state, system);
  const auto rhs = assemble_rhs(state, system);
  const double dv = grid.cell_width();
  for (std::size_t i = 0; i < rhs.size(); ++i)
    for (std::size_t k = 0; k < rhs[i].size(); ++k)
      if (state.f[i][k] > 0.0)
        rep.dH_dt_numeric += rhs[i][k] * std::log(state.f[i][k]) * dv;

  const auto m = species_moments(state, system);
  for (std::size_t k = 0; k < system.pairs().size(); ++k) {
    const auto &pe = system.pairs()[k];
    if (!m[pe.first] || !m[pe.second])
      continue;
    const auto &a = *m[pe.first];
    const auto &b = *m[pe.second];
    const double m1 = system.mass(pe.first), m2 = system.mass(pe.second);
    const auto p = system.resolve(k, a, b);
    const auto q = derived_quantities(p, m1, m2, d);
    const double g = (a.u - b.u) * (a.u - b.u);
    const auto c1 = inter_context(p, PairRole::first, a, b, m1, m2, d);
    const auto c2 = inter_context(p, PairRole::second, a, b, m1, m2, d);
    PairEntropyTerms t;
    t.pair = k;
    t.fisher_12 = relative_fisher(state.f[pe.first], c1, grid);
    t.fisher_21 = relative_fisher(state.f[pe.second], c2, grid);
    t.moment_12 = p.c_ij * a.n * b.n * d * (a.T + q.gamma1 * g) / c1.target_T;
    t.moment_21 = p.c_ji * a.n * b.n * d * (b.T + q.gamma2 * g) / c2.target_T;
    t.constant = -(1.0 + p.epsilon()) * p.c_ji * a.n * b.n * d;
    t.lemma_temperature = lemma_temperature_products(p, a.T, b.T);
    t.lemma_heating = lemma_heating_products(p, m1, m2, d);
    t.lemma_cross = lemma_cross_terms(p, m1, m2, d, a.T, b.T, g);
    const double scale = std::abs(t.moment_12) + std::abs(t.moment_21) +
                         std::abs(t.constant);
    if (!(t.lemma_temperature.holds() && t.lemma_heating.holds() &&
          t.lemma_cross.holds()))
      rep.lemmas_hold = false;
    if (t.moment_balance() > inequality_tolerance * scale)
      rep.moment_balance_nonpositive = false;
    rep.pairs.push_back(t);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Relaxation-rate fits

enum class GapQuantity { velocity, temperature };

struct RateFit {
  double rate = 0.0;      ///< decay rate lambda in |gap| ~ exp(-lambda t)
  double intercept = 0.0; ///< ln|gap| at t = 0 of the fitted line
  std::size_t points = 0;
};

struct FitOptions {
  double skip_fraction = 0.05; ///< leading fraction of the window dropped
  double noise_floor = 1e-11;  ///< |gap| at or below this is ignored
};

/// Least-squares slope of ln|gap| against t. Uses the samples after the
/// first `skip_fraction` of the time window and stops at the first sample
/// that reaches the noise floor or grows beyond round-off.
inline RateFit relaxation_rate_fit(const std::vector<std::pair<double, double>> &series,
                                   const FitOptions &opt = {}) {
  if (series.empty())
    throw fit_degenerate("empty series");
  const double t0 = series.front().first;
  const double t_cut = t0 + opt.skip_fraction * (series.back().first - t0);
  if (!(std::abs(series.front().second) > opt.noise_floor))
    throw fit_degenerate("gap starts below the noise floor");
  std::vector<double> ts, ys;
  double last = std::numeric_limits<double>::infinity();
  for (const auto &[t, gap] : series) {
    const double a = std::abs(gap);
    if (t < t_cut) {
      last = a;
      continue;
    }
    if (!(a > opt.noise_floor) || a > last * (1.0 + 1e-9))
      break;
    ts.push_back(t);
    ys.push_back(std::log(a));
    last = a;
  }
  if (ts.size() < 3)
    throw fit_degenerate("fewer than three usable samples");
  const double nn = static_cast<double>(ts.size());
  double st = 0, sy = 0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    st += ts[k];
    sy += ys[k];
  }
  const double tm = st / nn, ym = sy / nn;
  double stt = 0, sty = 0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    stt += (ts[k] - tm) * (ts[k] - tm);
    sty += (ts[k] - tm) * (ys[k] - ym);
  }
  if (!(stt > 0.0))
    throw fit_degenerate("samples span no time");
  RateFit fit;
  fit.rate = -sty / stt;
  fit.intercept = ym + fit.rate * tm;
  fit.points = ts.size();
  return fit;
}

/// Closed-form decay rate of u_1 - u_2 from the moment equations.
inline double velocity_gap_rate(const PairParameters &p, double m1, double m2,
                                double n1, double n2) {
  return p.c_ij * (1.0 - p.delta) * (n2 + (m1 / m2) * n1);
}

/// Closed-form decay rate of T_1 - T_2 for equal mean velocities.
inline double temperature_gap_rate(const PairParameters &p, double n1,
                                   double n2) {
  return 2.0 * p.c_ij * (1.0 - p.alpha) * (n1 + n2);
}

} // namespace fpmix
