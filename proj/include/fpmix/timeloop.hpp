// SPDX-License-Identifier: Apache-2.0
#pragma once

// Time stepping: space-homogeneous relaxation and a 1x1v Strang-split
// transport/collision driver.
//
// Two collision schemes are available.
//
// frozen: every operator acting on a species is applied as one backward
//   Euler step with its coefficients frozen at the start of the step.
//   Mass is exact; pair momentum and energy carry the O(dv^2) flux defect
//   and the O(dt) mismatch of frozen coefficients.
//
// conservative (default): per pair, the moment equations are advanced by
//   backward Euler with targets evaluated at the new moments, which
//   conserves the pair's momentum and energy exactly. Each kinetic substep
//   is then a backward Euler step whose target (u, T) is adjusted so that
//   the discrete moments of the result equal the prescribed ones.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "diagnostics.hpp"
#include "errors.hpp"
#include "kinetics.hpp"
#include "nspecies.hpp"
#include "operator.hpp"
#include "params.hpp"

namespace fpmix {

enum class Scheme { conservative, frozen };

inline std::string_view to_string(Scheme s) {
  return s == Scheme::conservative ? "conservative" : "frozen";
}

inline Scheme scheme_from_string(std::string_view s) {
  if (s == "conservative")
    return Scheme::conservative;
  if (s == "frozen")
    return Scheme::frozen;
  throw config_error("unknown scheme '" + std::string(s) + "'");
}

struct RunSettings {
  double dt = 1e-2;
  double t_end = 1.0;
  std::size_t output_every = 1;
  Scheme scheme = Scheme::conservative;
  bool correct_moments = false;
  bool stop_at_equilibrium = true;
  /// L1 distance between consecutive states per unit time.
  double equilibrium_threshold = 1e-10;
  Tier required_tier = Tier::conservation_only;
  bool keep_states = false; ///< store the distribution at every sample

  friend bool operator==(const RunSettings &, const RunSettings &) = default;
};

/// Periodic spatial domain of the 1x1v driver.
struct SpatialSpec {
  std::size_t x_cells = 0;
  double x_min = 0.0;
  double x_max = 1.0;

  double dx() const { return (x_max - x_min) / static_cast<double>(x_cells); }
  double center(std::size_t j) const {
    return x_min + (static_cast<double>(j) + 0.5) * dx();
  }

  friend bool operator==(const SpatialSpec &, const SpatialSpec &) = default;
};

struct SimulationConfig {
  MixtureSystem system;
  RunSettings run;
  std::optional<SpatialSpec> space;
};

// ---------------------------------------------------------------------------
// Pair moment update

struct PairMoments {
  Moments first;
  Moments second;
};

/// Backward Euler step of the pair's moment equations with both targets
/// evaluated at the new moments. Conserves m_1 n_1 u_1 + m_2 n_2 u_2 and
/// the total energy exactly; densities are unchanged.
inline PairMoments pair_moment_step(const PairParameters &p, const Moments &a,
                                    const Moments &b, double m1, double m2,
                                    int d, double dt) {
  const double r1 = p.c_ij * b.n;
  const double r2 = p.c_ji * a.n;
  const double eps = p.epsilon();
  const double k1 = dt * r1 * (1.0 - p.delta);
  const double k2 = dt * r2 * (1.0 - p.delta) * eps * m1 / m2;
  const double g = (a.u - b.u) / (1.0 + k1 + k2);
  PairMoments out{a, b};
  out.first.u = a.u - k1 * g;
  out.second.u = b.u + k2 * g;
  const double u1 = out.first.u, u2 = out.second.u;
  const double u12 = mixture_velocity_12(p, u1, u2);
  const double u21 = mixture_velocity_21(p, m1, m2, u1, u2);
  const double heat21 = heating_coefficient_21(p, m1, d);

  const double half_d = 0.5 * d;
  const double s1 = dt * r1 * d * (1.0 - p.alpha);
  const double s2 = dt * r2 * d * eps * (1.0 - p.alpha);
  const double a11 = half_d + s1, a12 = -s1;
  const double a21 = -s2, a22 = half_d + s2;
  const double rhs1 = 0.5 * m1 * (a.u * a.u - u1 * u1) + half_d * a.T +
                      dt * r1 * (d * p.gamma * g * g + m1 * u1 * (u12 - u1));
  const double rhs2 = 0.5 * m2 * (b.u * b.u - u2 * u2) + half_d * b.T +
                      dt * r2 * (d * heat21 * g * g + m2 * u2 * (u21 - u2));
  const double det = a11 * a22 - a12 * a21;
  out.first.T = (rhs1 * a22 - a12 * rhs2) / det;
  out.second.T = (a11 * rhs2 - a21 * rhs1) / det;
  if (!(out.first.T > 0.0) || !(out.second.T > 0.0))
    throw solver_failure("pair moment update produced a non-positive temperature");
  return out;
}

inline RawMoments operator-(const RawMoments &x, const RawMoments &y) {
  return {x.m0 - y.m0, x.m1 - y.m1, x.m2 - y.m2};
}

inline RawMoments &operator+=(RawMoments &x, const RawMoments &y) {
  x.m0 += y.m0;
  x.m1 += y.m1;
  x.m2 += y.m2;
  return x;
}

// ---------------------------------------------------------------------------
// Homogeneous step

struct StepTrace {
  int max_calibration_iterations = 0;
  double max_calibration_residual = 0.0;
};

/// One collision step of length dt for every species: the intra operator,
/// then one operator per partner in pair order, all built from the moments
/// at the start of the step. Species at or below the density floor are
/// left untouched and do not act on their partners.
inline DistributionState step_homogeneous(const DistributionState &state,
                                          const MixtureSystem &system,
                                          const RunSettings &run, double dt,
                                          StepTrace *trace = nullptr) {
  const auto &grid = system.grid();
  const int d = system.dimension();
  const auto m = species_moments(state, system);
  const auto ctx = build_contexts(system, m, run.required_tier);

  // Raw-moment change of each species from each pair's moment update.
  std::vector<std::vector<RawMoments>> delta(system.size());
  for (std::size_t i = 0; i < system.size(); ++i)
    delta[i].assign(ctx[i].contexts.size(), RawMoments{});
  const bool need_targets = run.scheme == Scheme::conservative || run.correct_moments;
  if (need_targets) {
    for (std::size_t i = 0; i < system.size(); ++i)
      for (std::size_t c = 0; c < ctx[i].contexts.size(); ++c) {
        const auto k = ctx[i].pair_index[c];
        if (!k)
          continue;
        const auto &pe = system.pairs()[*k];
        const double m1 = system.mass(pe.first), m2 = system.mass(pe.second);
        const auto &a = *m[pe.first];
        const auto &b = *m[pe.second];
        const auto upd = pair_moment_step(system.resolve(*k, a, b), a, b, m1, m2, d, dt);
        delta[i][c] = i == pe.first
                          ? raw_moments(upd.first, m1, d) - raw_moments(a, m1, d)
                          : raw_moments(upd.second, m2, d) - raw_moments(b, m2, d);
      }
  }

  DistributionState next;
  next.time = state.time + dt;
  next.f.resize(state.f.size());
  for (std::size_t i = 0; i < state.f.size(); ++i) {
    std::vector<double> f = state.f[i];
    RawMoments target = raw_moments(f, grid);
    for (std::size_t c = 0; c < ctx[i].contexts.size(); ++c) {
      target += delta[i][c];
      if (run.scheme == Scheme::frozen) {
        f = implicit_collision_step(f, ctx[i].contexts[c], grid, dt);
        continue;
      }
      auto step = calibrated_collision_step(f, ctx[i].contexts[c], grid, dt, target);
      if (trace) {
        trace->max_calibration_iterations =
            std::max(trace->max_calibration_iterations, step.iterations);
        trace->max_calibration_residual =
            std::max(trace->max_calibration_residual, step.residual);
      }
      f = std::move(step.f);
    }
    if (run.correct_moments && m[i])
      f = correct_moments(f, grid, target);
    next.f[i] = std::move(f);
  }
  return next;
}

// ---------------------------------------------------------------------------
// Homogeneous relaxation driver

/// Discrete totals over all species: sum m_i sum v f dv and
/// sum (m_i/2) sum |v|^2 f dv.
struct Totals {
  std::vector<double> mass; ///< number density per species
  double momentum = 0.0;
  double energy = 0.0;
};

inline Totals totals(const DistributionState &state, const MixtureSystem &system) {
  Totals t;
  for (std::size_t i = 0; i < state.f.size(); ++i) {
    const auto r = raw_moments(state.f[i], system.grid());
    t.mass.push_back(r.m0);
    t.momentum += system.mass(i) * r.m1;
    t.energy += 0.5 * system.mass(i) * r.m2;
  }
  return t;
}

struct Sample {
  std::size_t step = 0;
  double t = 0.0;
  MomentsList moments;
  Totals totals;
  double entropy = 0.0;
  /// L1 distance to the previous state per unit time; 0 at step 0.
  double change_rate = 0.0;
  /// Per pair; empty when either species is absent.
  std::vector<std::optional<ExchangeReport>> exchange;
};

inline Sample make_sample(const DistributionState &state,
                          const MixtureSystem &system, std::size_t step,
                          double change_rate) {
  Sample s;
  s.step = step;
  s.t = state.time;
  s.moments = species_moments(state, system);
  s.totals = totals(state, system);
  s.entropy = total_entropy(state, system);
  s.change_rate = change_rate;
  for (std::size_t k = 0; k < system.pairs().size(); ++k) {
    const auto &pe = system.pairs()[k];
    if (s.moments[pe.first] && s.moments[pe.second])
      s.exchange.push_back(exchange_report(system, state, k));
    else
      s.exchange.push_back(std::nullopt);
  }
  return s;
}

struct RelaxationResult {
  std::vector<Sample> samples;
  std::vector<DistributionState> states; ///< filled when keep_states is set
  DistributionState final_state;
  std::size_t steps = 0;
  bool reached_equilibrium = false;
  StepTrace trace;
};

inline double state_distance(const DistributionState &a,
                             const DistributionState &b,
                             const VelocityGrid &grid) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.f.size(); ++i)
    s += l1_distance(a.f[i], b.f[i], grid);
  return s;
}

inline void check_settings(const RunSettings &run) {
  if (!(run.dt > 0.0) || !std::isfinite(run.dt))
    throw config_error("dt must be positive");
  if (!(run.t_end > 0.0) || !std::isfinite(run.t_end))
    throw config_error("t_end must be positive");
  if (run.output_every == 0)
    throw config_error("output_every must be at least 1");
}

/// Number of steps covering [0, t_end]; the last one may be shorter.
inline std::size_t step_count(const RunSettings &run) {
  return static_cast<std::size_t>(std::ceil(run.t_end / run.dt * (1.0 - 1e-12)));
}

inline double step_length(const RunSettings &run, std::size_t s) {
  return std::min(run.dt, run.t_end - static_cast<double>(s - 1) * run.dt);
}

inline RelaxationResult run_relaxation(const DistributionState &initial,
                                       const MixtureSystem &system,
                                       const RunSettings &run) {
  check_settings(run);
  if (initial.f.size() != system.size())
    throw config_error("initial state and mixture have different species counts");
  RelaxationResult res;
  DistributionState state = initial;
  res.samples.push_back(make_sample(state, system, 0, 0.0));
  if (run.keep_states)
    res.states.push_back(state);
  const std::size_t n = step_count(run);
  for (std::size_t s = 1; s <= n; ++s) {
    const double h = step_length(run, s);
    DistributionState next;
    try {
      next = step_homogeneous(state, system, run, h, &res.trace);
    } catch (const error &e) {
      throw step_error(s, e.what());
    }
    next.time = static_cast<double>(s - 1) * run.dt + h;
    const double rate = state_distance(next, state, system.grid()) / h;
    state = std::move(next);
    res.steps = s;
    const bool done = run.stop_at_equilibrium && rate < run.equilibrium_threshold;
    if (s % run.output_every == 0 || s == n || done) {
      res.samples.push_back(make_sample(state, system, s, rate));
      if (run.keep_states)
        res.states.push_back(state);
    }
    if (done) {
      res.reached_equilibrium = true;
      break;
    }
  }
  res.final_state = std::move(state);
  return res;
}

/// (t, u_first - u_second) or (t, T_first - T_second) of pair k.
inline std::vector<std::pair<double, double>>
gap_series(const std::vector<Sample> &samples, const MixtureSystem &system,
           std::size_t k, GapQuantity q) {
  const auto &pe = system.pairs().at(k);
  std::vector<std::pair<double, double>> out;
  for (const auto &s : samples) {
    const auto &a = s.moments[pe.first];
    const auto &b = s.moments[pe.second];
    if (!a || !b)
      continue;
    out.emplace_back(s.t, q == GapQuantity::velocity ? a->u - b->u : a->T - b->T);
  }
  return out;
}

// ---------------------------------------------------------------------------
// 1x1v

struct SpatialState {
  std::vector<DistributionState> cells;
  double dx = 1.0;
  double time = 0.0;
};

/// First-order upwind advection v df/dx over dt, periodic in x.
inline SpatialState step_transport(const SpatialState &state,
                                   const VelocityGrid &grid, double dt) {
  const double cfl = grid.max_abs_velocity() * dt / state.dx;
  if (cfl > 1.0 + 1e-12)
    throw cfl_violation("CFL number " + std::to_string(cfl) + " exceeds 1");
  SpatialState out = state;
  const std::size_t nx = state.cells.size();
  if (nx == 0)
    return out;
  const std::size_t ns = state.cells.front().f.size();
  for (std::size_t s = 0; s < ns; ++s)
    for (std::size_t k = 0; k < grid.size(); ++k) {
      const double v = grid.center(k);
      const double nu = v * dt / state.dx;
      for (std::size_t j = 0; j < nx; ++j) {
        const double here = state.cells[j].f[s][k];
        if (v > 0.0) {
          const double left = state.cells[(j + nx - 1) % nx].f[s][k];
          out.cells[j].f[s][k] = here - nu * (here - left);
        } else if (v < 0.0) {
          const double right = state.cells[(j + 1) % nx].f[s][k];
          out.cells[j].f[s][k] = here - nu * (right - here);
        }
      }
    }
  out.time = state.time + dt;
  for (auto &c : out.cells)
    c.time = out.time;
  return out;
}

struct SpatialSample {
  std::size_t step = 0;
  double t = 0.0;
  std::vector<double> mass; ///< per species, integrated over x and v
  double momentum = 0.0;
  double energy = 0.0;
  double entropy = 0.0;
  /// Entropy change accumulated by the transport and collision stages.
  double entropy_change_transport = 0.0;
  double entropy_change_collision = 0.0;
};

struct SpatialResult {
  std::vector<SpatialSample> samples;
  SpatialState final_state;
  std::size_t steps = 0;
};

inline double spatial_entropy(const SpatialState &st, const MixtureSystem &system) {
  double h = 0.0;
  for (const auto &c : st.cells)
    h += total_entropy(c, system);
  return h * st.dx;
}

inline SpatialSample make_spatial_sample(const SpatialState &st,
                                         const MixtureSystem &system,
                                         std::size_t step) {
  SpatialSample s;
  s.step = step;
  s.t = st.time;
  s.mass.assign(system.size(), 0.0);
  for (const auto &c : st.cells) {
    const auto t = totals(c, system);
    for (std::size_t i = 0; i < t.mass.size(); ++i)
      s.mass[i] += t.mass[i] * st.dx;
    s.momentum += t.momentum * st.dx;
    s.energy += t.energy * st.dx;
  }
  s.entropy = spatial_entropy(st, system);
  return s;
}

/// Strang splitting: half transport, full collision in every cell, half
/// transport.
inline SpatialResult run_1x1v(const SpatialState &initial,
                              const MixtureSystem &system,
                              const RunSettings &run) {
  check_settings(run);
  const auto &grid = system.grid();
  const double cfl = grid.max_abs_velocity() * run.dt / initial.dx;
  if (cfl > 1.0 + 1e-12)
    throw step_error(1, "CFL number " + std::to_string(cfl) + " exceeds 1", true);
  SpatialResult res;
  SpatialState st = initial;
  res.samples.push_back(make_spatial_sample(st, system, 0));
  double dh_transport = 0.0, dh_collision = 0.0;
  const std::size_t n = step_count(run);
  for (std::size_t s = 1; s <= n; ++s) {
    const double h = step_length(run, s);
    try {
      const double h0 = spatial_entropy(st, system);
      st = step_transport(st, grid, 0.5 * h);
      const double h1 = spatial_entropy(st, system);
      for (auto &c : st.cells)
        c = step_homogeneous(c, system, run, h);
      const double h2 = spatial_entropy(st, system);
      st = step_transport(st, grid, 0.5 * h);
      const double h3 = spatial_entropy(st, system);
      dh_transport += (h1 - h0) + (h3 - h2);
      dh_collision += h2 - h1;
    } catch (const cfl_violation &e) {
      throw step_error(s, e.what(), true);
    } catch (const error &e) {
      throw step_error(s, e.what());
    }
    st.time = static_cast<double>(s - 1) * run.dt + h;
    for (auto &c : st.cells)
      c.time = st.time;
    res.steps = s;
    if (s % run.output_every == 0 || s == n) {
      auto sample = make_spatial_sample(st, system, s);
      sample.entropy_change_transport = dh_transport;
      sample.entropy_change_collision = dh_collision;
      res.samples.push_back(std::move(sample));
    }
  }
  res.final_state = std::move(st);
  return res;
}

} // namespace fpmix
