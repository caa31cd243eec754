// SPDX-License-Identifier: Apache-2.0
#pragma once

// Subcommands of the fpmix tool. Each takes parsed options and two streams
// and returns the process exit code:
//   0 success, 1 parameters below the required tier, 2 configuration or
//   usage error, 3 solver failure, 4 CFL violation.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "config.hpp"
#include "diagnostics.hpp"
#include "errors.hpp"
#include "kinetics.hpp"
#include "nspecies.hpp"
#include "params.hpp"
#include "report.hpp"
#include "timeloop.hpp"

namespace fpmix::cli {

enum exit_code : int {
  ok = 0,
  inadmissible = 1,
  bad_config = 2,
  solver_error = 3,
  cfl_error = 4,
};

struct Options {
  std::string config_path;
  std::string out_dir = "fpmix-out";
  std::optional<Tier> tier;
  bool correct_moments = false;
  unsigned jobs = 1;
  std::string command_line;

  // sweep
  std::string sweep_parameter;
  std::string sweep_pair; ///< "A:B"; empty selects the first pair
  double sweep_from = 0.0;
  double sweep_to = 0.0;
  std::size_t sweep_samples = 0;

  // presets
  PresetInputs preset_inputs;
  bool json_output = false;
};

namespace detail {

inline WarningSink warnings_to(std::ostream &err) {
  return [&err](std::string_view msg) { err << "warning: " << msg << '\n'; };
}

/// Configuration with command-line overrides applied.
inline Config effective_config(const Options &o) {
  Config cfg = load_config(o.config_path);
  if (o.tier)
    cfg.run.required_tier = *o.tier;
  if (o.correct_moments)
    cfg.run.correct_moments = true;
  return cfg;
}

struct PairCheck {
  std::string name;
  std::optional<PairParameters> params;
  ValidationReport report;
  std::string error; ///< set when the parameters could not be resolved
};

inline std::vector<PairCheck> check_pairs(const Config &cfg,
                                          const MixtureSystem &system) {
  std::vector<PairCheck> out;
  for (std::size_t k = 0; k < system.pairs().size(); ++k) {
    const auto &pe = system.pairs()[k];
    PairCheck c;
    c.name = system.label(pe.first) + ":" + system.label(pe.second);
    const auto a = configured_moments(cfg.species[pe.first]);
    const auto b = configured_moments(cfg.species[pe.second]);
    try {
      c.params = system.resolve(k, a, b);
      c.report = validate(*c.params, system.mass(pe.first),
                          system.mass(pe.second), system.dimension());
    } catch (const error &e) {
      c.error = e.what();
      c.report.tier = Tier::invalid;
    }
    out.push_back(std::move(c));
  }
  return out;
}

inline std::vector<const ConstraintCheck *> failing(const ValidationReport &r,
                                                    Tier required) {
  std::vector<const ConstraintCheck *> out;
  for (const auto &c : r.checks)
    if (!c.satisfied && c.tier <= required)
      out.push_back(&c);
  return out;
}

inline std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

inline void write_text(const std::filesystem::path &p, const std::string &text) {
  std::ofstream os(p);
  if (!os)
    throw config_error("cannot write '" + p.string() + "'");
  os << text;
}

} // namespace detail

// ---------------------------------------------------------------------------
// validate

inline int cmd_validate(const Options &o, std::ostream &out, std::ostream &err) {
  Config cfg;
  std::optional<MixtureSystem> system;
  try {
    cfg = detail::effective_config(o);
    system.emplace(build_system(cfg, detail::warnings_to(err)));
  } catch (const error &e) {
    err << "error: " << e.what() << '\n';
    return bad_config;
  }
  const Tier required = cfg.run.required_tier;
  const auto checks = detail::check_pairs(cfg, *system);
  json violations = json::array();
  bool all_ok = true;
  out << "required tier: " << to_string(required) << '\n';
  for (const auto &c : checks) {
    const bool pass = c.error.empty() && c.report.reaches(required);
    all_ok = all_ok && pass;
    out << "pair " << c.name << ": tier " << to_string(c.report.tier)
        << (pass ? " [ok]" : " [FAIL]") << '\n';
    if (!c.error.empty()) {
      out << "  error: " << c.error << '\n';
      violations.push_back({{"pair", c.name}, {"id", "unresolved"},
                            {"message", c.error}, {"residual", nullptr}});
      continue;
    }
    const auto &p = *c.params;
    out << "  c_ij=" << detail::fmt(p.c_ij) << " c_ji=" << detail::fmt(p.c_ji)
        << " epsilon=" << detail::fmt(p.epsilon()) << " delta=" << detail::fmt(p.delta)
        << " alpha=" << detail::fmt(p.alpha) << " gamma=" << detail::fmt(p.gamma) << '\n';
    for (const auto &chk : c.report.checks)
      out << "  " << std::left << std::setw(28) << chk.id << std::setw(14)
          << to_string(chk.tier) << (chk.satisfied ? "ok    " : "VIOL  ")
          << "residual " << detail::fmt(chk.residual) << '\n';
    for (const auto *v : detail::failing(c.report, required))
      violations.push_back({{"pair", c.name}, {"id", v->id},
                            {"message", v->message}, {"residual", number(v->residual)}});
  }
  out << "result: " << (all_ok ? "ok" : "FAIL") << '\n';
  if (!all_ok) {
    err << json{{"violations", violations}}.dump() << '\n';
    return inadmissible;
  }
  return ok;
}

// ---------------------------------------------------------------------------
// run

struct ConservationSummary {
  double momentum_drift = 0.0;        ///< max |P(t) - P(0)|
  double energy_drift_relative = 0.0; ///< max |E(t) - E(0)| / E(0)
  double mass_drift = 0.0;            ///< max over species of |n(t) - n(0)|
  double entropy_max_increase = -std::numeric_limits<double>::infinity();
};

inline ConservationSummary conservation_summary(const std::vector<Sample> &samples) {
  ConservationSummary c;
  if (samples.empty())
    return c;
  const auto &t0 = samples.front().totals;
  for (std::size_t s = 1; s < samples.size(); ++s) {
    const auto &t = samples[s].totals;
    c.momentum_drift = std::max(c.momentum_drift, std::abs(t.momentum - t0.momentum));
    c.energy_drift_relative =
        std::max(c.energy_drift_relative, std::abs(t.energy - t0.energy) / t0.energy);
    for (std::size_t i = 0; i < t.mass.size(); ++i)
      c.mass_drift = std::max(c.mass_drift, std::abs(t.mass[i] - t0.mass[i]));
    c.entropy_max_increase =
        std::max(c.entropy_max_increase, samples[s].entropy - samples[s - 1].entropy);
  }
  return c;
}

inline json rate_fit_json(const std::vector<Sample> &samples,
                          const MixtureSystem &system, std::size_t k,
                          GapQuantity q, double theory) {
  json j{{"theory", number(theory)}};
  try {
    const auto fit = relaxation_rate_fit(gap_series(samples, system, k, q));
    j["fit"] = number(fit.rate);
    j["points"] = fit.points;
    j["relative_error"] = theory != 0.0 ? number(fit.rate / theory - 1.0) : json(nullptr);
  } catch (const fit_degenerate &e) {
    j["fit"] = nullptr;
    j["degenerate"] = e.what();
  }
  return j;
}

namespace detail {

inline int run_homogeneous(const Config &cfg, const MixtureSystem &system,
                           const std::filesystem::path &dir, RunManifest &manifest,
                           const std::string &preamble, std::ostream &out,
                           std::ostream &err) {
  const auto &grid = system.grid();
  const auto initial = initial_state(cfg, grid, warnings_to(err));
  std::vector<std::string> labels;
  for (const auto &s : cfg.species)
    labels.push_back(s.label);
  {
    std::ofstream os(dir / "snapshot_initial.csv");
    write_snapshot_csv(os, grid, initial, labels, preamble);
    manifest.outputs.push_back("snapshot_initial.csv");
  }
  const auto res = run_relaxation(initial, system, cfg.run);
  {
    std::ofstream os(dir / "series.csv");
    write_series_csv(os, res.samples, system, preamble);
    manifest.outputs.push_back("series.csv");
  }
  {
    std::ofstream os(dir / "snapshot_final.csv");
    write_snapshot_csv(os, grid, res.final_state, labels, preamble);
    manifest.outputs.push_back("snapshot_final.csv");
  }

  const auto cons = conservation_summary(res.samples);
  json pairs = json::array();
  const auto &first = res.samples.front();
  const auto &last = res.samples.back();
  for (std::size_t k = 0; k < system.pairs().size(); ++k) {
    const auto &pe = system.pairs()[k];
    json pj{{"pair", system.label(pe.first) + ":" + system.label(pe.second)}};
    const auto &a = first.moments[pe.first];
    const auto &b = first.moments[pe.second];
    if (a && b) {
      const auto p = system.resolve(k, *a, *b);
      const double m1 = system.mass(pe.first), m2 = system.mass(pe.second);
      pj["parameters"] = to_json(p);
      pj["validation"] = to_json(validate(p, m1, m2, system.dimension()));
      pj["velocity_gap_rate"] =
          rate_fit_json(res.samples, system, k, GapQuantity::velocity,
                        velocity_gap_rate(p, m1, m2, a->n, b->n));
      pj["temperature_gap_rate"] =
          rate_fit_json(res.samples, system, k, GapQuantity::temperature,
                        temperature_gap_rate(p, a->n, b->n));
    }
    const auto &fa = last.moments[pe.first];
    const auto &fb = last.moments[pe.second];
    if (fa && fb) {
      pj["final_velocity_gap"] = number(std::abs(fa->u - fb->u));
      pj["final_temperature_gap"] = number(std::abs(fa->T - fb->T));
    }
    pairs.push_back(pj);
  }
  json maxwell = json::object();
  for (std::size_t i = 0; i < system.size(); ++i)
    if (last.moments[i])
      maxwell[system.label(i)] =
          number(distance_to_own_maxwellian(res.final_state.f[i], grid, system.mass(i)));

  json diag{
      {"manifest", "manifest.json"},
      {"config_hash", manifest.config_hash},
      {"scheme", to_string(cfg.run.scheme)},
      {"correct_moments", cfg.run.correct_moments},
      {"steps", res.steps},
      {"reached_equilibrium", res.reached_equilibrium},
      {"conservation",
       {{"momentum_initial", number(first.totals.momentum)},
        {"momentum_max_drift", number(cons.momentum_drift)},
        {"energy_initial", number(first.totals.energy)},
        {"energy_max_relative_drift", number(cons.energy_drift_relative)},
        {"mass_max_drift", number(cons.mass_drift)}}},
      {"entropy",
       {{"initial", to_json(entropy_dissipation_report(initial, system), system)},
        {"final", to_json(entropy_dissipation_report(res.final_state, system), system)},
        {"max_increase_between_samples", number(cons.entropy_max_increase)}}},
      {"pairs", pairs},
      {"distance_to_own_maxwellian", maxwell},
      {"calibration",
       {{"max_iterations", res.trace.max_calibration_iterations},
        {"max_residual", number(res.trace.max_calibration_residual)}}},
      {"exchange_samples", exchange_samples_json(res.samples, system)}};
  write_text(dir / "diagnostics.json", diag.dump(2) + "\n");
  manifest.outputs.push_back("diagnostics.json");

  out << "steps: " << res.steps << (res.reached_equilibrium ? " (equilibrium)" : "")
      << '\n'
      << "t_final: " << fmt(last.t) << '\n'
      << "momentum drift: " << fmt(cons.momentum_drift) << '\n'
      << "energy relative drift: " << fmt(cons.energy_drift_relative) << '\n'
      << "entropy max increase: " << fmt(cons.entropy_max_increase) << '\n';
  for (std::size_t k = 0; k < system.pairs().size(); ++k) {
    const auto &pe = system.pairs()[k];
    const auto &fa = last.moments[pe.first];
    const auto &fb = last.moments[pe.second];
    if (fa && fb)
      out << "pair " << system.label(pe.first) << ":" << system.label(pe.second)
          << " |du| " << fmt(std::abs(fa->u - fb->u)) << " |dT| "
          << fmt(std::abs(fa->T - fb->T)) << '\n';
  }
  return ok;
}

inline int run_spatial(const Config &cfg, const MixtureSystem &system,
                       const std::filesystem::path &dir, RunManifest &manifest,
                       const std::string &preamble, std::ostream &out,
                       std::ostream &err) {
  const auto &grid = system.grid();
  const auto initial = initial_spatial_state(cfg, grid, warnings_to(err));
  const auto res = run_1x1v(initial, system, cfg.run);
  {
    std::ofstream os(dir / "series.csv");
    write_spatial_series_csv(os, res.samples, system, preamble);
    manifest.outputs.push_back("series.csv");
  }
  // Spatial average of the final distribution, in snapshot format.
  DistributionState avg;
  avg.time = res.final_state.time;
  avg.f.assign(system.size(), std::vector<double>(grid.size(), 0.0));
  const double w = 1.0 / static_cast<double>(res.final_state.cells.size());
  for (const auto &c : res.final_state.cells)
    for (std::size_t i = 0; i < c.f.size(); ++i)
      for (std::size_t k = 0; k < grid.size(); ++k)
        avg.f[i][k] += w * c.f[i][k];
  std::vector<std::string> labels;
  for (const auto &s : cfg.species)
    labels.push_back(s.label);
  {
    std::ofstream os(dir / "snapshot_final.csv");
    write_snapshot_csv(os, grid, avg, labels, preamble + "\n# x-averaged");
    manifest.outputs.push_back("snapshot_final.csv");
  }
  const auto &first = res.samples.front();
  const auto &last = res.samples.back();
  double mass_drift = 0.0;
  for (std::size_t i = 0; i < first.mass.size(); ++i)
    mass_drift = std::max(mass_drift, std::abs(last.mass[i] - first.mass[i]));
  json diag{{"manifest", "manifest.json"},
            {"config_hash", manifest.config_hash},
            {"steps", res.steps},
            {"momentum_initial", number(first.momentum)},
            {"momentum_final", number(last.momentum)},
            {"energy_initial", number(first.energy)},
            {"energy_final", number(last.energy)},
            {"mass_drift", number(mass_drift)},
            {"entropy_initial", number(first.entropy)},
            {"entropy_final", number(last.entropy)},
            {"entropy_change_transport", number(last.entropy_change_transport)},
            {"entropy_change_collision", number(last.entropy_change_collision)}};
  write_text(dir / "diagnostics.json", diag.dump(2) + "\n");
  manifest.outputs.push_back("diagnostics.json");
  out << "steps: " << res.steps << '\n'
      << "momentum: " << fmt(first.momentum) << " -> " << fmt(last.momentum) << '\n'
      << "energy: " << fmt(first.energy) << " -> " << fmt(last.energy) << '\n'
      << "entropy change (transport): " << fmt(last.entropy_change_transport) << '\n'
      << "entropy change (collision): " << fmt(last.entropy_change_collision) << '\n';
  return ok;
}

} // namespace detail

inline int cmd_run(const Options &o, std::ostream &out, std::ostream &err) {
  namespace fs = std::filesystem;
  RunManifest manifest;
  manifest.started_at = utc_timestamp();
  manifest.command = o.command_line;
  Config cfg;
  std::optional<MixtureSystem> system;
  try {
    cfg = detail::effective_config(o);
    system.emplace(build_system(cfg, detail::warnings_to(err)));
    fs::create_directories(o.out_dir);
  } catch (const error &e) {
    err << "error: " << e.what() << '\n';
    return bad_config;
  } catch (const fs::filesystem_error &e) {
    err << "error: " << e.what() << '\n';
    return bad_config;
  }
  manifest.config_hash = hex64(fnv1a(serialize_config(cfg)));
  const fs::path dir(o.out_dir);
  const std::string preamble =
      "# fpmix " + std::string(version) + " manifest=manifest.json config_hash=" +
      manifest.config_hash;
  detail::write_text(dir / "config.ini", serialize_config(cfg));
  manifest.outputs.push_back("config.ini");

  int code = ok;
  try {
    code = cfg.space ? detail::run_spatial(cfg, *system, dir, manifest, preamble, out, err)
                     : detail::run_homogeneous(cfg, *system, dir, manifest, preamble, out, err);
  } catch (const step_error &e) {
    err << "error: " << e.what() << '\n';
    manifest.error = e.what();
    code = e.is_cfl() ? cfl_error : solver_error;
  } catch (const config_error &e) {
    err << "error: " << e.what() << '\n';
    manifest.error = e.what();
    code = bad_config;
  } catch (const error &e) {
    err << "error: " << e.what() << '\n';
    manifest.error = e.what();
    code = solver_error;
  }
  manifest.finished_at = utc_timestamp();
  manifest.exit_code = code;
  manifest.outputs.push_back("manifest.json");
  detail::write_text(dir / "manifest.json", to_json(manifest).dump(2) + "\n");
  return code;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepRow {
  std::size_t index = 0;
  double value = 0.0;
  std::string status = "ok";
  Tier tier = Tier::invalid;
  std::string violations;
  double lambda_u_fit = std::numeric_limits<double>::quiet_NaN();
  double lambda_u_theory = std::numeric_limits<double>::quiet_NaN();
  double lambda_T_fit = std::numeric_limits<double>::quiet_NaN();
  double lambda_T_theory = std::numeric_limits<double>::quiet_NaN();
  double entropy_min = std::numeric_limits<double>::quiet_NaN();
  double entropy_max_increase = std::numeric_limits<double>::quiet_NaN();
  std::size_t steps = 0;
};

inline std::vector<double> sweep_values(double from, double to, std::size_t n) {
  std::vector<double> v;
  for (std::size_t k = 0; k < n; ++k)
    v.push_back(n == 1 ? from
                       : from + (to - from) * static_cast<double>(k) /
                                    static_cast<double>(n - 1));
  return v;
}

namespace detail {

inline double &parameter_ref(PairParameters &p, const std::string &name) {
  if (name == "delta")
    return p.delta;
  if (name == "alpha")
    return p.alpha;
  if (name == "gamma")
    return p.gamma;
  if (name == "c_ij")
    return p.c_ij;
  if (name == "c_ji")
    return p.c_ji;
  throw config_error("cannot sweep '" + name +
                     "' (expected delta, alpha, gamma, c_ij or c_ji)");
}

/// Index of the swept pair in the built system.
inline std::size_t select_pair(const MixtureSystem &system, const std::string &spec) {
  if (system.pairs().empty())
    throw config_error("config has no pairs to sweep");
  if (spec.empty())
    return 0;
  for (std::size_t k = 0; k < system.pairs().size(); ++k) {
    const auto &pe = system.pairs()[k];
    const auto a = system.label(pe.first), b = system.label(pe.second);
    if (spec == a + ":" + b || spec == b + ":" + a)
      return k;
  }
  throw config_error("no pair '" + spec + "'");
}

inline SweepRow sweep_sample(const Config &base, std::size_t k, const std::string &param,
                             std::size_t index, double value) {
  SweepRow row;
  row.index = index;
  row.value = value;
  try {
    Config cfg = base;
    const auto system0 = build_system(cfg);
    const auto &pe = system0.pairs()[k];
    const auto a = configured_moments(cfg.species[pe.first]);
    const auto b = configured_moments(cfg.species[pe.second]);
    // Materialize the pair in its normalized orientation.
    PairConfig &pc = cfg.pairs[k];
    pc.params = system0.resolve(k, a, b);
    pc.preset.reset();
    pc.first = system0.label(pe.first);
    pc.second = system0.label(pe.second);
    parameter_ref(pc.params, param) = value;
    const auto system = build_system(cfg);
    const double m1 = system.mass(pe.first), m2 = system.mass(pe.second);
    const auto report = validate(pc.params, m1, m2, system.dimension());
    row.tier = report.tier;
    const auto bad = failing(report, cfg.run.required_tier);
    if (!bad.empty()) {
      row.status = "inadmissible";
      for (const auto *c : bad)
        row.violations += (row.violations.empty() ? "" : ";") + c->id;
      return row;
    }
    row.lambda_u_theory = velocity_gap_rate(pc.params, m1, m2, a.n, b.n);
    row.lambda_T_theory = temperature_gap_rate(pc.params, a.n, b.n);
    const auto res = run_relaxation(initial_state(cfg, system.grid()), system, cfg.run);
    row.steps = res.steps;
    row.entropy_min = std::numeric_limits<double>::infinity();
    row.entropy_max_increase = -std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < res.samples.size(); ++s) {
      row.entropy_min = std::min(row.entropy_min, res.samples[s].entropy);
      if (s > 0)
        row.entropy_max_increase = std::max(
            row.entropy_max_increase, res.samples[s].entropy - res.samples[s - 1].entropy);
    }
    for (auto [q, dst] : {std::pair{GapQuantity::velocity, &row.lambda_u_fit},
                          std::pair{GapQuantity::temperature, &row.lambda_T_fit}}) {
      try {
        *dst = relaxation_rate_fit(gap_series(res.samples, system, k, q)).rate;
      } catch (const fit_degenerate &) {
      }
    }
  } catch (const error &e) {
    row.status = "failed";
    row.violations = e.what();
    std::replace(row.violations.begin(), row.violations.end(), ',', ';');
    std::replace(row.violations.begin(), row.violations.end(), '\n', ' ');
  }
  return row;
}

} // namespace detail

inline void write_sweep_csv(std::ostream &os, const std::string &param,
                            const std::vector<SweepRow> &rows,
                            std::string_view preamble = {}) {
  if (!preamble.empty())
    os << preamble << '\n';
  os << "index,parameter,value,status,tier,violations,lambda_u_fit,lambda_u_theory,"
        "lambda_T_fit,lambda_T_theory,entropy_min,entropy_max_increase,steps\n"
     << std::setprecision(17);
  for (const auto &r : rows)
    os << r.index << ',' << param << ',' << r.value << ',' << r.status << ','
       << to_string(r.tier) << ',' << r.violations << ',' << r.lambda_u_fit << ','
       << r.lambda_u_theory << ',' << r.lambda_T_fit << ',' << r.lambda_T_theory << ','
       << r.entropy_min << ',' << r.entropy_max_increase << ',' << r.steps << '\n';
}

/// Runs the samples on `jobs` worker threads; rows keep sample order.
inline std::vector<SweepRow> run_sweep(const Config &cfg, std::size_t pair,
                                       const std::string &param,
                                       const std::vector<double> &values,
                                       unsigned jobs) {
  std::vector<SweepRow> rows(values.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < values.size(); i = next++)
      rows[i] = detail::sweep_sample(cfg, pair, param, i, values[i]);
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(values.size())));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t)
    pool.emplace_back(worker);
  worker();
  for (auto &t : pool)
    t.join();
  return rows;
}

inline int cmd_sweep(const Options &o, std::ostream &out, std::ostream &err) {
  namespace fs = std::filesystem;
  RunManifest manifest;
  manifest.started_at = utc_timestamp();
  manifest.command = o.command_line;
  Config cfg;
  std::size_t pair = 0;
  try {
    cfg = detail::effective_config(o);
    const auto system = build_system(cfg, detail::warnings_to(err));
    pair = detail::select_pair(system, o.sweep_pair);
    PairParameters probe;
    (void)detail::parameter_ref(probe, o.sweep_parameter);
    fs::create_directories(o.out_dir);
  } catch (const error &e) {
    err << "error: " << e.what() << '\n';
    return bad_config;
  } catch (const fs::filesystem_error &e) {
    err << "error: " << e.what() << '\n';
    return bad_config;
  }
  manifest.config_hash = hex64(fnv1a(serialize_config(cfg)));
  const auto values = sweep_values(o.sweep_from, o.sweep_to, o.sweep_samples);
  const auto rows = run_sweep(cfg, pair, o.sweep_parameter, values, o.jobs);
  const fs::path dir(o.out_dir);
  const std::string preamble =
      "# fpmix " + std::string(version) + " manifest=manifest.json config_hash=" +
      manifest.config_hash;
  {
    std::ofstream os(dir / "sweep.csv");
    write_sweep_csv(os, o.sweep_parameter, rows, preamble);
  }
  write_sweep_csv(out, o.sweep_parameter, rows);
  manifest.outputs = {"sweep.csv", "manifest.json"};
  manifest.finished_at = utc_timestamp();
  detail::write_text(dir / "manifest.json", to_json(manifest).dump(2) + "\n");
  return ok;
}

// ---------------------------------------------------------------------------
// presets

inline int cmd_presets(const Options &o, std::ostream &out, std::ostream &err) {
  const auto &in = o.preset_inputs;
  if (!(in.m1 > 0.0) || !(in.m2 > 0.0) || in.d < 1 || in.d > 3) {
    err << "error: presets need positive masses and d in {1, 2, 3}\n";
    return bad_config;
  }
  json all = json::array();
  for (auto name : {PresetName::symmetric7, PresetName::hu, PresetName::gorji}) {
    json j{{"preset", to_string(name)}};
    try {
      const auto r = preset(name, in);
      const double mi = r.swapped ? in.m2 : in.m1;
      const double mj = r.swapped ? in.m1 : in.m2;
      j["swapped"] = r.swapped;
      j["parameters"] = to_json(r.params);
      j["tier"] = to_string(validate(r.params, mi, mj, in.d).tier);
      j["warnings"] = r.warnings;
      for (const auto &w : r.warnings)
        err << "warning: " << w << '\n';
    } catch (const error &e) {
      j["error"] = e.what();
    }
    all.push_back(j);
  }
  if (o.json_output) {
    out << all.dump(2) << '\n';
    return ok;
  }
  out << std::left << std::setw(12) << "preset" << std::setw(9) << "swapped"
      << std::setw(12) << "tier"
      << "parameters\n";
  for (const auto &j : all) {
    out << std::setw(12) << j["preset"].get<std::string>();
    if (j.contains("error")) {
      out << "error: " << j["error"].get<std::string>() << '\n';
      continue;
    }
    const auto &p = j["parameters"];
    out << std::setw(9) << (j["swapped"].get<bool>() ? "yes" : "no") << std::setw(12)
        << j["tier"].get<std::string>();
    for (const char *key : {"c_ij", "c_ji", "epsilon", "delta", "alpha", "gamma"})
      out << key << '=' << detail::fmt(p[key].get<double>()) << ' ';
    out << '\n';
  }
  return ok;
}

} // namespace fpmix::cli
