// SPDX-License-Identifier: Apache-2.0
#pragma once

// Output writers: series CSV, diagnostics JSON and the run manifest.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "diagnostics.hpp"
#include "nspecies.hpp"
#include "params.hpp"
#include "timeloop.hpp"

#ifndef FPMIX_VERSION
#define FPMIX_VERSION "0.1.0"
#endif

namespace fpmix {

using json = nlohmann::json;

inline constexpr std::string_view version = FPMIX_VERSION;

/// 64-bit FNV-1a.
inline std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t x) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << x;
  return os.str();
}

/// Current UTC time as ISO 8601 with seconds.
inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

struct RunManifest {
  std::string config_hash;
  std::string started_at;
  std::string finished_at;
  std::vector<std::string> outputs;
  std::string version{fpmix::version};
  std::string command;
  int exit_code = 0;
  std::string error;
};

inline json to_json(const RunManifest &m) {
  json j{{"config_hash", m.config_hash}, {"started_at", m.started_at},
         {"finished_at", m.finished_at}, {"outputs", m.outputs},
         {"version", m.version},         {"command", m.command},
         {"exit_code", m.exit_code}};
  if (!m.error.empty())
    j["error"] = m.error;
  return j;
}

/// JSON cannot carry NaN or infinity; those become null.
inline json number(double x) {
  return std::isfinite(x) ? json(x) : json(nullptr);
}

inline json to_json(const Moments &m) {
  return {{"n", number(m.n)}, {"u", number(m.u)}, {"T", number(m.T)}};
}

inline json to_json(const PairParameters &p) {
  return {{"c_ij", number(p.c_ij)},   {"c_ji", number(p.c_ji)},
          {"epsilon", number(p.epsilon())}, {"delta", number(p.delta)},
          {"alpha", number(p.alpha)}, {"gamma", number(p.gamma)}};
}

inline json to_json(const ValidationReport &r) {
  json checks = json::array();
  for (const auto &c : r.checks)
    checks.push_back({{"id", c.id},
                      {"tier", to_string(c.tier)},
                      {"satisfied", c.satisfied},
                      {"residual", number(c.residual)},
                      {"message", c.message}});
  return {{"tier", to_string(r.tier)}, {"checks", checks}};
}

inline json to_json(const ExchangeReport &e) {
  return {{"f_m_analytic", number(e.f_m_analytic)},
          {"f_m_numeric", number(e.f_m_numeric)},
          {"f_m_residual", number(e.momentum_residual())},
          {"F_E_analytic", number(e.F_E_analytic)},
          {"F_E_numeric", number(e.F_E_numeric)},
          {"F_E_residual", number(e.energy_residual())},
          {"mass_rate", number(e.mass_rate)}};
}

inline json to_json(const InequalitySides &s) {
  return {{"lhs", number(s.lhs)},
          {"rhs", number(s.rhs)},
          {"slack", number(s.slack())},
          {"holds", s.holds()}};
}

inline json to_json(const EntropyReport &r, const MixtureSystem &system) {
  json pairs = json::array();
  for (const auto &t : r.pairs) {
    const auto &pe = system.pairs()[t.pair];
    pairs.push_back({{"pair", system.label(pe.first) + ":" + system.label(pe.second)},
                     {"fisher_12", number(t.fisher_12)},
                     {"fisher_21", number(t.fisher_21)},
                     {"moment_12", number(t.moment_12)},
                     {"moment_21", number(t.moment_21)},
                     {"constant", number(t.constant)},
                     {"moment_balance", number(t.moment_balance())},
                     {"lemma_temperature_products", to_json(t.lemma_temperature)},
                     {"lemma_heating_products", to_json(t.lemma_heating)},
                     {"lemma_cross_terms", to_json(t.lemma_cross)}});
  }
  return {{"H", number(r.H)},
          {"dH_dt_numeric", number(r.dH_dt_numeric)},
          {"lemmas_hold", r.lemmas_hold},
          {"moment_balance_nonpositive", r.moment_balance_nonpositive},
          {"pairs", pairs}};
}

inline std::string pair_name(const MixtureSystem &system, std::size_t k) {
  const auto &pe = system.pairs()[k];
  return system.label(pe.first) + "_" + system.label(pe.second);
}

// ---------------------------------------------------------------------------
// CSV

/// Homogeneous series: t, step, n/u/T per species, totals, entropy,
/// change rate and the analytic/numeric exchange terms of every pair.
inline void write_series_csv(std::ostream &os, const std::vector<Sample> &samples,
                             const MixtureSystem &system,
                             std::string_view preamble = {}) {
  if (!preamble.empty())
    os << preamble << '\n';
  os << "t,step";
  for (std::size_t i = 0; i < system.size(); ++i) {
    const auto &l = system.label(i);
    os << ",n_" << l << ",u_" << l << ",T_" << l;
  }
  os << ",momentum,energy,entropy,change_rate";
  for (std::size_t k = 0; k < system.pairs().size(); ++k) {
    const auto p = pair_name(system, k);
    os << ",f_m_analytic_" << p << ",f_m_numeric_" << p << ",F_E_analytic_" << p
       << ",F_E_numeric_" << p;
  }
  os << '\n' << std::setprecision(17);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto &s : samples) {
    os << s.t << ',' << s.step;
    for (const auto &m : s.moments) {
      if (m)
        os << ',' << m->n << ',' << m->u << ',' << m->T;
      else
        os << ",0," << nan << ',' << nan;
    }
    os << ',' << s.totals.momentum << ',' << s.totals.energy << ',' << s.entropy
       << ',' << s.change_rate;
    for (const auto &e : s.exchange) {
      if (e)
        os << ',' << e->f_m_analytic << ',' << e->f_m_numeric << ','
           << e->F_E_analytic << ',' << e->F_E_numeric;
      else
        os << ",0,0,0,0";
    }
    os << '\n';
  }
}

inline void write_spatial_series_csv(std::ostream &os,
                                     const std::vector<SpatialSample> &samples,
                                     const MixtureSystem &system,
                                     std::string_view preamble = {}) {
  if (!preamble.empty())
    os << preamble << '\n';
  os << "t,step";
  for (std::size_t i = 0; i < system.size(); ++i)
    os << ",mass_" << system.label(i);
  os << ",momentum,energy,entropy,entropy_change_transport,"
        "entropy_change_collision\n"
     << std::setprecision(17);
  for (const auto &s : samples) {
    os << s.t << ',' << s.step;
    for (double m : s.mass)
      os << ',' << m;
    os << ',' << s.momentum << ',' << s.energy << ',' << s.entropy << ','
       << s.entropy_change_transport << ',' << s.entropy_change_collision << '\n';
  }
}

/// One object per sample and pair: inputs, analytic, numeric, residuals.
inline json exchange_samples_json(const std::vector<Sample> &samples,
                                  const MixtureSystem &system) {
  json out = json::array();
  for (const auto &s : samples)
    for (std::size_t k = 0; k < s.exchange.size(); ++k) {
      if (!s.exchange[k])
        continue;
      const auto &pe = system.pairs()[k];
      out.push_back({{"t", number(s.t)},
                     {"step", s.step},
                     {"pair", pair_name(system, k)},
                     {"inputs",
                      {{"first", to_json(*s.moments[pe.first])},
                       {"second", to_json(*s.moments[pe.second])}}},
                     {"exchange", to_json(*s.exchange[k])}});
    }
  return out;
}

} // namespace fpmix
