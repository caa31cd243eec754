// SPDX-License-Identifier: Apache-2.0
#pragma once

// INI-style run configuration:
//
//   [grid]            v_min, v_max, cells, dimension
//   [species:LABEL]   mass, c_self, density, velocity, temperature
//   [pair:A:B]        preset | (c_ij, c_ji, delta, alpha, gamma)
//   [run]             dt, t_end, output_every, scheme, correct_moments,
//                     stop_at_equilibrium, equilibrium_threshold, tier
//   [space]           cells, x_min, x_max, perturbation   (optional)
//
// Species keep the order of their sections. Pairs name their species by
// label; the first label takes role 1 unless a preset reorders them.

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <iterator>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "errors.hpp"
#include "kinetics.hpp"
#include "nspecies.hpp"
#include "params.hpp"
#include "timeloop.hpp"

namespace fpmix {

struct GridConfig {
  double v_min = -12.0;
  double v_max = 12.0;
  std::size_t cells = 256;
  int dimension = 1;

  friend bool operator==(const GridConfig &, const GridConfig &) = default;
};

struct SpeciesConfig {
  std::string label;
  double mass = 1.0;
  double c_self = 1.0;
  double density = 1.0;
  double velocity = 0.0;
  double temperature = 1.0;

  friend bool operator==(const SpeciesConfig &, const SpeciesConfig &) = default;
};

struct PairConfig {
  std::string first;
  std::string second;
  std::optional<PresetName> preset;
  PairParameters params; ///< c_ij, c_ji always; the rest only without preset

  friend bool operator==(const PairConfig &, const PairConfig &) = default;
};

struct SpaceConfig {
  SpatialSpec spec;
  /// Initial densities n_i (1 + perturbation cos(2 pi (x - x_min) / L)).
  double perturbation = 0.0;

  friend bool operator==(const SpaceConfig &, const SpaceConfig &) = default;
};

struct Config {
  GridConfig grid;
  std::vector<SpeciesConfig> species;
  std::vector<PairConfig> pairs;
  RunSettings run;
  std::optional<SpaceConfig> space;

  friend bool operator==(const Config &, const Config &) = default;
};

namespace detail {

using boost::property_tree::ptree;

inline double to_double(const std::string &key, const std::string &text) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception &) {
    throw config_error("'" + key + "': not a number: '" + text + "'");
  }
  while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
    ++pos;
  if (pos != text.size())
    throw config_error("'" + key + "': trailing characters in '" + text + "'");
  return v;
}

inline std::size_t to_count(const std::string &key, const std::string &text) {
  const double v = to_double(key, text);
  if (!(v >= 0.0) || v != std::floor(v) || v > 1e15)
    throw config_error("'" + key + "': expected a non-negative integer");
  return static_cast<std::size_t>(v);
}

inline bool to_bool(const std::string &key, const std::string &text) {
  if (text == "true" || text == "yes" || text == "on" || text == "1")
    return true;
  if (text == "false" || text == "no" || text == "off" || text == "0")
    return false;
  throw config_error("'" + key + "': expected true or false");
}

/// Fails on keys outside `allowed` so that typos are not silently ignored.
inline void check_keys(const std::string &section, const ptree &t,
                       std::initializer_list<std::string_view> allowed) {
  for (const auto &[key, _] : t) {
    bool ok = false;
    for (auto a : allowed)
      ok = ok || key == a;
    if (!ok)
      throw config_error("[" + section + "]: unknown key '" + key + "'");
  }
}

inline std::vector<std::string> split(const std::string &s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

/// Section names in file order. The INI reader drops sections without keys,
/// which are valid here and mean "all defaults".
inline std::vector<std::string> section_names(const std::string &text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    const auto e = line.find_last_not_of(" \t\r");
    if (b == std::string::npos || line[b] != '[' || line[e] != ']')
      continue;
    out.push_back(line.substr(b + 1, e - b - 1));
  }
  return out;
}

} // namespace detail

inline Config parse_config(std::istream &is) {
  using detail::ptree;
  const std::string text{std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
  const auto names = detail::section_names(text);
  std::set<std::string> unique;
  for (const auto &n : names)
    if (!unique.insert(n).second)
      throw config_error("duplicate section [" + n + "]");
  ptree root;
  try {
    std::istringstream in(text);
    boost::property_tree::ini_parser::read_ini(in, root);
  } catch (const boost::property_tree::ini_parser_error &e) {
    throw config_error(e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  for (const auto &[name, sec] : root)
    if (!sec.data().empty())
      throw config_error("key '" + name + "' outside of a section");
  const ptree empty;
  Config cfg;
  bool have_grid = false, have_run = false;
  std::vector<std::pair<std::string, const ptree *>> pair_sections;
  for (const auto &name : names) {
    const auto child = root.get_child_optional(ptree::path_type(name, '\0'));
    const ptree &sec = child ? *child : empty;
    auto get = [&sec, &name](const char *key) -> std::optional<std::string> {
      if (auto v = sec.get_child_optional(ptree::path_type(key, '\0')))
        return v->data();
      (void)name;
      return std::nullopt;
    };
    auto num = [&](const char *key, double &out) {
      if (auto v = get(key))
        out = detail::to_double(name + "." + key, *v);
    };
    if (name == "grid") {
      have_grid = true;
      detail::check_keys(name, sec, {"v_min", "v_max", "cells", "dimension"});
      num("v_min", cfg.grid.v_min);
      num("v_max", cfg.grid.v_max);
      if (auto v = get("cells"))
        cfg.grid.cells = detail::to_count(name + ".cells", *v);
      if (auto v = get("dimension"))
        cfg.grid.dimension = static_cast<int>(detail::to_count(name + ".dimension", *v));
    } else if (name.rfind("species:", 0) == 0) {
      detail::check_keys(name, sec,
                         {"mass", "c_self", "density", "velocity", "temperature"});
      SpeciesConfig s;
      s.label = name.substr(8);
      if (s.label.empty() || s.label.find(':') != std::string::npos)
        throw config_error("[" + name + "]: invalid species label");
      if (!get("mass"))
        throw config_error("[" + name + "]: mass is required");
      num("mass", s.mass);
      num("c_self", s.c_self);
      num("density", s.density);
      num("velocity", s.velocity);
      num("temperature", s.temperature);
      cfg.species.push_back(s);
    } else if (name.rfind("pair:", 0) == 0) {
      pair_sections.emplace_back(name, &sec);
    } else if (name == "run") {
      have_run = true;
      detail::check_keys(name, sec,
                         {"dt", "t_end", "output_every", "scheme", "correct_moments",
                          "stop_at_equilibrium", "equilibrium_threshold", "tier"});
      num("dt", cfg.run.dt);
      num("t_end", cfg.run.t_end);
      num("equilibrium_threshold", cfg.run.equilibrium_threshold);
      if (auto v = get("output_every"))
        cfg.run.output_every = detail::to_count(name + ".output_every", *v);
      if (auto v = get("scheme"))
        cfg.run.scheme = scheme_from_string(*v);
      if (auto v = get("correct_moments"))
        cfg.run.correct_moments = detail::to_bool(name + ".correct_moments", *v);
      if (auto v = get("stop_at_equilibrium"))
        cfg.run.stop_at_equilibrium = detail::to_bool(name + ".stop_at_equilibrium", *v);
      if (auto v = get("tier"))
        cfg.run.required_tier = tier_from_string(*v);
    } else if (name == "space") {
      detail::check_keys(name, sec, {"cells", "x_min", "x_max", "perturbation"});
      SpaceConfig sp;
      if (auto v = get("cells"))
        sp.spec.x_cells = detail::to_count(name + ".cells", *v);
      num("x_min", sp.spec.x_min);
      num("x_max", sp.spec.x_max);
      num("perturbation", sp.perturbation);
      cfg.space = sp;
    } else {
      throw config_error("unknown section [" + name + "]");
    }
  }
  if (!have_grid)
    throw config_error("missing [grid] section");
  if (!have_run)
    throw config_error("missing [run] section");

  std::set<std::string> labels;
  for (const auto &s : cfg.species)
    if (!labels.insert(s.label).second)
      throw config_error("species '" + s.label + "' defined twice");

  for (const auto &[name, sec] : pair_sections) {
    detail::check_keys(name, *sec,
                       {"preset", "c_ij", "c_ji", "delta", "alpha", "gamma"});
    const auto parts = detail::split(name, ':');
    if (parts.size() != 3)
      throw config_error("[" + name + "]: expected [pair:A:B]");
    PairConfig p;
    p.first = parts[1];
    p.second = parts[2];
    for (const auto &l : {p.first, p.second})
      if (!labels.count(l))
        throw config_error("[" + name + "]: unknown species '" + l + "'");
    auto get = [&](const char *key) -> std::optional<std::string> {
      if (auto v = sec->get_child_optional(ptree::path_type(key, '\0')))
        return v->data();
      return std::nullopt;
    };
    auto num = [&](const char *key, double &out) {
      if (auto v = get(key))
        out = detail::to_double(name + "." + key, *v);
    };
    if (auto v = get("preset")) {
      p.preset = preset_from_string(*v);
      for (const char *k : {"delta", "alpha", "gamma"})
        if (get(k))
          throw config_error("[" + name + "]: '" + k + "' conflicts with preset");
    }
    if (!get("c_ij"))
      throw config_error("[" + name + "]: c_ij is required");
    num("c_ij", p.params.c_ij);
    if (!get("c_ji") && !(p.preset && *p.preset == PresetName::symmetric7))
      throw config_error("[" + name + "]: c_ji is required");
    num("c_ji", p.params.c_ji);
    num("delta", p.params.delta);
    num("alpha", p.params.alpha);
    num("gamma", p.params.gamma);
    cfg.pairs.push_back(p);
  }
  return cfg;
}

inline Config parse_config(std::string_view text) {
  std::istringstream is{std::string(text)};
  return parse_config(is);
}

inline Config load_config(const std::string &path) {
  std::ifstream is(path);
  if (!is)
    throw config_error("cannot read config '" + path + "'");
  return parse_config(is);
}

/// Canonical text form; every number carries 17 significant digits.
inline std::string serialize_config(const Config &cfg) {
  using detail::fmt;
  std::ostringstream os;
  os << "[grid]\n"
     << "v_min = " << fmt(cfg.grid.v_min) << '\n'
     << "v_max = " << fmt(cfg.grid.v_max) << '\n'
     << "cells = " << cfg.grid.cells << '\n'
     << "dimension = " << cfg.grid.dimension << '\n';
  for (const auto &s : cfg.species)
    os << "\n[species:" << s.label << "]\n"
       << "mass = " << fmt(s.mass) << '\n'
       << "c_self = " << fmt(s.c_self) << '\n'
       << "density = " << fmt(s.density) << '\n'
       << "velocity = " << fmt(s.velocity) << '\n'
       << "temperature = " << fmt(s.temperature) << '\n';
  for (const auto &p : cfg.pairs) {
    os << "\n[pair:" << p.first << ':' << p.second << "]\n";
    if (p.preset)
      os << "preset = " << to_string(*p.preset) << '\n';
    os << "c_ij = " << fmt(p.params.c_ij) << '\n'
       << "c_ji = " << fmt(p.params.c_ji) << '\n';
    if (!p.preset)
      os << "delta = " << fmt(p.params.delta) << '\n'
         << "alpha = " << fmt(p.params.alpha) << '\n'
         << "gamma = " << fmt(p.params.gamma) << '\n';
  }
  const auto &r = cfg.run;
  os << "\n[run]\n"
     << "dt = " << fmt(r.dt) << '\n'
     << "t_end = " << fmt(r.t_end) << '\n'
     << "output_every = " << r.output_every << '\n'
     << "scheme = " << to_string(r.scheme) << '\n'
     << "correct_moments = " << (r.correct_moments ? "true" : "false") << '\n'
     << "stop_at_equilibrium = " << (r.stop_at_equilibrium ? "true" : "false") << '\n'
     << "equilibrium_threshold = " << fmt(r.equilibrium_threshold) << '\n'
     << "tier = " << to_string(r.required_tier) << '\n';
  if (cfg.space)
    os << "\n[space]\n"
       << "cells = " << cfg.space->spec.x_cells << '\n'
       << "x_min = " << fmt(cfg.space->spec.x_min) << '\n'
       << "x_max = " << fmt(cfg.space->spec.x_max) << '\n'
       << "perturbation = " << fmt(cfg.space->perturbation) << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------
// Building the simulation objects

inline VelocityGrid make_grid(const GridConfig &g) {
  return {g.v_min, g.v_max, g.cells, g.dimension};
}

inline std::size_t species_index(const Config &cfg, const std::string &label) {
  for (std::size_t i = 0; i < cfg.species.size(); ++i)
    if (cfg.species[i].label == label)
      return i;
  throw config_error("unknown species '" + label + "'");
}

inline MixtureSystem build_system(const Config &cfg, const WarningSink &warn = {}) {
  std::vector<SpeciesEntry> species;
  for (const auto &s : cfg.species)
    species.push_back({{s.mass, s.label}, s.c_self});
  std::vector<PairEntry> pairs;
  for (const auto &p : cfg.pairs)
    pairs.push_back({species_index(cfg, p.first), species_index(cfg, p.second),
                     {p.preset, p.params}});
  return {make_grid(cfg.grid), std::move(species), std::move(pairs), warn};
}

/// Maxwellians at the configured moments; species with zero density start
/// empty.
inline DistributionState initial_state(const Config &cfg, const VelocityGrid &grid,
                                       const WarningSink &warn = {},
                                       double density_factor = 1.0) {
  DistributionState st;
  for (const auto &s : cfg.species) {
    const double n = s.density * density_factor;
    if (n < 0.0)
      throw config_error("species '" + s.label + "' has negative density");
    if (n == 0.0)
      st.f.emplace_back(grid.size(), 0.0);
    else
      st.f.push_back(maxwellian(n, s.velocity, s.temperature, s.mass, grid, warn));
  }
  return st;
}

inline SpatialState initial_spatial_state(const Config &cfg, const VelocityGrid &grid,
                                          const WarningSink &warn = {}) {
  if (!cfg.space)
    throw config_error("config has no [space] section");
  const auto &sp = *cfg.space;
  if (sp.spec.x_cells == 0 || !(sp.spec.x_min < sp.spec.x_max))
    throw config_error("[space] needs cells > 0 and x_min < x_max");
  if (!(std::abs(sp.perturbation) < 1.0))
    throw config_error("[space] perturbation must lie in (-1, 1)");
  SpatialState st;
  st.dx = sp.spec.dx();
  const double L = sp.spec.x_max - sp.spec.x_min;
  for (std::size_t j = 0; j < sp.spec.x_cells; ++j) {
    const double x = sp.spec.center(j) - sp.spec.x_min;
    const double factor = 1.0 + sp.perturbation * std::cos(2.0 * std::numbers::pi * x / L);
    st.cells.push_back(initial_state(cfg, grid, j == 0 ? warn : WarningSink{}, factor));
  }
  return st;
}

/// Moments the configuration prescribes for species i.
inline Moments configured_moments(const SpeciesConfig &s) {
  return {s.density, s.velocity, s.temperature};
}

} // namespace fpmix
