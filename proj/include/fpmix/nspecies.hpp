// SPDX-License-Identifier: Apache-2.0
#pragma once

// N-species mixture with binary interactions only: species i feels its own
// operator plus one interspecies operator per partner j, each pair carrying
// its own (alpha, delta, gamma, c_ij, c_ji).

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "kinetics.hpp"
#include "operator.hpp"
#include "params.hpp"

namespace fpmix {

struct SpeciesEntry {
  SpeciesSpec spec;
  double c_self = 0.0; ///< friction constant c_ii
};

/// Parameters of one unordered pair, stored in the orientation (first,
/// second) that plays roles (1, 2) of the closure.
struct PairSpec {
  std::optional<PresetName> preset; ///< when set, re-derived every step
  PairParameters params;            ///< explicit values; for presets only
                                    ///< c_ij / c_ji are read
};

struct PairEntry {
  std::size_t first = 0;
  std::size_t second = 1;
  PairSpec spec;
};

/// Per-species moments; nullopt for species without particles.
using MomentsList = std::vector<std::optional<Moments>>;

class MixtureSystem {
public:
  MixtureSystem() = default;

  /// Checks that every unordered pair appears exactly once and normalizes
  /// the orientation of preset pairs (reported through `warn`).
  MixtureSystem(VelocityGrid grid, std::vector<SpeciesEntry> species,
                std::vector<PairEntry> pairs, const WarningSink &warn = {})
      : grid_(std::move(grid)), species_(std::move(species)),
        pairs_(std::move(pairs)) {
    const std::size_t n = species_.size();
    if (n == 0)
      throw config_error("mixture needs at least one species");
    for (const auto &s : species_)
      if (!(s.spec.mass > 0.0))
        throw config_error("species '" + s.spec.label + "' needs mass > 0");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (auto &p : pairs_) {
      if (p.first >= n || p.second >= n || p.first == p.second)
        throw config_error("pair refers to an invalid species index");
      const auto key = std::minmax(p.first, p.second);
      if (!seen.insert(key).second)
        throw config_error("pair (" + label(p.first) + ", " + label(p.second) +
                           ") given twice");
      if (p.spec.preset)
        normalize(p, warn);
    }
    if (seen.size() != n * (n - 1) / 2)
      throw config_error("every pair of species needs one parameter set");
  }

  const VelocityGrid &grid() const noexcept { return grid_; }
  int dimension() const noexcept { return grid_.dimension(); }
  std::size_t size() const noexcept { return species_.size(); }
  const std::vector<SpeciesEntry> &species() const noexcept { return species_; }
  const std::vector<PairEntry> &pairs() const noexcept { return pairs_; }
  double mass(std::size_t i) const { return species_.at(i).spec.mass; }
  const std::string &label(std::size_t i) const { return species_.at(i).spec.label; }

  /// Parameters of pair `k` at the given moments of its two species.
  PairParameters resolve(std::size_t k, const Moments &first,
                         const Moments &second) const {
    const auto &p = pairs_.at(k);
    if (!p.spec.preset)
      return p.spec.params;
    PresetInputs in{mass(p.first),      mass(p.second),     first.n,
                    second.n,           p.spec.params.c_ij, p.spec.params.c_ji,
                    dimension()};
    return preset(*p.spec.preset, in).params;
  }

  ValidationReport validate_pair(std::size_t k, const Moments &first,
                                 const Moments &second) const {
    const auto &p = pairs_.at(k);
    return validate(resolve(k, first, second), mass(p.first), mass(p.second),
                    dimension());
  }

private:
  void normalize(PairEntry &p, const WarningSink &warn) {
    PresetInputs in{mass(p.first),      mass(p.second),     1.0, 1.0,
                    p.spec.params.c_ij, p.spec.params.c_ji, dimension()};
    const auto r = preset(*p.spec.preset, in);
    if (r.swapped) {
      std::swap(p.first, p.second);
      if (warn)
        warn("pair (" + label(p.second) + ", " + label(p.first) + "): " +
             r.warnings.front());
    }
    p.spec.params.c_ij = r.params.c_ij;
    p.spec.params.c_ji = r.params.c_ji;
  }

  VelocityGrid grid_;
  std::vector<SpeciesEntry> species_;
  std::vector<PairEntry> pairs_;
};

inline MomentsList species_moments(const DistributionState &state,
                                   const MixtureSystem &system) {
  MomentsList out(state.f.size());
  for (std::size_t i = 0; i < state.f.size(); ++i)
    if (density(state.f[i], system.grid()) > density_floor)
      out[i] = moments(state.f[i], system.grid(), system.mass(i));
  return out;
}

/// Contexts acting on each species at the given moments: the intra context
/// first, then one per partner in pair order. Absent species get none, and
/// pairs with an absent member contribute nothing.
struct SpeciesContexts {
  std::vector<CollisionContext> contexts;
  std::vector<std::optional<std::size_t>> pair_index; ///< nullopt for intra
};

inline std::vector<SpeciesContexts>
build_contexts(const MixtureSystem &system, const MomentsList &m,
               Tier required = Tier::conservation_only) {
  std::vector<SpeciesContexts> out(system.size());
  const int d = system.dimension();
  for (std::size_t i = 0; i < system.size(); ++i)
    if (m[i]) {
      out[i].contexts.push_back(
          intra_context(*m[i], system.mass(i), system.species()[i].c_self));
      out[i].pair_index.push_back(std::nullopt);
    }
  for (std::size_t k = 0; k < system.pairs().size(); ++k) {
    const auto &p = system.pairs()[k];
    if (!m[p.first] || !m[p.second])
      continue;
    const auto params = system.resolve(k, *m[p.first], *m[p.second]);
    const double ma = system.mass(p.first), mb = system.mass(p.second);
    out[p.first].contexts.push_back(inter_context(
        params, PairRole::first, *m[p.first], *m[p.second], ma, mb, d, required));
    out[p.first].pair_index.push_back(k);
    out[p.second].contexts.push_back(inter_context(
        params, PairRole::second, *m[p.first], *m[p.second], ma, mb, d, required));
    out[p.second].pair_index.push_back(k);
  }
  return out;
}

/// Right-hand side of every species: intra operator plus the sum over
/// partners.
inline std::vector<std::vector<double>>
assemble_rhs(const DistributionState &state, const MixtureSystem &system) {
  const auto &grid = system.grid();
  const auto m = species_moments(state, system);
  const auto ctx = build_contexts(system, m);
  std::vector<std::vector<double>> rhs(state.f.size(),
                                       std::vector<double>(grid.size(), 0.0));
  for (std::size_t i = 0; i < state.f.size(); ++i)
    for (const auto &c : ctx[i].contexts) {
      const auto r = fokker_planck_rhs(state.f[i], c, grid);
      for (std::size_t k = 0; k < r.size(); ++k)
        rhs[i][k] += r[k];
    }
  return rhs;
}

inline double total_entropy(const DistributionState &state,
                            const MixtureSystem &system) {
  double h = 0.0;
  for (const auto &f : state.f)
    h += entropy(f, system.grid());
  return h;
}

} // namespace fpmix
