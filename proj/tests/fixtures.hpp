// SPDX-License-Identifier: Apache-2.0
#pragma once

// Mixtures shared by the unit tests and the acceptance suite.

#include <optional>
#include <string>
#include <vector>

#include "fpmix/kinetics.hpp"
#include "fpmix/nspecies.hpp"
#include "fpmix/params.hpp"

namespace fpmix::testing {

inline SpeciesEntry species(std::string label, double mass, double c_self = 1.0) {
  return {SpeciesSpec{mass, std::move(label)}, c_self};
}

inline PairEntry explicit_pair(std::size_t a, std::size_t b, const PairParameters &p) {
  return {a, b, PairSpec{std::nullopt, p}};
}

inline PairEntry preset_pair(std::size_t a, std::size_t b, PresetName name, double c_ij,
                             double c_ji = 0.0) {
  PairParameters p;
  p.c_ij = c_ij;
  p.c_ji = c_ji;
  return {a, b, PairSpec{name, p}};
}

/// Heavy (m = 2) and light (m = 1) species coupled by the symmetric7 preset
/// with c_ij = 1, self rates 1.
inline MixtureSystem two_species_system(const VelocityGrid &grid) {
  return MixtureSystem(grid, {species("heavy", 2.0), species("light", 1.0)},
                       {preset_pair(0, 1, PresetName::symmetric7, 1.0)});
}

inline DistributionState maxwellian_state(const MixtureSystem &system,
                                          const std::vector<Moments> &m) {
  DistributionState st;
  for (std::size_t i = 0; i < m.size(); ++i)
    st.f.push_back(m[i].n > 0.0
                       ? maxwellian(m[i].n, m[i].u, m[i].T, system.mass(i), system.grid())
                       : std::vector<double>(system.grid().size(), 0.0));
  return st;
}

/// n = 1 for both, u = +-0.5, T = 1 and 2.
inline std::vector<Moments> acceptance_moments() {
  return {{1.0, 0.5, 1.0}, {1.0, -0.5, 2.0}};
}

} // namespace fpmix::testing
