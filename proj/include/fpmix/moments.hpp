// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace fpmix {

/// Number density, mean velocity and temperature of one species.
///
/// Temperatures are in energy units (k_B absorbed), so T/m is a squared
/// velocity. Velocities are scalar because the velocity grid is 1-D; the
/// closure algebra in params.hpp is written for any velocity type.
struct Moments {
  double n = 0.0;
  double u = 0.0;
  double T = 0.0;
};

} // namespace fpmix
