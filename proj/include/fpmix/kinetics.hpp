// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <iomanip>
#include <iostream>
#include <istream>
#include <numbers>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "moments.hpp"

namespace fpmix {

/// Densities at or below this are treated as an absent species.
inline constexpr double density_floor = 1e-30;

/// Receives non-fatal diagnostics (e.g. a Maxwellian that does not fit the
/// grid).
using WarningSink = std::function<void(std::string_view)>;

inline WarningSink stderr_warnings() {
  return [](std::string_view msg) { std::clog << "warning: " << msg << '\n'; };
}

/// Uniform, truncated velocity mesh. Only d = 1 is implemented; `dimension`
/// is carried so that formulas keep d explicit.
class VelocityGrid {
public:
  VelocityGrid() = default;

  VelocityGrid(double v_min, double v_max, std::size_t n_cells,
               int dimension = 1)
      : v_min_(v_min), v_max_(v_max), n_(n_cells), d_(dimension) {
    if (!(v_min < v_max))
      throw config_error("velocity grid needs v_min < v_max");
    if (n_cells < 2)
      throw config_error("velocity grid needs at least two cells");
    if (dimension != 1)
      throw config_error("only one velocity dimension is implemented");
    dv_ = (v_max - v_min) / static_cast<double>(n_cells);
  }

  double v_min() const noexcept { return v_min_; }
  double v_max() const noexcept { return v_max_; }
  std::size_t size() const noexcept { return n_; }
  int dimension() const noexcept { return d_; }
  double cell_width() const noexcept { return dv_; }

  /// Center of cell k.
  double center(std::size_t k) const noexcept {
    return v_min_ + (static_cast<double>(k) + 0.5) * dv_;
  }
  /// Face between cells k-1 and k (face 0 is v_min, face size() is v_max).
  double face(std::size_t k) const noexcept {
    return v_min_ + static_cast<double>(k) * dv_;
  }

  double max_abs_velocity() const noexcept {
    return std::max(std::abs(center(0)), std::abs(center(n_ - 1)));
  }

  friend bool operator==(const VelocityGrid &a, const VelocityGrid &b) {
    return a.v_min_ == b.v_min_ && a.v_max_ == b.v_max_ && a.n_ == b.n_ &&
           a.d_ == b.d_;
  }

private:
  double v_min_ = -1.0;
  double v_max_ = 1.0;
  std::size_t n_ = 2;
  int d_ = 1;
  double dv_ = 1.0;
};

/// Cell-averaged distribution values of every species at one time.
struct DistributionState {
  std::vector<std::vector<double>> f;
  double time = 0.0;

  std::size_t species_count() const noexcept { return f.size(); }

  friend bool operator==(const DistributionState &,
                         const DistributionState &) = default;
};

inline double density(std::span<const double> f, const VelocityGrid &grid) {
  double s = 0.0;
  for (double x : f)
    s += x;
  return s * grid.cell_width();
}

/// (n, u, T) by midpoint quadrature.
inline Moments moments(std::span<const double> f, const VelocityGrid &grid,
                       double mass) {
  if (f.size() != grid.size())
    throw error("distribution size does not match the velocity grid");
  const double dv = grid.cell_width();
  double n = 0.0, nu = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    n += f[k];
    nu += grid.center(k) * f[k];
  }
  n *= dv;
  nu *= dv;
  if (!(n > density_floor))
    throw zero_density_error("distribution has zero density");
  const double u = nu / n;
  double s = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double c = grid.center(k) - u;
    s += c * c * f[k];
  }
  const int d = grid.dimension();
  return {n, u, mass * s * dv / (d * n)};
}

/// Raw discrete moments sum f dv, sum v f dv, sum |v|^2 f dv.
struct RawMoments {
  double m0 = 0.0;
  double m1 = 0.0;
  double m2 = 0.0;
};

inline RawMoments raw_moments(std::span<const double> f,
                              const VelocityGrid &grid) {
  RawMoments r;
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double v = grid.center(k);
    r.m0 += f[k];
    r.m1 += v * f[k];
    r.m2 += v * v * f[k];
  }
  const double dv = grid.cell_width();
  r.m0 *= dv;
  r.m1 *= dv;
  r.m2 *= dv;
  return r;
}

/// Raw moments implied by (n, u, T) for particle mass m.
inline RawMoments raw_moments(const Moments &m, double mass, int d = 1) {
  return {m.n, m.n * m.u, m.n * (d * m.T / mass + m.u * m.u)};
}

/// Number of thermal widths sqrt(T/m) the grid extends beyond u on the
/// tighter side.
inline double support_margin(const VelocityGrid &grid, double u, double T,
                             double mass) {
  const double sigma = std::sqrt(T / mass);
  return std::min(u - grid.v_min(), grid.v_max() - u) / sigma;
}

/// Maxwellian sampled at the cell centers:
/// n / sqrt(2 pi T/m)^d exp(-|v - u|^2 / (2 T/m)).
///
/// Warns through `warn` when the 6-sigma support leaves the grid.
inline std::vector<double> maxwellian(double n, double u, double T,
                                      double mass, const VelocityGrid &grid,
                                      const WarningSink &warn = {}) {
  if (!(n > 0.0) || !(T > 0.0) || !(mass > 0.0))
    throw error("maxwellian needs n > 0, T > 0 and m > 0");
  if (warn && support_margin(grid, u, T, mass) < 6.0) {
    std::ostringstream msg;
    msg << "Maxwellian (u=" << u << ", T/m=" << T / mass
        << ") is truncated by the velocity grid [" << grid.v_min() << ", "
        << grid.v_max() << "]";
    warn(msg.str());
  }
  const double D = T / mass;
  const int d = grid.dimension();
  const double norm = n / std::pow(std::sqrt(2.0 * std::numbers::pi * D), d);
  std::vector<double> f(grid.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double c = grid.center(k) - u;
    f[k] = norm * std::exp(-c * c / (2.0 * D));
  }
  return f;
}

inline std::vector<double> maxwellian(const Moments &m, double mass,
                                      const VelocityGrid &grid,
                                      const WarningSink &warn = {}) {
  return maxwellian(m.n, m.u, m.T, mass, grid, warn);
}

/// H(f) = sum f ln f dv with 0 ln 0 = 0.
inline double entropy(std::span<const double> f, const VelocityGrid &grid) {
  double s = 0.0;
  for (double x : f)
    if (x > 0.0)
      s += x * std::log(x);
  return s * grid.cell_width();
}

inline double l1_distance(std::span<const double> a, std::span<const double> b,
                          const VelocityGrid &grid) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k)
    s += std::abs(a[k] - b[k]);
  return s * grid.cell_width();
}

/// L1 distance of f to the Maxwellian with f's own moments.
inline double distance_to_own_maxwellian(std::span<const double> f,
                                         const VelocityGrid &grid,
                                         double mass) {
  const auto m = moments(f, grid, mass);
  const auto M = maxwellian(m, mass, grid);
  return l1_distance(f, M, grid);
}

// ---------------------------------------------------------------------------
// Snapshot CSV: v, f_<label1>, f_<label2>, ...

inline void write_snapshot_csv(std::ostream &os, const VelocityGrid &grid,
                               const DistributionState &state,
                               const std::vector<std::string> &labels,
                               std::string_view preamble = {}) {
  if (!preamble.empty())
    os << preamble << '\n';
  os << "v";
  for (std::size_t s = 0; s < state.f.size(); ++s)
    os << ",f_" << (s < labels.size() ? labels[s] : std::to_string(s + 1));
  os << '\n';
  os << std::setprecision(17);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    os << grid.center(k);
    for (const auto &fs : state.f)
      os << ',' << fs[k];
    os << '\n';
  }
}

/// Reads the body written by write_snapshot_csv; lines starting with '#'
/// are skipped. Returns the species columns in file order.
inline DistributionState read_snapshot_csv(std::istream &is) {
  DistributionState st;
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    if (!header) {
      header = true;
      std::size_t cols = 0;
      for (char c : line)
        cols += c == ',';
      st.f.assign(cols, {});
      continue;
    }
    std::istringstream row(line);
    std::string cell;
    std::getline(row, cell, ','); // v
    for (auto &fs : st.f) {
      if (!std::getline(row, cell, ','))
        throw error("snapshot row has too few columns");
      fs.push_back(std::stod(cell));
    }
  }
  return st;
}

} // namespace fpmix
