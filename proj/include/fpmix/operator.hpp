// SPDX-License-Identifier: Apache-2.0
#pragma once

// Drift-diffusion collision operator
//
//   Q f = rate * d/dv ( (T/m) df/dv + (v - u) f )
//
// in conservative finite-volume form. Face fluxes use Chang-Cooper
// (exponentially fitted) weighting, written with the Bernoulli function
// B(x) = x / (e^x - 1):
//
//   J_{k+1/2} = (D/dv) [ B(-x) f_{k+1} - B(x) f_k ],  x = (v_{k+1/2} - u) dv / D
//
// which equals D (f_{k+1} - f_k)/dv + (v_{k+1/2} - u) (w f_k + (1-w) f_{k+1})
// with w = 1/x - 1/(e^x - 1). The sampled Maxwellian with (u, D = T/m) makes
// every J vanish, and the implicit matrix I - dt L is an M-matrix.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "errors.hpp"
#include "kinetics.hpp"
#include "moments.hpp"
#include "params.hpp"

namespace fpmix {

/// Target moments and strength of one collision operator.
struct CollisionContext {
  double target_u = 0.0;
  double target_T = 1.0;
  double mass = 1.0;
  double rate = 0.0; ///< friction constant times partner density, 1/time

  double diffusivity() const noexcept { return target_T / mass; }
};

enum class ContextKind { intra, inter };

/// Which closure a species uses inside its pair.
enum class PairRole { first, second };

/// Self-collision context (u_i, T_i, c_ii n_i).
inline CollisionContext intra_context(const Moments &own, double mass,
                                      double c_self) {
  return {own.u, own.T, mass, c_self * own.n};
}

/// Interspecies context. `first`/`second` are the moments of the species in
/// roles 1 and 2 of `pair`; the returned context is for the species in
/// `role`: (u_ij, T_ij, c_ij n_j) for role 1, (u_ji, T_ji, c_ji n_i) for
/// role 2.
inline CollisionContext inter_context(const PairParameters &pair,
                                      PairRole role, const Moments &first,
                                      const Moments &second, double m_first,
                                      double m_second, int d,
                                      Tier required = Tier::conservation_only) {
  require_tier(pair, m_first, m_second, d, required);
  CollisionContext ctx;
  if (role == PairRole::first) {
    ctx.target_u = mixture_velocity_12(pair, first.u, second.u);
    ctx.target_T = mixture_temperature_12(pair, first.T, second.T, first.u, second.u);
    ctx.mass = m_first;
    ctx.rate = pair.c_ij * second.n;
  } else {
    ctx.target_u = mixture_velocity_21(pair, m_first, m_second, first.u, second.u);
    ctx.target_T = mixture_temperature_21(pair, m_first, m_second, d, first.T,
                                          second.T, first.u, second.u);
    ctx.mass = m_second;
    ctx.rate = pair.c_ji * first.n;
  }
  if (!(ctx.target_T > 0.0))
    throw validation_error("interspecies target temperature is not positive");
  return ctx;
}

/// Dispatches to intra_context / inter_context. For intra contexts only
/// `own`, `m_own` and `c_self` are used.
struct ContextRequest {
  ContextKind kind = ContextKind::intra;
  PairParameters pair{};
  PairRole role = PairRole::first;
  Moments own{};
  Moments partner{};
  double m_own = 1.0;
  double m_partner = 1.0;
  double c_self = 0.0;
  int d = 1;
};

inline CollisionContext build_context(const ContextRequest &q) {
  if (q.kind == ContextKind::intra)
    return intra_context(q.own, q.m_own, q.c_self);
  if (q.role == PairRole::first)
    return inter_context(q.pair, q.role, q.own, q.partner, q.m_own, q.m_partner, q.d);
  return inter_context(q.pair, q.role, q.partner, q.own, q.m_partner, q.m_own, q.d);
}

// ---------------------------------------------------------------------------

/// B(x) = x / (e^x - 1), B(0) = 1.
inline double bernoulli(double x) {
  if (std::abs(x) < 1e-3) {
    const double x2 = x * x;
    return 1.0 - 0.5 * x + x2 / 12.0 - x2 * x2 / 720.0;
  }
  return x / std::expm1(x);
}

/// Chang-Cooper weight of the left cell, w = 1/x - 1/(e^x - 1).
inline double chang_cooper_weight(double x) {
  if (std::abs(x) < 1e-3)
    return 0.5 - x / 12.0 + x * x * x / 720.0;
  return 1.0 / x - 1.0 / std::expm1(x);
}

/// rate * J at the size()+1 faces; both boundary faces carry zero flux.
inline std::vector<double> face_fluxes(std::span<const double> f,
                                       const CollisionContext &ctx,
                                       const VelocityGrid &grid) {
  const std::size_t n = grid.size();
  const double dv = grid.cell_width();
  const double D = ctx.diffusivity();
  std::vector<double> flux(n + 1, 0.0);
  if (ctx.rate == 0.0)
    return flux;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double x = (grid.face(k + 1) - ctx.target_u) * dv / D;
    flux[k + 1] = ctx.rate * D / dv * (bernoulli(-x) * f[k + 1] - bernoulli(x) * f[k]);
  }
  return flux;
}

/// Cellwise df/dt = (F_{k+1/2} - F_{k-1/2}) / dv.
inline std::vector<double> fokker_planck_rhs(std::span<const double> f,
                                             const CollisionContext &ctx,
                                             const VelocityGrid &grid) {
  const auto flux = face_fluxes(f, ctx, grid);
  std::vector<double> rhs(grid.size());
  const double dv = grid.cell_width();
  for (std::size_t k = 0; k < rhs.size(); ++k)
    rhs[k] = (flux[k + 1] - flux[k]) / dv;
  return rhs;
}

/// Tridiagonal matrix stored by diagonals; lower[0] and upper[n-1] unused.
struct Tridiagonal {
  std::vector<double> lower;
  std::vector<double> diag;
  std::vector<double> upper;
};

/// The linear operator L with fokker_planck_rhs(f) = L f.
inline Tridiagonal collision_matrix(const CollisionContext &ctx,
                                    const VelocityGrid &grid) {
  const std::size_t n = grid.size();
  const double dv = grid.cell_width();
  const double D = ctx.diffusivity();
  const double kappa = ctx.rate * D / (dv * dv);
  Tridiagonal L{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0),
                std::vector<double>(n, 0.0)};
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double x = (grid.face(k + 1) - ctx.target_u) * dv / D;
    const double bp = kappa * bernoulli(x);  // f_k leaves towards k+1
    const double bm = kappa * bernoulli(-x); // f_{k+1} leaves towards k
    L.upper[k] += bm;
    L.diag[k] -= bp;
    L.lower[k + 1] += bp;
    L.diag[k + 1] -= bm;
  }
  return L;
}

/// Thomas algorithm for A x = b.
inline std::vector<double> solve_tridiagonal(const Tridiagonal &A,
                                             std::span<const double> b) {
  const std::size_t n = b.size();
  std::vector<double> c(n), x(n);
  double denom = A.diag[0];
  if (!(std::abs(denom) > 0.0) || !std::isfinite(denom))
    throw solver_failure("singular tridiagonal system");
  c[0] = A.upper[0] / denom;
  x[0] = b[0] / denom;
  for (std::size_t k = 1; k < n; ++k) {
    denom = A.diag[k] - A.lower[k] * c[k - 1];
    if (!(std::abs(denom) > 1e-300) || !std::isfinite(denom))
      throw solver_failure("singular tridiagonal system at row " + std::to_string(k));
    c[k] = A.upper[k] / denom;
    x[k] = (b[k] - A.lower[k] * x[k - 1]) / denom;
  }
  for (std::size_t k = n - 1; k-- > 0;)
    x[k] -= c[k] * x[k + 1];
  for (double v : x)
    if (!std::isfinite(v))
      throw solver_failure("non-finite solution of the collision system");
  return x;
}

/// Backward Euler: solves (I - dt L_ctx) f_new = f_old.
inline std::vector<double> implicit_collision_step(std::span<const double> f,
                                                   const CollisionContext &ctx,
                                                   const VelocityGrid &grid,
                                                   double dt) {
  if (!(dt > 0.0))
    throw error("implicit_collision_step needs dt > 0");
  if (ctx.rate == 0.0)
    return {f.begin(), f.end()};
  if (!(ctx.target_T > 0.0) || !(ctx.rate > 0.0))
    throw solver_failure("collision context needs T > 0 and rate >= 0");
  auto A = collision_matrix(ctx, grid);
  for (std::size_t k = 0; k < A.diag.size(); ++k) {
    A.lower[k] *= -dt;
    A.upper[k] *= -dt;
    A.diag[k] = 1.0 - dt * A.diag[k];
  }
  return solve_tridiagonal(A, f);
}

// ---------------------------------------------------------------------------
// Moment-constrained stepping

/// Result of a step whose target (u, T) was adjusted to hit prescribed moments.
struct CalibratedStep {
  std::vector<double> f;
  CollisionContext ctx; ///< adjusted context actually used
  int iterations = 0;
  double residual = 0.0; ///< final relative moment mismatch
};

/// Backward-Euler step whose target velocity and temperature are adjusted so
/// that the discrete first and second moments of the result equal `target`.
///
/// The adjustment absorbs the O(dv^2) moment defect of the discrete operator;
/// the adjusted context stays within that order of `nominal`. Mass is
/// preserved by the flux form, so target.m0 is not used.
inline CalibratedStep calibrated_collision_step(std::span<const double> f,
                                                const CollisionContext &nominal,
                                                const VelocityGrid &grid,
                                                double dt,
                                                const RawMoments &target) {
  CalibratedStep out;
  out.ctx = nominal;
  if (nominal.rate == 0.0) {
    out.f.assign(f.begin(), f.end());
    return out;
  }
  const double n = density(f, grid);
  const double a = dt * nominal.rate;
  double u = nominal.target_u;
  double D = nominal.diffusivity();
  const double scale1 = std::abs(target.m1) + n * std::sqrt(std::max(D, 0.0));
  const double scale2 = std::abs(target.m2);

  constexpr int max_iterations = 60;
  constexpr double tolerance = 2e-15;
  double best = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= max_iterations; ++it) {
    CollisionContext ctx = nominal;
    ctx.target_u = u;
    ctx.target_T = D * nominal.mass;
    auto g = implicit_collision_step(f, ctx, grid, dt);
    const auto R = raw_moments(g, grid);
    const double r1 = R.m1 - target.m1;
    const double r2 = R.m2 - target.m2;
    const double rel = std::max(std::abs(r1) / scale1, std::abs(r2) / scale2);
    if (rel < best) {
      best = rel;
      out.f = std::move(g);
      out.ctx = ctx;
      out.iterations = it;
      out.residual = rel;
    }
    if (rel <= tolerance)
      break;
    // Chord step with the Jacobian of the continuous moment update.
    const double jp = n * a / (1.0 + a);
    const double je = 2.0 * n * a / (1.0 + 2.0 * a);
    const double jc = 2.0 * a * (R.m1 + u * jp) / (1.0 + 2.0 * a);
    const double du = -r1 / jp;
    double dD = -(r2 + jc * du) / je;
    if (D + dD <= 0.0)
      dD = -0.5 * D;
    u += du;
    D += dD;
  }
  if (!(best <= 1e-10))
    throw solver_failure("moment calibration did not converge (residual " +
                         std::to_string(best) + ")");
  return out;
}

/// Multiplies f by 1 + a0 + a1 (v - u) + a2 (v - u)^2 so that its discrete
/// raw moments equal `target` exactly (to round-off).
inline std::vector<double> correct_moments(std::span<const double> f,
                                           const VelocityGrid &grid,
                                           const RawMoments &target) {
  const double dv = grid.cell_width();
  const auto cur = raw_moments(f, grid);
  const double ub = cur.m1 / cur.m0;
  // Centered power sums of f up to order 4.
  std::array<double, 5> s{};
  for (std::size_t k = 0; k < f.size(); ++k) {
    const double c = grid.center(k) - ub;
    double p = f[k] * dv;
    for (auto &x : s) {
      x += p;
      p *= c;
    }
  }
  auto centered = [&](const RawMoments &m) {
    return std::array<double, 3>{m.m0, m.m1 - ub * m.m0,
                                 m.m2 - 2.0 * ub * m.m1 + ub * ub * m.m0};
  };
  const auto t = centered(target);
  const auto c = centered(cur);
  std::array<std::array<double, 4>, 3> M{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j)
      M[i][j] = s[i + j];
    M[i][3] = t[i] - c[i];
  }
  // Gaussian elimination with partial pivoting.
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::abs(M[r][col]) > std::abs(M[piv][col]))
        piv = r;
    std::swap(M[col], M[piv]);
    if (!(std::abs(M[col][col]) > 0.0))
      throw solver_failure("moment correction system is singular");
    for (int r = col + 1; r < 3; ++r) {
      const double fac = M[r][col] / M[col][col];
      for (int k = col; k < 4; ++k)
        M[r][k] -= fac * M[col][k];
    }
  }
  std::array<double, 3> a{};
  for (int r = 2; r >= 0; --r) {
    double acc = M[r][3];
    for (int k = r + 1; k < 3; ++k)
      acc -= M[r][k] * a[k];
    a[r] = acc / M[r][r];
  }
  std::vector<double> g(f.begin(), f.end());
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double c1 = grid.center(k) - ub;
    const double factor = 1.0 + a[0] + a[1] * c1 + a[2] * c1 * c1;
    if (factor < 0.0 && g[k] > 0.0)
      throw solver_failure("moment correction would make f negative");
    g[k] *= factor;
  }
  return g;
}

} // namespace fpmix
