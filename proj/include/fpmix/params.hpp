// SPDX-License-Identifier: Apache-2.0
#pragma once

// Interspecies closure of the two-species Fokker-Planck mixture model.
//
// For an ordered pair (i, j) the operator acting on species i relaxes it
// towards a Maxwellian with mean velocity u_ij and temperature T_ij, and the
// one acting on species j towards (u_ji, T_ji). The pair is described by the
// friction constants c_ij, c_ji and the free weights (delta, alpha, gamma);
// u_ji and T_ji follow from requiring conservation of total momentum and
// energy. Throughout, species i plays the role of "species 1" and j the role
// of "species 2".

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "moments.hpp"

namespace fpmix {

/// Relative slack absorbed by every inequality check.
inline constexpr double inequality_tolerance = 1e-12;

struct SpeciesSpec {
  double mass = 1.0;
  std::string label;
};

/// Free parameters of one ordered species pair (i, j).
///
/// epsilon = c_ij / c_ji is derived, never stored.
struct PairParameters {
  double c_ij = 0.0;
  double c_ji = 0.0;
  double delta = 1.0;
  double alpha = 1.0;
  double gamma = 0.0;

  double epsilon() const noexcept { return c_ij / c_ji; }

  friend bool operator==(const PairParameters &,
                         const PairParameters &) = default;
};

// ---------------------------------------------------------------------------
// Velocity algebra. Closures accept a scalar velocity (d = 1) or a
// fixed-size std::array for d > 1.

template <typename V>
concept VelocityType =
    std::floating_point<V> ||
    requires(V v) {
      { v.size() } -> std::convertible_to<std::size_t>;
      { v[0] } -> std::convertible_to<double>;
    };

namespace detail {

template <std::floating_point V> V combine(double a, V x, double b, V y) {
  return a * x + b * y;
}

template <typename T, std::size_t N>
std::array<T, N> combine(double a, const std::array<T, N> &x, double b,
                         const std::array<T, N> &y) {
  std::array<T, N> r{};
  for (std::size_t k = 0; k < N; ++k)
    r[k] = a * x[k] + b * y[k];
  return r;
}

template <std::floating_point V> double squared_distance(V x, V y) {
  return (x - y) * (x - y);
}

template <typename T, std::size_t N>
double squared_distance(const std::array<T, N> &x, const std::array<T, N> &y) {
  double s = 0.0;
  for (std::size_t k = 0; k < N; ++k)
    s += (x[k] - y[k]) * (x[k] - y[k]);
  return s;
}

} // namespace detail

// ---------------------------------------------------------------------------
// Closure

/// u_ij = delta u_i + (1 - delta) u_j
template <VelocityType V>
V mixture_velocity_12(const PairParameters &p, const V &u1, const V &u2) {
  return detail::combine(p.delta, u1, 1.0 - p.delta, u2);
}

/// u_ji = u_j - (1 - delta) eps (m_i / m_j) (u_j - u_i), the unique choice
/// that conserves total momentum given u_ij.
template <VelocityType V>
V mixture_velocity_21(const PairParameters &p, double mi, double mj,
                      const V &u1, const V &u2) {
  const double w = (1.0 - p.delta) * p.epsilon() * (mi / mj);
  return detail::combine(1.0 - w, u2, w, u1);
}

/// T_ij = alpha T_i + (1 - alpha) T_j + gamma |u_i - u_j|^2
template <VelocityType V>
double mixture_temperature_12(const PairParameters &p, double T1, double T2,
                              const V &u1, const V &u2) {
  return p.alpha * T1 + (1.0 - p.alpha) * T2 +
         p.gamma * detail::squared_distance(u1, u2);
}

/// Coefficient of |u_i - u_j|^2 in T_ji.
inline double heating_coefficient_21(const PairParameters &p, double mi,
                                     int d) {
  const double eps = p.epsilon();
  return eps * mi * (1.0 - p.delta) / d - eps * p.gamma;
}

/// T_ji fixed by conservation of total energy given T_ij.
template <VelocityType V>
double mixture_temperature_21(const PairParameters &p, double mi,
                              [[maybe_unused]] double mj, int d, double T1,
                              double T2, const V &u1, const V &u2) {
  const double eps = p.epsilon();
  const double w1 = eps * (1.0 - p.alpha);
  return heating_coefficient_21(p, mi, d) * detail::squared_distance(u1, u2) +
         w1 * T1 + (1.0 - w1) * T2;
}

// ---------------------------------------------------------------------------
// Validation

/// Nested admissibility levels. Each tier includes every constraint of the
/// tiers below it.
enum class Tier { invalid = 0, conservation_only = 1, positivity = 2, h_theorem = 3 };

inline std::string_view to_string(Tier t) {
  switch (t) {
  case Tier::conservation_only:
    return "conservation";
  case Tier::positivity:
    return "positivity";
  case Tier::h_theorem:
    return "h-theorem";
  case Tier::invalid:
    break;
  }
  return "invalid";
}

inline Tier tier_from_string(std::string_view s) {
  if (s == "conservation" || s == "conservation-only")
    return Tier::conservation_only;
  if (s == "positivity")
    return Tier::positivity;
  if (s == "h-theorem" || s == "htheorem")
    return Tier::h_theorem;
  throw config_error("unknown tier '" + std::string(s) + "'");
}

struct ConstraintCheck {
  std::string id;
  Tier tier = Tier::conservation_only; ///< lowest tier requiring it
  std::string message;
  double residual = 0.0; ///< signed slack, >= 0 when satisfied
  bool satisfied = true;
};

struct ValidationReport {
  Tier tier = Tier::invalid;
  std::vector<ConstraintCheck> checks;

  bool reaches(Tier required) const noexcept { return tier >= required; }

  std::vector<ConstraintCheck> violations() const {
    std::vector<ConstraintCheck> out;
    for (const auto &c : checks)
      if (!c.satisfied)
        out.push_back(c);
    return out;
  }
};

namespace detail {

/// Records lower <= upper with the relative slack tolerance.
inline void check_le(std::vector<ConstraintCheck> &out, std::string id,
                     Tier tier, std::string message, double lower,
                     double upper) {
  const double slack = upper - lower;
  const double scale = std::max(std::abs(lower), std::abs(upper));
  const bool ok = std::isfinite(slack) && slack >= -inequality_tolerance * scale;
  out.push_back({std::move(id), tier, std::move(message), slack, ok});
}

} // namespace detail

/// Classifies a pair into the strongest tier whose constraint set holds.
///
/// mi, mj are the masses of the species playing roles 1 and 2; d is the
/// velocity dimension.
inline ValidationReport validate(const PairParameters &p, double mi, double mj,
                                 int d) {
  using detail::check_le;
  ValidationReport r;
  auto &c = r.checks;
  constexpr auto C = Tier::conservation_only;
  constexpr auto P = Tier::positivity;
  constexpr auto H = Tier::h_theorem;

  const bool finite = std::isfinite(p.c_ij) && std::isfinite(p.c_ji) &&
                      std::isfinite(p.delta) && std::isfinite(p.alpha) &&
                      std::isfinite(p.gamma);
  c.push_back({"parameters_finite", C, "all pair parameters are finite",
               finite ? 0.0 : -std::numeric_limits<double>::infinity(),
               finite});
  check_le(c, "c_ij_nonneg", C, "c_ij >= 0", 0.0, p.c_ij);
  c.push_back({"epsilon_finite", C, "c_ji > 0 so that epsilon is finite",
               p.c_ji, p.c_ji > 0.0});

  const double eps = p.c_ji > 0.0 ? p.epsilon()
                                  : std::numeric_limits<double>::quiet_NaN();
  check_le(c, "epsilon_le_one", C, "epsilon <= 1", eps, 1.0);
  check_le(c, "epsilon_mass_ratio_le_one", C, "epsilon m_i / m_j <= 1",
           eps * mi / mj, 1.0);
  check_le(c, "alpha_ge_zero", C, "alpha >= 0", 0.0, p.alpha);
  check_le(c, "alpha_le_one", C, "alpha <= 1", p.alpha, 1.0);
  check_le(c, "gamma_nonneg", C, "gamma >= 0", 0.0, p.gamma);

  check_le(c, "delta_le_one", P, "delta <= 1", p.delta, 1.0);
  check_le(c, "gamma_le_positivity_bound", P, "gamma <= (m_i/d)(1 - delta)",
           p.gamma, mi / d * (1.0 - p.delta));

  const double ratio = eps / (1.0 + eps);
  check_le(c, "alpha_ge_h_bound", H, "alpha >= eps/(1+eps)", ratio, p.alpha);
  check_le(c, "delta_ge_h_bound", H, "delta >= eps/(1+eps)", ratio, p.delta);
  check_le(c, "gamma_ge_h_lower", H, "gamma >= (1-delta)^2 m_i/d",
           (1.0 - p.delta) * (1.0 - p.delta) * mi / d, p.gamma);
  check_le(c, "gamma_le_h_upper", H,
           "gamma <= (1-delta)(m_i/d) eps/(1+eps)", p.gamma,
           (1.0 - p.delta) * mi / d * ratio);

  auto holds = [&](Tier t) {
    for (const auto &k : c)
      if (k.tier <= t && !k.satisfied)
        return false;
    return true;
  };
  r.tier = Tier::invalid;
  for (Tier t : {C, P, H}) {
    if (!holds(t))
      break;
    r.tier = t;
  }
  return r;
}

/// Throws validation_error unless the pair reaches `required`.
inline void require_tier(const PairParameters &p, double mi, double mj, int d,
                         Tier required) {
  const auto report = validate(p, mi, mj, d);
  if (report.reaches(required))
    return;
  std::string msg = "pair parameters reach tier '" +
                    std::string(to_string(report.tier)) + "', need '" +
                    std::string(to_string(required)) + "':";
  for (const auto &v : report.violations())
    if (v.tier <= required)
      msg += " " + v.id;
  throw validation_error(msg);
}

// ---------------------------------------------------------------------------
// Quantities used by the entropy estimate

/// T = w1 T_i + w2 T_j
struct TemperatureWeights {
  double w1 = 0.0;
  double w2 = 0.0;
  double operator()(double T1, double T2) const { return w1 * T1 + w2 * T2; }
};

struct DerivedPairQuantities {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma_tilde = 0.0;
  TemperatureWeights tbar_12; ///< T_ij without the velocity-gap heating
  TemperatureWeights tbar_21; ///< T_ji without the velocity-gap heating
};

inline DerivedPairQuantities derived_quantities(const PairParameters &p,
                                                double mi, double mj, int d) {
  const double eps = p.epsilon();
  const double one_minus_delta = 1.0 - p.delta;
  DerivedPairQuantities q;
  q.gamma1 = one_minus_delta * one_minus_delta * mi / d;
  q.gamma2 = one_minus_delta * one_minus_delta * (mj / d) * eps * eps *
             (mi / mj) * (mi / mj);
  q.gamma_tilde = heating_coefficient_21(p, mi, d);
  q.tbar_12 = {p.alpha, 1.0 - p.alpha};
  q.tbar_21 = {eps * (1.0 - p.alpha), 1.0 - eps * (1.0 - p.alpha)};
  return q;
}

/// Both sides of an inequality lhs <= rhs.
struct InequalitySides {
  double lhs = 0.0;
  double rhs = 0.0;

  double slack() const { return rhs - lhs; }
  bool holds(double rel = inequality_tolerance) const {
    return slack() >= -rel * std::max({std::abs(lhs), std::abs(rhs), 0.0});
  }
};

/// eps T_i Tbar_ji + Tbar_ij T_j <= (1 + eps) Tbar_ij Tbar_ji
inline InequalitySides lemma_temperature_products(const PairParameters &p,
                                                  double T1, double T2) {
  const double eps = p.epsilon();
  const double tb12 = p.alpha * T1 + (1.0 - p.alpha) * T2;
  const double tb21 = eps * (1.0 - p.alpha) * T1 + (1.0 - eps * (1.0 - p.alpha)) * T2;
  return {eps * T1 * tb21 + tb12 * T2, (1.0 + eps) * tb12 * tb21};
}

/// eps gamma1 gamma_tilde + gamma gamma2 <= (1 + eps) gamma gamma_tilde
inline InequalitySides lemma_heating_products(const PairParameters &p,
                                              double mi, double mj, int d) {
  const double eps = p.epsilon();
  const auto q = derived_quantities(p, mi, mj, d);
  return {eps * q.gamma1 * q.gamma_tilde + p.gamma * q.gamma2,
          (1.0 + eps) * p.gamma * q.gamma_tilde};
}

/// Cross terms linear in |u_i - u_j|^2 (du2) of the entropy estimate.
inline InequalitySides lemma_cross_terms(const PairParameters &p, double mi,
                                         double mj, int d, double T1,
                                         double T2, double du2) {
  const double eps = p.epsilon();
  const auto q = derived_quantities(p, mi, mj, d);
  const double tb12 = q.tbar_12(T1, T2);
  const double tb21 = q.tbar_21(T1, T2);
  const double lhs = eps * T1 * q.gamma_tilde * du2 +
                     eps * q.gamma1 * du2 * tb21 + tb12 * q.gamma2 * du2 +
                     p.gamma * du2 * T2;
  const double rhs = (1.0 + eps) * tb12 * q.gamma_tilde * du2 +
                     (1.0 + eps) * p.gamma * du2 * tb21;
  return {lhs, rhs};
}

// ---------------------------------------------------------------------------
// Conservation identities of the closure

/// Sum of a cancelling expression and the magnitude of its parts.
struct IdentityResidual {
  double residual = 0.0;
  double scale = 0.0;
  double relative() const { return scale > 0.0 ? std::abs(residual) / scale : std::abs(residual); }
};

/// m_i c_ij n_i n_j (u_ij - u_i) + m_j c_ji n_i n_j (u_ji - u_j), which
/// vanishes for every state.
inline IdentityResidual momentum_closure_residual(const PairParameters &p,
                                                  double mi, double mj,
                                                  const Moments &a,
                                                  const Moments &b) {
  const double u12 = mixture_velocity_12(p, a.u, b.u);
  const double u21 = mixture_velocity_21(p, mi, mj, a.u, b.u);
  const double k1 = mi * p.c_ij * a.n * b.n;
  const double k2 = mj * p.c_ji * a.n * b.n;
  return {k1 * (u12 - a.u) + k2 * (u21 - b.u),
          std::abs(k1) * (std::abs(u12) + std::abs(a.u)) +
              std::abs(k2) * (std::abs(u21) + std::abs(b.u))};
}

/// Energy transferred by both interspecies operators; vanishes for every
/// state.
inline IdentityResidual energy_closure_residual(const PairParameters &p,
                                                double mi, double mj, int d,
                                                const Moments &a,
                                                const Moments &b) {
  const double u12 = mixture_velocity_12(p, a.u, b.u);
  const double u21 = mixture_velocity_21(p, mi, mj, a.u, b.u);
  const double T12 = mixture_temperature_12(p, a.T, b.T, a.u, b.u);
  const double T21 = mixture_temperature_21(p, mi, mj, d, a.T, b.T, a.u, b.u);
  const double k1 = p.c_ij * a.n * b.n;
  const double k2 = p.c_ji * a.n * b.n;
  const double terms[] = {d * (T12 - a.T) * k1, mi * k1 * a.u * (u12 - a.u),
                          d * (T21 - b.T) * k2, mj * k2 * b.u * (u21 - b.u)};
  const double scale =
      d * std::abs(k1) * (std::abs(T12) + std::abs(a.T)) +
      mi * std::abs(k1 * a.u) * (std::abs(u12) + std::abs(a.u)) +
      d * std::abs(k2) * (std::abs(T21) + std::abs(b.T)) +
      mj * std::abs(k2 * b.u) * (std::abs(u21) + std::abs(b.u));
  return {terms[0] + terms[1] + terms[2] + terms[3], scale};
}

// ---------------------------------------------------------------------------
// Literature presets

enum class PresetName { symmetric7, hu, gorji };

inline std::string_view to_string(PresetName n) {
  switch (n) {
  case PresetName::symmetric7:
    return "symmetric7";
  case PresetName::hu:
    return "hu";
  case PresetName::gorji:
    return "gorji";
  }
  return "?";
}

inline PresetName preset_from_string(std::string_view s) {
  if (s == "symmetric7")
    return PresetName::symmetric7;
  if (s == "hu")
    return PresetName::hu;
  if (s == "gorji")
    return PresetName::gorji;
  throw config_error("unknown preset '" + std::string(s) + "'");
}

/// Masses, densities and friction constants of a pair in the caller's
/// ordering.
struct PresetInputs {
  double m1 = 1.0;
  double m2 = 1.0;
  double n1 = 1.0;
  double n2 = 1.0;
  double c12 = 1.0;
  double c21 = 1.0; ///< ignored by symmetric7, which derives it from the masses
  int d = 1;
};

struct PresetResult {
  PairParameters params;
  bool swapped = false; ///< true when species 2 of the input plays role 1
  std::vector<std::string> warnings;
};

namespace detail {

inline bool orientation_ok(double c12, double c21, double m1, double m2) {
  if (!(c21 > 0.0))
    return false;
  const double eps = c12 / c21;
  const double tol = 1.0 + inequality_tolerance;
  return eps <= tol && eps * m1 / m2 <= tol;
}

inline PresetInputs swapped(const PresetInputs &in) {
  PresetInputs s = in;
  std::swap(s.m1, s.m2);
  std::swap(s.n1, s.n2);
  std::swap(s.c12, s.c21);
  return s;
}

} // namespace detail

/// Parameters reproducing the named model, in a normalized orientation.
///
/// symmetric7: u_ij = u_ji = (u_i + u_j)/2 and a common mass-weighted
///   temperature; needs eps = m_j/m_i, so the heavier species takes role 1
///   and c_ji = c_ij m_i / m_j.
/// hu: u_ij = u_ji and T_ij = T_ji, weighted by the interspecies collision
///   rates c_ij n_j and c_ji n_i. Densities must be positive.
/// gorji: delta = 0 (u_ij = u_j, u_ji = u_i) with alpha = gamma = 0.
inline PresetResult preset(PresetName name, const PresetInputs &input) {
  PresetResult r;
  PresetInputs in = input;
  switch (name) {
  case PresetName::symmetric7: {
    if (in.m2 > in.m1) {
      in = detail::swapped(in);
      in.c12 = input.c12;
      r.swapped = true;
      r.warnings.push_back("symmetric7: species reordered so the heavier "
                           "species takes role 1");
    }
    const double m1 = in.m1, m2 = in.m2;
    r.params.c_ij = in.c12;
    r.params.c_ji = in.c12 * m1 / m2;
    r.params.alpha = m2 / (m1 + m2);
    r.params.delta = 0.5;
    r.params.gamma = m1 * m2 / (2.0 * in.d * (m1 + m2));
    return r;
  }
  case PresetName::hu: {
    if (!(in.n1 > 0.0) || !(in.n2 > 0.0))
      throw validation_error("hu preset needs positive densities");
    if (!detail::orientation_ok(in.c12, in.c21, in.m1, in.m2) &&
        detail::orientation_ok(in.c21, in.c12, in.m2, in.m1)) {
      in = detail::swapped(in);
      r.swapped = true;
      r.warnings.push_back("hu: species reordered so that eps <= 1 and "
                           "eps m_i/m_j <= 1");
    }
    // Rate-weighted momentum and energy: w_k = n_k * (interspecies rate of k).
    const double w1 = in.n1 * in.c12 * in.n2;
    const double w2 = in.n2 * in.c21 * in.n1;
    const double m1 = in.m1, m2 = in.m2;
    r.params.c_ij = in.c12;
    r.params.c_ji = in.c21;
    r.params.delta = m1 * w1 / (m1 * w1 + m2 * w2);
    r.params.alpha = w1 / (w1 + w2);
    r.params.gamma = w1 * w2 * m1 * m2 / (in.d * (w1 + w2) * (m1 * w1 + m2 * w2));
    return r;
  }
  case PresetName::gorji: {
    if (!detail::orientation_ok(in.c12, in.c21, in.m1, in.m2) &&
        detail::orientation_ok(in.c21, in.c12, in.m2, in.m1)) {
      in = detail::swapped(in);
      r.swapped = true;
      r.warnings.push_back("gorji: species reordered so that eps <= 1 and "
                           "eps m_i/m_j <= 1");
    }
    r.params.c_ij = in.c12;
    r.params.c_ji = in.c21;
    r.params.delta = 0.0;
    r.params.alpha = 0.0;
    r.params.gamma = 0.0;
    return r;
  }
  }
  throw config_error("unknown preset");
}

/// True when the preset's parameters depend on the current moments.
inline bool preset_is_state_dependent(PresetName n) {
  return n == PresetName::hu;
}

} // namespace fpmix
