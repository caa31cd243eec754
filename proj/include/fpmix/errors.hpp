// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fpmix {

/// Base class for every error raised by the library.
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A distribution carries (numerically) no particles.
class zero_density_error : public error {
public:
  using error::error;
};

/// The tridiagonal collision system could not be solved.
class solver_failure : public error {
public:
  using error::error;
};

/// Upwind transport step violates max|v| dt / dx <= 1.
class cfl_violation : public error {
public:
  using error::error;
};

/// A relaxation-rate fit has no usable signal.
class fit_degenerate : public error {
public:
  using error::error;
};

/// Pair parameters fail the admissibility tier an operation requires.
class validation_error : public error {
public:
  using error::error;
};

/// Malformed or inconsistent configuration.
class config_error : public error {
public:
  using error::error;
};

/// Wraps a failure raised while advancing a simulation.
class step_error : public error {
public:
  step_error(std::size_t step, const std::string &what, bool cfl = false)
      : error("step " + std::to_string(step) + ": " + what), step_(step),
        cfl_(cfl) {}

  std::size_t step() const noexcept { return step_; }
  bool is_cfl() const noexcept { return cfl_; }

private:
  std::size_t step_;
  bool cfl_;
};

} // namespace fpmix
