/**
 * @file errors.hpp
 * @brief Exception types shared across the toolkit.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace mgsta {

/// Malformed input: bad dimensions, out-of-range parameters, broken config.
class input_error : public std::invalid_argument {
 public:
  explicit input_error(const std::string& msg) : std::invalid_argument(msg) {}
};

/// A matrix inversion hit a pivot below the singularity threshold.
class singular_matrix_error : public std::runtime_error {
 public:
  singular_matrix_error(const std::string& msg, double det_estimate)
      : std::runtime_error(msg), det_estimate_(det_estimate) {}

  /// Determinant estimate accumulated up to the failing pivot.
  double det_estimate() const noexcept { return det_estimate_; }

 private:
  double det_estimate_;
};

/// A structural assumption of the control design fails at a witness point.
class assumption_violation : public std::runtime_error {
 public:
  assumption_violation(const std::string& msg, double t, std::string witness)
      : std::runtime_error(msg), time_(t), witness_(std::move(witness)) {}

  double time() const noexcept { return time_; }
  const std::string& witness() const noexcept { return witness_; }

 private:
  double time_;
  std::string witness_;
};

/// Gain search scanned its whole grid without finding a feasible point.
class search_exhausted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The design constants violate the closed-loop feasibility condition.
class infeasible_error : public std::runtime_error {
 public:
  infeasible_error(const std::string& msg, double margin)
      : std::runtime_error(msg), margin_(margin) {}

  double margin() const noexcept { return margin_; }

 private:
  double margin_;
};

/// A simulation produced a non-finite state.
class divergence_error : public std::runtime_error {
 public:
  divergence_error(const std::string& msg, double t)
      : std::runtime_error(msg), time_(t) {}

  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace mgsta
