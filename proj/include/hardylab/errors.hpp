#pragma once

#include <stdexcept>
#include <string>

namespace hardylab {

/// Parameter outside an operation's admissible range.
class domain_error : public std::invalid_argument {
 public:
  explicit domain_error(const std::string& what) : std::invalid_argument(what) {}
};

/// Requested a subcritical-only construction at q >= q_crit.
class supercritical_error : public std::runtime_error {
 public:
  explicit supercritical_error(const std::string& what) : std::runtime_error(what) {}
};

/// Nonlinear iteration failed to reach tolerance; carries the last residual.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, double last_residual)
      : std::runtime_error(what + " (last residual " + std::to_string(last_residual) + ")"),
        last_residual_(last_residual) {}
  double last_residual() const { return last_residual_; }

 private:
  double last_residual_;
};

/// Not enough usable data points for a least-squares fit.
class fit_error : public std::runtime_error {
 public:
  explicit fit_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hardylab
