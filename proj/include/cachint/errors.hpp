#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cachint {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Evaluation at the zeta pole (exponent exactly 1).
class PoleError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The delay cap cannot be met; `diagnostics` says which inequality failed.
class InfeasibleError : public std::runtime_error {
 public:
  InfeasibleError(const std::string& what, std::string diagnostics = {})
      : std::runtime_error(what), diagnostics_(std::move(diagnostics)) {}

  const std::string& diagnostics() const noexcept { return diagnostics_; }

 private:
  std::string diagnostics_;
};

/// Queue utilization rho >= 1.
class InstabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite intermediate or failed convergence.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario parse/validation failure; carries every offending line.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> issues)
      : std::runtime_error(join(issues)), issues_(std::move(issues)) {}

  const std::vector<std::string>& issues() const noexcept { return issues_; }

 private:
  static std::string join(const std::vector<std::string>& issues) {
    std::string out = "invalid scenario:";
    for (const auto& issue : issues) {
      out += "\n  ";
      out += issue;
    }
    return out;
  }

  std::vector<std::string> issues_;
};

}  // namespace cachint
