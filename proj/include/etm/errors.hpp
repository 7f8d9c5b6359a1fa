#ifndef ETM_ERRORS_HPP
#define ETM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace etm {

// Negative ages/activities, evaluation outside a transform's half-plane, etc.
struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Misconfigured model or run parameters.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Non-finite results, non-convergent iterations, step-size violations.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace etm

#endif
