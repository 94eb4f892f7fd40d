#include "moscito/error.hpp"

#include <utility>

namespace moscito {

ParseError::ParseError(const std::string& source, std::size_t line, const std::string& message)
    : Error(source + ":" + std::to_string(line) + ": " + message), line_(line) {}

ConvergenceError::ConvergenceError(const std::string& message, int iterations, double residual)
    : Error(message + " (iterations=" + std::to_string(iterations) +
            ", residual=" + std::to_string(residual) + ")"),
      iterations_(iterations),
      residual_(residual) {}

ConfigError::ConfigError(std::string field, const std::string& message)
    : Error(field + ": " + message), field_(std::move(field)) {}

}  // namespace moscito
