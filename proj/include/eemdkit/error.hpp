#pragma once

#include <stdexcept>
#include <string>

namespace eemdkit {

/// Failure categories; the CLI maps them onto exit codes 1 and 2.
enum class ErrorKind { validation, numerical };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string module, const std::string& message)
        : std::runtime_error(module + ": " + message), kind_(kind), module_(std::move(module)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& module() const noexcept { return module_; }

private:
    ErrorKind kind_;
    std::string module_;
};

/// Bad input: malformed files, unmet preconditions, unknown columns.
class ValidationError : public Error {
public:
    ValidationError(std::string module, const std::string& message)
        : Error(ErrorKind::validation, std::move(module), message) {}
};

/// The data were well-formed but the computation could not proceed
/// (rank deficiency, undefined statistics, ...).
class NumericalError : public Error {
public:
    NumericalError(std::string module, const std::string& message)
        : Error(ErrorKind::numerical, std::move(module), message) {}
};

} // namespace eemdkit
