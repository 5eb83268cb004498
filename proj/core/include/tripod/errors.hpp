#pragma once

#include <stdexcept>
#include <string>

namespace tripod {

/// Invalid input to a library call (bad dimensions, out-of-range parameter).
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical method failed: step rejected, singular system, CFL violation.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Curve fitting could not produce a result.
class FitError : public std::runtime_error {
public:
    enum class Kind { NoBeat, NoConvergence, Degenerate };

    FitError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// Configuration text could not be parsed or validated. Carries the 1-based
/// line number of the offending line (0 when the error is not line specific).
class ConfigError : public std::runtime_error {
public:
    ConfigError(int line, const std::string& what)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

}  // namespace tripod
