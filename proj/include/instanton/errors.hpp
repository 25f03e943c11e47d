#pragma once

#include <stdexcept>
#include <string>

namespace instanton {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree (components x points, or trajectory length).
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A time integrator produced a non-finite or inadmissible state.
class SolverError : public Error {
public:
    SolverError(const std::string& what, int time_index)
        : Error(what + " (time index " + std::to_string(time_index) + ")"),
          time_index_(time_index) {}

    int time_index() const noexcept { return time_index_; }

private:
    int time_index_;
};

/// Bad user configuration: unknown key, wrong type, unknown preset.
class ConfigError : public Error {
public:
    using Error::Error;
};

} // namespace instanton
