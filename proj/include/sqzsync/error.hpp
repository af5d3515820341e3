// error.hpp: exception hierarchy shared by every sqzsync module.

#pragma once

#include <stdexcept>
#include <string>

namespace sqzsync {

enum class ErrorKind {
    InvalidParam,
    BlochNormExceeded,
    NotADensityMatrix,
    StepTooLarge,
    SingularGenerator,
    DegenerateDenominator,
    PoleSingularity,
    NoMaximumFound,
    Io,
};

const char* to_string(ErrorKind kind) noexcept;

// Parameter-style errors (InvalidParam, Io) map to CLI exit code 1,
// everything else is a numerical failure (exit code 2).
bool is_numerical(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

class InvalidParam : public Error {
public:
    InvalidParam(std::string field, double value, std::string reason);

    const std::string& field() const noexcept { return field_; }
    double value() const noexcept { return value_; }
    const std::string& reason() const noexcept { return reason_; }

private:
    std::string field_;
    double value_;
    std::string reason_;
};

} // namespace sqzsync
