#pragma once

#include <stdexcept>
#include <string>

namespace sdi {

/// Failure categories. Each maps onto one stable CLI exit code.
enum class ErrorKind {
    InvalidInput,        // violated precondition, bad flag, malformed file
    NumericalFailure,    // no convergence, resonant series, zero calibration
    DegenerateData,      // data carries no information about the unknowns
};

/// Exit code for a failure category: 2 invalid input, 3 numerical failure,
/// 4 degenerate data.
constexpr int exit_code(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::InvalidInput: return 2;
    case ErrorKind::NumericalFailure: return 3;
    case ErrorKind::DegenerateData: return 4;
    }
    return 1;
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct InvalidInputError : Error {
    explicit InvalidInputError(const std::string& what) : Error(ErrorKind::InvalidInput, what) {}
};

struct MalformedFileError : Error {
    explicit MalformedFileError(const std::string& what) : Error(ErrorKind::InvalidInput, what) {}
};

/// Effective-reflection series denominator is (numerically) zero.
struct DegenerateGeometryError : Error {
    explicit DegenerateGeometryError(const std::string& what) : Error(ErrorKind::NumericalFailure, what) {}
};

struct ZeroCalibrationError : Error {
    explicit ZeroCalibrationError(const std::string& what) : Error(ErrorKind::NumericalFailure, what) {}
};

struct ZeroSpectrumError : Error {
    explicit ZeroSpectrumError(const std::string& what) : Error(ErrorKind::NumericalFailure, what) {}
};

struct NoConvergenceError : Error {
    explicit NoConvergenceError(const std::string& what) : Error(ErrorKind::NumericalFailure, what) {}
};

/// Per-step phase advance reaches pi, so the direction of the sweep is ambiguous.
struct AliasingError : Error {
    explicit AliasingError(const std::string& what) : Error(ErrorKind::InvalidInput, what) {}
};

struct DegenerateDataError : Error {
    explicit DegenerateDataError(const std::string& what) : Error(ErrorKind::DegenerateData, what) {}
};

} // namespace sdi
