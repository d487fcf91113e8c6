#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wavecoh {

/// Base class for all library errors. Catching this is enough to map any
/// failure to a nonzero exit in the CLI.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Input table lacks a requested column.
class MissingColumnError : public Error {
public:
    explicit MissingColumnError(const std::string& column)
        : Error("missing column: " + column), column_(column) {}
    [[nodiscard]] const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

/// Timestamps are not uniformly spaced (and not a recognized monthly grid).
class NonUniformSpacingError : public Error {
public:
    explicit NonUniformSpacingError(const std::string& msg) : Error(msg) {}
};

/// A value cell failed to parse as a finite number. `line` is the 1-based
/// line number in the input, counting the header line as line 1.
class NonNumericValueError : public Error {
public:
    NonNumericValueError(std::size_t line, const std::string& cell)
        : Error("non-numeric value at line " + std::to_string(line) + ": '" + cell + "'"),
          line_(line) {}
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Two series share too few timestamps to align.
class InsufficientOverlapError : public Error {
public:
    explicit InsufficientOverlapError(const std::string& msg) : Error(msg) {}
};

/// Series too short for the requested operation.
class SeriesTooShortError : public Error {
public:
    explicit SeriesTooShortError(const std::string& msg) : Error(msg) {}
};

/// Scale-grid parameters out of range, or grid/series shape disagreement.
class InvalidGridError : public Error {
public:
    explicit InvalidGridError(const std::string& msg) : Error(msg) {}
};

/// Two transform fields were built on different grids.
class GridMismatchError : public Error {
public:
    explicit GridMismatchError(const std::string& msg) : Error(msg) {}
};

/// Paired inputs differ in length.
class LengthMismatchError : public Error {
public:
    explicit LengthMismatchError(const std::string& msg) : Error(msg) {}
};

/// A normalized quantity left its mathematically valid range by more than
/// rounding noise.
class NumericalBlowupError : public Error {
public:
    explicit NumericalBlowupError(const std::string& msg) : Error(msg) {}
};

/// Constant (zero-variance) input where variation is required.
class DegenerateSeriesError : public Error {
public:
    explicit DegenerateSeriesError(const std::string& msg) : Error(msg) {}
};

/// Parameter outside its documented domain.
class InvalidParameterError : public Error {
public:
    explicit InvalidParameterError(const std::string& msg) : Error(msg) {}
};

/// Unrecognized wavelet filter name.
class UnknownFilterError : public Error {
public:
    explicit UnknownFilterError(const std::string& name)
        : Error("unknown wavelet filter: " + name) {}
};

/// Input shorter than the analysis filter.
class SeriesShorterThanFilterError : public Error {
public:
    explicit SeriesShorterThanFilterError(const std::string& msg) : Error(msg) {}
};

/// Requested decomposition depth exceeds what the series length supports.
class LevelTooDeepError : public Error {
public:
    explicit LevelTooDeepError(const std::string& msg) : Error(msg) {}
};

/// All wavelet-band energies are (numerically) zero.
class ZeroEnergyError : public Error {
public:
    explicit ZeroEnergyError(const std::string& msg) : Error(msg) {}
};

/// Two energy distributions cover different level counts.
class IncompatibleLevelsError : public Error {
public:
    explicit IncompatibleLevelsError(const std::string& msg) : Error(msg) {}
};

/// Filesystem failure while writing an output artifact.
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

}  // namespace wavecoh
