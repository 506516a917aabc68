#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvarch {

/// Base class for all library-specific failures. Plain argument violations
/// use std::invalid_argument directly.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Not enough history before the requested index to fill the weight kernel.
class WindowTooShortError : public Error {
public:
    WindowTooShortError(std::size_t required, std::size_t available)
        : Error("window too short: need " + std::to_string(required) +
                " observations, have " + std::to_string(available)),
          required_(required), available_(available) {}

    std::size_t required() const { return required_; }
    std::size_t available() const { return available_; }

private:
    std::size_t required_;
    std::size_t available_;
};

/// An asset with zero variance makes the correlation undefined.
class DegenerateAssetError : public Error {
public:
    explicit DegenerateAssetError(std::string asset)
        : Error("degenerate asset (zero variance): " + asset), asset_(std::move(asset)) {}

    const std::string& asset() const { return asset_; }

private:
    std::string asset_;
};

/// A series (or its squares) has zero variance in a correlation computation.
class DegenerateSeriesError : public Error {
public:
    DegenerateSeriesError(std::size_t column, std::string measure)
        : Error("degenerate series in measure " + measure + ", column " +
                std::to_string(column)),
          column_(column), measure_(std::move(measure)) {}

    std::size_t column() const { return column_; }
    const std::string& measure() const { return measure_; }

private:
    std::size_t column_;
    std::string measure_;
};

/// Inverse square root requested on a spectrum with non-positive eigenvalues.
class SingularMatrixError : public Error {
public:
    explicit SingularMatrixError(std::vector<int> ranks)
        : Error(describe(ranks)), ranks_(std::move(ranks)) {}

    /// 1-based ranks (in descending-eigenvalue order) of the offending modes.
    const std::vector<int>& ranks() const { return ranks_; }

private:
    static std::string describe(const std::vector<int>& ranks) {
        std::string msg = "singular matrix: non-positive eigenvalues at ranks";
        for (int r : ranks) msg += " " + std::to_string(r);
        return msg;
    }
    std::vector<int> ranks_;
};

/// Cut-off rank incompatible with the spectrum (e.g. e_k <= 0).
class InvalidRankError : public Error {
public:
    using Error::Error;
};

/// Iterative numerical procedure failed to converge.
class NumericFailureError : public Error {
public:
    explicit NumericFailureError(int iterations)
        : Error("eigensolver failed to converge after " + std::to_string(iterations) +
                " iterations"),
          iterations_(iterations) {}

    int iterations() const { return iterations_; }

private:
    int iterations_;
};

/// Matrix expected to be positive semi-definite has a genuinely negative eigenvalue.
class NotPsdError : public Error {
public:
    using Error::Error;
};

/// Malformed input file; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(std::string path, std::size_t line, const std::string& what)
        : Error(path + ":" + std::to_string(line) + ": " + what),
          path_(std::move(path)), line_(line) {}

    const std::string& path() const { return path_; }
    std::size_t line() const { return line_; }

private:
    std::string path_;
    std::size_t line_;
};

/// Date index not strictly ascending.
class OrderingError : public Error {
public:
    using Error::Error;
};

/// Price mapping undefined for a cell (p <= 0, or 1 + R/R0 <= 0).
class MappingError : public Error {
public:
    MappingError(std::string date, std::string label, double value)
        : Error("price mapping undefined at (" + date + ", " + label +
                "): value " + std::to_string(value)),
          date_(std::move(date)), label_(std::move(label)) {}

    const std::string& date() const { return date_; }
    const std::string& label() const { return label_; }

private:
    std::string date_;
    std::string label_;
};

}  // namespace mvarch
