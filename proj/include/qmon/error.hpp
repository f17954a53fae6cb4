// error.hpp
// Exception types shared across the library.

#pragma once

#include <stdexcept>
#include <string>

namespace qmon {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Operands live on different grids.
class GridMismatch : public Error {
public:
    GridMismatch() : Error("wave functions live on different grids") {}
    explicit GridMismatch(const std::string& what) : Error(what) {}
};

// A Gaussian window was applied far outside the support of the state, leaving
// nothing to renormalize.
class ZeroPosteriorNorm : public Error {
public:
    using Error::Error;
};

// NaN/Inf or a blown-up amplitude.
class NumericalFailure : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& what, int line = -1, int column = -1)
        : Error(line >= 0 ? what + " (line " + std::to_string(line + 1) + ", column " +
                                std::to_string(column + 1) + ")"
                          : what),
          line_(line),
          column_(column) {}

    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

// Binary container problems: bad magic, truncation, inconsistent header.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace qmon
