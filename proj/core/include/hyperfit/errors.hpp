#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hyperfit {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operands of incompatible shape (matrix sizes, data arity, ...).
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A computation left the range of finite doubles, or an input is not
/// a valid point of the manifold it claims to live on.
class NumericRangeError : public Error {
public:
    using Error::Error;
};

/// Caller-supplied arguments violating a precondition (empty data, tol <= 0).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Malformed text input. `line()` is 1-based; 0 when not tied to a line.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

}  // namespace hyperfit
