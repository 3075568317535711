#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace kdl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression source. `offset` is the byte offset of the offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t offset)
        : Error(message + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// An expression was evaluated outside its domain (log of a non-positive
/// number, sqrt of a negative, division by zero, or a non-finite result).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Adaptive refinement or an iterative solver failed to meet its tolerance.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of an operation was violated by the caller.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A search exhausted its budget without meeting its target. The object
/// searched for may still exist; this is a solver limitation.
class BudgetExhausted : public Error {
public:
    using Error::Error;
};

/// A candidate certificate violates one of its invariants.
class CertificationError : public Error {
public:
    using Error::Error;
};

}  // namespace kdl
