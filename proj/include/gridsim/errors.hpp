#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gridsim {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. Carries the 1-based line of the offending text (0 if unknown).
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& message)
        : Error(line == 0 ? source + ": " + message
                          : source + ":" + std::to_string(line) + ": " + message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Input parsed but violates a model invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Argument outside the domain of an operation.
class DomainError : public Error {
public:
    using Error::Error;
};

/// File could not be read or written.
class IoError : public Error {
public:
    using Error::Error;
};

/// Shape mismatch in tabular input (ragged rows, wrong entry count).
class ShapeError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Network topology unsuitable for the requested method.
class TopologyError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Floating-point failure: overflow guard tripped, singular system, no convergence.
class NumericError : public Error {
public:
    explicit NumericError(const std::string& message, double last_residual = 0.0)
        : Error(message), last_residual_(last_residual) {}

    double last_residual() const noexcept { return last_residual_; }

private:
    double last_residual_;
};

/// Iterative power-flow solver failed; keeps the per-iteration mismatch trace.
class SolverError : public NumericError {
public:
    SolverError(const std::string& message, std::vector<double> history)
        : NumericError(message, history.empty() ? 0.0 : history.back()),
          history_(std::move(history)) {}

    const std::vector<double>& mismatch_history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

/// Time-domain tracking blew up.
class DivergenceError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace gridsim
