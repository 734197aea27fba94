#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace bivarfun {

/// Base class for all errors thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Incompatible or invalid matrix/vector dimensions.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A requested operation would exceed a configured size cap.
class SizeLimitError : public Error {
public:
    using Error::Error;
};

/// Linear system is singular to working precision.
class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& what, double pivot)
        : Error(what), pivot_magnitude(pivot) {}
    double pivot_magnitude;
};

/// Eigenvalue iteration failed to converge.
class EigenSolverError : public Error {
public:
    using Error::Error;
};

/// Expression text could not be parsed; `offset` is the byte position.
class SyntaxError : public Error {
public:
    SyntaxError(const std::string& what, std::size_t offset_)
        : Error(what + " (at offset " + std::to_string(offset_) + ")"), offset(offset_) {}
    std::size_t offset;
};

/// Expression evaluation hit a singular point (division by zero, log/sqrt at 0)
/// or produced a non-finite value; `node` names the offending operation.
class EvalDomainError : public Error {
public:
    EvalDomainError(const std::string& what, std::string node_)
        : Error(what + " [node: " + node_ + "]"), node(std::move(node_)) {}
    std::string node;
};

/// Function failed the analyticity probe on the given contours.
class AnalyticityError : public Error {
public:
    using Error::Error;
};

/// A diagonalization-based oracle cannot be applied to this input.
class OracleUnavailableError : public Error {
public:
    using Error::Error;
};

/// File or stream I/O failure, including malformed matrix files.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace bivarfun
