#pragma once
#include <stdexcept>
#include <string>
#include <vector>

namespace kerrosc {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Fock-space truncation too small for the occupied window.
class TruncationError : public Error {
public:
    TruncationError(const std::string& msg, int suggested) :
        Error(msg), suggested_n_max(suggested) {}
    int suggested_n_max;
};

/// Barrier/branch-point structure of the tunneling integrand is not the expected one.
class TopologyError : public Error {
public:
    TopologyError(const std::string& msg, std::vector<double> roots_ = {}) :
        Error(msg), roots(std::move(roots_)) {}
    std::vector<double> roots;
};

/// A contour or endpoint-adapted quadrature failed its consistency check.
class QuadratureError : public Error {
public:
    using Error::Error;
};

/// Orbit integration failed to close or preserve quasienergy.
class IntegrationError : public Error {
public:
    using Error::Error;
};

/// Linear solve failed or produced an unusable residual.
class SolverError : public Error {
public:
    SolverError(const std::string& msg, double residual_ = 0) :
        Error(msg), residual(residual_) {}
    double residual;
};

} // namespace kerrosc
