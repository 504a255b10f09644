#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace kinhydro {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A density fell outside the velocity grid, so its equilibrium cannot be projected.
class OutOfRange : public Error {
public:
    using Error::Error;
};

class LengthMismatch : public Error {
public:
    using Error::Error;
};

class NonConvexFlux : public Error {
public:
    using Error::Error;
};

class CflViolation : public Error {
public:
    using Error::Error;
};

class VelocityCflViolation : public Error {
public:
    using Error::Error;
};

/// Nonzero density reached the outermost velocity cells during a force step.
class SupportEscape : public Error {
public:
    using Error::Error;
};

class NumericalBlowup : public Error {
public:
    NumericalBlowup(const std::string& what, std::size_t step)
        : Error(what), step_(step) {}
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, std::vector<double> residuals)
        : Error(what), residuals_(std::move(residuals)) {}
    const std::vector<double>& residuals() const { return residuals_; }

private:
    std::vector<double> residuals_;
};

class GridMismatch : public Error {
public:
    using Error::Error;
};

class WindowTouchesBoundary : public Error {
public:
    using Error::Error;
};

/// Configuration rejected before any run; the message names the violated invariant.
class ConfigError : public Error {
public:
    using Error::Error;
};

class ManifestMismatch : public Error {
public:
    using Error::Error;
};

} // namespace kinhydro
