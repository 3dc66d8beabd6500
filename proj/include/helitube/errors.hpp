#pragma once

#include <stdexcept>
#include <string>

namespace helitube {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid HelixSpec or run configuration.
class InvalidSpec : public Error {
public:
    using Error::Error;
};

/// Frenet frame undefined: curvature and torsion both vanish.
class DegenerateCurve : public Error {
public:
    using Error::Error;
};

/// Zero torsion leaves the s-period undefined and none was supplied.
class DegeneratePeriod : public Error {
public:
    using Error::Error;
};

/// The tube would self-intersect (epsilon = rho0 * kappa >= 1).
class EmbeddingViolation : public Error {
public:
    using Error::Error;
};

/// A wave field was passed in the wrong gauge (PSI vs PHI).
class GaugeMismatch : public Error {
public:
    using Error::Error;
};

/// Grid sizes or layouts of two fields do not agree.
class GridMismatch : public Error {
public:
    using Error::Error;
};

/// First-order Bloch coefficient hit a vanishing energy denominator.
class NearResonance : public Error {
public:
    using Error::Error;
};

/// Near-boundary expansion requested outside K^2 G^2 < 0.1 U^2.
class OutOfValidity : public Error {
public:
    using Error::Error;
};

/// Band Hessian numerically singular; no effective mass.
class SingularMass : public Error {
public:
    using Error::Error;
};

/// Dense eigensolver missed the residual target.
class ConvergenceFailure : public Error {
public:
    using Error::Error;
};

/// Matrix larger than the configured desk-scale limit.
class DimensionLimit : public Error {
public:
    using Error::Error;
};

}  // namespace helitube
