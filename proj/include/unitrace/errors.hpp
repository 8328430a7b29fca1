#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace unitrace {

/// Short %g rendering of a number for error messages.
inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionMismatchError : public Error {
public:
    using Error::Error;
};

class NotUnitaryError : public Error {
public:
    using Error::Error;
};

/// A numerical precondition failed (tracking lost, quadrature did not converge, ...).
class NumericalError : public Error {
public:
    using Error::Error;
};

class TrackingError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class QuadratureError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Raised when an input violates the simple-zero / non-zero-speed hypotheses.
class HypothesisError : public Error {
public:
    using Error::Error;
};

/// Nullity of a matrix is not exactly one at the requested tolerance.
class RankDeficiencyError : public HypothesisError {
public:
    RankDeficiencyError(const std::string& what, int nullity)
        : HypothesisError(what), nullity_(nullity) {}
    int nullity() const noexcept { return nullity_; }

private:
    int nullity_;
};

class ZeroSpeedError : public HypothesisError {
public:
    using HypothesisError::HypothesisError;
};

/// Two eigenphase tracks reach 1 at (numerically) the same parameter.
class DegenerateCrossingError : public HypothesisError {
public:
    DegenerateCrossingError(const std::string& what, int track_a, int track_b, double k0)
        : HypothesisError(what), track_a_(track_a), track_b_(track_b), k0_(k0) {}
    int track_a() const noexcept { return track_a_; }
    int track_b() const noexcept { return track_b_; }
    double k0() const noexcept { return k0_; }

private:
    int track_a_;
    int track_b_;
    double k0_;
};

/// The remainder representation degenerates because h(1,k) vanishes.
class NearSingularError : public HypothesisError {
public:
    using HypothesisError::HypothesisError;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace unitrace
