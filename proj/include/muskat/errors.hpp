#pragma once

#include <stdexcept>
#include <string>

namespace muskat {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Physical constants or run configuration violate their invariants.
class InvalidConfiguration : public Error {
public:
    using Error::Error;
};

/// Arguments that must share one grid were sampled on different grids.
class GridMismatch : public Error {
public:
    using Error::Error;
};

/// A function that must decay at the window edge does not.
class DecayCheckFailed : public Error {
public:
    using Error::Error;
};

/// NaN or Inf appeared in data that must stay finite.
class NonFinite : public Error {
public:
    using Error::Error;
};

/// The dense sheet-strength operator could not be factorized reliably.
/// Should never happen for |a_mu| < 1; reported as an anomaly.
class DegenerateOperator : public Error {
public:
    using Error::Error;
};

/// Adaptive stepping asked for a step below dt_min.
class DtUnderflow : public Error {
public:
    using Error::Error;
};

/// Zero surface tension run left the Rayleigh-Taylor set.
class RTBreakdown : public Error {
public:
    RTBreakdown(const std::string& what, double time, double infimum)
        : Error(what), time_(time), infimum_(infimum) {}
    double time() const noexcept { return time_; }
    double infimum() const noexcept { return infimum_; }

private:
    double time_;
    double infimum_;
};

/// Off-interface evaluation requested inside the guard band.
class PointTooClose : public Error {
public:
    using Error::Error;
};

/// A pressure integration path would cross the interface.
class PathCrossesInterface : public Error {
public:
    using Error::Error;
};

/// Malformed configuration, snapshot, or points file.
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace muskat
