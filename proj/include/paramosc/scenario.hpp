#pragma once

#include <string>

#include "paramosc/errors.hpp"

namespace paramosc {

/// Physical scenario: two unit-mass oscillators of frequency omega, coupled
/// with strength gamma(t) = g + delta_g*cos(Omega*t), starting at t0.
/// Immutable value type; validate() is called by every consumer entry point.
struct DriveParameters {
    double omega = 1.0;
    double g = 0.4;
    double delta_g = 0.04;
    double Omega = 1.0;
    double t0 = 0.0;

    /// Throws validation_error naming the offending field.
    /// Requires omega > 0, Omega > 0, delta_g >= 0, and either g > delta_g
    /// (driven case) or g >= 0 with delta_g = 0 (constant coupling). Both
    /// keep gamma(t) from changing sign; configurations where it could flip
    /// mid-period are rejected rather than guessed at.
    void validate() const;
};

/// Selects one of the two normal modes. The minus mode is the soft mode:
/// its squared frequency omega^2 - 2*omega*gamma(t) may go negative.
enum class Mode { minus, plus };

inline const char* mode_name(Mode m) { return m == Mode::minus ? "minus" : "plus"; }

/// gamma(t) = g + delta_g*cos(Omega*t); nonnegative for valid parameters.
double coupling_at(const DriveParameters& p, double t);

/// Squared normal-mode frequency omega^2 -+ 2*omega*gamma(t).
/// A negative return for the minus mode is legal and must be handled downstream.
double mode_frequency_squared(const DriveParameters& p, Mode mode, double t);

/// Loads a JSON scenario file with keys omega, g, delta_g, Omega, t0.
/// Unknown keys are rejected; error messages name the offending key.
DriveParameters load_scenario(const std::string& path);

} // namespace paramosc
