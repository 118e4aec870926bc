#pragma once

#include <vector>

#include "paramosc/integrator.hpp"
#include "paramosc/scenario.hpp"

namespace paramosc {

/// bdot*conj(b) - b*conj(bdot); equals i for a canonically normalized mode.
cplx wronskian(const OscState& s);

/// Thermal-equilibrium seeding at t0:
///   B(t0)    = i / sqrt(2*conj(eps(t0)))
///   Bdot(t0) = -sqrt(eps(t0)/2)
/// where eps(t0) is the principal complex square root of the squared mode
/// frequency. The principal branch keeps the Wronskian exactly i even when
/// eps(t0) is purely imaginary. A degenerate mode (eps = 0) is rejected.
OscState thermal_initial_conditions(const DriveParameters& p, Mode mode);

/// Solution of B'' + mode_frequency_squared(t)*B = 0 seeded by
/// thermal_initial_conditions, with its Wronskian drift record.
struct AuxiliaryTrajectory {
    Mode mode = Mode::minus;
    DriveParameters params;
    ScalarTrajectory traj;
    double max_wronskian_error = 0.0; // max |W(t) - i| over accepted steps

    OscState at(double t) const { return traj.at(t); }
    double t_end() const { return traj.t_end(); }
};

/// Propagates the thermal seed to t_end (> t0). Wronskian drift is monitored
/// at every accepted step; drift above 1e-6 aborts with a diagnostic naming
/// the time. sample_times, when given, are landed on exactly.
AuxiliaryTrajectory evolve_auxiliary(const DriveParameters& p, Mode mode, double t_end,
                                     const IntegratorConfig& cfg = {},
                                     const std::vector<double>* sample_times = nullptr);

/// The pair xi_-+(t) = -i*Bdot(t)/B(t); Re xi > 0 whenever the Wronskian
/// condition holds, which makes the downstream Gaussians normalizable.
struct ModeXiPair {
    cplx xi_minus, xi_plus;
    double t = 0.0;
};

ModeXiPair xi_at(const AuxiliaryTrajectory& traj_minus,
                 const AuxiliaryTrajectory& traj_plus, double t);

/// Characteristic length l(t) = sqrt(2)*|B(t)|.
double characteristic_length(const AuxiliaryTrajectory& traj, double t);

/// Normalized mode wave function
///   Phi_n(q,t) = (2^(-2n) / (2*pi*|B|^2*(n!)^2))^(1/4) * (conj(B)/B)^n
///                * H_n(q/(sqrt(2)|B|)) * exp(i*(Bdot/(2B))*q^2)
/// with H_n by the three-term recurrence. n is capped at 30 (recurrence
/// overflow guard); global phases are not included (they cancel in every
/// density computed from these).
cplx mode_wavefunction(const AuxiliaryTrajectory& traj, int n, double q, double t);

/// |Psi_00(x1,x2,t)|^2 = |Phi_0^-((x1-x2)/sqrt2)|^2 * |Phi_0^+((x1+x2)/sqrt2)|^2.
double joint_ground_density(const AuxiliaryTrajectory& traj_minus,
                            const AuxiliaryTrajectory& traj_plus,
                            double x1, double x2, double t);

} // namespace paramosc
