#pragma once

#include <vector>

#include "paramosc/auxiliary.hpp"
#include "paramosc/integrator.hpp"
#include "paramosc/scenario.hpp"

namespace paramosc {

/// General quadratic Hamiltonian
///   H(t) = 1/2 * sum_i (mu_i(t) p_i^2 + nu_i(t) x_i^2) + gamma(t) x_1 x_2.
/// mu-derivative callables are optional; when empty, the coupled integrator
/// falls back to a central finite difference.
struct QuadraticHamiltonian {
    std::function<double(double)> mu1, mu2, nu1, nu2, gamma;
    std::function<double(double)> mu1_dot, mu2_dot;

    /// The Hamiltonian whose 45-degree normal modes carry the scenario's
    /// squared frequencies omega^2 -+ 2*omega*gamma(t): unit masses,
    /// nu = omega^2, and coupling 2*omega*(g + delta_g*cos(Omega*t)).
    /// (A plain x1x2 coupling c diagonalizes to omega^2 -+ c, so matching the
    /// scenario's mode energies requires the 2*omega factor here.)
    static QuadraticHamiltonian from_scenario(const DriveParameters& p);

    CoupledCoefficients coefficients() const;
};

/// The 2x2 auxiliary fields. Row i annihilates normal mode i; A_ik is tied to
/// Bdot by A_ik = -Bdot_ik / mu_k(t).
struct AuxiliaryMatrix {
    std::array<cplx, 4> B{};    // row-major B[i*2 + k]
    std::array<cplx, 4> Bdot{};
    std::array<cplx, 4> A{};
    double t = 0.0;
};

/// Max-abs residuals of the three conserved bilinears, with the 1/mu_k
/// weights as defined:
///   wc1: sum_k (Bdot_mk B_nk - Bdot_nk B_mk)/mu_k                  -> 0
///   wc2: the complex conjugate counterpart                          -> 0
///   wc3: sum_k (Bdot_mk conj(B_nk)/mu_k - B_mk conj(Bdot_nk)/mu_k) -> i*delta_mn
struct ConstraintResiduals {
    double wc1 = 0.0, wc2 = 0.0, wc3 = 0.0;
    double max_abs() const { return wc1 > wc2 ? (wc1 > wc3 ? wc1 : wc3) : (wc2 > wc3 ? wc2 : wc3); }
};

ConstraintResiduals constraint_residuals(const AuxiliaryMatrix& m,
                                         const QuadraticHamiltonian& h);

/// Initial matrix composed from the two thermal mode seeds through the
/// 45-degree rotation: row 1 = (B-, -B-)/sqrt2, row 2 = (B+, B+)/sqrt2.
/// Satisfies all three constraints at t0 to machine precision.
AuxiliaryMatrix normal_mode_init(const DriveParameters& p);

/// Coupled trajectory with constraint monitoring.
struct GeneralTrajectory {
    CoupledTrajectory traj;
    double max_residual = 0.0; // worst wc residual over accepted steps

    /// Sample with A derived from Bdot; exact at stored nodes.
    AuxiliaryMatrix at(const QuadraticHamiltonian& h, double t) const;
};

/// Propagates init to t_end. init must satisfy the constraints within 1e-10;
/// residual drift beyond 1e-6 during integration aborts with the time and the
/// worst residual. sample_times, when given, are landed on exactly.
GeneralTrajectory evolve_general(const QuadraticHamiltonian& h,
                                 const AuxiliaryMatrix& init, double t_end,
                                 const IntegratorConfig& cfg = {},
                                 const std::vector<double>* sample_times = nullptr);

/// Recovers one normal-mode amplitude from a matrix seeded by
/// normal_mode_init: B- = sqrt2 * B_11, B+ = sqrt2 * B_21.
OscState extract_mode(const AuxiliaryMatrix& m, Mode mode);

/// Ground-state joint density evaluated from the matrix fields through the
/// rotation identity; the dual path to joint_ground_density.
double joint_ground_density_general(const AuxiliaryMatrix& m, double x1, double x2);

} // namespace paramosc
