#pragma once

#include <vector>

#include "paramosc/auxiliary.hpp"

namespace paramosc {

/// Parameters (alpha, beta, Lambda) of the one-oscillator reduced density
/// matrix rho(x', x) = Lambda * exp(-Re(alpha)(x'^2+x^2) + beta*x*x')
///                            * exp(i*Im(alpha)(x'^2-x^2)).
/// The 45-degree mode rotation is symmetric, c = s = 1/sqrt2; the formulas
/// keep c, s symbolic internally but the public surface fixes them.
struct ReducedGaussianParams {
    cplx alpha{};
    double beta = 0.0;   // >= 0
    double lambda = 0.0; // > 0
};

/// alpha = (conj(xi-)*s^2 + conj(xi+)*c^2)/2
///         - c^2 s^2 [conj(xi- - xi+)]^2 / (4*(Re(xi-)c^2 + Re(xi+)s^2))
/// beta  = c^2 s^2 |xi- - xi+|^2 / (2*(Re(xi-)c^2 + Re(xi+)s^2))
/// Lambda = sqrt(Re(xi-)Re(xi+) / (pi*(Re(xi-)c^2 + Re(xi+)s^2)))
/// Requires Re(xi-) > 0 and Re(xi+) > 0.
ReducedGaussianParams reduced_params(const ModeXiPair& xi);

/// Matrix element rho(x2p, x2) of the reduced density operator.
cplx reduced_density(const ReducedGaussianParams& p, double x2p, double x2);

/// L = 1 - pi*Lambda^2 / sqrt(4*Re(alpha)^2 - beta^2), in [0, 1).
/// A non-positive radicand signals Wronskian corruption upstream and raises
/// numerical_error rather than being clamped.
double linear_entropy(const ReducedGaussianParams& p);

/// Closed static form: for delta_g = 0 and 0 < g < omega/2,
/// L = 1 - 2*sqrt(eps- * eps+)/(eps- + eps+) with eps-+ = sqrt(omega^2 -+ 2*omega*g).
double linear_entropy_static(const DriveParameters& p);

struct EntropyPoint {
    double t = 0.0;
    double L = 0.0;
    double purity = 0.0;
};

/// L(t) along both trajectories at the given times; purity = 1 - L.
std::vector<EntropyPoint> entropy_series(const AuxiliaryTrajectory& traj_minus,
                                         const AuxiliaryTrajectory& traj_plus,
                                         const std::vector<double>& times);

/// Single-mode Gaussian entropy from purity: nu = 1/(2*purity),
/// S = (nu + 1/2)ln(nu + 1/2) - (nu - 1/2)ln(nu - 1/2), with S(1) = 0.
/// Requires purity in (0, 1].
double von_neumann_entropy(double purity);

/// W(q,p) = Lambda*(pi*(2Re(alpha)+beta))^(-1/2)
///          * exp[4*Im(alpha)*q*p/(2Re(alpha)+beta)]
///          * exp[-(q^2*(4|alpha|^2-beta^2) + p^2)/(2Re(alpha)+beta)]
/// Requires 2Re(alpha)+beta > 0 and 4|alpha|^2-beta^2 > 0.
double wigner(const ReducedGaussianParams& p, double q, double p_mom);

/// Static closed form for delta_g = 0, g < omega/2:
/// W = (2 sqrt(eps-*eps+)/(pi(eps-+eps+))) * exp[-2(eps-*eps+*q^2 + p^2)/(eps-+eps+)].
/// Agrees pointwise with wigner(reduced_params(...)) on the same scenario.
double wigner_static(const DriveParameters& p, double q, double p_mom);

/// 2*pi * integral of W^2, evaluated through the Gaussian quadratic form of W
/// (normalization and form determinant), an arithmetic path independent of
/// linear_entropy. Equals 1 - L analytically.
double purity_from_wigner(const ReducedGaussianParams& p);

/// Row-major Wigner grid: values[iq * p_values.size() + ip].
struct WignerGrid {
    std::vector<double> q_values, p_values;
    std::vector<double> values;
    double cell_area() const;
    double sum_times_cell_area() const;
    /// Cell count with value > max/e, times cell area: the effective support
    /// area used to quantify phase-space localization.
    double effective_support_area() const;
};

WignerGrid wigner_grid(const AuxiliaryTrajectory& traj_minus,
                       const AuxiliaryTrajectory& traj_plus, double t,
                       double q_min, double q_max, double p_min, double p_max,
                       int resolution);

} // namespace paramosc
