#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "paramosc/integrator.hpp"
#include "paramosc/scenario.hpp"

namespace paramosc {

/// Canonical form f'' + (a - 2b*cos(2*tau))*f = 0 with period pi in the
/// canonical time tau = Omega*t/2. b may be negative (the plus mode maps to
/// b = -4*omega*delta_g/Omega^2).
struct CanonicalMathieuParams {
    double a = 0.0;
    double b = 0.0;
};

/// a = 4*(omega^2 -+ 2*omega*g)/Omega^2, b = +-4*omega*delta_g/Omega^2
/// (upper signs for the minus mode).
CanonicalMathieuParams canonical_params(const DriveParameters& p, Mode mode);

/// Monodromy data over one canonical period. The exponent F is reported per
/// canonical time unit with Im F >= 0; F is defined only modulo the Floquet
/// lattice, so comparisons should use the trace or the multiplier moduli,
/// never raw Re F.
struct FloquetResult {
    std::array<double, 4> monodromy{}; // row-major [m00 m01; m10 m11] at tau = pi
    cplx exponent;                     // acos(tr M / 2)/pi, principal branch, Im >= 0
    bool stable = false;               // |tr M| <= 2
    bool marginal = false;             // | |tr M| - 2 | <= classification tolerance
    std::array<double, 2> multiplier_moduli{};

    double trace() const { return monodromy[0] + monodromy[3]; }
    double det() const { return monodromy[0] * monodromy[3] - monodromy[1] * monodromy[2]; }
};

/// Cells whose | |tr M| - 2 | falls within this bound are flagged marginal.
inline constexpr double classification_tolerance = 1e-9;

/// Integrates the canonical equation over tau in [0, pi] for the fundamental
/// columns with initial conditions (1,0) and (0,1).
FloquetResult compute_monodromy(const CanonicalMathieuParams& p,
                                const IntegratorConfig& cfg = {});

/// Exponent per physical time unit: F_phys = (Omega/2) * F_canonical.
cplx physical_exponent(cplx canonical_exponent, double Omega);

/// One sample of the straight line g -> (a(g), b(g)) traced by both modes,
/// with delta_g tied to g through delta_g = delta_ratio * g.
struct ModeLinePoint {
    double g = 0.0;
    CanonicalMathieuParams minus, plus;
    FloquetResult floq_minus, floq_plus;
};

/// Samples the line over [g_min, g_max] at n evenly spaced points, ordered by
/// g. omega, Omega, and t0 come from base; g and delta_g are overridden.
std::vector<ModeLinePoint> mode_line(const DriveParameters& base, double g_min,
                                     double g_max, int n, double delta_ratio,
                                     const IntegratorConfig& cfg = {});

/// Row-major stability grid (b varies over rows, a over columns).
struct StabilityChart {
    std::vector<double> a_values, b_values;
    std::vector<std::uint8_t> stable; // size a_values.size() * b_values.size()
    std::vector<double> im_f;

    std::size_t index(std::size_t ib, std::size_t ia) const {
        return ib * a_values.size() + ia;
    }
};

StabilityChart stability_chart(double a_min, double a_max, double b_min,
                               double b_max, int resolution,
                               const IntegratorConfig& cfg = {});

/// Bisects a in [a_lo, a_hi] for the |tr M| = 2 boundary at fixed b.
/// The endpoints must classify differently.
double bisect_tongue_edge(double b, double a_lo, double a_hi, double tol_a,
                          const IntegratorConfig& cfg = {});

/// Bisects g for the stability boundary of one mode along the delta_ratio
/// line. The endpoints must classify differently.
double bisect_line_boundary(const DriveParameters& base, Mode mode,
                            double delta_ratio, double g_lo, double g_hi,
                            double tol_g, const IntegratorConfig& cfg = {});

} // namespace paramosc
