#include "paramosc/mathieu.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "paramosc/parallel.hpp"

namespace paramosc {

namespace {

constexpr double pi = std::numbers::pi;

DriveParameters line_point(const DriveParameters& base, double g, double delta_ratio) {
    DriveParameters p = base;
    p.g = g;
    p.delta_g = delta_ratio * g;
    p.validate();
    return p;
}

} // namespace

CanonicalMathieuParams canonical_params(const DriveParameters& p, Mode mode) {
    p.validate();
    const double s = mode == Mode::minus ? 1.0 : -1.0;
    const double om2 = p.Omega * p.Omega;
    CanonicalMathieuParams out;
    out.a = 4.0 * (p.omega * p.omega - s * 2.0 * p.omega * p.g) / om2;
    out.b = s * 4.0 * p.omega * p.delta_g / om2;
    return out;
}

FloquetResult compute_monodromy(const CanonicalMathieuParams& p,
                                const IntegratorConfig& cfg) {
    if (!std::isfinite(p.a) || !std::isfinite(p.b))
        throw validation_error("mathieu parameters must be finite");
    const auto freq = [a = p.a, b = p.b](double tau) { return a - 2.0 * b * std::cos(2.0 * tau); };

    FloquetResult r;
    for (int col = 0; col < 2; ++col) {
        OscState init;
        init.t = 0.0;
        init.b = col == 0 ? 1.0 : 0.0;
        init.bdot = col == 0 ? 0.0 : 1.0;
        const auto traj = propagate_scalar(freq, init, pi, cfg);
        const auto end = traj.steps().back();
        r.monodromy[0 * 2 + col] = end.b.real();
        r.monodromy[1 * 2 + col] = end.bdot.real();
    }

    const double tr = r.trace();
    r.stable = std::abs(tr) <= 2.0;
    r.marginal = std::abs(std::abs(tr) - 2.0) <= classification_tolerance;

    cplx f = std::acos(cplx(tr / 2.0, 0.0)) / pi;
    if (f.imag() < 0.0) f = std::conj(f);
    r.exponent = f;

    const double disc = tr * tr - 4.0;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        const double l1 = std::abs((tr + s) / 2.0);
        const double l2 = std::abs((tr - s) / 2.0);
        r.multiplier_moduli = {std::max(l1, l2), std::min(l1, l2)};
    } else {
        // Complex conjugate pair; both moduli equal sqrt(|det M|).
        const double m = std::sqrt(std::abs(r.det()));
        r.multiplier_moduli = {m, m};
    }
    return r;
}

cplx physical_exponent(cplx canonical_exponent, double Omega) {
    if (!(Omega > 0.0))
        throw validation_error("Omega must be > 0");
    return canonical_exponent * (Omega / 2.0);
}

std::vector<ModeLinePoint> mode_line(const DriveParameters& base, double g_min,
                                     double g_max, int n, double delta_ratio,
                                     const IntegratorConfig& cfg) {
    if (!std::isfinite(g_min) || !std::isfinite(g_max) || !(g_min < g_max))
        throw validation_error("g range must be finite with g_min < g_max");
    if (n < 2)
        throw validation_error("mode line needs at least 2 samples");
    if (!std::isfinite(delta_ratio) || delta_ratio < 0.0)
        throw validation_error("delta_ratio must be finite and >= 0");

    // Validate every grid point up front so nothing is half-computed.
    std::vector<double> gs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        gs[i] = g_min + (g_max - g_min) * i / (n - 1);
        (void)line_point(base, gs[i], delta_ratio);
    }

    std::vector<ModeLinePoint> out(gs.size());
    parallel_for(gs.size(), [&](std::size_t i) {
        const auto p = line_point(base, gs[i], delta_ratio);
        ModeLinePoint& pt = out[i];
        pt.g = gs[i];
        pt.minus = canonical_params(p, Mode::minus);
        pt.plus = canonical_params(p, Mode::plus);
        pt.floq_minus = compute_monodromy(pt.minus, cfg);
        pt.floq_plus = compute_monodromy(pt.plus, cfg);
    });
    return out;
}

StabilityChart stability_chart(double a_min, double a_max, double b_min,
                               double b_max, int resolution,
                               const IntegratorConfig& cfg) {
    if (!std::isfinite(a_min) || !std::isfinite(a_max) || !(a_min < a_max))
        throw validation_error("a range must be finite with a_min < a_max");
    if (!std::isfinite(b_min) || !std::isfinite(b_max) || !(b_min < b_max))
        throw validation_error("b range must be finite with b_min < b_max");
    if (resolution < 2)
        throw validation_error("chart resolution must be at least 2");

    StabilityChart chart;
    const auto ns = static_cast<std::size_t>(resolution);
    chart.a_values.resize(ns);
    chart.b_values.resize(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        chart.a_values[i] = a_min + (a_max - a_min) * i / (ns - 1);
        chart.b_values[i] = b_min + (b_max - b_min) * i / (ns - 1);
    }
    chart.stable.resize(ns * ns);
    chart.im_f.resize(ns * ns);
    parallel_for(ns * ns, [&](std::size_t idx) {
        const std::size_t ib = idx / ns, ia = idx % ns;
        const auto r = compute_monodromy({chart.a_values[ia], chart.b_values[ib]}, cfg);
        chart.stable[idx] = r.stable ? 1 : 0;
        chart.im_f[idx] = r.exponent.imag();
    });
    return chart;
}

namespace {

double bisect(double lo, double hi, double tol,
              const std::function<bool(double)>& classify) {
    if (!(tol > 0.0))
        throw validation_error("bisection tolerance must be > 0");
    if (!(lo < hi))
        throw validation_error("bisection interval must satisfy lo < hi");
    const bool side_lo = classify(lo);
    if (classify(hi) == side_lo)
        throw validation_error("bisection endpoints classify identically");
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        (classify(mid) == side_lo ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

double bisect_tongue_edge(double b, double a_lo, double a_hi, double tol_a,
                          const IntegratorConfig& cfg) {
    return bisect(a_lo, a_hi, tol_a, [&](double a) {
        return compute_monodromy({a, b}, cfg).stable;
    });
}

double bisect_line_boundary(const DriveParameters& base, Mode mode,
                            double delta_ratio, double g_lo, double g_hi,
                            double tol_g, const IntegratorConfig& cfg) {
    return bisect(g_lo, g_hi, tol_g, [&](double g) {
        const auto p = line_point(base, g, delta_ratio);
        return compute_monodromy(canonical_params(p, mode), cfg).stable;
    });
}

} // namespace paramosc
