#include "paramosc/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "paramosc/parallel.hpp"

namespace paramosc {

namespace {

constexpr double pi = std::numbers::pi;
// 45-degree mode rotation; kept symbolic so the formulas below read like the
// general rotation they come from.
constexpr double c2 = 0.5, s2 = 0.5;

void require_static_form(const DriveParameters& p) {
    p.validate();
    if (p.delta_g != 0.0)
        throw validation_error("the closed static form requires delta_g = 0");
    if (!(p.g < p.omega / 2.0))
        throw validation_error("the closed static form requires g < omega/2");
}

} // namespace

ReducedGaussianParams reduced_params(const ModeXiPair& xi) {
    const double u = xi.xi_minus.real(), v = xi.xi_plus.real();
    if (!(u > 0.0) || !(v > 0.0))
        throw numerical_error("Re(xi) must be positive for both modes; "
                              "the auxiliary Wronskian is corrupted");
    const cplx d = xi.xi_minus - xi.xi_plus;
    const double denom = u * c2 + v * s2;

    ReducedGaussianParams out;
    out.alpha = (std::conj(xi.xi_minus) * s2 + std::conj(xi.xi_plus) * c2) / 2.0 -
                c2 * s2 * std::conj(d) * std::conj(d) / (4.0 * denom);
    out.beta = c2 * s2 * std::norm(d) / (2.0 * denom);
    out.lambda = std::sqrt(u * v / (pi * denom));
    return out;
}

cplx reduced_density(const ReducedGaussianParams& p, double x2p, double x2) {
    const double re = -p.alpha.real() * (x2p * x2p + x2 * x2) + p.beta * x2p * x2;
    const double im = p.alpha.imag() * (x2p * x2p - x2 * x2);
    return p.lambda * std::exp(cplx(re, im));
}

double linear_entropy(const ReducedGaussianParams& p) {
    const double radicand = 4.0 * p.alpha.real() * p.alpha.real() - p.beta * p.beta;
    if (!(radicand > 0.0))
        throw numerical_error("reduced state quadratic form is not positive; "
                              "upstream Wronskian corruption");
    const double value = 1.0 - pi * p.lambda * p.lambda / std::sqrt(radicand);
    // Nonnegative by construction (beta >= 0 makes the purity at most 1), but
    // rounding undershoots by a few ulps when the mode functions coincide.
    // Snap those to exactly zero; larger negatives cannot arise from finite
    // inputs that passed the radicand check.
    return value < 0.0 && value > -1e-12 ? 0.0 : value;
}

double linear_entropy_static(const DriveParameters& p) {
    require_static_form(p);
    const double em = std::sqrt(p.omega * p.omega - 2.0 * p.omega * p.g);
    const double ep = std::sqrt(p.omega * p.omega + 2.0 * p.omega * p.g);
    return 1.0 - 2.0 * std::sqrt(em * ep) / (em + ep);
}

std::vector<EntropyPoint> entropy_series(const AuxiliaryTrajectory& traj_minus,
                                         const AuxiliaryTrajectory& traj_plus,
                                         const std::vector<double>& times) {
    std::vector<EntropyPoint> out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const auto xi = xi_at(traj_minus, traj_plus, times[i]);
        const double L = linear_entropy(reduced_params(xi));
        out[i] = {times[i], L, 1.0 - L};
    }
    return out;
}

double von_neumann_entropy(double purity) {
    if (!(purity > 0.0) || purity > 1.0)
        throw validation_error("purity must lie in (0, 1]");
    const double nu = 1.0 / (2.0 * purity);
    const double a = nu + 0.5, b = nu - 0.5;
    return a * std::log(a) - (b > 0.0 ? b * std::log(b) : 0.0);
}

double wigner(const ReducedGaussianParams& p, double q, double p_mom) {
    const double D = 2.0 * p.alpha.real() + p.beta;
    const double quad = 4.0 * std::norm(p.alpha) - p.beta * p.beta;
    if (!(D > 0.0) || !(quad > 0.0))
        throw numerical_error("Wigner quadratic form is not positive definite");
    return p.lambda / std::sqrt(pi * D) *
           std::exp((4.0 * p.alpha.imag() * q * p_mom - (q * q * quad + p_mom * p_mom)) / D);
}

double wigner_static(const DriveParameters& p, double q, double p_mom) {
    require_static_form(p);
    const double em = std::sqrt(p.omega * p.omega - 2.0 * p.omega * p.g);
    const double ep = std::sqrt(p.omega * p.omega + 2.0 * p.omega * p.g);
    return 2.0 * std::sqrt(em * ep) / (pi * (em + ep)) *
           std::exp(-2.0 * (em * ep * q * q + p_mom * p_mom) / (em + ep));
}

double purity_from_wigner(const ReducedGaussianParams& p) {
    // Integrates 2*pi*W^2 through the quadratic form of W itself:
    //   W = N exp(-x^T Q x),  integral of W^2 = N^2 * pi / (2 sqrt(det Q)).
    const double D = 2.0 * p.alpha.real() + p.beta;
    const double quad = 4.0 * std::norm(p.alpha) - p.beta * p.beta;
    if (!(D > 0.0) || !(quad > 0.0))
        throw numerical_error("Wigner quadratic form is not positive definite");
    const double n0 = p.lambda / std::sqrt(pi * D);
    const double q_qq = quad / D;
    const double q_pp = 1.0 / D;
    const double q_qp = -2.0 * p.alpha.imag() / D;
    const double det_q = q_qq * q_pp - q_qp * q_qp;
    if (!(det_q > 0.0))
        throw numerical_error("Wigner quadratic form is not positive definite");
    return pi * pi * n0 * n0 / std::sqrt(det_q);
}

double WignerGrid::cell_area() const {
    if (q_values.size() < 2 || p_values.size() < 2)
        throw validation_error("grid needs at least 2 points per axis");
    return (q_values[1] - q_values[0]) * (p_values[1] - p_values[0]);
}

double WignerGrid::sum_times_cell_area() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s * cell_area();
}

double WignerGrid::effective_support_area() const {
    if (values.empty())
        throw validation_error("grid is empty");
    const double threshold = *std::max_element(values.begin(), values.end()) / std::numbers::e;
    std::size_t count = 0;
    for (double v : values)
        if (v > threshold) ++count;
    return static_cast<double>(count) * cell_area();
}

WignerGrid wigner_grid(const AuxiliaryTrajectory& traj_minus,
                       const AuxiliaryTrajectory& traj_plus, double t,
                       double q_min, double q_max, double p_min, double p_max,
                       int resolution) {
    if (!std::isfinite(q_min) || !std::isfinite(q_max) || !(q_min < q_max))
        throw validation_error("q range must be finite with q_min < q_max");
    if (!std::isfinite(p_min) || !std::isfinite(p_max) || !(p_min < p_max))
        throw validation_error("p range must be finite with p_min < p_max");
    if (resolution < 2)
        throw validation_error("grid resolution must be at least 2");

    const auto params = reduced_params(xi_at(traj_minus, traj_plus, t));
    const auto ns = static_cast<std::size_t>(resolution);

    WignerGrid grid;
    grid.q_values.resize(ns);
    grid.p_values.resize(ns);
    for (std::size_t i = 0; i < ns; ++i) {
        grid.q_values[i] = q_min + (q_max - q_min) * i / (ns - 1);
        grid.p_values[i] = p_min + (p_max - p_min) * i / (ns - 1);
    }
    grid.values.resize(ns * ns);
    parallel_for(ns, [&](std::size_t iq) {
        for (std::size_t ip = 0; ip < ns; ++ip)
            grid.values[iq * ns + ip] = wigner(params, grid.q_values[iq], grid.p_values[ip]);
    });
    return grid;
}

} // namespace paramosc
