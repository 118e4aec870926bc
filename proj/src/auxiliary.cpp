#include "paramosc/auxiliary.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace paramosc {

namespace {

std::string fmt_time(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", t);
    return buf;
}

} // namespace

cplx wronskian(const OscState& s) {
    return s.bdot * std::conj(s.b) - s.b * std::conj(s.bdot);
}

OscState thermal_initial_conditions(const DriveParameters& p, Mode mode) {
    p.validate();
    const double eps2 = mode_frequency_squared(p, mode, p.t0);
    if (eps2 == 0.0)
        throw validation_error("mode frequency vanishes at t0; thermal seeding is undefined");
    const cplx eps = std::sqrt(cplx(eps2, 0.0));
    OscState s;
    s.t = p.t0;
    s.b = cplx(0.0, 1.0) / std::sqrt(2.0 * std::conj(eps));
    s.bdot = -std::sqrt(eps / 2.0);
    return s;
}

AuxiliaryTrajectory evolve_auxiliary(const DriveParameters& p, Mode mode, double t_end,
                                     const IntegratorConfig& cfg,
                                     const std::vector<double>* sample_times) {
    const auto init = thermal_initial_conditions(p, mode);
    const auto freq = [p, mode](double t) { return mode_frequency_squared(p, mode, t); };

    AuxiliaryTrajectory out;
    out.mode = mode;
    out.params = p;
    out.traj = propagate_scalar(freq, init, t_end, cfg, sample_times);

    for (const auto& s : out.traj.steps()) {
        const double err = std::abs(wronskian(s) - cplx(0.0, 1.0));
        if (err > 1e-6)
            throw numerical_error("Wronskian drift " + std::to_string(err) +
                                  " exceeds 1e-6 at t=" + fmt_time(s.t));
        if (err > out.max_wronskian_error)
            out.max_wronskian_error = err;
    }
    return out;
}

namespace {

cplx xi_of(const OscState& s) {
    if (std::abs(s.b) == 0.0)
        throw numerical_error("auxiliary function vanished at t=" + fmt_time(s.t));
    return cplx(0.0, -1.0) * s.bdot / s.b;
}

void require_mode_pair(const AuxiliaryTrajectory& tm, const AuxiliaryTrajectory& tp) {
    if (tm.mode != Mode::minus || tp.mode != Mode::plus)
        throw validation_error("expected the minus and plus trajectories, in that order");
}

} // namespace

ModeXiPair xi_at(const AuxiliaryTrajectory& traj_minus,
                 const AuxiliaryTrajectory& traj_plus, double t) {
    require_mode_pair(traj_minus, traj_plus);
    ModeXiPair out;
    out.t = t;
    out.xi_minus = xi_of(traj_minus.at(t));
    out.xi_plus = xi_of(traj_plus.at(t));
    return out;
}

double characteristic_length(const AuxiliaryTrajectory& traj, double t) {
    return std::numbers::sqrt2 * std::abs(traj.at(t).b);
}

cplx mode_wavefunction(const AuxiliaryTrajectory& traj, int n, double q, double t) {
    if (n < 0)
        throw validation_error("quantum number n must be >= 0");
    if (n > 30)
        throw validation_error("quantum number n must be <= 30");
    const auto s = traj.at(t);
    const double absB = std::abs(s.b);
    if (absB == 0.0)
        throw numerical_error("auxiliary function vanished at t=" + fmt_time(t));

    double fact = 1.0;
    for (int k = 2; k <= n; ++k) fact *= k;
    const double pref = std::pow(
        std::pow(2.0, -2.0 * n) / (2.0 * std::numbers::pi * absB * absB * fact * fact), 0.25);

    // Physicists' Hermite polynomial by the three-term recurrence.
    const double x = q / (std::numbers::sqrt2 * absB);
    double h_prev = 1.0, h = n >= 1 ? 2.0 * x : 1.0;
    for (int k = 1; k < n; ++k) {
        const double h_next = 2.0 * x * h - 2.0 * k * h_prev;
        h_prev = h;
        h = h_next;
    }

    const cplx phase = std::pow(std::conj(s.b) / s.b, n);
    const cplx gauss = std::exp(cplx(0.0, 1.0) * s.bdot / (2.0 * s.b) * (q * q));
    return pref * phase * h * gauss;
}

double joint_ground_density(const AuxiliaryTrajectory& traj_minus,
                            const AuxiliaryTrajectory& traj_plus,
                            double x1, double x2, double t) {
    require_mode_pair(traj_minus, traj_plus);
    const double qm = (x1 - x2) / std::numbers::sqrt2;
    const double qp = (x1 + x2) / std::numbers::sqrt2;
    return std::norm(mode_wavefunction(traj_minus, 0, qm, t)) *
           std::norm(mode_wavefunction(traj_plus, 0, qp, t));
}

} // namespace paramosc
