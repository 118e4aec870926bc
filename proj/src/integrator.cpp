#include "paramosc/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace paramosc {

void IntegratorConfig::validate() const {
    if (!(rel_tol > 0.0) || !(rel_tol <= 1e-2))
        throw validation_error("rel_tol must lie in (0, 1e-2]");
    if (!(abs_tol > 0.0) || !(abs_tol <= 1e-2))
        throw validation_error("abs_tol must lie in (0, 1e-2]");
    if (!(max_step > 0.0))
        throw validation_error("max_step must be > 0");
    if (method == Method::rk4 && !(initial_step > 0.0))
        throw validation_error("the fixed-step method requires initial_step > 0");
}

namespace {

std::string fmt_time(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", t);
    return buf;
}

// Dormand-Prince 5(4) tableau, first-same-as-last.
constexpr double C2 = 1.0 / 5, C3 = 3.0 / 10, C4 = 4.0 / 5, C5 = 8.0 / 9;
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                 B5 = -2187.0 / 6784, B6 = 11.0 / 84;
// Difference between the 5th- and 4th-order weights (error estimator).
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;

template <std::size_t N>
using Vec = std::array<cplx, N>;

template <std::size_t N>
bool all_finite(const Vec<N>& v) {
    for (const auto& c : v)
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            return false;
    return true;
}

// Scaled RMS over the 2N real components.
template <std::size_t N>
double error_norm(const Vec<N>& err, const Vec<N>& y0, const Vec<N>& y1,
                  double atol, double rtol) {
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double sr = atol + rtol * std::max(std::abs(y0[i].real()), std::abs(y1[i].real()));
        const double si = atol + rtol * std::max(std::abs(y0[i].imag()), std::abs(y1[i].imag()));
        const double er = err[i].real() / sr;
        const double ei = err[i].imag() / si;
        acc += er * er + ei * ei;
    }
    return std::sqrt(acc / (2.0 * N));
}

template <std::size_t N>
Vec<N> axpy(const Vec<N>& y, double h, std::initializer_list<std::pair<double, const Vec<N>*>> terms) {
    Vec<N> out = y;
    for (const auto& [w, k] : terms)
        for (std::size_t i = 0; i < N; ++i)
            out[i] += h * w * (*k)[i];
    return out;
}

// Merges the optional sample times with t_end into an ascending target list.
std::vector<double> make_targets(double t0, double t_end, const std::vector<double>* sample_times) {
    if (!(t_end > t0))
        throw validation_error("t_end must exceed the initial time");
    std::vector<double> targets;
    if (sample_times) {
        targets.reserve(sample_times->size() + 1);
        double prev = t0;
        for (double s : *sample_times) {
            if (!(s > prev) || s > t_end)
                throw validation_error("sample times must be strictly ascending within (t0, t_end]");
            targets.push_back(s);
            prev = s;
        }
    }
    if (targets.empty() || targets.back() < t_end)
        targets.push_back(t_end);
    return targets;
}

/// Core driver: integrates y' = rhs(t, y) from t0 through every target,
/// landing on each exactly. Calls on_accept at t0 and after every accepted step.
template <std::size_t N, class RHS, class OnAccept>
void integrate(RHS&& rhs, double t0, Vec<N> y, const std::vector<double>& targets,
               const IntegratorConfig& cfg, OnAccept&& on_accept) {
    Vec<N> k1;
    rhs(t0, y, k1);
    if (!all_finite(k1))
        throw numerical_error("non-finite right-hand side at t=" + fmt_time(t0));
    on_accept(t0, y, k1);

    double t = t0;

    if (cfg.method == Method::rk4) {
        const double h0 = std::min(cfg.initial_step, cfg.max_step);
        Vec<N> k2, k3, k4;
        for (double target : targets) {
            while (t < target) {
                double h = std::min(h0, target - t);
                const bool landing = (target - t) <= h0 * (1.0 + 1e-12);
                if (landing) h = target - t;
                const auto y2 = axpy<N>(y, h, {{0.5, &k1}});
                rhs(t + 0.5 * h, y2, k2);
                const auto y3 = axpy<N>(y, h, {{0.5, &k2}});
                rhs(t + 0.5 * h, y3, k3);
                const auto y4 = axpy<N>(y, h, {{1.0, &k3}});
                rhs(t + h, y4, k4);
                for (std::size_t i = 0; i < N; ++i)
                    y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                t = landing ? target : t + h;
                rhs(t, y, k1);
                if (!all_finite(y) || !all_finite(k1))
                    throw numerical_error("non-finite state at t=" + fmt_time(t));
                on_accept(t, y, k1);
            }
        }
        return;
    }

    // Adaptive path. Initial step from the state/derivative balance unless given.
    double h;
    if (cfg.initial_step > 0.0) {
        h = cfg.initial_step;
    } else {
        double ny = 0.0, nf = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            ny += std::norm(y[i]);
            nf += std::norm(k1[i]);
        }
        const double span = targets.back() - t0;
        h = (ny > 0.0 && nf > 0.0) ? 0.01 * std::sqrt(ny / nf) : 1e-6 * span;
        h = std::min(h, span);
    }
    h = std::min(h, cfg.max_step);

    Vec<N> k2, k3, k4, k5, k6, k7, y5, err;
    for (double target : targets) {
        while (t < target) {
            if (h < 1e-14 * std::max(1.0, std::abs(t)))
                throw numerical_error("step-size underflow at t=" + fmt_time(t));
            double h_use = std::min(h, target - t);
            const bool landing = h_use >= (target - t) * (1.0 - 1e-14);
            if (landing) h_use = target - t;

            const auto ya = axpy<N>(y, h_use, {{A21, &k1}});
            rhs(t + C2 * h_use, ya, k2);
            const auto yb = axpy<N>(y, h_use, {{A31, &k1}, {A32, &k2}});
            rhs(t + C3 * h_use, yb, k3);
            const auto yc = axpy<N>(y, h_use, {{A41, &k1}, {A42, &k2}, {A43, &k3}});
            rhs(t + C4 * h_use, yc, k4);
            const auto yd = axpy<N>(y, h_use, {{A51, &k1}, {A52, &k2}, {A53, &k3}, {A54, &k4}});
            rhs(t + C5 * h_use, yd, k5);
            const auto ye = axpy<N>(y, h_use, {{A61, &k1}, {A62, &k2}, {A63, &k3}, {A64, &k4}, {A65, &k5}});
            rhs(t + h_use, ye, k6);
            y5 = axpy<N>(y, h_use, {{B1, &k1}, {B3, &k3}, {B4, &k4}, {B5, &k5}, {B6, &k6}});
            rhs(t + h_use, y5, k7);
            if (!all_finite(y5) || !all_finite(k7))
                throw numerical_error("non-finite state at t=" + fmt_time(t + h_use));

            for (std::size_t i = 0; i < N; ++i)
                err[i] = h_use * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] +
                                  E6 * k6[i] + E7 * k7[i]);
            const double nrm = error_norm<N>(err, y, y5, cfg.abs_tol, cfg.rel_tol);

            // Error-per-unit-step acceptance: local error <= tol * h. This
            // keeps the accumulated error (and the drift of conserved
            // bilinears such as the Wronskian) proportional to the tolerance
            // over long integrations, instead of growing with the step count.
            const double ratio = nrm / h_use;
            if (ratio <= 1.0) {
                t = landing ? target : t + h_use;
                y = y5;
                k1 = k7;
                on_accept(t, y, k1);
                const double fac = ratio > 0.0
                                       ? std::clamp(0.9 * std::pow(ratio, -0.25), 0.2, 5.0)
                                       : 5.0;
                h = std::min(cfg.max_step, h_use * fac);
            } else {
                h = h_use * std::max(0.2, 0.9 * std::pow(ratio, -0.25));
            }
        }
    }
}

// Cubic Hermite basis on the unit interval.
inline void hermite_weights(double th, double& h00, double& h10, double& h01, double& h11) {
    const double th2 = th * th, th3 = th2 * th;
    h00 = 2.0 * th3 - 3.0 * th2 + 1.0;
    h10 = th3 - 2.0 * th2 + th;
    h01 = -2.0 * th3 + 3.0 * th2;
    h11 = th3 - th2;
}

template <class Steps>
std::size_t locate_segment(const Steps& steps, double t) {
    if (steps.size() < 2 || t < steps.front().t || t > steps.back().t)
        throw validation_error("time " + fmt_time(t) + " is outside the trajectory range");
    // Index of the left node of the segment containing t.
    std::size_t lo = 0, hi = steps.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        (steps[mid].t <= t ? lo : hi) = mid;
    }
    return lo;
}

} // namespace

OscState ScalarTrajectory::at(double t) const {
    const std::size_t i = locate_segment(steps_, t);
    const auto& s0 = steps_[i];
    const auto& s1 = steps_[i + 1];
    if (t == s0.t) return s0;
    if (t == s1.t) return s1;
    const double h = s1.t - s0.t;
    const double th = (t - s0.t) / h;
    double h00, h10, h01, h11;
    hermite_weights(th, h00, h10, h01, h11);
    OscState out;
    out.t = t;
    out.b = h00 * s0.b + h10 * h * s0.bdot + h01 * s1.b + h11 * h * s1.bdot;
    out.bdot = h00 * s0.bdot + h10 * h * bddot_[i] + h01 * s1.bdot + h11 * h * bddot_[i + 1];
    return out;
}

ScalarTrajectory propagate_scalar(const std::function<double(double)>& freq_sq,
                                  const OscState& init, double t_end,
                                  const IntegratorConfig& cfg,
                                  const std::vector<double>* sample_times) {
    cfg.validate();
    if (!freq_sq)
        throw validation_error("freq_sq callable is empty");
    const auto targets = make_targets(init.t, t_end, sample_times);

    const auto rhs = [&freq_sq](double t, const Vec<2>& y, Vec<2>& dy) {
        const double w2 = freq_sq(t);
        if (!std::isfinite(w2))
            throw numerical_error("non-finite coefficient at t=" + fmt_time(t));
        dy[0] = y[1];
        dy[1] = -w2 * y[0];
    };

    ScalarTrajectory traj;
    const auto on_accept = [&traj](double t, const Vec<2>& y, const Vec<2>& dy) {
        traj.steps_.push_back({y[0], y[1], t});
        traj.bddot_.push_back(dy[1]);
    };

    integrate<2>(rhs, init.t, Vec<2>{init.b, init.bdot}, targets, cfg, on_accept);
    return traj;
}

CoupledState CoupledTrajectory::at(double t) const {
    const std::size_t i = locate_segment(steps_, t);
    const auto& s0 = steps_[i];
    const auto& s1 = steps_[i + 1];
    if (t == s0.t) return s0;
    if (t == s1.t) return s1;
    const double h = s1.t - s0.t;
    const double th = (t - s0.t) / h;
    double h00, h10, h01, h11;
    hermite_weights(th, h00, h10, h01, h11);
    CoupledState out;
    out.t = t;
    for (int j = 0; j < 4; ++j) {
        out.B[j] = h00 * s0.B[j] + h10 * h * s0.Bdot[j] + h01 * s1.B[j] + h11 * h * s1.Bdot[j];
        out.Bdot[j] = h00 * s0.Bdot[j] + h10 * h * bddot_[i][j] + h01 * s1.Bdot[j] +
                      h11 * h * bddot_[i + 1][j];
    }
    return out;
}

CoupledTrajectory propagate_coupled(const CoupledCoefficients& coeffs,
                                    const CoupledState& init, double t_end,
                                    const IntegratorConfig& cfg,
                                    const std::vector<double>* sample_times) {
    cfg.validate();
    if (!coeffs.mu1 || !coeffs.mu2 || !coeffs.nu1 || !coeffs.nu2 || !coeffs.gamma)
        throw validation_error("all five coefficient callables must be set");
    const auto targets = make_targets(init.t, t_end, sample_times);

    const auto mu_dot = [&coeffs](int k, double t) {
        const auto& fd = k == 0 ? coeffs.mu1_dot : coeffs.mu2_dot;
        if (fd) return fd(t);
        const auto& f = k == 0 ? coeffs.mu1 : coeffs.mu2;
        const double h = 1e-6 * std::max(1.0, std::abs(t));
        return (f(t + h) - f(t - h)) / (2.0 * h);
    };

    // The initial sign of each mu; a later flip means the mass crossed zero
    // somewhere inside the interval even if no evaluation landed on the root.
    const double sign1 = coeffs.mu1(init.t) < 0.0 ? -1.0 : 1.0;
    const double sign2 = coeffs.mu2(init.t) < 0.0 ? -1.0 : 1.0;

    const auto rhs = [&](double t, const Vec<8>& y, Vec<8>& dy) {
        const double m1 = coeffs.mu1(t), m2 = coeffs.mu2(t);
        const double n1 = coeffs.nu1(t), n2 = coeffs.nu2(t), g = coeffs.gamma(t);
        if (!std::isfinite(m1) || !std::isfinite(m2) || !std::isfinite(n1) ||
            !std::isfinite(n2) || !std::isfinite(g))
            throw numerical_error("non-finite coefficient at t=" + fmt_time(t));
        if (m1 * sign1 <= 1e-12 || m2 * sign2 <= 1e-12)
            throw numerical_error("mu vanished or changed sign at t=" + fmt_time(t));
        const double r1 = mu_dot(0, t) / m1, r2 = mu_dot(1, t) / m2;
        for (int i = 0; i < 2; ++i) {
            const cplx Bi1 = y[i * 2], Bi2 = y[i * 2 + 1];
            const cplx Bd1 = y[4 + i * 2], Bd2 = y[4 + i * 2 + 1];
            dy[i * 2] = Bd1;
            dy[i * 2 + 1] = Bd2;
            dy[4 + i * 2] = r1 * Bd1 - m1 * n1 * Bi1 - m1 * g * Bi2;
            dy[4 + i * 2 + 1] = r2 * Bd2 - m2 * n2 * Bi2 - m2 * g * Bi1;
        }
    };

    CoupledTrajectory traj;
    const auto on_accept = [&traj](double t, const Vec<8>& y, const Vec<8>& dy) {
        CoupledState s;
        s.t = t;
        for (int j = 0; j < 4; ++j) {
            s.B[j] = y[j];
            s.Bdot[j] = y[4 + j];
        }
        traj.steps_.push_back(s);
        traj.bddot_.push_back({dy[4], dy[5], dy[6], dy[7]});
    };

    Vec<8> y0{};
    for (int j = 0; j < 4; ++j) {
        y0[j] = init.B[j];
        y0[4 + j] = init.Bdot[j];
    }
    integrate<8>(rhs, init.t, y0, targets, cfg, on_accept);
    return traj;
}

} // namespace paramosc
