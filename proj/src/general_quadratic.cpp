#include "paramosc/general_quadratic.hpp"

#include <algorithm>
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

double mu_checked(const std::function<double(double)>& mu, double t) {
    const double m = mu(t);
    if (!std::isfinite(m))
        throw numerical_error("non-finite mu at t=" + fmt_time(t));
    if (std::abs(m) < 1e-12)
        throw numerical_error("mu vanished at t=" + fmt_time(t));
    return m;
}

} // namespace

QuadraticHamiltonian QuadraticHamiltonian::from_scenario(const DriveParameters& p) {
    p.validate();
    QuadraticHamiltonian h;
    h.mu1 = h.mu2 = [](double) { return 1.0; };
    h.mu1_dot = h.mu2_dot = [](double) { return 0.0; };
    h.nu1 = h.nu2 = [w2 = p.omega * p.omega](double) { return w2; };
    h.gamma = [p](double t) { return 2.0 * p.omega * coupling_at(p, t); };
    return h;
}

CoupledCoefficients QuadraticHamiltonian::coefficients() const {
    CoupledCoefficients c;
    c.mu1 = mu1;
    c.mu2 = mu2;
    c.nu1 = nu1;
    c.nu2 = nu2;
    c.gamma = gamma;
    c.mu1_dot = mu1_dot;
    c.mu2_dot = mu2_dot;
    return c;
}

ConstraintResiduals constraint_residuals(const AuxiliaryMatrix& m,
                                         const QuadraticHamiltonian& h) {
    if (!h.mu1 || !h.mu2)
        throw validation_error("mu callables must be set");
    const double mu[2] = {mu_checked(h.mu1, m.t), mu_checked(h.mu2, m.t)};
    const auto B = [&m](int i, int k) { return m.B[i * 2 + k]; };
    const auto Bd = [&m](int i, int k) { return m.Bdot[i * 2 + k]; };

    ConstraintResiduals r;
    // Only the (0,1) pair is nontrivial for the antisymmetric bilinears.
    cplx w1{}, w2{};
    for (int k = 0; k < 2; ++k) {
        w1 += (Bd(0, k) * B(1, k) - Bd(1, k) * B(0, k)) / mu[k];
        w2 += (std::conj(Bd(0, k)) * std::conj(B(1, k)) -
               std::conj(Bd(1, k)) * std::conj(B(0, k))) / mu[k];
    }
    r.wc1 = std::abs(w1);
    r.wc2 = std::abs(w2);

    for (int mi = 0; mi < 2; ++mi)
        for (int ni = 0; ni < 2; ++ni) {
            cplx w3{};
            for (int k = 0; k < 2; ++k)
                w3 += Bd(mi, k) * std::conj(B(ni, k)) / mu[k] -
                      B(mi, k) * std::conj(Bd(ni, k)) / mu[k];
            const cplx target = mi == ni ? cplx(0.0, 1.0) : cplx(0.0, 0.0);
            r.wc3 = std::max(r.wc3, std::abs(w3 - target));
        }
    return r;
}

AuxiliaryMatrix normal_mode_init(const DriveParameters& p) {
    const auto sm = thermal_initial_conditions(p, Mode::minus);
    const auto sp = thermal_initial_conditions(p, Mode::plus);
    const double r = 1.0 / std::numbers::sqrt2;

    AuxiliaryMatrix m;
    m.t = p.t0;
    m.B = {r * sm.b, -r * sm.b, r * sp.b, r * sp.b};
    m.Bdot = {r * sm.bdot, -r * sm.bdot, r * sp.bdot, r * sp.bdot};
    const auto h = QuadraticHamiltonian::from_scenario(p);
    const double mu[2] = {mu_checked(h.mu1, m.t), mu_checked(h.mu2, m.t)};
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            m.A[i * 2 + k] = -m.Bdot[i * 2 + k] / mu[k];

    const auto res = constraint_residuals(m, h);
    if (res.max_abs() > 1e-12)
        throw numerical_error("rotation-composed seed violates the constraints; residual " +
                              std::to_string(res.max_abs()));
    return m;
}

AuxiliaryMatrix GeneralTrajectory::at(const QuadraticHamiltonian& h, double t) const {
    const auto s = traj.at(t);
    AuxiliaryMatrix m;
    m.t = s.t;
    m.B = s.B;
    m.Bdot = s.Bdot;
    const double mu[2] = {mu_checked(h.mu1, t), mu_checked(h.mu2, t)};
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            m.A[i * 2 + k] = -s.Bdot[i * 2 + k] / mu[k];
    return m;
}

GeneralTrajectory evolve_general(const QuadraticHamiltonian& h,
                                 const AuxiliaryMatrix& init, double t_end,
                                 const IntegratorConfig& cfg,
                                 const std::vector<double>* sample_times) {
    if (!h.mu1 || !h.mu2 || !h.nu1 || !h.nu2 || !h.gamma)
        throw validation_error("all five Hamiltonian coefficient callables must be set");
    const auto r0 = constraint_residuals(init, h);
    if (r0.max_abs() > 1e-10)
        throw numerical_error("initial matrix violates the constraints; residual " +
                              std::to_string(r0.max_abs()) + " exceeds 1e-10");

    CoupledState c0;
    c0.t = init.t;
    c0.B = init.B;
    c0.Bdot = init.Bdot;

    GeneralTrajectory out;
    out.traj = propagate_coupled(h.coefficients(), c0, t_end, cfg, sample_times);

    for (const auto& s : out.traj.steps()) {
        AuxiliaryMatrix m;
        m.t = s.t;
        m.B = s.B;
        m.Bdot = s.Bdot;
        const auto res = constraint_residuals(m, h);
        const double worst = res.max_abs();
        if (worst > 1e-6)
            throw numerical_error("constraint drift " + std::to_string(worst) +
                                  " exceeds 1e-6 at t=" + fmt_time(s.t));
        if (worst > out.max_residual)
            out.max_residual = worst;
    }
    return out;
}

OscState extract_mode(const AuxiliaryMatrix& m, Mode mode) {
    const int row = mode == Mode::minus ? 0 : 1;
    OscState s;
    s.t = m.t;
    s.b = std::numbers::sqrt2 * m.B[row * 2];
    s.bdot = std::numbers::sqrt2 * m.Bdot[row * 2];
    return s;
}

double joint_ground_density_general(const AuxiliaryMatrix& m, double x1, double x2) {
    // Vacuum of a_i = sum_k (A_ik x_k + B_ik p_k) is exp(i/2 x^T Om x) with
    // Om = -B^{-1} A; the density needs only G = Im(Om), normalized by
    // sqrt(det G)/pi. Works for any constraint-satisfying matrix, not just
    // rotation-composed ones.
    const cplx det = m.B[0] * m.B[3] - m.B[1] * m.B[2];
    if (std::abs(det) == 0.0)
        throw numerical_error("B matrix is singular at t=" + fmt_time(m.t));
    const cplx inv[4] = {m.B[3] / det, -m.B[1] / det, -m.B[2] / det, m.B[0] / det};
    cplx om[4];
    for (int i = 0; i < 2; ++i)
        for (int k = 0; k < 2; ++k)
            om[i * 2 + k] = -(inv[i * 2] * m.A[k] + inv[i * 2 + 1] * m.A[2 + k]);
    const double g11 = om[0].imag();
    const double g22 = om[3].imag();
    const double g12 = 0.5 * (om[1].imag() + om[2].imag());
    const double det_g = g11 * g22 - g12 * g12;
    if (!(det_g > 0.0) || !(g11 > 0.0))
        throw numerical_error("vacuum quadratic form is not positive definite at t=" +
                              fmt_time(m.t));
    return std::sqrt(det_g) / std::numbers::pi *
           std::exp(-(g11 * x1 * x1 + 2.0 * g12 * x1 * x2 + g22 * x2 * x2));
}

} // namespace paramosc
