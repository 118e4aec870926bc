#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "paramosc/general_quadratic.hpp"

using namespace paramosc;

namespace {

constexpr double pi = std::numbers::pi;

DriveParameters scenario(double g, double delta_g) {
    DriveParameters p;
    p.g = g;
    p.delta_g = delta_g;
    return p;
}

QuadraticHamiltonian constant_unit(double nu1, double nu2, double gamma) {
    QuadraticHamiltonian h;
    h.mu1 = [](double) { return 1.0; };
    h.mu2 = [](double) { return 1.0; };
    h.mu1_dot = [](double) { return 0.0; };
    h.mu2_dot = [](double) { return 0.0; };
    h.nu1 = [nu1](double) { return nu1; };
    h.nu2 = [nu2](double) { return nu2; };
    h.gamma = [gamma](double) { return gamma; };
    return h;
}

/// Diagonal seed: two independent unit-Wronskian rows scaled so the
/// 1/mu_k-weighted bilinears come out exactly i on the diagonal.
AuxiliaryMatrix diagonal_seed(const QuadraticHamiltonian& h, double t0 = 0.0) {
    AuxiliaryMatrix m;
    m.t = t0;
    const double s1 = std::sqrt(h.mu1(t0)), s2 = std::sqrt(h.mu2(t0));
    const cplx b0(0.0, 1.0 / std::numbers::sqrt2);
    const cplx bd0(-1.0 / std::numbers::sqrt2, 0.0);
    m.B = {s1 * b0, 0.0, 0.0, s2 * b0};
    m.Bdot = {s1 * bd0, 0.0, 0.0, s2 * bd0};
    m.A = {-m.Bdot[0] / h.mu1(t0), 0.0, 0.0, -m.Bdot[3] / h.mu2(t0)};
    return m;
}

} // namespace

TEST_CASE("rotation-composed seeds satisfy the constraints at machine precision") {
    for (const auto& p : {scenario(0.4, 0.04), scenario(0.0, 0.0),
                          // gamma(0) = 0.506: the minus seed has imaginary eps.
                          scenario(0.46, 0.046), scenario(0.38, 0.038)}) {
        const auto h = QuadraticHamiltonian::from_scenario(p);
        const auto init = normal_mode_init(p);
        const auto res = constraint_residuals(init, h);
        CHECK(res.wc1 <= 1e-12);
        CHECK(res.wc2 <= 1e-12);
        CHECK(res.wc3 <= 1e-12);
        CHECK(res.max_abs() <= 1e-12);
    }
}

TEST_CASE("seed extraction returns the thermal mode seeds exactly") {
    const auto p = scenario(0.4, 0.04);
    const auto init = normal_mode_init(p);
    const auto sm = extract_mode(init, Mode::minus);
    const auto sp = extract_mode(init, Mode::plus);
    const auto tm = thermal_initial_conditions(p, Mode::minus);
    const auto tp = thermal_initial_conditions(p, Mode::plus);
    CHECK(std::abs(sm.b - tm.b) < 1e-15);
    CHECK(std::abs(sm.bdot - tm.bdot) < 1e-15);
    CHECK(std::abs(sp.b - tp.b) < 1e-15);
    CHECK(std::abs(sp.bdot - tp.bdot) < 1e-15);
}

TEST_CASE("corrupted seeds are detected and rejected") {
    const auto p = scenario(0.4, 0.04);
    const auto h = QuadraticHamiltonian::from_scenario(p);
    auto init = normal_mode_init(p);
    init.B[0] *= 1.01;
    CHECK(constraint_residuals(init, h).wc3 > 1e-3);
    CHECK_THROWS_AS(evolve_general(h, init, 10.0), numerical_error);
}

TEST_CASE("missing coefficient callables are rejected") {
    QuadraticHamiltonian h = constant_unit(1.0, 1.0, 0.0);
    h.gamma = nullptr;
    const auto init = diagonal_seed(constant_unit(1.0, 1.0, 0.0));
    CHECK_THROWS_AS(evolve_general(h, init, 1.0), validation_error);
}

TEST_CASE("uncoupled system preserves the diagonal block structure") {
    const auto h = constant_unit(1.0, 4.0, 0.0);
    const auto traj = evolve_general(h, diagonal_seed(h), 25.0);
    for (double t : {5.0, 12.3, 25.0}) {
        const auto m = traj.at(h, t);
        CHECK(std::abs(m.B[1]) < 1e-12);
        CHECK(std::abs(m.B[2]) < 1e-12);
        CHECK(std::abs(m.Bdot[1]) < 1e-12);
        CHECK(std::abs(m.Bdot[2]) < 1e-12);
        // The diagonal entries are plain oscillators of frequency 1 and 2.
        const cplx expect1 =
            cplx(0.0, 1.0 / std::numbers::sqrt2) * std::cos(t) -
            cplx(1.0 / std::numbers::sqrt2, 0.0) * std::sin(t);
        CHECK(std::abs(m.B[0] - expect1) < 1e-8);
    }
}

TEST_CASE("dual path: matrix evolution matches the two scalar mode solutions") {
    const auto p = scenario(0.4, 0.04);
    const auto h = QuadraticHamiltonian::from_scenario(p);
    const std::vector<double> marks{10.0, 20.0};
    const auto gen = evolve_general(h, normal_mode_init(p), 20.0, {}, &marks);
    const auto tm = evolve_auxiliary(p, Mode::minus, 20.0, {}, &marks);
    const auto tp = evolve_auxiliary(p, Mode::plus, 20.0, {}, &marks);

    for (double t : {10.0, 20.0}) {
        const auto m = gen.at(h, t);
        const auto sm = extract_mode(m, Mode::minus);
        const auto sp = extract_mode(m, Mode::plus);
        CHECK(std::abs(sm.b - tm.at(t).b) < 1e-8);
        CHECK(std::abs(sm.bdot - tm.at(t).bdot) < 1e-8);
        CHECK(std::abs(sp.b - tp.at(t).b) < 1e-8);
        CHECK(std::abs(sp.bdot - tp.at(t).bdot) < 1e-8);
    }

    // Frozen cross-implementation values at t = 20.
    const auto m20 = gen.at(h, 20.0);
    const auto sm = extract_mode(m20, Mode::minus);
    const auto sp = extract_mode(m20, Mode::plus);
    CHECK(std::abs(sm.b - cplx(0.245274127329, -1.942673869629)) < 1e-7);
    CHECK(std::abs(sm.bdot - cplx(0.341897593519, -0.669436776067)) < 1e-7);
    CHECK(std::abs(sp.b - cplx(-0.598859753471, -0.094922225487)) < 1e-7);
    CHECK(std::abs(sp.bdot - cplx(0.121636366895, -0.815640059937)) < 1e-7);
}

TEST_CASE("dual path: joint ground density through both code paths") {
    const auto p = scenario(0.4, 0.04);
    const auto h = QuadraticHamiltonian::from_scenario(p);
    const std::vector<double> marks{10.0};
    const auto gen = evolve_general(h, normal_mode_init(p), 10.0, {}, &marks);
    const auto tm = evolve_auxiliary(p, Mode::minus, 10.0, {}, &marks);
    const auto tp = evolve_auxiliary(p, Mode::plus, 10.0, {}, &marks);

    const auto m10 = gen.at(h, 10.0);
    CHECK(std::abs(joint_ground_density_general(m10, 0.5, -0.3) -
                   joint_ground_density(tm, tp, 0.5, -0.3, 10.0)) < 1e-7);

    std::mt19937 rng(2026u);
    std::uniform_real_distribution<double> xd(-2.0, 2.0);
    for (int i = 0; i < 15; ++i) {
        const double x1 = xd(rng), x2 = xd(rng);
        CHECK(std::abs(joint_ground_density_general(m10, x1, x2) -
                       joint_ground_density(tm, tp, x1, x2, 10.0)) < 1e-7);
    }

    // The general-path density is a normalized Gaussian: positive, peaked,
    // decaying along both axes.
    CHECK(joint_ground_density_general(m10, 0.0, 0.0) > 0.0);
    CHECK(joint_ground_density_general(m10, 6.0, 6.0) <
          joint_ground_density_general(m10, 0.0, 0.0));
}

TEST_CASE("constraints stay conserved over 100 drive periods") {
    const auto p = scenario(0.4, 0.04);
    const auto h = QuadraticHamiltonian::from_scenario(p);
    const double t_end = 100.0 * 2.0 * pi;
    const auto gen = evolve_general(h, normal_mode_init(p), t_end);
    CHECK(gen.max_residual <= 1e-8);

    // Looser tolerance must not conserve better than a tighter one.
    IntegratorConfig loose, tight;
    loose.rel_tol = 1e-9;
    loose.abs_tol = 1e-9;
    tight.rel_tol = 1e-11;
    tight.abs_tol = 1e-11;
    const auto drift_loose = evolve_general(h, normal_mode_init(p), t_end, loose).max_residual;
    const auto drift_tight = evolve_general(h, normal_mode_init(p), t_end, tight).max_residual;
    CHECK(drift_loose <= 1e-8 * 10.0);
    CHECK(drift_tight <= drift_loose);
}

TEST_CASE("constant coupling keeps the residuals constant over [0, 100]") {
    const auto p = scenario(0.4, 0.0);
    const auto h = QuadraticHamiltonian::from_scenario(p);
    const auto gen = evolve_general(h, normal_mode_init(p), 100.0);
    // Residuals start at zero by construction, so "constant" means they
    // never leave the 1e-9 band.
    CHECK(gen.max_residual <= 1e-9);
}

TEST_CASE("conservation holds for randomized smooth coefficients") {
    std::mt19937 rng(77001u);
    std::uniform_real_distribution<double> amp(-0.15, 0.15);
    std::uniform_real_distribution<double> freq(0.2, 1.5);
    for (int trial = 0; trial < 2; ++trial) {
        const double a1 = amp(rng), w1 = freq(rng);
        const double a2 = amp(rng), w2 = freq(rng);
        const double n1 = amp(rng), f1 = freq(rng);
        const double n2 = amp(rng), f2 = freq(rng);
        const double cg = amp(rng), fg = freq(rng);
        QuadraticHamiltonian h;
        h.mu1 = [a1, w1](double t) { return 1.0 + a1 * std::sin(w1 * t); };
        h.mu2 = [a2, w2](double t) { return 1.0 + a2 * std::cos(w2 * t); };
        h.mu1_dot = [a1, w1](double t) { return a1 * w1 * std::cos(w1 * t); };
        h.mu2_dot = [a2, w2](double t) { return -a2 * w2 * std::sin(w2 * t); };
        h.nu1 = [n1, f1](double t) { return 1.0 + n1 * std::cos(f1 * t); };
        h.nu2 = [n2, f2](double t) { return 1.5 + n2 * std::sin(f2 * t); };
        h.gamma = [cg, fg](double t) { return cg * std::cos(fg * t); };

        const auto gen = evolve_general(h, diagonal_seed(h), 100.0 * 2.0 * pi);
        CHECK(gen.max_residual <= 1e-8);
    }
}

TEST_CASE("sampled matrices keep A tied to Bdot through mu") {
    const auto p = scenario(0.38, 0.038);
    const auto h = QuadraticHamiltonian::from_scenario(p);
    const auto gen = evolve_general(h, normal_mode_init(p), 15.0);
    for (double t : {0.0, 3.14159, 7.7, 15.0}) {
        const auto m = gen.at(h, t);
        CHECK(m.t == t);
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) {
                const double mu = k == 0 ? h.mu1(t) : h.mu2(t);
                CHECK(std::abs(m.A[i * 2 + k] + m.Bdot[i * 2 + k] / mu) < 1e-10);
            }
    }
}
