#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "paramosc/errors.hpp"

namespace paramosc {

using cplx = std::complex<double>;

/// One sample of a complex second-order trajectory.
struct OscState {
    cplx b{};
    cplx bdot{};
    double t = 0.0;
};

enum class Method { adaptive54, rk4 };

/// Shared integrator settings. The complex second-order equations are
/// integrated as four (scalar case) or sixteen (coupled case) real
/// first-order components under one error controller.
/// The adaptive method controls local error per unit step (error <= tol*h),
/// so accumulated error over long runs stays proportional to the tolerances.
struct IntegratorConfig {
    Method method = Method::adaptive54;
    double rel_tol = 1e-10;
    double abs_tol = 1e-10;
    double max_step = 1.0;
    /// Starting step for the adaptive method (<= 0 selects automatically);
    /// the step size for the fixed-step method, where it is required.
    double initial_step = 0.0;

    /// Tolerances must lie in (0, 1e-2]; max_step > 0; rk4 needs initial_step > 0.
    void validate() const;
};

/// Dense solution of b'' + freq_sq(t)*b = 0.
/// Stores every accepted step (plus any requested sample times, which the
/// stepper lands on exactly); at() uses cubic Hermite interpolation between
/// stored nodes and returns stored nodes exactly.
class ScalarTrajectory {
public:
    OscState at(double t) const;
    const std::vector<OscState>& steps() const { return steps_; }
    double t_begin() const { return steps_.front().t; }
    double t_end() const { return steps_.back().t; }

private:
    friend ScalarTrajectory propagate_scalar(const std::function<double(double)>&,
                                             const OscState&, double,
                                             const IntegratorConfig&,
                                             const std::vector<double>*);
    std::vector<OscState> steps_;
    std::vector<cplx> bddot_; // second derivative at each node, for interpolation
};

/// Integrates b'' + freq_sq(t)*b = 0 from init to t_end (t_end > init.t).
/// When sample_times is given (ascending, within (init.t, t_end]), the stepper
/// lands on each exactly, so those nodes carry no interpolation error.
/// Throws numerical_error on step-size underflow (reporting the time of
/// failure) or when a coefficient evaluates non-finite.
ScalarTrajectory propagate_scalar(const std::function<double(double)>& freq_sq,
                                  const OscState& init, double t_end,
                                  const IntegratorConfig& cfg = {},
                                  const std::vector<double>* sample_times = nullptr);

/// Coefficients of the coupled pair
///   B''_i1 = (mu1'/mu1) B'_i1 - mu1*nu1*B_i1 - mu1*gamma*B_i2
///   B''_i2 = (mu2'/mu2) B'_i2 - mu2*nu2*B_i2 - mu2*gamma*B_i1
/// mu*_dot may be left empty, in which case mu' is evaluated by a central
/// finite difference with step h = 1e-6*max(1, |t|).
struct CoupledCoefficients {
    std::function<double(double)> mu1, mu2, nu1, nu2, gamma;
    std::function<double(double)> mu1_dot, mu2_dot;
};

/// 2x2 complex field sample; row-major indexing B[i*2 + k] for B_{(i+1)(k+1)}.
struct CoupledState {
    std::array<cplx, 4> B{};
    std::array<cplx, 4> Bdot{};
    double t = 0.0;
};

class CoupledTrajectory {
public:
    CoupledState at(double t) const;
    const std::vector<CoupledState>& steps() const { return steps_; }
    double t_begin() const { return steps_.front().t; }
    double t_end() const { return steps_.back().t; }

private:
    friend CoupledTrajectory propagate_coupled(const CoupledCoefficients&,
                                               const CoupledState&, double,
                                               const IntegratorConfig&,
                                               const std::vector<double>*);
    std::vector<CoupledState> steps_;
    std::vector<std::array<cplx, 4>> bddot_;
};

/// Integrates the coupled system above. Requires mu_k(t) nonzero with
/// constant sign on the interval; a vanishing or sign-flipping mu raises
/// numerical_error (the equations divide by mu).
CoupledTrajectory propagate_coupled(const CoupledCoefficients& coeffs,
                                    const CoupledState& init, double t_end,
                                    const IntegratorConfig& cfg = {},
                                    const std::vector<double>* sample_times = nullptr);

} // namespace paramosc
