#ifndef VOLCANO_EXPERIMENTS_HPP
#define VOLCANO_EXPERIMENTS_HPP

//------------------------------------------------------------------------------
// experiments.hpp
//
// The numerical experiments built on top of the dynamics + integrator layers:
//
//   * classify_orbit      — bounded / escaped / closure-breakdown verdict for
//                           one initial condition of the averaged moment system
//   * escape_boundary     — bisection for the largest bounded initial mean
//                           displacement at a given initial width
//   * boundary_curve      — escape boundary swept over a width grid (serial
//                           reference and OpenMP parallel map)
//   * oscillation_period  — period estimate from zero crossings of <x>(t)
//   * period_quadrature_oracle — independent energy-conservation quadrature
//   * compare_full_vs_averaged — driven system vs averaged system, sampled
//                           stroboscopically at drive-period multiples
//------------------------------------------------------------------------------

#include <cstddef>
#include <vector>

#include "volcano/dynamics.hpp"
#include "volcano/integrator.hpp"
#include "volcano/model.hpp"

namespace volcano {

//------------------------------------------------------------------------------
// orbit classification
//------------------------------------------------------------------------------

struct OrbitClass {
    enum class Outcome { Bounded, Escaped, ClosureBreakdown };
    Outcome outcome = Outcome::Bounded;
    double  t_event = 0.0; // escape / breakdown time; horizon when Bounded
    State   y_final{};
};

struct ClassifyOptions {
    double v0       = 0.0;  // initial mean velocity
    double w_rate0  = 0.0;  // initial dW/dt
    double w_accel0 = 0.01; // initial d2W/dt2 (figure-caption default)

    // escape threshold = escape_factor * turning_point
    double escape_factor = 3.0;

    double rel_tol = 1e-9;
    double abs_tol = 1e-12;

    DynOptions dyn{};
};

// `eff` is passed alongside the raw parameters so that ratio-only setups can
// supply exact slow coefficients (see effective_coefficients(w2, lambda, r))
OrbitClass classify_orbit(double x0, double W0, const CouplingMode& mode,
                          const ModelParams& p, const EffectiveParams& eff,
                          double horizon, const ClassifyOptions& opt = {});

//------------------------------------------------------------------------------
// escape boundary and width sweeps
//------------------------------------------------------------------------------

struct BoundaryPoint {
    double W0    = 0.0;
    double x_max = 0.0;
    bool   bracket_invalid = false;
};

struct SweepResult {
    double       lambda     = 0.0;
    double       ratio      = 0.0;
    CouplingMode mode{};
    double       bisect_tol = 1e-3;
    double       horizon    = 500.0;
    std::vector<BoundaryPoint> points; // ordered by W0, same order as the grid
};

// bisect [0, 1.5 * turning_point] for the largest bounded initial mean;
// returns the midpoint of the final bracket.  When the endpoints classify
// identically the point is flagged bracket_invalid with x_max = 0.
BoundaryPoint escape_boundary(double W0, const CouplingMode& mode,
                              const ModelParams& p, const EffectiveParams& eff,
                              double horizon, double bisect_tol,
                              const ClassifyOptions& opt = {});

// one escape_boundary per grid point; the parallel variant maps grid points
// across OpenMP threads (jobs = 0 means "use the runtime default") and is
// deterministic: each point is pure and written by grid index.
SweepResult boundary_curve_serial(const std::vector<double>& w0_grid,
                                  const CouplingMode& mode, const ModelParams& p,
                                  const EffectiveParams& eff, double horizon,
                                  double bisect_tol,
                                  const ClassifyOptions& opt = {});
SweepResult boundary_curve(const std::vector<double>& w0_grid,
                           const CouplingMode& mode, const ModelParams& p,
                           const EffectiveParams& eff, double horizon,
                           double bisect_tol, int jobs,
                           const ClassifyOptions& opt = {});

//------------------------------------------------------------------------------
// period estimation
//------------------------------------------------------------------------------

struct PeriodEstimate {
    enum class Status { Ok, TooFewCycles };
    Status      status     = Status::TooFewCycles;
    double      period     = 0.0;
    double      rel_spread = 0.0; // (max - min) / mean spacing between cycles
    std::size_t n_cycles   = 0;
};

// period from same-direction zero crossings of the mean position (crossing
// times refined on a cubic Hermite interpolant); falls back to successive
// maxima when <x> never changes sign
PeriodEstimate oscillation_period(const std::vector<double>& times,
                                  const std::vector<State>& states);

// independent oracle: T = 4 * integral_0^x0 dx / sqrt(2 (V_s(x0) - V_s(x)))
// with the endpoint singularity removed by x = x0 sin(theta).  Amplitudes
// numerically indistinguishable from the turning point return a sentinel
// above 1e6 (the true period diverges there).  x0 outside (0, turning_point)
// throws std::invalid_argument.
double period_quadrature_oracle(double x0, const EffectiveParams& eff);

//------------------------------------------------------------------------------
// driven-vs-averaged comparison
//------------------------------------------------------------------------------

enum class CompareSystem { Classical, Quantum };

struct CompareOptions {
    std::size_t  steps_per_period = 50;  // fixed RK4 steps per drive period
    CouplingMode mode{Coupling::Full, 0.0};
    DynOptions   dyn{};
    double       escape_factor = 3.0;
};

struct CompareResult {
    std::vector<double> t;              // stroboscopic sample times
    std::vector<double> slow;           // averaged-system mean position
    std::vector<double> strobe;         // driven-system mean position
    std::vector<double> fast_corrected; // strobe minus analytic fast component
    std::vector<double> abs_err;        // per-sample deviation (see below)

    // deviation summary; classical: |x residual|, quantum: 2-norm of the
    // (x, W) residuals after fast-component subtraction
    double max_dev = 0.0;
    double rms_dev = 0.0;

    // set when the driven integration terminated early (escape, width <= 0)
    bool      failed = false;
    EventKind fail_kind = EventKind::None;
    double    fail_time = 0.0;
};

// integrates driven and averaged systems from matched initial conditions
// (driven IC = slow IC plus the analytic fast components at t = 0) on a
// shared fixed RK4 grid and differences them at drive-period multiples.
// Throws std::invalid_argument when the parameters fail the averaging
// validity check (regime_report warning) — the comparison is meaningless
// outside that regime.
CompareResult compare_full_vs_averaged(const ModelParams& p, const State& slow_ic,
                                       double horizon, CompareSystem sys,
                                       const CompareOptions& opt = {});

} // namespace volcano

#endif // VOLCANO_EXPERIMENTS_HPP
