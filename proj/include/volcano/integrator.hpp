#ifndef VOLCANO_INTEGRATOR_HPP
#define VOLCANO_INTEGRATOR_HPP

//------------------------------------------------------------------------------
// integrator.hpp
//
// Fixed-step RK4 and adaptive Dormand-Prince 5(4) drivers for the 5-component
// moment state.  Both are hand-rolled: we need bit-reproducible runs, dense
// output for event localization, and termination events (escape over a
// threshold, width turning non-positive, adaptive step collapse), which is
// more than a black-box solver conveniently exposes.
//
// Events are localized on a cubic Hermite interpolant of the accepted step by
// bisection down to a fixed time tolerance, so reported crossing times do not
// depend on the step size used.
//------------------------------------------------------------------------------

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "volcano/dynamics.hpp"
#include "volcano/model.hpp"

namespace volcano {

// right-hand side callback: dy = f(y, t)
using DerivFn = std::function<void(const State&, double, State&)>;

enum class Method { RK4, DormandPrince };

enum class EventKind {
    None,             // ran to t_end
    EscapeCrossing,   // |x| crossed the escape threshold
    WidthNonPositive, // W crossed zero from above (Gaussian closure broke down)
    StepFailure       // adaptive step size collapsed below h_min
};

struct Event {
    EventKind kind = EventKind::None;
    double    t    = 0.0;
    State     y{};
};

struct IntegratorConfig {
    Method method = Method::DormandPrince;

    // fixed-step parameters (RK4)
    double h = 1e-3;

    // adaptive parameters (Dormand-Prince)
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;

    double t_end = 100.0;

    // record every sample_stride-th accepted step (1 = every step)
    std::size_t sample_stride = 1;

    // event configuration; escape_threshold <= 0 disables the escape watch
    double escape_threshold = 0.0;
    bool   watch_width      = false;

    // active dimension of the state (2 for classical, 5 for quantum);
    // error control and interpolation only touch components [0, dim)
    std::size_t dim = 5;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<State>  states;
    Event  event;               // kind == None when the run completed
    double t_final = 0.0;
    State  y_final{};
    std::size_t n_steps    = 0; // accepted steps
    std::size_t n_rejected = 0; // adaptive rejections
};

// integrate dy = f(y, t) from (t0, y0); samples include the initial point and
// the final point (t_end, or the event time when a watched event fires)
Trajectory integrate(const DerivFn& f, const State& y0, double t0,
                     const IntegratorConfig& cfg);

// one classical RK4 step, exposed for the convergence-order tests
State rk4_step(const DerivFn& f, const State& y, double t, double h,
               std::size_t dim);

// cubic Hermite interpolation on [t0, t0 + h] from endpoint values and
// derivatives; theta in [0, 1]
State hermite_eval(const State& y0, const State& f0, const State& y1,
                   const State& f1, double h, double theta, std::size_t dim);

// conserved energy of the time-averaged flow: v^2/2 + V_s(x)
double energy_slow(const State& y, const EffectiveParams& eff);

std::string event_kind_name(EventKind kind);

} // namespace volcano

#endif // VOLCANO_INTEGRATOR_HPP
