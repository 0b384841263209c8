#include "doctest.h"

#include <cmath>
#include <vector>

#include "volcano/dynamics.hpp"
#include "volcano/integrator.hpp"
#include "volcano/model.hpp"

using namespace volcano;

namespace {

constexpr double kPi = 3.14159265358979323846;

// unit harmonic oscillator in the first two components
void harmonic(const State& y, double, State& dy) {
    dy[0] = y[1];
    dy[1] = -y[0];
    dy[2] = dy[3] = dy[4] = 0.0;
}

double final_error_harmonic(double h) {
    IntegratorConfig cfg;
    cfg.method = Method::RK4;
    cfg.h      = h;
    cfg.t_end  = 2.0 * kPi;
    cfg.dim    = 2;
    cfg.sample_stride = 1u << 30; // endpoints only
    const Trajectory tr = integrate(harmonic, State{1.0, 0.0, 0.0, 0.0, 0.0},
                                    0.0, cfg);
    return std::hypot(tr.y_final[0] - 1.0, tr.y_final[1]);
}

} // namespace

//------------------------------------------------------------------------------
// fixed-step RK4
//------------------------------------------------------------------------------

TEST_CASE("RK4 lands on t_end exactly and shows fourth-order convergence") {
    IntegratorConfig cfg;
    cfg.method = Method::RK4;
    cfg.h      = 0.05;
    cfg.t_end  = 2.0 * kPi;
    cfg.dim    = 2;
    const Trajectory tr = integrate(harmonic, State{1.0, 0.0, 0.0, 0.0, 0.0},
                                    0.0, cfg);
    CHECK(tr.times.back() == cfg.t_end);
    CHECK(tr.event.kind == EventKind::None);
    CHECK(tr.n_rejected == 0);

    const double e1 = final_error_harmonic(0.05);
    const double e2 = final_error_harmonic(0.025);
    CHECK(e1 > 0.0);
    // spec invariant: halving h cuts the final-state error by at least 15x
    CHECK(e1 / e2 >= 15.0);
    const double order = std::log2(e1 / e2);
    CHECK(order == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("RK4 sampling stride keeps first and last samples") {
    IntegratorConfig cfg;
    cfg.method        = Method::RK4;
    cfg.h             = 0.1;
    cfg.t_end         = 1.05; // 10.5 steps -> 11 steps of 1.05/11
    cfg.dim           = 2;
    cfg.sample_stride = 4;
    const Trajectory tr = integrate(harmonic, State{1.0, 0.0, 0.0, 0.0, 0.0},
                                    0.0, cfg);
    CHECK(tr.times.front() == 0.0);
    CHECK(tr.times.back() == 1.05);
    for (std::size_t i = 1; i < tr.times.size(); ++i)
        CHECK(tr.times[i] > tr.times[i - 1]);
}

//------------------------------------------------------------------------------
// adaptive Dormand-Prince
//------------------------------------------------------------------------------

TEST_CASE("adaptive integrator returns to the start of a harmonic period") {
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    cfg.t_end   = 2.0 * kPi;
    cfg.dim     = 2;
    const Trajectory tr = integrate(harmonic, State{1.0, 0.0, 0.0, 0.0, 0.0},
                                    0.0, cfg);
    CHECK(tr.times.back() == cfg.t_end);
    CHECK(std::fabs(tr.y_final[0] - 1.0) < 1e-8);
    CHECK(std::fabs(tr.y_final[1]) < 1e-8);
    CHECK(tr.n_steps > 10);
}

TEST_CASE("slow-system energy is conserved by the adaptive integrator") {
    const EffectiveParams eff = effective_coefficients(1.0, 0.1, 3.0);
    auto f = [&eff](const State& y, double, State& dy) {
        classical_slow_deriv(y, eff, dy);
    };
    IntegratorConfig cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    cfg.t_end   = 100.0;
    cfg.dim     = 2;
    const State y0{0.5, 0.0, 0.0, 0.0, 0.0};
    const Trajectory tr = integrate(f, y0, 0.0, cfg);
    const double e0 = energy_slow(y0, eff);
    double worst = 0.0;
    for (const State& y : tr.states)
        worst = std::max(worst,
                         std::fabs(energy_slow(y, eff) - e0) /
                             std::max(std::fabs(e0), 1e-6));
    CHECK(worst < 1e-8);
}

TEST_CASE("integration is deterministic") {
    const EffectiveParams eff = effective_coefficients(1.0, 0.1, 3.0);
    ModelParams p{1.0, 0.1, 0.0, 1.0, 1.0};
    CouplingMode mode{Coupling::Full, 0.0};
    auto f = [&](const State& y, double, State& dy) {
        quantum_slow_deriv(y, eff, p, mode, dy);
    };
    IntegratorConfig cfg;
    cfg.t_end = 50.0;
    const State y0{0.5, 0.0, 0.1, 0.0, 0.01};
    const Trajectory a = integrate(f, y0, 0.0, cfg);
    const Trajectory b = integrate(f, y0, 0.0, cfg);
    REQUIRE(a.states.size() == b.states.size());
    CHECK(a.n_steps == b.n_steps);
    CHECK(a.n_rejected == b.n_rejected);
    for (std::size_t i = 0; i < a.states.size(); ++i) {
        CHECK(a.times[i] == b.times[i]);
        for (int k = 0; k < 5; ++k)
            CHECK(a.states[i][k] == b.states[i][k]);
    }
}

//------------------------------------------------------------------------------
// events
//------------------------------------------------------------------------------

TEST_CASE("escape crossing is localized to the threshold") {
    // constant-velocity crossing: x(t) = 0.5 + t, threshold at 2 -> t* = 1.5
    auto drift = [](const State& y, double, State& dy) {
        dy[0] = 1.0;
        dy[1] = dy[2] = dy[3] = dy[4] = 0.0;
        (void)y;
    };
    IntegratorConfig cfg;
    cfg.t_end            = 10.0;
    cfg.dim              = 1;
    cfg.escape_threshold = 2.0;
    const Trajectory tr = integrate(drift, State{0.5, 0.0, 0.0, 0.0, 0.0},
                                    0.0, cfg);
    REQUIRE(tr.event.kind == EventKind::EscapeCrossing);
    CHECK(tr.event.t == doctest::Approx(1.5).epsilon(1e-6));
    CHECK(std::fabs(tr.event.y[0]) == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(tr.t_final == tr.event.t);
    // samples stop at the event
    CHECK(tr.times.back() == tr.event.t);

    SUBCASE("negative crossings count too") {
        auto sink = [](const State&, double, State& dy) {
            dy[0] = -1.0;
            dy[1] = dy[2] = dy[3] = dy[4] = 0.0;
        };
        const Trajectory tn = integrate(sink, State{-0.5, 0.0, 0.0, 0.0, 0.0},
                                        0.0, cfg);
        REQUIRE(tn.event.kind == EventKind::EscapeCrossing);
        CHECK(tn.event.t == doctest::Approx(1.5).epsilon(1e-6));
    }
    SUBCASE("threshold <= 0 disables the watch") {
        IntegratorConfig off = cfg;
        off.escape_threshold = 0.0;
        const Trajectory tq = integrate(drift, State{0.5, 0.0, 0.0, 0.0, 0.0},
                                        0.0, off);
        CHECK(tq.event.kind == EventKind::None);
        CHECK(tq.t_final == 10.0);
    }
    SUBCASE("initial state beyond the threshold fires immediately") {
        const Trajectory ti = integrate(drift, State{2.5, 0.0, 0.0, 0.0, 0.0},
                                        0.0, cfg);
        REQUIRE(ti.event.kind == EventKind::EscapeCrossing);
        CHECK(ti.event.t == 0.0);
    }
}

TEST_CASE("width watch fires when W reaches zero") {
    // W(t) = 0.1 - t: crosses zero at t = 0.1
    auto shrink = [](const State&, double, State& dy) {
        dy[0] = dy[1] = 0.0;
        dy[2] = -1.0;
        dy[3] = dy[4] = 0.0;
    };
    IntegratorConfig cfg;
    cfg.t_end       = 1.0;
    cfg.watch_width = true;
    const Trajectory tr = integrate(shrink, State{0.0, 0.0, 0.1, 0.0, 0.0},
                                    0.0, cfg);
    REQUIRE(tr.event.kind == EventKind::WidthNonPositive);
    CHECK(tr.event.t == doctest::Approx(0.1).epsilon(1e-5));
    CHECK(tr.event.y[2] == doctest::Approx(0.0).scale(1.0).epsilon(1e-6));
    SUBCASE("without the watch the width goes negative silently") {
        IntegratorConfig off = cfg;
        off.watch_width = false;
        const Trajectory tq = integrate(shrink, State{0.0, 0.0, 0.1, 0.0, 0.0},
                                        0.0, off);
        CHECK(tq.event.kind == EventKind::None);
        CHECK(tq.y_final[2] < 0.0);
    }
}

TEST_CASE("finite-time blowup ends in a step failure, not a hang") {
    // dy/dt = y^2 from y(0) = 1 blows up at t = 1
    auto blowup = [](const State& y, double, State& dy) {
        dy[0] = y[0] * y[0];
        dy[1] = dy[2] = dy[3] = dy[4] = 0.0;
    };
    IntegratorConfig cfg;
    cfg.t_end = 2.0;
    cfg.dim   = 1;
    const Trajectory tr = integrate(blowup, State{1.0, 0.0, 0.0, 0.0, 0.0},
                                    0.0, cfg);
    REQUIRE(tr.event.kind == EventKind::StepFailure);
    CHECK(tr.event.t == doctest::Approx(1.0).epsilon(0.01));
    CHECK(tr.t_final < 2.0);
}

//------------------------------------------------------------------------------
// dense output and energy helper
//------------------------------------------------------------------------------

TEST_CASE("Hermite interpolation reproduces a cubic exactly") {
    // y(t) = t^3 on [0, 1]: y0 = 0, y1 = 1, f0 = 0, f1 = 3
    State y0{0.0, 0.0, 0.0, 0.0, 0.0};
    State y1{1.0, 0.0, 0.0, 0.0, 0.0};
    State f0{0.0, 0.0, 0.0, 0.0, 0.0};
    State f1{3.0, 0.0, 0.0, 0.0, 0.0};
    const State mid = hermite_eval(y0, f0, y1, f1, 1.0, 0.5, 1);
    CHECK(mid[0] == 0.125);
    const State q = hermite_eval(y0, f0, y1, f1, 1.0, 0.25, 1);
    CHECK(q[0] == doctest::Approx(0.015625).epsilon(1e-15));
    // endpoints are reproduced bitwise
    CHECK(hermite_eval(y0, f0, y1, f1, 1.0, 0.0, 1)[0] == 0.0);
    CHECK(hermite_eval(y0, f0, y1, f1, 1.0, 1.0, 1)[0] == 1.0);
}

TEST_CASE("slow-energy helper values") {
    const EffectiveParams eff = effective_coefficients(1.0, 0.1, 3.0);
    CHECK(energy_slow(State{0.5, 0.0, 0.0, 0.0, 0.0}, eff) == 0.0546875);
    CHECK(energy_slow(State{0.5, 0.25, 0.0, 0.0, 0.0}, eff) == 0.0859375);
    CHECK(energy_slow(State{1.0, 0.0, 0.0, 0.0, 0.0}, eff) == 0.125);
}
