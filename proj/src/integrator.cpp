//------------------------------------------------------------------------------
// integrator.cpp
//
// Fixed-step RK4 and adaptive Dormand-Prince 5(4) with FSAL, RMS error norm,
// PI-free step control (plain 0.9 * err^(-1/5), clamped to [0.2, 5.0]), cubic
// Hermite dense output, and bisection event localization.  Everything is
// plain double arithmetic in a fixed evaluation order, so repeated runs are
// bit-identical.
//------------------------------------------------------------------------------

#include "volcano/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace volcano {

namespace {

//------------------------------------------------------------------------------
// Dormand-Prince 5(4) tableau
//------------------------------------------------------------------------------

constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0,
                 c5 = 8.0 / 9.0;

constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                 a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
// 5th-order weights (also the a7 row; FSAL)
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// difference to the embedded 4th-order weights
constexpr double e1 = 35.0 / 384.0 - 5179.0 / 57600.0;
constexpr double e3 = 500.0 / 1113.0 - 7571.0 / 16695.0;
constexpr double e4 = 125.0 / 192.0 - 393.0 / 640.0;
constexpr double e5 = -2187.0 / 6784.0 + 92097.0 / 339200.0;
constexpr double e6 = 11.0 / 84.0 - 187.0 / 2100.0;
constexpr double e7 = -1.0 / 40.0;

double rms_scaled(const State& v, const State& sc, std::size_t dim) {
    double s = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double q = v[i] / sc[i];
        s += q * q;
    }
    return std::sqrt(s / static_cast<double>(dim));
}

//------------------------------------------------------------------------------
// event predicates: scalar functions that cross zero from below at the event
//------------------------------------------------------------------------------

double escape_scalar(const State& y, double threshold) {
    return std::fabs(y[0]) - threshold;
}

double width_scalar(const State& y) {
    return -y[2]; // crosses zero from below when W drops through zero
}

struct EventHit {
    bool      fired = false;
    EventKind kind  = EventKind::None;
    double    theta = 0.0; // position inside the step, [0, 1]
};

// bisection on the cubic Hermite interpolant; g must satisfy g(lo) < 0 <= g(hi)
double bisect_theta(const State& y0, const State& f0, const State& y1,
                    const State& f1, double h, std::size_t dim,
                    const std::function<double(const State&)>& g,
                    double time_tol) {
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 200 && (hi - lo) * std::fabs(h) > time_tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const State ym = hermite_eval(y0, f0, y1, f1, h, mid, dim);
        if (g(ym) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return hi; // report the side where the condition already holds
}

// check a single accepted step for watched events; returns the earliest hit
EventHit detect_event(const State& y0, const State& f0, const State& y1,
                      const State& f1, double h, std::size_t dim,
                      const IntegratorConfig& cfg) {
    EventHit hit;
    constexpr double kTimeTol = 1e-6;

    if (cfg.escape_threshold > 0.0 && escape_scalar(y0, cfg.escape_threshold) < 0.0 &&
        escape_scalar(y1, cfg.escape_threshold) >= 0.0) {
        const double thr = cfg.escape_threshold;
        auto g = [thr](const State& y) { return escape_scalar(y, thr); };
        hit.fired = true;
        hit.kind  = EventKind::EscapeCrossing;
        hit.theta = bisect_theta(y0, f0, y1, f1, h, dim, g, kTimeTol);
    }

    if (cfg.watch_width && width_scalar(y0) < 0.0 && width_scalar(y1) >= 0.0) {
        auto g = [](const State& y) { return width_scalar(y); };
        const double theta = bisect_theta(y0, f0, y1, f1, h, dim, g, kTimeTol);
        if (!hit.fired || theta < hit.theta) {
            hit.fired = true;
            hit.kind  = EventKind::WidthNonPositive;
            hit.theta = theta;
        }
    }
    return hit;
}

// events that hold already at the initial state (degenerate but possible when
// a caller hands us an escaped point or a collapsed width)
EventKind immediate_event(const State& y0, const IntegratorConfig& cfg) {
    if (cfg.escape_threshold > 0.0 &&
        escape_scalar(y0, cfg.escape_threshold) >= 0.0)
        return EventKind::EscapeCrossing;
    if (cfg.watch_width && width_scalar(y0) >= 0.0)
        return EventKind::WidthNonPositive;
    return EventKind::None;
}

// deterministic starting step along the lines of the classic d0/d1 heuristic
double initial_step(const DerivFn& f, const State& y0, double t0,
                    const IntegratorConfig& cfg) {
    const std::size_t dim = cfg.dim;
    State f0{};
    f(y0, t0, f0);

    State sc{};
    for (std::size_t i = 0; i < dim; ++i)
        sc[i] = cfg.abs_tol + cfg.rel_tol * std::fabs(y0[i]);

    const double d0 = rms_scaled(y0, sc, dim);
    const double d1 = rms_scaled(f0, sc, dim);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * (d0 / d1);
    h0 = std::min(h0, cfg.t_end - t0);

    // probe the derivative change over an Euler step to bound y''
    State y1{}, f1{};
    for (std::size_t i = 0; i < dim; ++i)
        y1[i] = y0[i] + h0 * f0[i];
    f(y1, t0 + h0, f1);

    double d2 = 0.0;
    {
        State df{};
        for (std::size_t i = 0; i < dim; ++i)
            df[i] = f1[i] - f0[i];
        d2 = rms_scaled(df, sc, dim) / h0;
    }

    double h1;
    const double dm = std::max(d1, d2);
    if (dm <= 1e-15)
        h1 = std::max(1e-6, h0 * 1e-3);
    else
        h1 = std::pow(0.01 / dm, 0.2);

    return std::min({100.0 * h0, h1, cfg.t_end - t0});
}

} // namespace

//------------------------------------------------------------------------------
// building blocks
//------------------------------------------------------------------------------

State rk4_step(const DerivFn& f, const State& y, double t, double h,
               std::size_t dim) {
    State k1{}, k2{}, k3{}, k4{}, tmp{}, out{};
    f(y, t, k1);
    for (std::size_t i = 0; i < dim; ++i)
        tmp[i] = y[i] + 0.5 * h * k1[i];
    f(tmp, t + 0.5 * h, k2);
    for (std::size_t i = 0; i < dim; ++i)
        tmp[i] = y[i] + 0.5 * h * k2[i];
    f(tmp, t + 0.5 * h, k3);
    for (std::size_t i = 0; i < dim; ++i)
        tmp[i] = y[i] + h * k3[i];
    f(tmp, t + h, k4);
    for (std::size_t i = 0; i < dim; ++i)
        out[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

State hermite_eval(const State& y0, const State& f0, const State& y1,
                   const State& f1, double h, double theta, std::size_t dim) {
    const double t2 = theta * theta, t3 = t2 * theta;
    const double h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    const double h10 = t3 - 2.0 * t2 + theta;
    const double h01 = -2.0 * t3 + 3.0 * t2;
    const double h11 = t3 - t2;
    State out{};
    for (std::size_t i = 0; i < dim; ++i)
        out[i] = h00 * y0[i] + h10 * h * f0[i] + h01 * y1[i] + h11 * h * f1[i];
    return out;
}

double energy_slow(const State& y, const EffectiveParams& eff) {
    return 0.5 * y[1] * y[1] + potential_slow(y[0], eff);
}

std::string event_kind_name(EventKind kind) {
    switch (kind) {
        case EventKind::None:             return "none";
        case EventKind::EscapeCrossing:   return "escape";
        case EventKind::WidthNonPositive: return "width_nonpositive";
        case EventKind::StepFailure:      return "step_failure";
    }
    return "unknown";
}

//------------------------------------------------------------------------------
// driver
//------------------------------------------------------------------------------

Trajectory integrate(const DerivFn& f, const State& y0, double t0,
                     const IntegratorConfig& cfg) {
    Trajectory tr;
    const std::size_t dim    = cfg.dim;
    const std::size_t stride = std::max<std::size_t>(1, cfg.sample_stride);

    tr.times.push_back(t0);
    tr.states.push_back(y0);

    // degenerate case: the initial state already satisfies a watched event
    if (EventKind k0 = immediate_event(y0, cfg); k0 != EventKind::None) {
        tr.event = Event{k0, t0, y0};
        tr.t_final = t0;
        tr.y_final = y0;
        return tr;
    }
    if (cfg.t_end <= t0) {
        tr.t_final = t0;
        tr.y_final = y0;
        return tr;
    }

    auto finish_event = [&](EventKind kind, const State& ya, const State& fa,
                            const State& yb, const State& fb, double ta,
                            double h, double theta) {
        const double te = ta + theta * h;
        const State  ye = hermite_eval(ya, fa, yb, fb, h, theta, dim);
        tr.event = Event{kind, te, ye};
        tr.t_final = te;
        tr.y_final = ye;
        tr.times.push_back(te);
        tr.states.push_back(ye);
    };

    if (cfg.method == Method::RK4) {
        const double span = cfg.t_end - t0;
        const auto n = static_cast<std::size_t>(
            std::max<long long>(1, std::llround(span / cfg.h)));
        const double h = span / static_cast<double>(n);

        State y = y0, fy{};
        f(y, t0, fy);
        for (std::size_t i = 0; i < n; ++i) {
            const double t  = t0 + static_cast<double>(i) * h;
            const double t1 = (i + 1 == n) ? cfg.t_end
                                           : t0 + static_cast<double>(i + 1) * h;
            State y1 = rk4_step(f, y, t, h, dim);
            State f1{};
            f(y1, t1, f1);
            ++tr.n_steps;

            const EventHit hit = detect_event(y, fy, y1, f1, h, dim, cfg);
            if (hit.fired) {
                finish_event(hit.kind, y, fy, y1, f1, t, h, hit.theta);
                return tr;
            }
            y  = y1;
            fy = f1;
            if (tr.n_steps % stride == 0 || i + 1 == n) {
                tr.times.push_back(t1);
                tr.states.push_back(y);
            }
        }
        tr.t_final = cfg.t_end;
        tr.y_final = y;
        return tr;
    }

    //--------------------------------------------------------------------------
    // adaptive Dormand-Prince 5(4), FSAL
    //--------------------------------------------------------------------------
    const double h_min = 1e-12 * (cfg.t_end - t0);

    State y = y0, k1{}, k2{}, k3{}, k4{}, k5{}, k6{}, k7{}, tmp{}, y5{}, err{},
          sc{};
    double t = t0;
    f(y, t, k1);
    double h = initial_step(f, y0, t0, cfg);

    while (t < cfg.t_end) {
        bool last = false;
        if (t + h >= cfg.t_end) {
            h = cfg.t_end - t;
            last = true;
        }
        // a clamped final step may legitimately be tiny; only an interior
        // step collapsing below h_min signals tolerance failure
        if (!last && h < h_min) {
            tr.event = Event{EventKind::StepFailure, t, y};
            tr.t_final = t;
            tr.y_final = y;
            return tr;
        }

        for (std::size_t i = 0; i < dim; ++i)
            tmp[i] = y[i] + h * (a21 * k1[i]);
        f(tmp, t + c2 * h, k2);
        for (std::size_t i = 0; i < dim; ++i)
            tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(tmp, t + c3 * h, k3);
        for (std::size_t i = 0; i < dim; ++i)
            tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(tmp, t + c4 * h, k4);
        for (std::size_t i = 0; i < dim; ++i)
            tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] +
                                 a54 * k4[i]);
        f(tmp, t + c5 * h, k5);
        for (std::size_t i = 0; i < dim; ++i)
            tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] +
                                 a64 * k4[i] + a65 * k5[i]);
        f(tmp, t + h, k6);
        for (std::size_t i = 0; i < dim; ++i)
            y5[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] +
                                b5 * k5[i] + b6 * k6[i]);
        f(y5, t + h, k7); // FSAL stage, reused as k1 on acceptance

        for (std::size_t i = 0; i < dim; ++i) {
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                          e6 * k6[i] + e7 * k7[i]);
            sc[i] = cfg.abs_tol +
                    cfg.rel_tol * std::max(std::fabs(y[i]), std::fabs(y5[i]));
        }
        const double enorm = rms_scaled(err, sc, dim);

        // a non-finite norm means the state or derivative left double range;
        // NaN compares false against everything, so catch it before the
        // accept test or the step would be waved through
        if (!std::isfinite(enorm)) {
            ++tr.n_rejected;
            h *= 0.2; // the loop-top h_min check turns collapse into StepFailure
            continue;
        }

        double factor = (enorm <= 1e-300)
                            ? 5.0
                            : 0.9 * std::pow(enorm, -0.2);
        factor = std::clamp(factor, 0.2, 5.0);

        if (enorm > 1.0) {
            ++tr.n_rejected;
            h *= std::min(factor, 1.0);
            continue;
        }

        ++tr.n_steps;
        const EventHit hit = detect_event(y, k1, y5, k7, h, dim, cfg);
        if (hit.fired) {
            finish_event(hit.kind, y, k1, y5, k7, t, h, hit.theta);
            return tr;
        }

        t = last ? cfg.t_end : t + h;
        y  = y5;
        k1 = k7;
        if (tr.n_steps % stride == 0 || t >= cfg.t_end) {
            tr.times.push_back(t);
            tr.states.push_back(y);
        }
        h *= factor;
    }

    tr.t_final = t;
    tr.y_final = y;
    if (tr.times.back() != t) {
        tr.times.push_back(t);
        tr.states.push_back(y);
    }
    return tr;
}

} // namespace volcano
