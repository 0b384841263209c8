//------------------------------------------------------------------------------
// experiments.cpp
//
// Orbit classification, escape-boundary bisection, width-grid sweeps (serial
// and OpenMP), period estimation, the energy-conservation quadrature oracle,
// and the driven-vs-averaged stroboscopic comparison harness.
//------------------------------------------------------------------------------

#include "volcano/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace volcano {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// record as few samples as possible when only the verdict matters
constexpr std::size_t kNoSamples = std::numeric_limits<std::size_t>::max();

IntegratorConfig classify_config(const EffectiveParams& eff, double horizon,
                                 const ClassifyOptions& opt) {
    IntegratorConfig cfg;
    cfg.method        = Method::DormandPrince;
    cfg.rel_tol       = opt.rel_tol;
    cfg.abs_tol       = opt.abs_tol;
    cfg.t_end         = horizon;
    cfg.sample_stride = kNoSamples;
    cfg.escape_threshold =
        eff.volcano ? opt.escape_factor * eff.turning_point : 0.0;
    cfg.watch_width = true;
    cfg.dim         = 5;
    return cfg;
}

} // namespace

//------------------------------------------------------------------------------
// classification
//------------------------------------------------------------------------------

OrbitClass classify_orbit(double x0, double W0, const CouplingMode& mode,
                          const ModelParams& p, const EffectiveParams& eff,
                          double horizon, const ClassifyOptions& opt) {
    if (!p.valid())
        throw std::invalid_argument("classify_orbit: invalid model parameters");

    const IntegratorConfig cfg = classify_config(eff, horizon, opt);

    const State y0{x0, opt.v0, W0, opt.w_rate0, opt.w_accel0};
    auto f = [&](const State& y, double, State& dy) {
        quantum_slow_deriv(y, eff, p, mode, dy, opt.dyn);
    };
    const Trajectory tr = integrate(f, y0, 0.0, cfg);

    OrbitClass oc;
    oc.y_final = tr.y_final;
    switch (tr.event.kind) {
        case EventKind::None:
            oc.outcome = OrbitClass::Outcome::Bounded;
            oc.t_event = horizon;
            break;
        case EventKind::EscapeCrossing:
            oc.outcome = OrbitClass::Outcome::Escaped;
            oc.t_event = tr.event.t;
            break;
        case EventKind::WidthNonPositive:
            oc.outcome = OrbitClass::Outcome::ClosureBreakdown;
            oc.t_event = tr.event.t;
            break;
        case EventKind::StepFailure:
            // the step only collapses when the moments blow up beyond double
            // range; by then the closure stopped describing anything physical
            oc.outcome = OrbitClass::Outcome::ClosureBreakdown;
            oc.t_event = tr.event.t;
            break;
    }
    return oc;
}

//------------------------------------------------------------------------------
// escape boundary
//------------------------------------------------------------------------------

BoundaryPoint escape_boundary(double W0, const CouplingMode& mode,
                              const ModelParams& p, const EffectiveParams& eff,
                              double horizon, double bisect_tol,
                              const ClassifyOptions& opt) {
    BoundaryPoint pt;
    pt.W0 = W0;

    if (!eff.volcano || bisect_tol <= 0.0) {
        pt.bracket_invalid = true;
        return pt;
    }

    auto escaped = [&](double x0) {
        // breakdown counts as "not escaped": the bisection tracks the largest
        // initial mean that does not leave the well
        return classify_orbit(x0, W0, mode, p, eff, horizon, opt).outcome ==
               OrbitClass::Outcome::Escaped;
    };

    double lo = 0.0;
    double hi = 1.5 * eff.turning_point;
    if (escaped(lo) || !escaped(hi)) {
        pt.bracket_invalid = true;
        return pt;
    }
    while (hi - lo > bisect_tol) {
        const double mid = 0.5 * (lo + hi);
        if (escaped(mid))
            hi = mid;
        else
            lo = mid;
    }
    pt.x_max = 0.5 * (lo + hi);
    return pt;
}

//------------------------------------------------------------------------------
// width sweeps: serial reference and OpenMP parallel map
//------------------------------------------------------------------------------

namespace {

SweepResult make_sweep_header(const CouplingMode& mode, const ModelParams& p,
                              const EffectiveParams& eff, double horizon,
                              double bisect_tol, std::size_t n_points) {
    SweepResult sr;
    sr.lambda     = p.lambda;
    sr.ratio      = eff.ratio;
    sr.mode       = mode;
    sr.bisect_tol = bisect_tol;
    sr.horizon    = horizon;
    sr.points.resize(n_points);
    return sr;
}

} // namespace

SweepResult boundary_curve_serial(const std::vector<double>& w0_grid,
                                  const CouplingMode& mode, const ModelParams& p,
                                  const EffectiveParams& eff, double horizon,
                                  double bisect_tol, const ClassifyOptions& opt) {
    if (w0_grid.empty())
        throw std::invalid_argument("boundary_curve: empty width grid");
    if (!p.valid())
        throw std::invalid_argument("boundary_curve: invalid model parameters");

    SweepResult sr =
        make_sweep_header(mode, p, eff, horizon, bisect_tol, w0_grid.size());
    for (std::size_t i = 0; i < w0_grid.size(); ++i)
        sr.points[i] =
            escape_boundary(w0_grid[i], mode, p, eff, horizon, bisect_tol, opt);
    return sr;
}

SweepResult boundary_curve(const std::vector<double>& w0_grid,
                           const CouplingMode& mode, const ModelParams& p,
                           const EffectiveParams& eff, double horizon,
                           double bisect_tol, int jobs,
                           const ClassifyOptions& opt) {
    if (w0_grid.empty())
        throw std::invalid_argument("boundary_curve: empty width grid");
    if (!p.valid())
        throw std::invalid_argument("boundary_curve: invalid model parameters");

    SweepResult sr =
        make_sweep_header(mode, p, eff, horizon, bisect_tol, w0_grid.size());

#ifdef _OPENMP
    const auto n = static_cast<long long>(w0_grid.size());
    if (jobs > 0)
        omp_set_num_threads(static_cast<int>(
            std::max<long long>(1, std::min<long long>(jobs, n))));
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < n; ++i) {
        // each point is pure and written by grid index, so the result is
        // identical for any thread count
        sr.points[static_cast<std::size_t>(i)] =
            escape_boundary(w0_grid[static_cast<std::size_t>(i)], mode, p, eff,
                            horizon, bisect_tol, opt);
    }
#else
    (void)jobs;
    for (std::size_t i = 0; i < w0_grid.size(); ++i)
        sr.points[i] =
            escape_boundary(w0_grid[i], mode, p, eff, horizon, bisect_tol, opt);
#endif
    return sr;
}

//------------------------------------------------------------------------------
// period estimation
//------------------------------------------------------------------------------

namespace {

// crossing time of the scalar cubic Hermite x(theta) through zero inside one
// sample interval; sign convention handled by the caller via `sign`
double hermite_zero_time(double t0, double t1, double x0, double v0, double x1,
                         double v1, double sign) {
    const double h = t1 - t0;
    auto value = [&](double theta) {
        const double u2 = theta * theta, u3 = u2 * theta;
        const double h00 = 2.0 * u3 - 3.0 * u2 + 1.0;
        const double h10 = u3 - 2.0 * u2 + theta;
        const double h01 = -2.0 * u3 + 3.0 * u2;
        const double h11 = u3 - u2;
        return sign * (h00 * x0 + h10 * h * v0 + h01 * x1 + h11 * h * v1);
    };
    double lo = 0.0, hi = 1.0; // value(lo) > 0 >= value(hi)
    for (int it = 0; it < 200 && (hi - lo) * h > 1e-10; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (value(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return t0 + 0.5 * (lo + hi) * h;
}

PeriodEstimate spacings_to_estimate(const std::vector<double>& marks) {
    PeriodEstimate pe;
    if (marks.size() < 3) {
        pe.status = PeriodEstimate::Status::TooFewCycles;
        return pe;
    }
    double sum = 0.0;
    double dmin = std::numeric_limits<double>::infinity(), dmax = 0.0;
    for (std::size_t i = 1; i < marks.size(); ++i) {
        const double d = marks[i] - marks[i - 1];
        sum += d;
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
    }
    pe.n_cycles   = marks.size() - 1;
    pe.period     = sum / static_cast<double>(pe.n_cycles);
    pe.rel_spread = (dmax - dmin) / pe.period;
    pe.status     = PeriodEstimate::Status::Ok;
    return pe;
}

} // namespace

PeriodEstimate oscillation_period(const std::vector<double>& times,
                                  const std::vector<State>& states) {
    PeriodEstimate pe;
    if (times.size() < 3 || times.size() != states.size())
        return pe;

    // same-direction (downward) zero crossings of the mean position,
    // refined on the cubic Hermite interpolant through (x, v) samples
    std::vector<double> down, up;
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        const double x0 = states[i][0], x1 = states[i + 1][0];
        const double v0 = states[i][1], v1 = states[i + 1][1];
        if (x0 > 0.0 && x1 <= 0.0)
            down.push_back(hermite_zero_time(times[i], times[i + 1], x0, v0,
                                             x1, v1, +1.0));
        else if (x0 < 0.0 && x1 >= 0.0)
            up.push_back(hermite_zero_time(times[i], times[i + 1], x0, v0, x1,
                                           v1, -1.0));
    }
    const std::vector<double>& marks = down.size() >= up.size() ? down : up;
    pe = spacings_to_estimate(marks);
    if (pe.status == PeriodEstimate::Status::Ok)
        return pe;

    // fallback for trajectories that never change sign: successive maxima of
    // the mean position, located as downward zero crossings of the velocity
    std::vector<double> maxima;
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        const double v0 = states[i][1], v1 = states[i + 1][1];
        if (v0 > 0.0 && v1 <= 0.0) {
            const double frac = v0 / (v0 - v1);
            maxima.push_back(times[i] + frac * (times[i + 1] - times[i]));
        }
    }
    return spacings_to_estimate(maxima);
}

//------------------------------------------------------------------------------
// quadrature oracle
//------------------------------------------------------------------------------

namespace {

struct PeriodIntegrand {
    double x0, e0, limit_end;
    const EffectiveParams* eff;

    double operator()(double theta) const {
        const double x  = x0 * std::sin(theta);
        const double dv = e0 - potential_slow(x, *eff);
        if (dv <= 0.0)
            return limit_end; // only within rounding of the endpoint
        return x0 * std::cos(theta) / std::sqrt(2.0 * dv);
    }
};

double adaptive_simpson(const PeriodIntegrand& f, double a, double b,
                        double fa, double fm, double fb, double whole,
                        double tol, int depth) {
    const double m  = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left  = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::fabs(delta) <= 15.0 * tol)
        return left + right + delta / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

} // namespace

double period_quadrature_oracle(double x0, const EffectiveParams& eff) {
    if (!eff.volcano)
        throw std::invalid_argument(
            "period_quadrature_oracle: no confining well (alpha, beta must be > 0)");
    const double tp = eff.turning_point;
    if (!(x0 > 0.0) || x0 >= tp)
        throw std::invalid_argument(
            "period_quadrature_oracle: amplitude outside (0, turning_point)");

    // within rounding of the barrier top the period diverges logarithmically
    // and the quadrature cannot resolve it; report a sentinel instead
    if (x0 >= tp * (1.0 - 1e-12))
        return 1e7;

    // T = 4 * int_0^{pi/2} x0 cos(theta) dtheta / sqrt(2 (V(x0) - V(x0 sin)))
    // after x = x0 sin(theta); the integrand tends to sqrt(x0 / V'(x0)) at
    // the upper endpoint, so it is bounded and smooth
    PeriodIntegrand f;
    f.x0  = x0;
    f.eff = &eff;
    f.e0  = potential_slow(x0, eff);
    const double vp = eff.alpha * x0 - eff.beta * x0 * x0 * x0;
    f.limit_end = std::sqrt(x0 / vp);

    const double a = 0.0, b = kTwoPi / 4.0;
    const double fa = f(a), fb = f.limit_end, fm = f(0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    const double integral =
        adaptive_simpson(f, a, b, fa, fm, fb, whole, 0.25e-8, 30);
    return std::min(4.0 * integral, 1e7);
}

//------------------------------------------------------------------------------
// driven vs averaged comparison
//------------------------------------------------------------------------------

CompareResult compare_full_vs_averaged(const ModelParams& p, const State& slow_ic,
                                       double horizon, CompareSystem sys,
                                       const CompareOptions& opt) {
    if (!p.valid())
        throw std::invalid_argument("compare: invalid model parameters");
    const RegimeReport rr = regime_report(p);
    if (p.epsilon > 0.0 && rr.warning)
        throw std::invalid_argument(
            "compare: parameters fail the averaging validity check "
            "(drive too slow or correction not small)");

    const EffectiveParams eff = effective_coefficients(p);
    const double t_drive = kTwoPi / p.big_omega;
    const auto n_strobes = static_cast<std::size_t>(
        std::max(1.0, std::ceil(horizon / t_drive - 1e-9)));
    const double t_end = static_cast<double>(n_strobes) * t_drive;

    IntegratorConfig cfg;
    cfg.method        = Method::RK4;
    cfg.h             = t_drive / static_cast<double>(opt.steps_per_period);
    cfg.t_end         = t_end;
    cfg.sample_stride = opt.steps_per_period;
    cfg.escape_threshold =
        eff.volcano ? opt.escape_factor * eff.turning_point : 0.0;

    const bool quantum = (sys == CompareSystem::Quantum);
    cfg.watch_width = quantum;
    cfg.dim         = quantum ? 5 : 2;

    // driven initial condition = slow IC + analytic fast components at t = 0,
    // including the fast components' own time derivatives (the cosine parts
    // start at extremum: value offset, zero rate, +amplitude * Omega^2 accel)
    State y_drv = slow_ic;
    if (quantum) {
        const QuantumState qs = unpack_quantum(slow_ic);
        const auto [xf, Wf]   = quantum_fast_components(qs, 0.0, p, opt.dyn);
        const double x = qs.mean_x, v = qs.mean_v, W = qs.width,
                     Wd = qs.width_rate;
        const double l = p.lambda, w2 = p.omega_sq;
        const double dW2  = opt.dyn.literal_square_brackets ? Wd * Wd
                                                            : 2.0 * W * Wd;
        const double dxsq = opt.dyn.literal_square_brackets ? v * v
                                                            : 2.0 * x * v;
        const double cos_amp = w2 * W - 3.0 * l * (W * x * x + W * W);
        const double sin_amp =
            2.0 * w2 * Wd - 3.0 * l * (1.5 * dW2 + W * dxsq + 2.0 * Wd * x * x);
        y_drv[0] += xf;
        y_drv[2] += Wf;
        y_drv[3] += -(2.0 * p.epsilon / (p.big_omega * p.big_omega)) * sin_amp;
        y_drv[4] += 2.0 * p.epsilon * cos_amp;
    } else {
        y_drv[0] += classical_fast_component(slow_ic[0], 0.0, p);
    }

    DerivFn f_drv, f_avg;
    if (quantum) {
        f_drv = [&p](const State& y, double t, State& dy) {
            quantum_driven_deriv(y, t, p, dy);
        };
        f_avg = [&p, &eff, &opt](const State& y, double, State& dy) {
            quantum_slow_deriv(y, eff, p, opt.mode, dy, opt.dyn);
        };
    } else {
        f_drv = [&p](const State& y, double t, State& dy) {
            classical_driven_deriv(y, t, p, dy);
        };
        f_avg = [&eff](const State& y, double, State& dy) {
            classical_slow_deriv(y, eff, dy);
        };
    }

    const Trajectory tr_drv = integrate(f_drv, y_drv, 0.0, cfg);
    const Trajectory tr_avg = integrate(f_avg, slow_ic, 0.0, cfg);

    CompareResult res;
    if (tr_drv.event.kind != EventKind::None) {
        res.failed    = true;
        res.fail_kind = tr_drv.event.kind;
        res.fail_time = tr_drv.event.t;
    } else if (tr_avg.event.kind != EventKind::None) {
        res.failed    = true;
        res.fail_kind = tr_avg.event.kind;
        res.fail_time = tr_avg.event.t;
    }

    // both runs share the step grid, so sample k sits at k * t_drive in each;
    // an early event just truncates the comparable range
    std::size_t n = std::min(tr_drv.states.size(), tr_avg.states.size());
    if (res.failed && n > 0)
        --n; // drop the event-localized terminal sample (off the strobe grid)

    double sum_sq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const State& ya = tr_avg.states[k];
        const State& yd = tr_drv.states[k];
        double dev = 0.0, fast_corr = 0.0;
        if (quantum) {
            // strobe samples sit at whole drive periods: evaluate the fast
            // components at phase zero so cos = 1 and sin = 0 exactly
            const auto [xf, Wf] =
                quantum_fast_components(unpack_quantum(ya), 0.0, p, opt.dyn);
            const double rx = yd[0] - xf - ya[0];
            const double rw = yd[2] - Wf - ya[2];
            dev       = std::hypot(rx, rw);
            fast_corr = yd[0] - xf;
        } else {
            const double xf = classical_fast_component(ya[0], 0.0, p);
            dev       = std::fabs(yd[0] - xf - ya[0]);
            fast_corr = yd[0] - xf;
        }
        res.t.push_back(tr_avg.times[k]);
        res.slow.push_back(ya[0]);
        res.strobe.push_back(yd[0]);
        res.fast_corrected.push_back(fast_corr);
        res.abs_err.push_back(dev);
        res.max_dev = std::max(res.max_dev, dev);
        sum_sq += dev * dev;
    }
    if (n > 0)
        res.rms_dev = std::sqrt(sum_sq / static_cast<double>(n));
    return res;
}

} // namespace volcano
