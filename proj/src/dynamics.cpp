#include "volcano/dynamics.hpp"

#include <cmath>

namespace volcano {

//------------------------------------------------------------------------------
// classical systems
//------------------------------------------------------------------------------

void classical_driven_deriv(const State& y, double t, const ModelParams& p, State& dy) {
    const double f = p.epsilon * std::cos(p.big_omega * t);
    const double x = y[0];
    dy[0] = y[1];
    dy[1] = p.omega_sq * (1.0 + f) * x - p.lambda * (1.0 + f) * x * x * x;
    dy[2] = dy[3] = dy[4] = 0.0;
}

void classical_slow_deriv(const State& y, const EffectiveParams& eff, State& dy) {
    const double x = y[0];
    dy[0] = y[1];
    dy[1] = -eff.alpha * x + eff.beta * x * x * x;
    dy[2] = dy[3] = dy[4] = 0.0;
}

double classical_fast_component(double x_s, double t, const ModelParams& p) {
    const double amp = p.omega_sq * x_s - p.lambda * x_s * x_s * x_s;
    return -(p.epsilon / (p.big_omega * p.big_omega)) * amp * std::cos(p.big_omega * t);
}

//------------------------------------------------------------------------------
// driven quantum-moment system (Gaussian closure)
//------------------------------------------------------------------------------

void quantum_driven_deriv(const State& y, double t, const ModelParams& p, State& dy) {
    const double w2 = p.omega_sq, l = p.lambda;
    const double f  = p.epsilon * std::cos(p.big_omega * t);
    const double fd = -p.epsilon * p.big_omega * std::sin(p.big_omega * t);
    const double x = y[0], v = y[1], W = y[2], Wd = y[3], Wdd = y[4];
    const double g = 1.0 + f;

    dy[0] = v;
    dy[1] = w2 * g * x - l * g * x * x * x - 3.0 * l * g * x * W;
    dy[2] = Wd;
    dy[3] = Wdd;
    // third-order width equation; every term carries Wd, fd, or d(x^2)/dt.
    // Term order matches the averaged system so the eps = 0 reduction is exact
    // to the last bit, not merely to rounding.
    dy[4] = 4.0 * w2 * g * Wd
          + 2.0 * w2 * fd * W
          - 9.0 * l * g * (2.0 * W * Wd)                 // d(W^2)/dt
          - 12.0 * l * g * x * x * Wd
          - 6.0 * l * fd * (W * W + W * x * x)
          - 6.0 * l * g * (2.0 * x * v) * W;             // d(<x>^2)/dt
}

//------------------------------------------------------------------------------
// averaged quantum-moment system
//------------------------------------------------------------------------------

void quantum_slow_deriv(const State& y, const EffectiveParams& eff,
                        const ModelParams& p, const CouplingMode& mode, State& dy,
                        const DynOptions& opt) {
    const double w2 = p.omega_sq, l = p.lambda, r = eff.ratio;
    const double x = y[0], v = y[1], W = y[2], Wd = y[3], Wdd = y[4];

    dy[0] = v;

    // mean equation: -alpha x + beta x^3, plus the width coupling 3 beta x W
    // (and the static skewness term beta gamma x in the skewed variant)
    double acc = -eff.alpha * x + eff.beta * x * x * x;
    switch (mode.kind) {
        case Coupling::Uncoupled:
            break;
        case Coupling::Partial:
        case Coupling::Full:
            acc += 3.0 * eff.beta * x * W;
            break;
        case Coupling::SkewedPartial:
            acc += 3.0 * eff.beta * x * W + eff.beta * mode.gamma * x;
            break;
    }
    dy[1] = acc;

    dy[2] = Wd;
    dy[3] = Wdd;

    // width equation; the x-dependent terms are kept only in Full coupling
    const double dW2  = opt.literal_square_brackets ? Wd * Wd : 2.0 * W * Wd;
    const double dxsq = opt.literal_square_brackets ? v * v   : 2.0 * x * v;
    double w3 = 4.0 * w2 * (1.0 - 2.0 * r) * Wd
              - 9.0 * l * (1.0 - 5.0 * r) * dW2;
    if (mode.kind == Coupling::Full) {
        // subtract term by term, mirroring the driven system's evaluation
        // order, so the eps = 0 reduction holds to the last bit
        w3 -= 12.0 * l * (1.0 - 9.0 * r) * x * x * Wd;
        w3 -= 6.0 * l * (1.0 - 5.0 * r) * dxsq * W;
    }
    dy[4] = w3;
}

//------------------------------------------------------------------------------
// fast components and moment bookkeeping
//------------------------------------------------------------------------------

std::pair<double, double> quantum_fast_components(const QuantumState& s, double t,
                                                  const ModelParams& p,
                                                  const DynOptions& opt) {
    const double w2 = p.omega_sq, l = p.lambda;
    const double eps = p.epsilon, Om = p.big_omega;
    const double x = s.mean_x, v = s.mean_v, W = s.width, Wd = s.width_rate;
    const double c = std::cos(Om * t), sn = std::sin(Om * t);

    const double xf = -(eps / (Om * Om)) *
                      (w2 * x - l * (x * x * x + 3.0 * x * W)) * c;

    const double cos_amp = w2 * W - 3.0 * l * (W * x * x + W * W);
    const double dW2  = opt.literal_square_brackets ? Wd * Wd : 2.0 * W * Wd;
    const double dxsq = opt.literal_square_brackets ? v * v   : 2.0 * x * v;
    const double sin_amp = 2.0 * w2 * Wd - 3.0 * l * (1.5 * dW2 + W * dxsq + 2.0 * Wd * x * x);

    const double wf = -(2.0 * eps / (Om * Om)) * cos_amp * c
                      - (2.0 * eps / (Om * Om * Om)) * sin_amp * sn;
    return {xf, wf};
}

std::pair<double, double> moment_reconstruct(double mean_x, double width, double skew) {
    if (width < 0.0)
        throw std::invalid_argument("moment_reconstruct: negative width");
    const double x3 = mean_x * mean_x * mean_x + 3.0 * width * mean_x + skew;
    const double kurt_part = 3.0 * width * width + 3.0 * width * mean_x * mean_x;
    return {x3, kurt_part};
}

//------------------------------------------------------------------------------
// state packing
//------------------------------------------------------------------------------

State pack(const ClassicalState& s) {
    return {s.x, s.v, 0.0, 0.0, 0.0};
}

State pack(const QuantumState& s) {
    return {s.mean_x, s.mean_v, s.width, s.width_rate, s.width_accel};
}

QuantumState unpack_quantum(const State& y) {
    return {y[0], y[1], y[2], y[3], y[4]};
}

} // namespace volcano
