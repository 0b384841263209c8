#include "volcano/model.hpp"

namespace volcano {

EffectiveParams effective_coefficients(double omega_sq, double lambda, double r) {
    EffectiveParams eff;
    eff.ratio = r;
    eff.alpha = omega_sq * (r / 2.0 - 1.0);
    eff.beta  = lambda * (2.0 * r - 1.0);
    eff.volcano = (eff.alpha > 0.0 && eff.beta > 0.0);
    if (eff.volcano) {
        eff.turning_point  = std::sqrt(eff.alpha / eff.beta);
        eff.barrier_height = eff.alpha * eff.alpha / (4.0 * eff.beta);
    }
    return eff;
}

EffectiveParams effective_coefficients(const ModelParams& p) {
    return effective_coefficients(p.omega_sq, p.lambda, p.ratio());
}

double potential_bare(double x, const ModelParams& p) {
    const double x2 = x * x;
    return -0.5 * p.omega_sq * x2 + 0.25 * p.lambda * x2 * x2;
}

double potential_slow(double x, const EffectiveParams& eff) {
    const double x2 = x * x;
    return 0.5 * eff.alpha * x2 - 0.25 * eff.beta * x2 * x2;
}

RegimeReport regime_report(const ModelParams& p) {
    RegimeReport rep;
    rep.ratio = p.ratio();
    rep.volcano = (rep.ratio > 2.0);
    rep.smallness = p.epsilon * p.omega_sq / (p.big_omega * p.big_omega);
    rep.freq_separation = p.big_omega / std::sqrt(p.omega_sq);
    // eps = 0 is the undriven system: trivially valid, no averaging involved
    rep.warning = p.epsilon > 0.0 &&
                  (rep.smallness > 0.05 || rep.freq_separation < 10.0);
    return rep;
}

ModelParams params_from_ratio(double omega_sq, double lambda, double r,
                              double smallness, double mass) {
    if (r < 0.0)
        throw std::invalid_argument("drive ratio must be non-negative");
    ModelParams p;
    p.omega_sq = omega_sq;
    p.lambda = lambda;
    p.mass = mass;
    if (r == 0.0) {
        p.epsilon = 0.0;
        p.big_omega = 10.0 * std::sqrt(omega_sq); // arbitrary valid stand-in; never enters slow dynamics
    } else {
        // eps omega^2 / Omega^2 = smallness and eps^2 omega^2 / Omega^2 = r
        p.epsilon = r / smallness;
        p.big_omega = std::sqrt(omega_sq) * p.epsilon / std::sqrt(r);
    }
    return p;
}

} // namespace volcano
