#pragma once

#include <cmath>
#include <stdexcept>

// Physical parameters of the periodically driven double well and the derived
// coefficients of the effective slow ("volcano") potential obtained by
// averaging over the fast drive.
//
// Bare potential per unit mass:   V(x)  = -omega^2 x^2/2 + lambda x^4/4
// Drive:                          V(x,t) = (1 + eps cos(Omega t)) V(x)
// Effective slow potential:       V_s(x) = alpha x^2/2 - beta x^4/4
// with  alpha = omega^2 (r/2 - 1),  beta = lambda (2r - 1),  r = eps^2 omega^2 / Omega^2.
// The slow potential is a volcano (central well flanked by finite peaks at
// +-sqrt(alpha/beta), height alpha^2/(4 beta)) whenever r > 2.

namespace volcano {

struct ModelParams {
    double omega_sq = 1.0;   // squared natural frequency of the inverted harmonic part
    double lambda   = 0.1;   // quartic stiffness
    double epsilon  = 0.0;   // drive amplitude (dimensionless)
    double big_omega = 1.0;  // drive angular frequency
    double mass     = 1.0;   // cancels out of every equation of motion; kept for bookkeeping

    bool valid() const {
        return omega_sq > 0.0 && lambda >= 0.0 && big_omega > 0.0 &&
               epsilon >= 0.0 && mass > 0.0;
    }

    // drive ratio r = eps^2 omega^2 / Omega^2 -- the only combination the slow
    // equations depend on
    double ratio() const {
        return epsilon * epsilon * omega_sq / (big_omega * big_omega);
    }
};

struct EffectiveParams {
    double alpha = 0.0;          // harmonic coefficient of V_s
    double beta  = 0.0;          // quartic coefficient of V_s
    double ratio = 0.0;          // r
    bool   volcano = false;      // alpha > 0 && beta > 0
    double turning_point = 0.0;  // sqrt(alpha/beta), meaningful only when volcano
    double barrier_height = 0.0; // alpha^2/(4 beta), meaningful only when volcano
};

struct RegimeReport {
    double ratio = 0.0;        // r
    bool   volcano = false;    // r/2 > 1
    double smallness = 0.0;    // eps omega^2 / Omega^2, must be << 1 for averaging
    double freq_separation = 0.0; // Omega / omega
    bool   warning = false;    // averaging validity doubtful
};

// slow coefficients from the raw parameters
EffectiveParams effective_coefficients(const ModelParams& p);

// slow coefficients straight from the drive ratio; use this when r is the
// given quantity, so alpha/beta carry no (epsilon, Omega) round-trip rounding
EffectiveParams effective_coefficients(double omega_sq, double lambda, double r);

// bare double well per unit mass: -omega^2 x^2/2 + lambda x^4/4
double potential_bare(double x, const ModelParams& p);

// effective slow potential per unit mass: alpha x^2/2 - beta x^4/4
double potential_slow(double x, const EffectiveParams& eff);

// averaging-validity diagnostics; warns when eps omega^2/Omega^2 > 0.05 or Omega/omega < 10
RegimeReport regime_report(const ModelParams& p);

// Reference mapping from a requested drive ratio r to a concrete (eps, Omega)
// inside the averaging-validity regime: choose eps so that eps omega^2/Omega^2
// equals `smallness` (default 0.03), i.e. eps = r/smallness, Omega = omega eps/sqrt(r).
// r = 3 gives the canonical pair (eps = 100, Omega = 100/sqrt(3)).
ModelParams params_from_ratio(double omega_sq, double lambda, double r,
                              double smallness = 0.03, double mass = 1.0);

} // namespace volcano
