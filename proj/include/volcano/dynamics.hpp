#pragma once

#include <array>
#include <utility>

#include "volcano/model.hpp"

// Right-hand sides of every equation of motion: the driven classical system,
// its averaged slow version, the closed quantum-moment system (Gaussian
// cumulant closure, K = 3 W^2) driven and averaged, and the analytic fast
// components used to translate between the two pictures.
//
// State layout, shared by all systems:
//   y[0] = <x>   mean position       (classical: x)
//   y[1] = <v>   mean velocity       (classical: v)
//   y[2] = W     mean-square width   (classical systems: carried along, inert)
//   y[3] = dW/dt
//   y[4] = d2W/dt2
// The width obeys a third-order equation, so (W, Wdot, Wddot) are all state.

namespace volcano {

using State = std::array<double, 5>;

struct ClassicalState {
    double x = 0.0;
    double v = 0.0;
};

struct QuantumState {
    double mean_x = 0.0;
    double mean_v = 0.0;
    double width = 0.0;
    double width_rate = 0.0;
    double width_accel = 0.0;
};

// How the averaged width and mean equations are wired together.
//   Uncoupled     - mean ignores the width entirely (classical slow dynamics)
//   Partial       - width feeds the mean, mean dropped from the width equation
//   Full          - both couplings kept
//   SkewedPartial - Partial plus the static skewness ansatz S = gamma <x>,
//                   which adds -lambda (1 - 2r) gamma <x> to the mean equation
enum class Coupling { Uncoupled, Partial, Full, SkewedPartial };

struct CouplingMode {
    Coupling kind = Coupling::Full;
    double gamma = 0.0; // used only by SkewedPartial
};

// The averaged width equation is printed with squares under a time-derivative
// dot; the default reading is d(W^2)/dt = 2 W Wdot and d(<x>^2)/dt = 2 <x> <v>,
// which is the only reading that reduces the averaged system exactly to the
// driven one at eps = 0.  The literal reading ((dW/dt)^2, (d<x>/dt)^2) is kept
// selectable for sensitivity checks.
struct DynOptions {
    bool literal_square_brackets = false;
};

// driven classical:  xddot = omega^2 (1+f) x - lambda (1+f) x^3,  f = eps cos(Omega t)
void classical_driven_deriv(const State& y, double t, const ModelParams& p, State& dy);

// averaged classical:  xddot = -alpha x + beta x^3
void classical_slow_deriv(const State& y, const EffectiveParams& eff, State& dy);

// fast displacement riding on a slow classical trajectory:
//   x_f = -(eps/Omega^2) (omega^2 x_s - lambda x_s^3) cos(Omega t)
double classical_fast_component(double x_s, double t, const ModelParams& p);

// driven quantum-moment system (closed by K = 3 W^2)
void quantum_driven_deriv(const State& y, double t, const ModelParams& p, State& dy);

// averaged quantum-moment system in the selected coupling mode
void quantum_slow_deriv(const State& y, const EffectiveParams& eff,
                        const ModelParams& p, const CouplingMode& mode, State& dy,
                        const DynOptions& opt = {});

// fast components riding on a slow quantum trajectory: (mean displacement, width displacement)
std::pair<double, double> quantum_fast_components(const QuantumState& s, double t,
                                                  const ModelParams& p,
                                                  const DynOptions& opt = {});

// moment bookkeeping for the Gaussian closure:
//   <x^3>             = <x>^3 + 3 W <x> + S
//   <x^4> - <x^3><x>  = K + 3 W <x>^2   with K = 3 W^2
// Returns (<x^3>, <x^4> - <x^3><x>).  Rejects negative width.
std::pair<double, double> moment_reconstruct(double mean_x, double width, double skew);

// state packing helpers
State pack(const ClassicalState& s);
State pack(const QuantumState& s);
QuantumState unpack_quantum(const State& y);

} // namespace volcano
