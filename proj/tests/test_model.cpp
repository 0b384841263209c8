#include "doctest.h"

#include <cmath>

#include "volcano/model.hpp"

using namespace volcano;

//------------------------------------------------------------------------------
// effective slow coefficients
//------------------------------------------------------------------------------

TEST_CASE("canonical coefficients are exact at r = 3, lambda = 0.1") {
    const EffectiveParams eff = effective_coefficients(1.0, 0.1, 3.0);
    // r/2 - 1 = 0.5 and 2r - 1 = 5 are exact, and 0.1 * 5 rounds to 0.5
    // exactly, so these hold bitwise, not just approximately
    CHECK(eff.alpha == 0.5);
    CHECK(eff.beta == 0.5);
    CHECK(eff.ratio == 3.0);
    CHECK(eff.volcano);
    CHECK(eff.turning_point == 1.0);
    CHECK(eff.barrier_height == 0.125);
}

TEST_CASE("soft well: lambda = 0.01 pushes the turning point to sqrt(10)") {
    const EffectiveParams eff = effective_coefficients(1.0, 0.01, 3.0);
    CHECK(eff.alpha == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(eff.beta == doctest::Approx(0.05).epsilon(1e-15));
    CHECK(eff.turning_point == doctest::Approx(std::sqrt(10.0)).epsilon(1e-14));
    CHECK(eff.barrier_height == doctest::Approx(1.25).epsilon(1e-14));
}

TEST_CASE("volcano condition flips at r = 2") {
    CHECK_FALSE(effective_coefficients(1.0, 0.1, 2.0).volcano); // alpha = 0
    CHECK_FALSE(effective_coefficients(1.0, 0.1, 1.9).volcano);
    CHECK(effective_coefficients(1.0, 0.1, 2.1).volcano);
    // r < 1/2 flips beta's sign as well; still no volcano
    const EffectiveParams eff0 = effective_coefficients(1.0, 0.1, 0.0);
    CHECK_FALSE(eff0.volcano);
    CHECK(eff0.alpha == -1.0);
    CHECK(eff0.beta == doctest::Approx(-0.1).epsilon(1e-15));
    CHECK(eff0.turning_point == 0.0);
}

TEST_CASE("slow coefficients depend on the drive only through the ratio") {
    // two different (eps, Omega) pairs with identical, exactly representable r
    ModelParams a{1.0, 0.1, 4.0, 4.0, 1.0};
    ModelParams b{1.0, 0.1, 8.0, 8.0, 1.0};
    CHECK(a.ratio() == 1.0);
    CHECK(b.ratio() == 1.0);
    const EffectiveParams ea = effective_coefficients(a);
    const EffectiveParams eb = effective_coefficients(b);
    CHECK(ea.alpha == eb.alpha);
    CHECK(ea.beta == eb.beta);
}

TEST_CASE("both coefficient overloads agree when the ratio is exact") {
    ModelParams p{1.0, 0.1, 4.0, 2.0, 1.0}; // r = 16/4 = 4 exactly
    const EffectiveParams via_params = effective_coefficients(p);
    const EffectiveParams via_ratio  = effective_coefficients(1.0, 0.1, 4.0);
    CHECK(via_params.alpha == via_ratio.alpha);
    CHECK(via_params.beta == via_ratio.beta);
    CHECK(via_params.turning_point == via_ratio.turning_point);
}

//------------------------------------------------------------------------------
// potentials
//------------------------------------------------------------------------------

TEST_CASE("bare double well values") {
    ModelParams p; // omega^2 = 1, lambda = 0.1
    CHECK(potential_bare(1.0, p) == doctest::Approx(-0.475).epsilon(1e-15));
    CHECK(potential_bare(0.0, p) == 0.0);
    // minima at x = +-sqrt(omega^2/lambda) = +-sqrt(10), depth -omega^4/(4 lambda)
    const double xmin = std::sqrt(10.0);
    CHECK(potential_bare(xmin, p) == doctest::Approx(-2.5).epsilon(1e-14));
    CHECK(potential_bare(-xmin, p) == doctest::Approx(-2.5).epsilon(1e-14));
}

TEST_CASE("slow potential: barrier sits exactly at the turning point") {
    const EffectiveParams eff = effective_coefficients(1.0, 0.1, 3.0);
    CHECK(potential_slow(1.0, eff) == 0.125);        // the Fig-1 checkpoint
    CHECK(potential_slow(0.5, eff) == 0.0546875);     // dyadic, exact
    CHECK(potential_slow(0.0, eff) == 0.0);
    SUBCASE("evenness and barrier identity on a grid") {
        for (double x = 0.05; x < 2.0; x += 0.11) {
            CHECK(potential_slow(x, eff) == potential_slow(-x, eff));
        }
        for (double lam : {0.5, 0.1, 0.05, 0.01}) {
            const EffectiveParams e = effective_coefficients(1.0, lam, 3.0);
            CHECK(potential_slow(e.turning_point, e) ==
                  doctest::Approx(e.barrier_height).epsilon(1e-13));
            // stationary point: V'(tp) = alpha tp - beta tp^3 = 0
            const double h = 1e-6 * e.turning_point;
            const double dv = (potential_slow(e.turning_point + h, e) -
                               potential_slow(e.turning_point - h, e)) /
                              (2.0 * h);
            CHECK(std::fabs(dv) < 1e-7);
        }
    }
}

//------------------------------------------------------------------------------
// regime diagnostics and the reference drive mapping
//------------------------------------------------------------------------------

TEST_CASE("reference mapping hits the canonical (eps, Omega) pair") {
    const ModelParams p = params_from_ratio(1.0, 0.1, 3.0);
    CHECK(p.epsilon == doctest::Approx(100.0).epsilon(1e-13));
    CHECK(p.big_omega == doctest::Approx(100.0 / std::sqrt(3.0)).epsilon(1e-13));
    CHECK(p.ratio() == doctest::Approx(3.0).epsilon(1e-13));
    CHECK(p.valid());

    const RegimeReport rr = regime_report(p);
    CHECK(rr.volcano);
    CHECK(rr.smallness == doctest::Approx(0.03).epsilon(1e-12));
    CHECK(rr.freq_separation > 10.0);
    CHECK_FALSE(rr.warning);
}

TEST_CASE("regime report flags slow or strong drives") {
    SUBCASE("drive at the natural frequency") {
        ModelParams p{1.0, 0.1, 0.5, 1.0, 1.0};
        CHECK(regime_report(p).warning);
    }
    SUBCASE("correction not small") {
        ModelParams p{1.0, 0.1, 50.0, 20.0, 1.0}; // eps w^2/Omega^2 = 0.125
        CHECK(regime_report(p).warning);
    }
    SUBCASE("undriven system never warns") {
        ModelParams p{1.0, 0.1, 0.0, 10.0, 1.0};
        CHECK_FALSE(regime_report(p).warning);
    }
}

TEST_CASE("reference mapping edge cases") {
    const ModelParams p0 = params_from_ratio(1.0, 0.1, 0.0);
    CHECK(p0.epsilon == 0.0);
    CHECK(p0.ratio() == 0.0);
    CHECK(p0.valid());
    CHECK_THROWS_AS((void)params_from_ratio(1.0, 0.1, -1.0), std::invalid_argument);
}

TEST_CASE("parameter validity") {
    CHECK(ModelParams{}.valid());
    CHECK_FALSE(ModelParams{-1.0, 0.1, 0.0, 1.0, 1.0}.valid());
    CHECK_FALSE(ModelParams{1.0, -0.1, 0.0, 1.0, 1.0}.valid());
    CHECK_FALSE(ModelParams{1.0, 0.1, -0.5, 1.0, 1.0}.valid());
    CHECK_FALSE(ModelParams{1.0, 0.1, 0.0, 0.0, 1.0}.valid());
    CHECK(ModelParams{1.0, 0.0, 0.0, 1.0, 1.0}.valid()); // lambda = 0 allowed
}
