#include <doctest.h>

#include <atomic>
#include <cmath>
#include <thread>

#include "degwave/nonlinearity.hpp"

using namespace degwave;

namespace {

// Exact antiderivative of A'(r) f(r) for A = u^2, f = K u(u-s1)(u-s2)(1-u):
// the independent oracle used throughout this suite.
struct QuarticOracle {
    double K, s1, s2;
    double AfPrimitive(double r) const {
        const double c3 = s1 * s2;
        const double c4 = -(s1 + s2 + s1 * s2);
        const double c5 = 1 + s1 + s2;
        // A' f = 2K (-r^5 + c5 r^4 + c4 r^3 + c3 r^2) ... expanded below
        const double r3 = r * r * r, r4 = r3 * r, r5 = r4 * r, r6 = r5 * r;
        return 2 * K * (-r6 / 6 + c5 * r5 / 5 + c4 * r4 / 4 + c3 * r3 / 3);
    }
    double G(double a, double b) const { return AfPrimitive(b) - AfPrimitive(a); }
};

} // namespace

TEST_SUITE("nonlinearity") {

TEST_CASE("power-law validation and closed-form a_star") {
    auto rep2 = validate_diffusion(DiffusionSpec::power_law(2));
    CHECK(rep2.ok());
    CHECK(DiffusionSpec::power_law(2).a_star() == doctest::Approx(1.0));
    CHECK(DiffusionSpec::power_law(3).a_star() == doctest::Approx(2.0));
    CHECK(DiffusionSpec::power_law(1.5).a_star() == doctest::Approx(0.5));
    CHECK_THROWS_AS(DiffusionSpec::power_law(0.5), Error); // NonDegenerate class
    CHECK_THROWS_AS(DiffusionSpec::power_law(1.0), Error);
}

TEST_CASE("custom builtins pass validation with the right limits") {
    // A = u^{3/2} + u^2: r A''/A' = (0.75 sqrt r + 2r)/(1.5 sqrt r + 2r) -> 1/2
    auto Ac = DiffusionSpec::builtin("u32_plus_u2");
    CHECK(validate_diffusion(Ac).ok());
    CHECK(Ac.a_star() == doctest::Approx(0.5).epsilon(1e-6));
    // A = u^2 log(1+u) behaves like u^3 at 0: a_star = 2
    auto Al = DiffusionSpec::builtin("u2_log1p");
    CHECK(validate_diffusion(Al).ok());
    CHECK(Al.a_star() == doctest::Approx(2.0).epsilon(1e-6));
    CHECK_THROWS_AS(DiffusionSpec::builtin("nope"), Error);
}

TEST_CASE("reaction validation: default quartic passes, fat s2 fails the integral") {
    auto A = DiffusionSpec::power_law(2);
    auto f = ReactionSpec::quartic(8, 0.3, 0.55);
    auto rep = validate_reaction(f, A);
    CHECK(rep.ok());
    // exact zeros by construction
    CHECK(f.f(0.0) == 0.0);
    CHECK(f.f(0.3) == 0.0);
    CHECK(f.f(0.55) == 0.0);
    CHECK(f.f(1.0) == 0.0);
    CHECK(f.df(0.0) == doctest::Approx(8 * 0.3 * 0.55));

    auto fbad = ReactionSpec::quartic(8, 0.3, 0.95);
    auto repb = validate_reaction(fbad, A);
    CHECK(!repb.ok());
    bool integral_failed = false;
    for (const auto& it : repb.items)
        if (it.detail == "IntegralConditionFailed") integral_failed = true;
    CHECK(integral_failed);

    CHECK_THROWS_AS(ReactionSpec::quartic(8, 0.55, 0.3), Error); // ordering
}

TEST_CASE("theta agrees with the exact-antiderivative oracle") {
    auto A = DiffusionSpec::power_law(2);
    auto f = ReactionSpec::quartic(8, 0.3, 0.55);
    const QuarticOracle orc{8, 0.3, 0.55};
    // oracle: bisection on the exact primitive
    double lo = 0.55, hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (orc.G(0.3, mid) < 0 ? lo : hi) = mid;
    }
    const double theta_exact = 0.5 * (lo + hi);
    const double th = theta_of(A, f);
    CHECK(th == doctest::Approx(theta_exact).epsilon(1e-9));
    CHECK(th > 0.55);
    CHECK(th < 1.0);

    CHECK_THROWS_AS(theta_of(A, ReactionSpec::quartic(8, 0.3, 0.95)), Error); // ThetaNotFound
}

TEST_CASE("pressure map closed forms") {
    auto A2 = DiffusionSpec::power_law(2);
    auto A3 = DiffusionSpec::power_law(3);
    CHECK(pressure(0.5, A2) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pressure(0.0, A2) == 0.0);
    CHECK(pressure(0.5, A3) == doctest::Approx(0.375).epsilon(1e-14));
    CHECK(pressure_inverse(1.0, A2) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pressure_inverse(0.375, A3) == doctest::Approx(0.5).epsilon(1e-12));
    const double u = 0.37;
    CHECK(std::abs(pressure_inverse(pressure(u, A2), A2) - u) < 1e-10);
}

TEST_CASE("quadrature path agrees with the closed form for power laws") {
    for (double m : {1.5, 2.0, 3.0}) {
        auto A = DiffusionSpec::power_law(m);
        double worst = 0;
        for (int i = 0; i <= 40; ++i) {
            const double u = 2.0 * i / 40;
            worst = std::max(worst, std::abs(pressure_quadrature(u, A) - pressure(u, A)));
        }
        CHECK(worst < 1e-10);
    }
}

TEST_CASE("B and h: values, crossover branch and degenerate limits") {
    auto A = DiffusionSpec::power_law(2);
    PressureMaps maps(A, ReactionSpec::monostable_logistic(1.0, 1.0));
    CHECK(maps.B(0.3) == doctest::Approx(0.3).epsilon(1e-14)); // B = (m-1) v
    // h(v) = v (1 - v/2) for m = 2, f = u(1-u)
    CHECK(maps.h(1.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(maps.B(1e-6) / 1e-6 == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(maps.h(0.0) == 0.0);
    CHECK(maps.B(0.0) == 0.0);
    // below the crossover the linearized branch applies exactly
    CHECK(maps.h(1e-9) == doctest::Approx(1e-9 * maps.f_prime0() * maps.a_star()).epsilon(1e-12));

    // degenerate limits for a custom kind, measured through the real maps
    PressureMaps mc(DiffusionSpec::builtin("u32_plus_u2"), ReactionSpec::quartic(8, 0.3, 0.55));
    const double d = 1e-5;
    CHECK(std::abs(mc.B(d) / d - mc.a_star()) < 1e-4);
    CHECK(std::abs(mc.h(d) / d - mc.f_prime0() * mc.a_star()) < 1e-4);
}

TEST_CASE("round trip: 1000 random u in [0,2] invert to 1e-9") {
    SplitMix64 rng(42);
    PressureMaps power(DiffusionSpec::power_law(2), ReactionSpec::quartic(8, 0.3, 0.55));
    PressureMaps custom(DiffusionSpec::builtin("u32_plus_u2"), ReactionSpec::quartic(8, 0.3, 0.55));
    double worst_p = 0, worst_c = 0;
    for (int i = 0; i < 1000; ++i) {
        const double u = rng.uniform(0.0, 2.0);
        worst_p = std::max(worst_p, std::abs(power.lambda(power.Lambda(u)) - u));
        worst_c = std::max(worst_c, std::abs(custom.lambda(custom.Lambda(u)) - u));
    }
    CHECK(worst_p < 1e-9);
    CHECK(worst_c < 1e-9);
}

TEST_CASE("u2_log1p maps invert consistently") {
    PressureMaps maps(DiffusionSpec::builtin("u2_log1p"), ReactionSpec::quartic(8, 0.3, 0.55));
    SplitMix64 rng(5);
    double worst = 0;
    for (int i = 0; i < 200; ++i) {
        const double u = rng.uniform(0.0, 2.0);
        worst = std::max(worst, std::abs(maps.lambda(maps.Lambda(u)) - u));
    }
    CHECK(worst < 1e-9);
    CHECK(maps.B(0.0) == 0.0);
    for (double v : {0.1, 0.5, 1.0})
        CHECK(maps.B(v) > 0); // strictly increasing from 0
}

TEST_CASE("sign of h mirrors the sign of f") {
    PressureMaps maps(DiffusionSpec::power_law(2), ReactionSpec::quartic(8, 0.3, 0.55));
    const auto& f = maps.reaction();
    for (int i = 1; i <= 60; ++i) {
        const double u = 1.2 * i / 60;
        const double v = maps.Lambda(u);
        const double hv = maps.h(v);
        const double fu = f.f(u);
        if (std::abs(fu) > 1e-12) CHECK(hv * fu > 0);
    }
}

TEST_CASE("phi_hat gives the pressure levels of the zeros") {
    PressureMaps maps(DiffusionSpec::power_law(2), ReactionSpec::quartic(8, 0.3, 0.55));
    CHECK(maps.phi_hat(1) == doctest::Approx(2 * 0.3));
    CHECK(maps.phi_hat(2) == doctest::Approx(2 * 0.55));
    CHECK(maps.phi_hat(3) == doctest::Approx(2.0));
    CHECK_THROWS_AS(maps.phi_hat(0), Error);
}

TEST_CASE("concurrent lambda lookups with auto-extension stay consistent") {
    PressureMaps maps(DiffusionSpec::builtin("u32_plus_u2"), ReactionSpec::quartic(8, 0.3, 0.55));
    std::vector<std::thread> pool;
    std::atomic<bool> ok{true};
    for (int w = 0; w < 4; ++w) {
        pool.emplace_back([&maps, &ok, w] {
            SplitMix64 rng(7 + w);
            for (int i = 0; i < 200; ++i) {
                const double u = rng.uniform(0.0, 6.0); // beyond the pre-sized table
                const double rt = maps.lambda(maps.Lambda(u));
                if (std::abs(rt - u) > 1e-8) ok = false;
            }
        });
    }
    for (auto& t : pool) t.join();
    CHECK(ok.load());
}

} // TEST_SUITE
