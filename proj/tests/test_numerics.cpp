#include <doctest.h>

#include <cmath>

#include "degwave/numerics.hpp"

using namespace degwave;

TEST_SUITE("numerics") {

TEST_CASE("quadrature matches closed forms") {
    CHECK(integrate([](double x) { return x * x; }, 0, 1) == doctest::Approx(1.0 / 3).epsilon(1e-13));
    CHECK(integrate([](double x) { return std::sin(x); }, 0, M_PI) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(integrate([](double x) { return std::exp(-x); }, 0, 30) == doctest::Approx(1.0).epsilon(1e-12));
    // integrable endpoint behavior after substitution-style scaling
    CHECK(integrate([](double x) { return std::sqrt(x); }, 0, 1) == doctest::Approx(2.0 / 3).epsilon(1e-10));
    CHECK(integrate([](double) { return 1.0; }, 2, 2) == 0.0);
}

TEST_CASE("find_root solves bracketed equations") {
    CHECK(find_root([](double x) { return x * x - 2; }, 0, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(find_root([](double x) { return std::cos(x); }, 1, 2) == doctest::Approx(M_PI / 2).epsilon(1e-12));
    CHECK_THROWS_AS(find_root([](double x) { return x * x + 1; }, -1, 1), Error);
}

TEST_CASE("bisect_predicate narrows a monotone predicate") {
    auto [lo, hi] = bisect_predicate([](double x) { return x > M_E; }, 2.0, 3.0, 1e-10);
    CHECK(lo <= M_E);
    CHECK(hi >= M_E);
    CHECK(hi - lo <= 1e-9);
}

TEST_CASE("rk45 integrates known systems to tolerance") {
    // y' = -y
    OdeField<2> decay = [](double, const std::array<double, 2>& y, std::array<double, 2>& dy) {
        dy[0] = -y[0];
        dy[1] = 0;
    };
    OdeOptions opt;
    opt.rel_tol = 1e-11;
    long steps = 0;
    auto watch = [&](double t, const std::array<double, 2>&) {
        ++steps;
        return t >= 5.0 ? StepDecision::stop : StepDecision::go_on;
    };
    // stop via event at y = e^{-2}
    auto res = integrate_ode<2>(decay, 0.0, {1.0, 0.0}, opt, watch,
                                [](const std::array<double, 2>& y) { return y[0] - std::exp(-2.0); });
    CHECK(res.event_hit);
    CHECK(res.t == doctest::Approx(2.0).epsilon(1e-8));

    // harmonic oscillator energy conservation over 10 periods
    OdeField<2> osc = [](double, const std::array<double, 2>& y, std::array<double, 2>& dy) {
        dy[0] = y[1];
        dy[1] = -y[0];
    };
    auto res2 = integrate_ode<2>(osc, 0.0, {1.0, 0.0}, opt,
                                 [&](double t, const std::array<double, 2>&) {
                                     return t >= 20 * M_PI ? StepDecision::stop : StepDecision::go_on;
                                 });
    const double E = res2.y[0] * res2.y[0] + res2.y[1] * res2.y[1];
    CHECK(E == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("fit_line recovers slope and intercept") {
    std::vector<double> x, y;
    for (int i = 0; i < 50; ++i) {
        x.push_back(i * 0.1);
        y.push_back(3.0 * i * 0.1 - 2.0);
    }
    const LineFit fit = fit_line(x, y);
    CHECK(fit.slope == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(fit.residual_rms < 1e-12);
}

TEST_CASE("interp_linear clamps and interpolates") {
    std::vector<double> xs{0, 1, 2}, ys{0, 10, 0};
    CHECK(interp_linear(xs, ys, 0.5) == doctest::Approx(5.0));
    CHECK(interp_linear(xs, ys, -1) == 0.0);
    CHECK(interp_linear(xs, ys, 5) == 0.0);
}

} // TEST_SUITE
