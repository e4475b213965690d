#ifndef DEGWAVE_NUMERICS_HPP
#define DEGWAVE_NUMERICS_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace degwave {

// Error taxonomy shared by all modules. The CLI maps codes onto exit codes
// (config errors -> 2, numerical failures -> 3, undecided classifications -> 4).
struct Error : std::runtime_error {
    enum class Code {
        domain,         // invalid parameter / violated structural assumption
        parse,          // config file syntax or unknown key
        quadrature,     // adaptive integration failed to converge
        bracket,        // root bracketing / bisection failure
        step_failure,   // ODE integrator underflow or step budget exhausted
        ambiguous,      // trajectory outcome undecidable within budget
        construction,   // wave construction missed its target segment
        not_stabilized, // final band not settled enough to classify
        window,         // fit window too short
        region,         // requested region outside the computed grid
        grid,           // grid exhausted / front too thin
        cfl,            // time step violates the stability bound
        undecided,      // classification undecided at budget
        io,             // file output failure
    };

    Code code;
    Error(Code c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

// ---------------------------------------------------------------------------
// Quadrature: adaptive Gauss-Kronrod 7-15.

struct QuadratureOptions {
    double abs_tol = 1e-13;
    double rel_tol = 1e-11;
    int max_depth = 50;
};

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts = {});

// ---------------------------------------------------------------------------
// Bracketed root finding (Brent).

struct RootOptions {
    double x_tol = 1e-13;
    double f_tol = 0.0;
    int max_iter = 200;
};

// Requires f(a) and f(b) of opposite (or zero) sign.
double find_root(const std::function<double(double)>& f, double a, double b,
                 const RootOptions& opts = {});

// Bisection on a boolean predicate: pred(lo) == false, pred(hi) == true is
// NOT assumed; the caller passes the bracket in the orientation it has.
// Returns the bracket of width <= x_tol with pred differing at the ends.
std::pair<double, double> bisect_predicate(const std::function<bool(double)>& pred,
                                           double lo, double hi, double x_tol,
                                           int max_iter = 200);

// ---------------------------------------------------------------------------
// Adaptive embedded Runge-Kutta, Dormand-Prince 5(4).

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double h_init = 1e-3;
    double h_min = 1e-14;
    double h_max = 1.0;
    long max_steps = 4000000;
};

enum class StepDecision { go_on, stop };

// Integrates y' = F(t, y), dimension N, calling `watch` after every accepted
// step. When `watch` returns stop, integration halts at that state. The
// `event` function (if given) is a signed scalar; a sign change across an
// accepted step triggers root refinement inside the step so that the final
// state lands on event(y) ~ 0.
template <int N>
struct OdeResult {
    double t = 0;
    std::array<double, N> y{};
    long n_steps = 0;
    bool event_hit = false;
    bool step_underflow = false;
    bool budget_exhausted = false;
};

template <int N>
using OdeField = std::function<void(double, const std::array<double, N>&, std::array<double, N>&)>;

template <int N>
using OdeWatch = std::function<StepDecision(double, const std::array<double, N>&)>;

template <int N>
OdeResult<N> integrate_ode(const OdeField<N>& field, double t0,
                           const std::array<double, N>& y0,
                           const OdeOptions& opts,
                           const OdeWatch<N>& watch = nullptr,
                           const std::function<double(const std::array<double, N>&)>& event = nullptr);

extern template OdeResult<2> integrate_ode<2>(const OdeField<2>&, double, const std::array<double, 2>&,
                                              const OdeOptions&, const OdeWatch<2>&,
                                              const std::function<double(const std::array<double, 2>&)>&);
extern template OdeResult<3> integrate_ode<3>(const OdeField<3>&, double, const std::array<double, 3>&,
                                              const OdeOptions&, const OdeWatch<3>&,
                                              const std::function<double(const std::array<double, 3>&)>&);

// ---------------------------------------------------------------------------
// Least squares line fit.

struct LineFit {
    double slope = 0;
    double intercept = 0;
    double residual_rms = 0; // rms of y - (slope*x + intercept)
    double max_abs_dev = 0;  // max |y - fit|
    std::size_t n = 0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// ---------------------------------------------------------------------------
// Piecewise-linear interpolant over a sorted abscissa array, with clamped
// extension beyond the ends.

double interp_linear(const std::vector<double>& xs, const std::vector<double>& ys, double x);

// Deterministic xorshift generator for property-test sampling (keeps test
// outputs independent of libstdc++'s distribution implementations).
struct SplitMix64 {
    std::uint64_t s;
    explicit SplitMix64(std::uint64_t seed) : s(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }
    // uniform in [0,1)
    double uniform() { return double(next() >> 11) * 0x1.0p-53; }
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
};

} // namespace degwave

#endif
