#ifndef DEGWAVE_STATIONARY_HPP
#define DEGWAVE_STATIONARY_HPP

#include <vector>

#include "degwave/nonlinearity.hpp"

namespace degwave {

// Stationary solutions of [A(q)]'' + f(q) = 0, built from the first integral
//
//     p^2 = C - 2 \int_0^q A'(r) f(r) dr,       p = [A(q)]'.
//
// Case map (peak value -> first-integral constant C = C(peak)):
//   constant       q in {0, s1, s2, 1}
//   ground_state   peak theta, C = C_* = C(s1), homoclinic to s1
//   compact_short  peak q1 in (0, s1), C in (0, C_*)
//   compact_high   peak q2 in (theta, 1), C in (C_*, C^{**})
//   monotone_half  C = C_* (to s1) or C = C^{**} (to 1)
//   periodic       min value q in (s1, s2), closed orbit around (s2, 0)

enum class StationaryCase {
    constant,
    ground_state,
    compact_short,
    compact_high,
    monotone_half,
    periodic
};

struct StationaryProfile {
    StationaryCase case_tag = StationaryCase::constant;
    double C = 0;                // first-integral constant
    std::vector<double> x, q, p; // samples, x ascending; p = [A(q)]'
    bool whole_line = false;
    double L = std::numeric_limits<double>::quiet_NaN(); // half-support (compact cases)
    double peak = 0;     // q(0) (min value for periodic)
    double period = std::numeric_limits<double>::quiet_NaN();

    double q_at(double xx) const; // clamped interpolation (periodic-aware)
};

// C(q_peak) = 2 \int_0^{q_peak} A'(r) f(r) dr.
double first_integral_constant(double q_peak, const DiffusionSpec& A, const ReactionSpec& f);

// C_* = C(s1) and C^{**} = C(1).
double c_star(const DiffusionSpec& A, const ReactionSpec& f);
double c_double_star(const DiffusionSpec& A, const ReactionSpec& f);

// Half-support length of the compact profile peaking at q1 (valid on
// (0, s1) and, for the high family, on (theta, 1)):
// L = \int_0^{q1} A'(q) / sqrt(C(q1) - C(q)) dq.
double half_support_length(double q1, const DiffusionSpec& A, const ReactionSpec& f);

// Builds a profile by quadrature marching in q (dx = A' dq / p), with
// turning points handled by a square-root substitution. `target` means:
//   constant       the constant value (a zero of f)
//   ground_state   ignored (peak is theta)
//   compact_short  q1 in (0, s1)
//   compact_high   q2 in (theta, 1)
//   monotone_half  +-1 -> U1^{+-} (to s1), +-2 -> U2^{+-} (to 1)
//   periodic       the minimum value in (s1, s2)
// x_max truncates half-line profiles; dx controls the sampling density.
StationaryProfile build_profile(StationaryCase case_tag, double target, const DiffusionSpec& A,
                                const ReactionSpec& f, double x_max = -1, double dx = 0.01);

} // namespace degwave

#endif
