#ifndef DEGWAVE_WAVES_HPP
#define DEGWAVE_WAVES_HPP

#include <array>
#include <limits>
#include <optional>
#include <vector>

#include "degwave/nonlinearity.hpp"
#include "degwave/numerics.hpp"

namespace degwave {

// ---------------------------------------------------------------------------
// Desingularized pressure wave system at speed c >= 0:
//
//     dphi/dxi = B(phi) psi
//     dpsi/dxi = -psi^2 - c psi - h(phi)
//
// The traveling-wave coordinate is recovered from d(zeta)/d(xi) = B(phi).
// Singular points: R0(0,0), R1(phi1,0), R2(phi2,0), R3(phi3,0), R4(0,-c)
// with phi_i = Lambda(s_i), s_3 = 1.

struct PhaseSystem {
    const PressureMaps* maps;
    double c;

    void field(const std::array<double, 3>& y, std::array<double, 3>& dy) const {
        const double B = maps->B(y[0]);
        dy[0] = B * y[1];
        dy[1] = -y[1] * y[1] - c * y[1] - maps->h(y[0]);
        dy[2] = B;
    }
};

struct Vec2 {
    double x = 0, y = 0;
};

// R_i for i in 0..4. R2 and R3 require a multistable reaction.
Vec2 singular_point(const PressureMaps& maps, double c, int i);

struct SaddleEigen {
    double lam_plus = 0, lam_minus = 0;
    Vec2 v_plus, v_minus; // (b_hat, lambda^{+/-})
};

// Eigen-data of the Jacobian at R1 (which = 1) or R3 (which = 3):
// lambda^{+-}(c) = (-c +- sqrt(c^2 - 4 a_hat b_hat))/2 with a_hat = f'(s_i),
// b_hat = B(phi_i).
SaddleEigen saddle_eigen(const PressureMaps& maps, double c, int which);

// Finite-difference Jacobian of the desingularized field (5-point stencils);
// used to cross-check the closed-form eigenvalues.
std::array<std::array<double, 2>, 2> jacobian_fd(const PressureMaps& maps, double c,
                                                 double phi, double psi);

// ---------------------------------------------------------------------------
// Shooting.

enum class OutcomeKind { hits_psi_axis, diverges_down, converges_to_R0, ambiguous };

struct ShootOptions {
    double delta0 = 1e-8;        // offset along the saddle's unstable eigenvector
    double phi_floor = 1e-10;    // axis contact threshold
    double psi_blow_factor = 1e3; // divergence threshold -factor*(1+c)
    double r0_radius = 1e-6;     // R0 neighborhood radius
    double rel_tol = 1e-10;
    long max_steps = 2000000;
    bool keep_path = false;
    double h_max = 0.5;
    bool detect_r0 = true;
};

struct TrajectoryOutcome {
    OutcomeKind kind = OutcomeKind::ambiguous;
    double phi_end = 0, psi_end = 0, zeta_end = 0;
    // psi when phi first reached phi_floor; NaN unless kind == hits_psi_axis
    double psi_at_floor = std::numeric_limits<double>::quiet_NaN();
    std::vector<std::array<double, 3>> path; // (zeta, phi, psi) accepted steps
};

// Trajectory Gamma^c leaving R1 along -(b1, lambda1^+) into
// D = {0 <= phi <= phi1, psi < 0}.
TrajectoryOutcome shoot_from_R1(const PressureMaps& maps, double c, const ShootOptions& = {});

// Same departure from R3 (enters the strip [phi1, phi3] and may continue
// through D).
TrajectoryOutcome shoot_from_R3(const PressureMaps& maps, double c, const ShootOptions& = {});

// psi on Gamma^c at phi = phi_read (>= phi_floor): a monotone-in-c proxy
// of the axis intercept. NaN when the trajectory diverges or enters the R0
// neighborhood before reaching phi_read.
double psi_axis_value(const PressureMaps& maps, double c, double phi_read,
                      const ShootOptions& = {});

// ---------------------------------------------------------------------------
// Wave profiles.

enum class WaveKind {
    sharp_small,     // s1 -> 0, free boundary with Darcy slope c
    sharp_big,       // 1 -> 0, free boundary with Darcy slope c
    front_one_to_s1, // classical wave Q_{c_z}
    type_two,        // hump, compact right support (truncated R0 approach)
    type_three,      // hump, positive tail along the node direction
    type_four,       // decreasing from above phi1, vertical front slope
    compact_bump,    // auxiliary U1
    unbounded        // auxiliary U2
};

struct WaveProfile {
    double c = 0;
    WaveKind kind = WaveKind::sharp_small;
    std::vector<double> zeta, u, v, psi; // zeta ascending; psi = dv/dzeta
    double left_u = 0, right_u = 0;      // limits beyond the sampled range
    double darcy_slope = std::numeric_limits<double>::quiet_NaN(); // -v'(0-) for sharp kinds

    double u_at(double z) const;
    double v_at(double z) const;
    // sup-norm of the v-wave equation residual B v'' + (v')^2 + c v' + h(v)
    // evaluated at Hermite midpoints of the sampled profile.
    double ode_residual_sup() const;
    const PressureMaps* maps = nullptr;
};

struct SpeedResult {
    double c = 0;
    WaveProfile profile;
    double darcy_defect = 0;      // |-v'(0-) - c| read off the profile
    int extra_sign_changes = 0;   // additional sign changes seen in the bracket scan
    std::pair<double, double> bracket{0, 0};
};

// Small sharp wave: bisection on g(c) = psi^c + c (monotone in c). The
// initial bracket auto-expands; a coarse scan counts additional sign changes.
SpeedResult find_c_s(const PressureMaps& maps, std::pair<double, double> bracket = {1e-3, 1.0},
                     double tol = 1e-8, const ShootOptions& = {});

// Bistable-range wave 1 -> s1 computed in the strip [phi1, phi3].
SpeedResult find_c_z(const PressureMaps& maps, double tol = 1e-8, const ShootOptions& = {});

// Big sharp wave; empty when c_s >= c_z (it exists only below c_z).
std::optional<SpeedResult> find_c_b(const PressureMaps& maps, double c_s, double c_z,
                                    double tol = 1e-8, const ShootOptions& = {});

// Auxiliary compact-bump wave of speed c' < c_s with peak u-value d close
// to 1 and edge slope steeper than -c'.
WaveProfile auxiliary_wave_U1(const PressureMaps& maps, double c_prime, double d,
                              const ShootOptions& = {});

// Auxiliary wave of speed c'' > c_s: zero on [0, inf), unbounded on the left,
// with edge slope shallower than -c''. u_top caps the constructed left branch.
WaveProfile auxiliary_wave_U2(const PressureMaps& maps, double c_dprime, double u_top = 1.3,
                              const ShootOptions& = {});

// Exemplars of the four trajectory types at c = c_s.
std::vector<WaveProfile> classify_wave_types(const PressureMaps& maps, double c_s,
                                             const ShootOptions& = {});

} // namespace degwave

#endif
