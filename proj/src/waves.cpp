#include "degwave/waves.hpp"

#include <algorithm>
#include <cmath>

namespace degwave {

namespace {

constexpr double kHuge = 1e30;

// Field with probes clamped to phi >= 0 (embedded RK stages can overshoot
// the axis by a rounding amount during trial steps).
OdeField<3> make_field(const PressureMaps& maps, double c, bool backward) {
    const double sgn = backward ? -1.0 : 1.0;
    return [&maps, c, sgn](double, const std::array<double, 3>& y, std::array<double, 3>& dy) {
        const double phi = std::max(y[0], 0.0);
        const double B = maps.B(phi);
        dy[0] = sgn * B * y[1];
        dy[1] = sgn * (-y[1] * y[1] - c * y[1] - maps.h(phi));
        dy[2] = sgn * B;
    };
}

struct PhaseRun {
    int exit_code = 0; // 1 = event (phi crossing), 2 = blow, 3 = r0, 4 = custom, 0 = budget/underflow
    std::array<double, 3> end{}; // (phi, psi, zeta)
    std::vector<std::array<double, 3>> path;
    bool underflow = false;
};

// Generic driver. `custom_exit` may be null; it is checked after each
// accepted step and its nonzero return is reported through exit_code = 4.
PhaseRun run_phase(const PressureMaps& maps, double c, std::array<double, 3> y0,
                   const ShootOptions& o, bool backward, double event_phi,
                   const std::function<bool(const std::array<double, 3>&)>& custom_exit = nullptr,
                   double psi_blow_override = 0.0) {
    PhaseRun run;
    const double psi_blow = (psi_blow_override != 0.0) ? psi_blow_override
                                                       : -o.psi_blow_factor * (1.0 + std::abs(c));
    OdeOptions oo;
    oo.rel_tol = o.rel_tol;
    oo.abs_tol = 1e-14;
    oo.h_init = 1e-5;
    oo.h_max = o.h_max;
    oo.max_steps = o.max_steps;

    if (o.keep_path) run.path.push_back(y0);

    // Early R0-basin test: above the R4 stable manifold at small phi the
    // trajectory is trapped (it cannot cross the manifold back down), while
    // the algebraic center-manifold approach to R0 itself is far too slow to
    // wait for. The manifold enters R4 with slope a0 A_*/(c(A_*+1)), so at
    // phi <= basin_phi it still hangs below -0.9c and psi >= -0.6c is safely
    // inside the basin.
    const double a0 = maps.f_prime0();
    const double astar = maps.a_star();
    const double basin_phi =
        std::min(1e-3, 0.1 * c * c * (astar + 1.0) / std::max(a0 * astar, 1e-12));

    auto watch = [&](double, const std::array<double, 3>& y) -> StepDecision {
        if (o.keep_path) run.path.push_back(y);
        if (y[1] <= psi_blow) {
            run.exit_code = 2;
            return StepDecision::stop;
        }
        if (o.detect_r0 && c > 1e-6) {
            if ((y[0] <= basin_phi && y[1] >= -0.6 * c) ||
                (y[0] <= o.r0_radius && y[1] >= -0.5 * c)) {
                run.exit_code = 3;
                return StepDecision::stop;
            }
        }
        if (custom_exit && custom_exit(y)) {
            run.exit_code = 4;
            return StepDecision::stop;
        }
        return StepDecision::go_on;
    };

    std::function<double(const std::array<double, 3>&)> event;
    if (event_phi > 0)
        event = [event_phi](const std::array<double, 3>& y) { return y[0] - event_phi; };

    const auto res = integrate_ode<3>(make_field(maps, c, backward), 0.0, y0, oo, watch, event);
    run.end = res.y;
    run.underflow = res.step_underflow;
    if (res.event_hit) {
        run.exit_code = 1;
        if (o.keep_path) run.path.push_back(res.y);
    }
    return run;
}

std::array<double, 3> saddle_departure(const PressureMaps& maps, double c, int which,
                                       double delta0, bool into_D) {
    const SaddleEigen eig = saddle_eigen(maps, c, which);
    const Vec2 pt = singular_point(maps, c, which);
    const double n = std::hypot(eig.v_plus.x, eig.v_plus.y);
    const double s = into_D ? -1.0 : 1.0;
    return {pt.x + s * delta0 * eig.v_plus.x / n, pt.y + s * delta0 * eig.v_plus.y / n, 0.0};
}

TrajectoryOutcome classify_run(const PhaseRun& run) {
    TrajectoryOutcome out;
    out.phi_end = run.end[0];
    out.psi_end = run.end[1];
    out.zeta_end = run.end[2];
    switch (run.exit_code) {
        case 1:
            out.kind = OutcomeKind::hits_psi_axis;
            out.psi_at_floor = run.end[1];
            break;
        case 2: out.kind = OutcomeKind::diverges_down; break;
        case 3: out.kind = OutcomeKind::converges_to_R0; break;
        default: out.kind = OutcomeKind::ambiguous; break;
    }
    out.path = run.path;
    return out;
}

// Shift zetas so that the last path point sits at zeta = 0.
void anchor_right_end(std::vector<std::array<double, 3>>& path) {
    if (path.empty()) return;
    const double z0 = path.back()[2];
    for (auto& p : path) p[2] -= z0;
}

WaveProfile profile_from_path(const PressureMaps& maps, double c, WaveKind kind,
                              const std::vector<std::array<double, 3>>& path, double left_u,
                              double right_u) {
    WaveProfile w;
    w.c = c;
    w.kind = kind;
    w.maps = &maps;
    w.left_u = left_u;
    w.right_u = right_u;
    w.zeta.reserve(path.size());
    for (const auto& p : path) {
        w.zeta.push_back(p[2]);
        const double v = std::max(p[0], 0.0);
        w.v.push_back(v);
        w.u.push_back(maps.lambda(v));
        w.psi.push_back(p[1]);
    }
    return w;
}

// -v'(0-) for profiles with a front at zeta = 0: extrapolate psi(phi) to
// phi = 0 from a least-squares line over a trailing window above the floor
// (this cancels the O(phi) bias of the R4 stable manifold). Only the samples
// adjacent to the right end are used, so two-sided profiles such as the
// compact bump do not mix their left edge into the fit.
double front_slope(const WaveProfile& w, double phi_lo = 3e-5, double phi_hi = 3e-3) {
    std::vector<double> xs, ys;
    for (std::size_t i = w.v.size(); i-- > 0;) {
        if (w.v[i] > phi_hi) break;
        if (w.v[i] >= phi_lo) {
            xs.push_back(w.v[i]);
            ys.push_back(w.psi[i]);
        }
    }
    if (xs.size() < 4) {
        // dense window unavailable; fall back to the last sampled slope
        return -w.psi.back();
    }
    return -fit_line(xs, ys).intercept;
}

} // namespace

// ---------------------------------------------------------------------------

Vec2 singular_point(const PressureMaps& maps, double c, int i) {
    switch (i) {
        case 0: return {0.0, 0.0};
        case 1: return {maps.phi_hat(1), 0.0};
        case 2: return {maps.phi_hat(2), 0.0};
        case 3: return {maps.phi_hat(3), 0.0};
        case 4: return {0.0, -c};
    }
    throw Error(Error::Code::domain, "singular_point: index must be 0..4");
}

SaddleEigen saddle_eigen(const PressureMaps& maps, double c, int which) {
    if (which != 1 && which != 3)
        throw Error(Error::Code::domain, "saddle_eigen: which must be 1 (R1) or 3 (R3)");
    const double s = (which == 1) ? maps.reaction().s1() : 1.0;
    const double a_hat = maps.reaction().df(s);
    const double b_hat = maps.B(maps.phi_hat(which));
    const double disc = c * c - 4.0 * a_hat * b_hat;
    if (disc <= 0)
        throw Error(Error::Code::domain, "saddle_eigen: point is not a saddle (f'(s) >= 0?)");
    const double root = std::sqrt(disc);
    SaddleEigen e;
    e.lam_plus = 0.5 * (-c + root);
    e.lam_minus = 0.5 * (-c - root);
    e.v_plus = {b_hat, e.lam_plus};
    e.v_minus = {b_hat, e.lam_minus};
    return e;
}

std::array<std::array<double, 2>, 2> jacobian_fd(const PressureMaps& maps, double c, double phi,
                                                 double psi) {
    const auto F = [&](double p, double q) -> std::array<double, 2> {
        return {maps.B(std::max(p, 0.0)) * q, -q * q - c * q - maps.h(std::max(p, 0.0))};
    };
    const double h = 1e-3 * std::max(1.0, std::abs(phi));
    std::array<std::array<double, 2>, 2> J{};
    for (int col = 0; col < 2; ++col) {
        const auto at = [&](double d) {
            return col == 0 ? F(phi + d, psi) : F(phi, psi + d);
        };
        const auto fp2 = at(2 * h), fp1 = at(h), fm1 = at(-h), fm2 = at(-2 * h);
        for (int row = 0; row < 2; ++row)
            J[row][col] = (-fp2[row] + 8 * fp1[row] - 8 * fm1[row] + fm2[row]) / (12 * h);
    }
    return J;
}

TrajectoryOutcome shoot_from_R1(const PressureMaps& maps, double c, const ShootOptions& o) {
    const auto y0 = saddle_departure(maps, c, 1, o.delta0, true);
    return classify_run(run_phase(maps, c, y0, o, false, o.phi_floor));
}

TrajectoryOutcome shoot_from_R3(const PressureMaps& maps, double c, const ShootOptions& o) {
    const auto y0 = saddle_departure(maps, c, 3, o.delta0, true);
    return classify_run(run_phase(maps, c, y0, o, false, o.phi_floor));
}

double psi_axis_value(const PressureMaps& maps, double c, double phi_read, const ShootOptions& o) {
    ShootOptions so = o;
    so.keep_path = false;
    so.detect_r0 = false; // read psi at phi_read even when heading to R0
    const auto y0 = saddle_departure(maps, c, 1, so.delta0, true);
    const PhaseRun run = run_phase(maps, c, y0, so, false, phi_read);
    if (run.exit_code != 1) return std::numeric_limits<double>::quiet_NaN();
    return run.end[1];
}

// ---------------------------------------------------------------------------
// Speed searches.

namespace {

// Signed bisection function for the small sharp wave: psi at the floor plus
// c, with divergence / R0 capture mapped to-/+infinity.
double sharp_g(const PressureMaps& maps, double c, const ShootOptions& o, int which) {
    const TrajectoryOutcome out = (which == 1) ? shoot_from_R1(maps, c, o) : shoot_from_R3(maps, c, o);
    switch (out.kind) {
        case OutcomeKind::hits_psi_axis: return out.psi_at_floor + c;
        case OutcomeKind::diverges_down: return -kHuge;
        case OutcomeKind::converges_to_R0: return kHuge;
        default:
            throw Error(Error::Code::ambiguous,
                        "shooting outcome undecided within budget at c = " + std::to_string(c));
    }
}

WaveProfile reconstruct_sharp(const PressureMaps& maps, double c, int which, WaveKind kind,
                              const ShootOptions& o) {
    ShootOptions so = o;
    so.keep_path = true;
    so.h_max = 0.02;
    so.rel_tol = std::min(o.rel_tol, 1e-12); // residual check divides by step size
    so.detect_r0 = false;
    // The bisected c misses the separatrix by ~tol, which the saddle passage
    // at R4 amplifies like phi^{-1/A_*}; stopping at 1e-8 keeps the bend
    // below the sampled range (front anchor error ~ 1e-8/c).
    const double floor_rec = std::max(o.phi_floor, 1e-8);
    const auto y0 = saddle_departure(maps, c, which, so.delta0, true);
    PhaseRun run = run_phase(maps, c, y0, so, false, floor_rec);
    if (run.exit_code != 1)
        throw Error(Error::Code::construction, "sharp-wave reconstruction did not reach the axis");
    anchor_right_end(run.path);
    const double left = (which == 1) ? maps.reaction().s1() : 1.0;
    WaveProfile w = profile_from_path(maps, c, kind, run.path, left, 0.0);
    w.darcy_slope = front_slope(w);
    return w;
}

} // namespace

SpeedResult find_c_s(const PressureMaps& maps, std::pair<double, double> bracket, double tol,
                     const ShootOptions& o) {
    double lo = bracket.first, hi = bracket.second;
    if (!(lo > 0) || !(hi > lo)) throw Error(Error::Code::domain, "find_c_s: bad bracket");

    const auto g = [&](double c) { return sharp_g(maps, c, o, 1); };

    int guard = 0;
    while (g(lo) > 0 && ++guard < 40) lo *= 0.5;
    guard = 0;
    while (g(hi) < 0 && ++guard < 40) hi *= 2.0;
    if (g(lo) > 0 || g(hi) < 0)
        throw Error(Error::Code::bracket, "find_c_s: could not bracket a sign change of psi^c + c");

    // coarse scan: report additional sign changes rather than assuming
    // uniqueness of the crossing
    int changes = 0;
    {
        const int n = 24;
        double prev = g(lo);
        for (int k = 1; k <= n; ++k) {
            const double c = lo + (hi - lo) * k / n;
            const double cur = g(c);
            if ((prev > 0) != (cur > 0)) ++changes;
            prev = cur;
        }
    }

    const auto [blo, bhi] = bisect_predicate([&](double c) { return g(c) > 0; }, lo, hi, tol);
    const double c_s = 0.5 * (blo + bhi);

    SpeedResult res;
    res.c = c_s;
    res.bracket = {std::min(blo, bhi), std::max(blo, bhi)};
    res.extra_sign_changes = std::max(0, changes - 1);
    res.profile = reconstruct_sharp(maps, c_s, 1, WaveKind::sharp_small, o);
    res.darcy_defect = std::abs(res.profile.darcy_slope - c_s);
    return res;
}

SpeedResult find_c_z(const PressureMaps& maps, double tol, const ShootOptions& o) {
    if (maps.reaction().monostable())
        throw Error(Error::Code::domain, "find_c_z: requires a multistable reaction");
    const double phi1 = maps.phi_hat(1);

    // outcome of the strip shoot: true = trajectory turns up (psi >= 0)
    // before reaching phi1 (speed too large), false = crosses phi1 downward.
    const auto turns_up = [&](double c) {
        ShootOptions so = o;
        so.keep_path = false;
        so.detect_r0 = false;
        const auto y0 = saddle_departure(maps, c, 3, so.delta0, true);
        bool up = false;
        const auto exit = [&](const std::array<double, 3>& y) {
            if (y[1] >= 1e-12 && y[0] > phi1) {
                up = true;
                return true;
            }
            return false;
        };
        const PhaseRun run = run_phase(maps, c, y0, so, false, phi1 - 1e-12, exit);
        if (run.exit_code == 4) return up;
        if (run.exit_code == 1) return false;        // crossed into D
        return run.end[1] > 0;                       // budget: classify by last psi
    };

    double lo = 1e-3, hi = 0.5;
    int guard = 0;
    while (turns_up(lo) && ++guard < 40) lo *= 0.5;
    guard = 0;
    while (!turns_up(hi) && ++guard < 40) hi *= 2.0;
    if (turns_up(lo) || !turns_up(hi))
        throw Error(Error::Code::bracket, "find_c_z: could not bracket the bistable connection");

    const auto [blo, bhi] = bisect_predicate(turns_up, lo, hi, tol);
    const double c_z = 0.5 * (blo + bhi);

    // Reconstruct the 1 -> s1 wave: stop just above phi1 and clamp the tail.
    ShootOptions so = o;
    so.keep_path = true;
    so.h_max = 0.05;
    so.detect_r0 = false;
    const auto y0 = saddle_departure(maps, c_z, 3, so.delta0, true);
    const auto exit = [&](const std::array<double, 3>& y) { return y[1] >= -1e-12; };
    PhaseRun run = run_phase(maps, c_z, y0, so, false, phi1 * (1.0 + 1e-7), exit);
    auto& path = run.path;
    if (path.size() < 8)
        throw Error(Error::Code::construction, "find_c_z: connection reconstruction failed");
    // anchor zeta = 0 where v crosses the mid level (phi1 + phi3)/2
    const double vmid = 0.5 * (phi1 + maps.phi_hat(3));
    double zmid = path.back()[2];
    for (std::size_t i = 1; i < path.size(); ++i) {
        if ((path[i - 1][0] - vmid) * (path[i][0] - vmid) <= 0) {
            const double t = (vmid - path[i - 1][0]) / (path[i][0] - path[i - 1][0]);
            zmid = path[i - 1][2] + t * (path[i][2] - path[i - 1][2]);
            break;
        }
    }
    for (auto& p : path) p[2] -= zmid;

    SpeedResult res;
    res.c = c_z;
    res.bracket = {std::min(blo, bhi), std::max(blo, bhi)};
    res.profile = profile_from_path(maps, c_z, WaveKind::front_one_to_s1, path, 1.0,
                                    maps.reaction().s1());
    res.darcy_defect = 0.0; // classical wave: no free boundary
    return res;
}

std::optional<SpeedResult> find_c_b(const PressureMaps& maps, double c_s, double c_z, double tol,
                                    const ShootOptions& o) {
    if (!(c_s < c_z)) return std::nullopt;
    const double margin = std::max(1e-6, 2 * tol);
    double lo = c_s + margin, hi = c_z - margin;
    if (!(lo < hi)) return std::nullopt;

    const auto g = [&](double c) { return sharp_g(maps, c, o, 3); };
    if (g(lo) > 0 || g(hi) < 0)
        throw Error(Error::Code::bracket,
                    "find_c_b: Darcy defect of the R3 trajectory has no sign change in (c_s, c_z)");
    const auto [blo, bhi] = bisect_predicate([&](double c) { return g(c) > 0; }, lo, hi, tol);
    const double c_b = 0.5 * (blo + bhi);

    SpeedResult res;
    res.c = c_b;
    res.bracket = {std::min(blo, bhi), std::max(blo, bhi)};
    res.profile = reconstruct_sharp(maps, c_b, 3, WaveKind::sharp_big, o);
    res.darcy_defect = std::abs(res.profile.darcy_slope - c_b);
    return res;
}

// ---------------------------------------------------------------------------
// Auxiliary waves and wave types.

namespace {

// Two-sided trajectory through an interior point: forward to the right end,
// backward to the left end, concatenated with a common zeta origin.
struct TwoSided {
    std::vector<std::array<double, 3>> path;
    PhaseRun fwd, bwd;
};

TwoSided two_sided(const PressureMaps& maps, double c, std::array<double, 3> y0,
                   const ShootOptions& o_fwd, const ShootOptions& o_bwd, double event_phi_fwd,
                   double event_phi_bwd,
                   const std::function<bool(const std::array<double, 3>&)>& exit_fwd = nullptr,
                   const std::function<bool(const std::array<double, 3>&)>& exit_bwd = nullptr,
                   double bwd_blow_override = 0.0) {
    TwoSided ts;
    ts.fwd = run_phase(maps, c, y0, o_fwd, false, event_phi_fwd, exit_fwd);
    ts.bwd = run_phase(maps, c, y0, o_bwd, true, event_phi_bwd, exit_bwd, bwd_blow_override);
    // backward path has descending zeta; reverse and drop the duplicate seed
    ts.path.assign(ts.bwd.path.rbegin(), ts.bwd.path.rend());
    if (!ts.path.empty()) ts.path.pop_back();
    ts.path.insert(ts.path.end(), ts.fwd.path.begin(), ts.fwd.path.end());
    return ts;
}

} // namespace

WaveProfile auxiliary_wave_U1(const PressureMaps& maps, double c_prime, double d,
                              const ShootOptions& o) {
    if (maps.reaction().monostable())
        throw Error(Error::Code::domain, "auxiliary_wave_U1: requires a multistable reaction");
    if (!(d > 0 && d < 1))
        throw Error(Error::Code::domain, "auxiliary_wave_U1: peak d must lie in (0,1)");
    const double phi_star = maps.Lambda(d);
    if (!(phi_star > maps.phi_hat(2)))
        throw Error(Error::Code::domain, "auxiliary_wave_U1: peak must exceed s2");

    ShootOptions so = o;
    so.keep_path = true;
    so.h_max = 0.05;
    so.detect_r0 = false;

    const std::array<double, 3> peak = {phi_star, 0.0, 0.0};
    // backward half fails if the trajectory turns before reaching the axis
    bool turned = false;
    const auto exit_bwd = [&](const std::array<double, 3>& y) {
        if (y[1] <= 0 && y[0] < phi_star - 1e-9) {
            turned = true;
            return true;
        }
        return false;
    };
    ShootOptions so_fwd = so;
    so_fwd.psi_blow_factor = 1e5; // follow the right edge down to small phi
    TwoSided ts = two_sided(maps, c_prime, peak, so_fwd, so, so.phi_floor, so.phi_floor, nullptr,
                            exit_bwd, /*bwd blow (psi large positive in backward time)*/ -1e6);
    if (turned || (ts.bwd.exit_code != 1 && ts.bwd.exit_code != 2))
        throw Error(Error::Code::construction,
                    "auxiliary_wave_U1: left branch missed the psi-axis (trajectory turned; "
                    "the intercept ordering psi_3^c < psi^* < psi_1^c does not hold)");
    if (ts.fwd.exit_code != 1 && ts.fwd.exit_code != 2)
        throw Error(Error::Code::construction,
                    "auxiliary_wave_U1: right branch missed the psi-axis segment below -c'");

    anchor_right_end(ts.path);
    WaveProfile w = profile_from_path(maps, c_prime, WaveKind::compact_bump, ts.path, 0.0, 0.0);
    w.darcy_slope = front_slope(w);
    if (!(w.darcy_slope > c_prime))
        throw Error(Error::Code::construction,
                    "auxiliary_wave_U1: edge slope is not steeper than -c' "
                    "(violates [Lambda(U1)]'(0-0) < -c')");
    return w;
}

WaveProfile auxiliary_wave_U2(const PressureMaps& maps, double c_dprime, double u_top,
                              const ShootOptions& o) {
    const double v_top = maps.Lambda(u_top);
    ShootOptions so = o;
    so.keep_path = true;
    so.h_max = 0.05;
    so.detect_r0 = false;

    const double fractions[] = {0.999, 0.99, 0.95, 0.9, 0.8, 0.65, 0.5, 0.35, 0.2, 0.1};
    for (double frac : fractions) {
        const double psi_star = -frac * c_dprime;
        const std::array<double, 3> y0 = {1e-8, psi_star, 0.0};
        bool reached_top = false, turned = false;
        const auto exit_bwd = [&](const std::array<double, 3>& y) {
            if (y[0] >= v_top) {
                reached_top = true;
                return true;
            }
            if (y[1] >= 0) {
                turned = true;
                return true;
            }
            return false;
        };
        PhaseRun bwd = run_phase(maps, c_dprime, y0, so, true, -1.0, exit_bwd, -1e9);
        if (!reached_top || turned) continue;

        std::vector<std::array<double, 3>> path(bwd.path.rbegin(), bwd.path.rend());
        anchor_right_end(path);
        WaveProfile w = profile_from_path(maps, c_dprime, WaveKind::unbounded, path,
                                          maps.lambda(bwd.end[0]), 0.0);
        w.darcy_slope = -psi_star;
        return w;
    }
    throw Error(Error::Code::construction,
                "auxiliary_wave_U2: no trajectory from the psi-axis segment (-c'', 0) crossed "
                "phi = Lambda(u_top) (the axis intercept fails to satisfy psi^c > -c)");
}

std::vector<WaveProfile> classify_wave_types(const PressureMaps& maps, double c_s,
                                             const ShootOptions& o) {
    std::vector<WaveProfile> types;
    types.reserve(4);

    // Type I: the sharp wave itself.
    types.push_back(reconstruct_sharp(maps, c_s, 1, WaveKind::sharp_small, o));

    ShootOptions so = o;
    so.keep_path = true;
    so.h_max = 0.05;

    const double phi1 = maps.phi_hat(1);
    const auto hump = [&](double peak_phi, WaveKind kind,
                          const std::function<bool(const std::array<double, 3>&)>& exit_fwd,
                          double event_fwd) {
        ShootOptions sf = so;
        sf.detect_r0 = false;
        const std::array<double, 3> peak = {peak_phi, 0.0, 0.0};
        // backward half climbs toward the positive psi-axis (u-slope +inf entry)
        const auto exit_bwd = [](const std::array<double, 3>& y) { return y[1] >= 1e3; };
        TwoSided ts = two_sided(maps, c_s, peak, sf, sf, event_fwd, sf.phi_floor, exit_fwd,
                                exit_bwd, -1e9);
        anchor_right_end(ts.path);
        return profile_from_path(maps, c_s, kind, ts.path, 0.0,
                                 maps.lambda(std::max(ts.fwd.end[0], 0.0)));
    };

    // Type II: hump followed down to a 1e-5 pressure floor (the approach to
    // R0 is algebraic in xi, so the support is compact up to that floor and
    // both the value and the slope vanish there).
    types.push_back(hump(0.5 * phi1, WaveKind::type_two, nullptr, 1e-5));
    // Type III: hump terminated once it settles on the center manifold of
    // R0; the tail leaves along the node direction psi/phi -> -f'(0) A_*/c.
    {
        const double k1 = -maps.f_prime0() * maps.a_star() / c_s;
        const auto on_manifold = [k1](const std::array<double, 3>& y) {
            return y[0] < 2e-4 && std::abs(y[1] - k1 * y[0]) < 0.02 * std::abs(k1) * y[0];
        };
        types.push_back(hump(0.75 * phi1, WaveKind::type_three, on_manifold, -1.0));
    }

    // Type IV: enters D through the right edge below R1 and dives.
    {
        const std::array<double, 3> y0 = {phi1, -0.25 * (1.0 + c_s), 0.0};
        const double v_cap = maps.Lambda(1.25);
        const auto exit_bwd = [v_cap](const std::array<double, 3>& y) { return y[0] >= v_cap; };
        TwoSided ts = two_sided(maps, c_s, y0, so, so, so.phi_floor, -1.0, nullptr, exit_bwd, -1e9);
        anchor_right_end(ts.path);
        WaveProfile w = profile_from_path(maps, c_s, WaveKind::type_four, ts.path,
                                          maps.lambda(std::max(ts.bwd.end[0], 0.0)), 0.0);
        types.push_back(w);
    }
    return types;
}

// ---------------------------------------------------------------------------
// WaveProfile interpolation and residual.

double WaveProfile::v_at(double z) const {
    if (zeta.empty()) throw Error(Error::Code::domain, "WaveProfile: empty");
    if (z <= zeta.front()) return maps ? maps->Lambda(left_u) : v.front();
    if (z >= zeta.back()) return maps ? maps->Lambda(right_u) : v.back();
    return interp_linear(zeta, v, z);
}

double WaveProfile::u_at(double z) const {
    if (zeta.empty()) throw Error(Error::Code::domain, "WaveProfile: empty");
    if (z <= zeta.front()) return left_u;
    if (z >= zeta.back()) return right_u;
    return interp_linear(zeta, u, z);
}

double WaveProfile::ode_residual_sup() const {
    if (!maps || zeta.size() < 8) return std::numeric_limits<double>::quiet_NaN();
    // psi' at nodes from the system itself; Hermite evaluation at midpoints
    // then gives a residual that is not identically zero by construction.
    const auto psi_dot = [&](double vv, double pp) {
        const double B = maps->B(std::max(vv, 0.0));
        return B > 0 ? (-pp * pp - c * pp - maps->h(vv)) / B : 0.0;
    };
    double sup = 0;
    for (std::size_t i = 2; i + 3 < zeta.size(); ++i) {
        const double hstep = zeta[i + 1] - zeta[i];
        // cells tighter than ~1e-3 amplify integrator noise through the
        // midpoint derivative and carry no independent information
        if (hstep <= 1e-3) continue;
        const double v0 = v[i], v1 = v[i + 1];
        const double p0 = psi[i], p1 = psi[i + 1];
        const double d0 = psi_dot(v0, p0), d1 = psi_dot(v1, p1);
        // cubic Hermite at the midpoint
        const double vm = 0.5 * (v0 + v1) + 0.125 * hstep * (p0 - p1);
        const double pm = 0.5 * (p0 + p1) + 0.125 * hstep * (d0 - d1);
        const double pdm = 1.5 * (p1 - p0) / hstep - 0.25 * (d0 + d1);
        if (vm <= 0) continue;
        const double res = maps->B(vm) * pdm + pm * pm + c * pm + maps->h(vm);
        sup = std::max(sup, std::abs(res));
    }
    return sup;
}

} // namespace degwave
