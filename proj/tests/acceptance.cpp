// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Heavy simulations are shared across criteria (the three regime
// runs at dx = 0.01, T = 40 feed the speed-consistency, front-shift, terrace
// and envelope checks).

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <vector>

#include "degwave/asymptotics.hpp"
#include "degwave/config.hpp"

using namespace degwave;

namespace {

int g_failures = 0;

void report(int id, bool pass, const std::string& what) {
    std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", id, what.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof(buf), f, ap);
    va_end(ap);
    return buf;
}

double now() {
    using clock = std::chrono::steady_clock;
    static const auto t0 = clock::now();
    return std::chrono::duration<double>(clock::now() - t0).count();
}

struct RegimeRun {
    SolutionState state;
    std::vector<Frame> frames;
};

RegimeRun run_regime(const std::shared_ptr<const PressureMaps>& maps, double sigma, double b,
                     double x_min, double x_max, double dx, double T, double dt_out) {
    InitialDataSpec u0;
    u0.shape = InitialDataSpec::Shape::cos2;
    u0.b = b;
    u0.sigma = sigma;
    RegimeRun rr{init(u0, Grid1D{x_min, x_max, dx}, maps), {}};
    rr.frames.push_back(Frame::of(rr.state));
    RunParams p;
    p.T = T;
    p.dt_out = dt_out;
    p.on_frame = [&](const SolutionState& st) { rr.frames.push_back(Frame::of(st)); };
    run(rr.state, p);
    return rr;
}

} // namespace

int main() {
    std::printf("degwave acceptance suite\n");

    // ---- shared phase-plane results --------------------------------------
    auto maps_def = std::make_shared<PressureMaps>(DiffusionSpec::power_law(2),
                                                   ReactionSpec::quartic(8, 0.3, 0.55));
    auto maps_ter = std::make_shared<PressureMaps>(DiffusionSpec::power_law(2),
                                                   ReactionSpec::quartic(8, 0.3, 0.62));

    // ---- criterion 1: analytic sharp-wave oracle -------------------------
    try {
        const double t0 = now();
        PressureMaps logistic(DiffusionSpec::power_law(2),
                              ReactionSpec::monostable_logistic(1.0, 1.0));
        const SpeedResult cs = find_c_s(logistic, {0.2, 2.0}, 1e-8);
        double sup = 0;
        for (double z = -30; z <= 2; z += 0.01) {
            const double exact = z < 0 ? 1.0 - std::exp(0.5 * z) : 0.0;
            sup = std::max(sup, std::abs(cs.profile.u_at(z) - exact));
        }
        double residual = 0;
        for (double z = -20; z < 0; z += 1e-3) {
            const double E = std::exp(0.5 * z);
            // (u^2)'' + c u' + u(1-u) with u = 1 - e^{z/2}, c = 1
            residual = std::max(residual,
                                std::abs((-0.5 * E + E * E) + (-0.5 * E) + (1 - E) * E));
        }
        const double dt = now() - t0;
        const bool pass =
            std::abs(cs.c - 1.0) < 1e-5 && sup < 1e-4 && residual < 1e-10 && dt < 5.0;
        report(1, pass,
               fmt("sharp-wave oracle: c_s=%.8f (err %.1e), profile sup %.2e, ansatz residual "
                   "%.1e, %.2fs",
                   cs.c, std::abs(cs.c - 1.0), sup, residual, dt));
    } catch (const std::exception& e) {
        report(1, false, std::string("exception: ") + e.what());
    }

    // ---- criterion 2: pressure-calculus identities -----------------------
    try {
        const double t0 = now();
        bool pass = true;
        std::string msg;
        for (double m : {1.5, 2.0, 3.0}) {
            PressureMaps maps(DiffusionSpec::power_law(m), ReactionSpec::quartic(8, 0.3, 0.55));
            // h and B carry a v^{1 + 1/a_star} correction at 0 (u ~ v^{1/a_star}),
            // so the slope is fit through the two-term model at two points
            const double q = 1.0 / maps.a_star();
            const auto slope0 = [&](auto&& g) {
                const double d1 = 1e-5, d2 = 2.5e-6;
                const double w1 = std::pow(d1, 1 + q), w2 = std::pow(d2, 1 + q);
                return (g(d1) * w2 - g(d2) * w1) / (d1 * w2 - d2 * w1);
            };
            const double Bp = slope0([&](double v) { return maps.B(v); });
            const double hp = slope0([&](double v) { return maps.h(v); });
            const double f0 = maps.f_prime0();
            if (std::abs(Bp - (m - 1)) > 1e-4) pass = false;
            if (std::abs(hp - f0 * (m - 1)) > 1e-4) pass = false;
            msg += fmt("m=%.1f: B'(0+)=%.6f h'(0+)=%.6f (want %.4f, %.6f)  ", m, Bp, hp, m - 1,
                       f0 * (m - 1));
        }
        const double dt = now() - t0;
        report(2, pass && dt < 1.0, msg + fmt("[%.2fs]", dt));
    } catch (const std::exception& e) {
        report(2, false, std::string("exception: ") + e.what());
    }

    // ---- criterion 3: speed ordering c_s < c_b < c_z ----------------------
    SpeedResult cs_def, cz_def;
    std::optional<SpeedResult> cb_def;
    try {
        cs_def = find_c_s(*maps_def, {0.05, 1.0}, 1e-8);
        cz_def = find_c_z(*maps_def, 1e-8);
        cb_def = find_c_b(*maps_def, cs_def.c, cz_def.c, 1e-8);
        ShootOptions half;
        half.delta0 = 5e-9;
        const SpeedResult cs2 = find_c_s(*maps_def, {0.05, 1.0}, 1e-8, half);
        const bool pass = cb_def.has_value() && cb_def->c - cs_def.c > 1e-4 &&
                          cz_def.c - cb_def->c > 1e-4 && std::abs(cs2.c - cs_def.c) < 1e-6;
        report(3, pass,
               fmt("c_s=%.6f < c_b=%.6f < c_z=%.6f (margins %.1e, %.1e); delta0 halving moves "
                   "c_s by %.1e",
                   cs_def.c, cb_def ? cb_def->c : 0.0, cz_def.c,
                   cb_def ? cb_def->c - cs_def.c : 0.0, cb_def ? cz_def.c - cb_def->c : 0.0,
                   std::abs(cs2.c - cs_def.c)));
    } catch (const std::exception& e) {
        report(3, false, std::string("exception: ") + e.what());
    }

    // ---- criterion 4: psi^c strictly increasing --------------------------
    try {
        bool mono = true, finite = true;
        double prev = -1e300;
        for (int k = 0; k < 20; ++k) {
            const double c = cs_def.c * (0.98 + 0.04 * k / 19.0);
            const double p = psi_axis_value(*maps_def, c, 1e-4);
            if (!std::isfinite(p)) finite = false;
            if (!(p > prev)) mono = false;
            prev = p;
        }
        report(4, mono && finite,
               fmt("psi^c on 20 speeds in [%.4f, %.4f]: %s", cs_def.c * 0.98, cs_def.c * 1.02,
                   mono && finite ? "strictly increasing" : "violation found"));
    } catch (const std::exception& e) {
        report(4, false, std::string("exception: ") + e.what());
    }

    // ---- regime runs shared by criteria 5, 7, 8, 11 ----------------------
    SpeedResult cs_ter, cz_ter;
    RegimeRun runA, runB, runC;
    try {
        cs_ter = find_c_s(*maps_ter, {0.05, 1.0}, 1e-8);
        cz_ter = find_c_z(*maps_ter, 1e-8);
        std::printf("  regimes: default c_s=%.5f c_b=%.5f c_z=%.5f | terrace c_s=%.5f c_z=%.5f "
                    "[t=%.0fs]\n",
                    cs_def.c, cb_def ? cb_def->c : 0.0, cz_def.c, cs_ter.c, cz_ter.c, now());
        runA = run_regime(maps_def, 0.25, 1.0, -26, 26, 0.01, 40, 0.5); // small spreading
        std::printf("  run A (small) done [t=%.0fs]\n", now());
        runB = run_regime(maps_def, 3.0, 2.0, -30, 30, 0.01, 40, 0.5);  // big, cs<cz
        std::printf("  run B (big, cb) done [t=%.0fs]\n", now());
        runC = run_regime(maps_ter, 3.0, 3.0, -33, 33, 0.01, 40, 0.5);  // big, cs>cz
        std::printf("  run C (terrace) done [t=%.0fs]\n", now());
    } catch (const std::exception& e) {
        std::printf("  regime runs failed: %s\n", e.what());
    }

    // ---- criterion 5: PDE front speeds match the phase plane -------------
    try {
        const double t0 = now();
        const SpeedFit fa = fit_front(runA.state.history, true, 20.0, 40.0);
        const SpeedFit fb = fit_front(runB.state.history, true, 20.0, 40.0);
        const SpeedFit fc = fit_front(runC.state.history, true, 20.0, 40.0);
        const double ea = std::abs(fa.c_hat - cs_def.c) / cs_def.c;
        const double eb = std::abs(fb.c_hat - cb_def->c) / cb_def->c;
        const double ec = std::abs(fc.c_hat - cs_ter.c) / cs_ter.c;

        // refinement study on the small-spreading config at T = 20
        auto half_err = [&](double dx) {
            RegimeRun rr = run_regime(maps_def, 0.25, 1.0, -16, 16, dx, 20, 0.5);
            const SpeedFit f = fit_front(rr.state.history, true, 10.0, 20.0);
            return std::abs(f.c_hat - cs_def.c);
        };
        const double e1 = half_err(0.01);
        const double e2 = half_err(0.005);
        const bool shrink = (e2 < e1) || (e1 < 1e-4 && e2 < 1e-4);
        const bool pass = ea < 0.02 && eb < 0.02 && ec < 0.02 && shrink;
        report(5, pass,
               fmt("speeds: small %.5f vs c_s %.5f (%.2f%%), big %.5f vs c_b %.5f (%.2f%%), "
                   "terrace %.5f vs c_s %.5f (%.2f%%); refinement %.1e -> %.1e [%.0fs]",
                   fa.c_hat, cs_def.c, 100 * ea, fb.c_hat, cb_def->c, 100 * eb, fc.c_hat,
                   cs_ter.c, 100 * ec, e1, e2, now() - t0));
    } catch (const std::exception& e) {
        report(5, false, std::string("exception: ") + e.what());
    }

    // ---- criterion 6: trichotomy ------------------------------------------
    try {
        const double t0 = now();
        const StationaryProfile ground = build_profile(
            StationaryCase::ground_state, 0, maps_def->diffusion(), maps_def->reaction(), 40.0,
            0.01);
        // sigma* is infinite for b = 1 (even a height-1 plateau of width 3
        // keeps collapsing to s1); b = 2 admits a finite threshold
        InitialDataSpec phi;
        phi.shape = InitialDataSpec::Shape::cos2;
        phi.b = 2;
        phi.sigma = 1;
        ClassifyOptions opt;
        opt.grid = Grid1D{-45, 45, 0.05};
        opt.T = 60;
        opt.dt_out = 0.5;
        opt.W = 5.0;
        opt.max_doublings = 2;

        SigmaStarResult res = find_sigma_star(phi, maps_def, ground, 1.0, 3.0, 1e-2, opt);
        bool dip = res.evidence.min_ground_dist < 0.05;
        double width = (res.sigma_hi - res.sigma_lo) / res.sigma_lo;
        // if the 1e-2 bracket's midpoint does not shadow the ground state
        // closely enough, bisect deeper for the evidence run only
        if (!res.one_sided && !dip) {
            SigmaStarResult res2 = find_sigma_star(phi, maps_def, ground, res.sigma_lo,
                                                   res.sigma_hi, 1e-3, opt);
            ClassifyOptions eo = opt;
            eo.track_ground_distance = true;
            eo.T = 2 * opt.T;
            const ClassificationResult ev = classify_sigma(
                0.5 * (res2.sigma_lo + res2.sigma_hi), phi, maps_def, ground, eo);
            if (ev.min_ground_dist < res.evidence.min_ground_dist) res.evidence = ev;
            dip = res.evidence.min_ground_dist < 0.05;
        }
        const bool pass = !res.one_sided && res.at_lo.verdict == Verdict::small_spreading &&
                          res.at_hi.verdict == Verdict::big_spreading && width < 1e-2 && dip;
        report(6, pass,
               fmt("sigma* in [%.5f, %.5f] (rel width %.1e); near-critical ground-state "
                   "distance dips to %.4f at t=%.0f [%.0fs]",
                   res.sigma_lo, res.sigma_hi, width, res.evidence.min_ground_dist,
                   res.evidence.min_ground_dist_t, now() - t0));
    } catch (const std::exception& e) {
        report(6, false, std::string("exception: ") + e.what());
    }

    // ---- criterion 7: front shift convergence (small spreading) ----------
    try {
        const double drift = front_shift_drift(runA.state.history, cs_def.c, true, 20.0, 40.0);
        const Frame& last = runA.frames.back();
        const double rT = runA.state.history.back().r;
        const double err17 =
            profile_error(last, cs_def.profile, rT, -cs_def.c * last.t, 1e9, false);
        const bool pass = drift < 0.1 && err17 < 0.05;
        report(7, pass,
               fmt("r(t) - c_s t drift over [20,40] = %.4f (< 0.1); sup|u(x+r(T)) - Q_cs(x)| on "
                   "[-c_s T, inf) = %.4f (< 0.05)",
                   drift, err17));
    } catch (const std::exception& e) {
        report(7, false, std::string("exception: ") + e.what());
    }

    // ---- criterion 8: terrace ---------------------------------------------
    try {
        // c_s > c_z regime: two-speed terrace
        const LevelSetTrack trC = track_levels(runC.frames, 0.15, 0.65);
        std::vector<double> tw, xs, xu, dd;
        for (std::size_t i = 0; i < trC.t.size(); ++i)
            if (trC.t[i] >= 20.0) {
                tw.push_back(trC.t[i]);
                xs.push_back(trC.chi_star[i]);
                xu.push_back(trC.chi_upper[i]);
                dd.push_back(trC.d[i]);
            }
        const double v_star = fit_line(tw, xs).slope;
        const double v_up = fit_line(tw, xu).slope;
        const double d_rate = fit_line(tw, dd).slope;
        const double gap = cs_ter.c - cz_ter.c;
        const bool terr_ok = std::abs(v_star - cs_ter.c) / cs_ter.c < 0.02 &&
                             std::abs(v_up - cz_ter.c) / cz_ter.c < 0.02 &&
                             std::abs(d_rate - gap) / gap < 0.10;

        // c_s < c_z regime: single front carrying both levels, fits Q_cb
        const LevelSetTrack trB = track_levels(runB.frames, 0.15, 0.65);
        std::vector<double> tb, db;
        for (std::size_t i = 0; i < trB.t.size(); ++i)
            if (trB.t[i] >= 20.0) {
                tb.push_back(trB.t[i]);
                db.push_back(trB.d[i]);
            }
        const double db_rate = fit_line(tb, db).slope;
        const Frame& lastB = runB.frames.back();
        const double rB = runB.state.history.back().r;
        const double fitB =
            profile_error(lastB, cb_def->profile, rB, -cb_def->c * lastB.t * 0.9, 1e9, false);
        const bool single_ok = std::abs(db_rate) < 0.02 && fitB < 0.05;

        report(8, terr_ok && single_ok,
               fmt("cs>cz: levels %.5f/%.5f vs c_s=%.5f c_z=%.5f, d-rate %.5f vs gap %.5f; "
                   "cs<cz: d-rate %.1e (bounded), Q_cb fit %.4f",
                   v_star, v_up, cs_ter.c, cz_ter.c, d_rate, gap, db_rate, fitB));
    } catch (const std::exception& e) {
        report(8, false, std::string("exception: ") + e.what());
    }

    // ---- criterion 9: first integral and half-support shrinkage trend -----
    try {
        const auto& A = maps_def->diffusion();
        const auto& f = maps_def->reaction();
        // conservation against a test-side Simpson primitive
        auto FI_simpson = [&](double q) {
            const int n = 2000;
            double acc = 0;
            const double h = q / n;
            for (int i = 0; i < n; ++i) {
                const double a = i * h, m = a + 0.5 * h, b2 = a + h;
                acc += h / 6 *
                       (A.dA(a) * f.f(a) + 4 * A.dA(m) * f.f(m) + A.dA(b2) * f.f(b2));
            }
            return 2 * acc;
        };
        double worst = 0;
        for (double peak : {0.1, 0.25}) {
            const StationaryProfile prof =
                build_profile(StationaryCase::compact_short, peak, A, f);
            for (std::size_t i = 0; i < prof.x.size(); ++i)
                worst = std::max(worst, std::abs(prof.p[i] * prof.p[i] +
                                                 FI_simpson(prof.q[i]) - prof.C) /
                                            (1 + std::abs(prof.C)));
        }
        bool decreasing = true;
        double prev = 1e300;
        double Ls[4];
        int li = 0;
        for (double q1 : {0.2, 0.1, 0.05, 0.025}) {
            const double L = half_support_length(q1, A, f);
            Ls[li++] = L;
            if (!(L < prev)) decreasing = false;
            prev = L;
        }
        const bool pass = worst < 1e-6 && decreasing;
        report(9, pass,
               fmt("first-integral residual %.2e (rel, < 1e-6); L1 = %.4f > %.4f > %.4f > %.4f",
                   worst, Ls[0], Ls[1], Ls[2], Ls[3]));
    } catch (const std::exception& e) {
        report(9, false, std::string("exception: ") + e.what());
    }

    // ---- criterion 10: scheme soundness -----------------------------------
    try {
        const double t0 = now();
        // comparison principle on 50 random ordered pairs
        SplitMix64 rng(987654321);
        bool ordered = true;
        for (int trial = 0; trial < 50 && ordered; ++trial) {
            Grid1D g{-6, 6, 0.1};
            InitialDataSpec w0;
            w0.shape = trial % 2 ? InitialDataSpec::Shape::cos2 : InitialDataSpec::Shape::tent;
            w0.b = 1 + rng.uniform();
            w0.sigma = 0.3 + 0.9 * rng.uniform();
            auto sw = init(w0, g, maps_def);
            auto su = sw;
            const double fac = 0.2 + 0.75 * rng.uniform();
            for (auto& x : su.u) x *= fac;
            su.cache_lo = -1;
            RunParams p;
            p.T = 0.5;
            p.fixed_dt = 1e-4;
            run(su, p);
            run(sw, p);
            for (int i = 0; i < su.n(); ++i)
                if (su.u[i] > sw.u[i] + 1e-14 || su.u[i] < 0) ordered = false;
        }
        // constant equilibria exact
        bool equilibria = true;
        for (double level : {0.0, 0.3, 0.55, 1.0}) {
            InitialDataSpec u0;
            u0.shape = InitialDataSpec::Shape::constant;
            u0.level = level;
            auto s = init(u0, Grid1D{-4, 4, 0.1}, maps_def);
            RunParams p;
            p.T = 1.0;
            run(s, p);
            for (double v : s.u)
                if (v != level) equilibria = false;
        }
        // PME exponent 1/(m+1) for m = 2 (f == 0)
        InitialDataSpec u0;
        u0.shape = InitialDataSpec::Shape::cos2;
        u0.b = 1;
        u0.sigma = 1;
        auto s = init(u0, Grid1D{-30, 30, 0.02}, maps_def);
        RunParams p;
        p.T = 100;
        p.dt_out = 1.0;
        p.reaction_on = false;
        run(s, p);
        std::vector<double> lt, lr;
        for (const auto& h : s.history)
            if (h.t >= 10) {
                lt.push_back(std::log(h.t));
                lr.push_back(std::log(h.r));
            }
        const double expo = fit_line(lt, lr).slope;
        const double want = 1.0 / 3.0; // 1/(m+1), m = 2
        const bool pme = std::abs(expo - want) / want < 0.05;
        report(10, ordered && equilibria && pme,
               fmt("comparison 50/50 %s; equilibria exact %s; PME exponent %.4f vs 1/(m+1) = "
                   "%.4f [%.0fs]",
                   ordered ? "ordered" : "VIOLATED", equilibria ? "yes" : "NO", expo, want,
                   now() - t0));
    } catch (const std::exception& e) {
        report(10, false, std::string("exception: ") + e.what());
    }

    // ---- criterion 11: envelope verification ------------------------------
    try {
        const EnvelopeCheck ec =
            verify_envelopes(runA.frames, runA.state.history, cs_def.profile, *maps_def);
        const bool pass = ec.inequalities_ok && ec.violations == 0;
        report(11, pass,
               fmt("envelope inequalities ok (margins %.3g, %.3g, %.3g, %.3g); sandwich: %ld "
                   "points, %ld violations (worst %.2e); decay rate %.3f",
                   ec.ineq1_margin, ec.ineq2_margin, ec.ineq3_margin, ec.ineq4_margin,
                   ec.points_checked, ec.violations, ec.worst_violation, ec.decay_rate));
    } catch (const std::exception& e) {
        report(11, false, std::string("exception: ") + e.what());
    }

    std::printf("%s: %d criteria failed (total %.0fs)\n", g_failures ? "FAIL" : "OK", g_failures,
                now());
    return g_failures ? 1 : 0;
}
