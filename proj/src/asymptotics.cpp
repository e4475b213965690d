#include "degwave/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <future>

namespace degwave {

Frame Frame::of(const SolutionState& s) {
    Frame f;
    f.t = s.t;
    f.x0 = s.x0;
    f.dx = s.dx;
    f.u = s.u;
    return f;
}

double Frame::u_at(double x) const {
    const double pos = (x - x0) / dx;
    if (pos <= 0) return u.front();
    if (pos >= double(u.size() - 1)) return u.back();
    const int i = int(pos);
    const double s = pos - i;
    return u[i] + s * (u[i + 1] - u[i]);
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::small_spreading: return "small_spreading";
        case Verdict::big_spreading: return "big_spreading";
        case Verdict::transition: return "transition";
        default: return "undecided";
    }
}

const char* to_string(OmegaTag t) {
    switch (t) {
        case OmegaTag::s1: return "s1";
        case OmegaTag::one: return "one";
        case OmegaTag::ground_state: return "ground_state";
        default: return "undecided";
    }
}

namespace {

double sup_dist_const(const Frame& f, double W, double level) {
    double sup = 0;
    for (double x = -W; x <= W; x += f.dx) sup = std::max(sup, std::abs(f.u_at(x) - level));
    return sup;
}

double sup_dist_profile(const Frame& f, double W, const StationaryProfile& prof, double shift) {
    double sup = 0;
    for (double x = -W; x <= W; x += f.dx)
        sup = std::max(sup, std::abs(f.u_at(x) - prof.q_at(x - shift)));
    return sup;
}

// minimize over the shift by coarse scan plus golden refinement
std::pair<double, double> min_shift_dist(const Frame& f, double W, const StationaryProfile& prof,
                                         double range) {
    double best = std::numeric_limits<double>::infinity(), best_shift = 0;
    const int n = 41;
    for (int i = 0; i <= n; ++i) {
        const double sh = -range + 2 * range * i / n;
        const double d = sup_dist_profile(f, W, prof, sh);
        if (d < best) {
            best = d;
            best_shift = sh;
        }
    }
    double a = best_shift - 2 * range / n, b = best_shift + 2 * range / n;
    for (int it = 0; it < 24; ++it) {
        const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
        if (sup_dist_profile(f, W, prof, m1) < sup_dist_profile(f, W, prof, m2))
            b = m2;
        else
            a = m1;
    }
    const double sh = 0.5 * (a + b);
    return {sup_dist_profile(f, W, prof, sh), sh};
}

} // namespace

OmegaEvidence detect_omega_limit(const std::deque<Frame>& band, double W, double tol_class,
                                 const ReactionSpec& f, const StationaryProfile* ground,
                                 double shift_range) {
    if (band.size() < 3)
        throw Error(Error::Code::not_stabilized, "detect_omega_limit: final band too short");
    OmegaEvidence ev;
    double umax_first = 0, umax_last = 0;
    for (const auto& fr : band) {
        double m = 0;
        for (double x : fr.u) m = std::max(m, x);
        ev.u_max_band = std::max(ev.u_max_band, m);
        if (&fr == &band.front()) umax_first = m;
        if (&fr == &band.back()) umax_last = m;
    }
    ev.u_max_drift = std::abs(umax_last - umax_first);

    const Frame& last = band.back();
    ev.dist_s1 = sup_dist_const(last, W, f.s1());
    ev.dist_one = sup_dist_const(last, W, 1.0);
    if (ground) {
        auto [d, sh] = min_shift_dist(last, W, *ground, shift_range);
        ev.dist_ground = d;
        ev.ground_shift = sh;
    }

    const double s2 = f.monostable() ? std::numeric_limits<double>::infinity() : f.s2();
    if (ev.dist_s1 < tol_class && ev.u_max_band < s2)
        ev.tag = OmegaTag::s1;
    else if (ev.dist_one < tol_class)
        ev.tag = OmegaTag::one;
    else if (ground && ev.dist_ground < tol_class)
        ev.tag = OmegaTag::ground_state;
    else
        ev.tag = OmegaTag::undecided;
    return ev;
}

ClassificationResult classify_sigma(double sigma, const InitialDataSpec& phi,
                                    const std::shared_ptr<const PressureMaps>& maps,
                                    const StationaryProfile& ground, const ClassifyOptions& opt) {
    ClassificationResult res;
    res.sigma = sigma;

    InitialDataSpec u0 = phi;
    if (u0.shape == InitialDataSpec::Shape::custom) {
        auto base = phi.custom;
        u0.custom = [base, sigma](double x) { return sigma * base(x); };
    } else {
        u0.sigma = phi.sigma * sigma;
    }

    SolutionState s = init(u0, opt.grid, maps);

    std::deque<Frame> band;
    RunParams rp;
    rp.dt_out = opt.dt_out;
    rp.on_frame = [&](const SolutionState& st) {
        band.push_back(Frame::of(st));
        while (int(band.size()) > opt.band_frames) band.pop_front();
        if (opt.track_ground_distance) {
            auto [d, sh] = min_shift_dist(band.back(), opt.W, ground, phi.b);
            if (!(d >= res.min_ground_dist)) { // NaN-aware
                res.min_ground_dist = d;
                res.min_ground_dist_t = st.t;
            }
            (void)sh;
        }
    };

    double T = opt.T;
    for (int attempt = 0; attempt <= opt.max_doublings; ++attempt) {
        rp.T = T;
        run(s, rp);
        res.horizon_used = s.t;
        res.omega = detect_omega_limit(band, opt.W, opt.tol_class, maps->reaction(), &ground,
                                       phi.b);
        switch (res.omega.tag) {
            case OmegaTag::s1: res.verdict = Verdict::small_spreading; return res;
            case OmegaTag::one: res.verdict = Verdict::big_spreading; return res;
            case OmegaTag::ground_state: res.verdict = Verdict::transition; break;
            default: res.verdict = Verdict::undecided; break;
        }
        T *= 2;
    }
    return res;
}

SigmaStarResult find_sigma_star(const InitialDataSpec& phi,
                                const std::shared_ptr<const PressureMaps>& maps,
                                const StationaryProfile& ground, double sigma_lo, double sigma_hi,
                                double rel_tol, const ClassifyOptions& opt, double sigma_max) {
    SigmaStarResult out;
    auto classify = [&](double s) { return classify_sigma(s, phi, maps, ground, opt); };

    // the bracket endpoints are independent simulations; overlap them
    auto lo_future = std::async(std::launch::async, classify, sigma_lo);
    auto hi_future = std::async(std::launch::async, classify, sigma_hi);
    ClassificationResult lo = lo_future.get();
    ClassificationResult hi_pre = hi_future.get();
    int guard = 0;
    while (lo.verdict != Verdict::small_spreading && ++guard < 20) {
        sigma_lo *= 0.5;
        lo = classify(sigma_lo);
    }
    if (lo.verdict != Verdict::small_spreading)
        throw Error(Error::Code::undecided, "find_sigma_star: no small-spreading sigma found");

    ClassificationResult hi = hi_pre;
    guard = 0;
    while (hi.verdict != Verdict::big_spreading && sigma_hi < sigma_max && ++guard < 20) {
        sigma_hi *= 2.0;
        hi = classify(sigma_hi);
    }
    if (hi.verdict != Verdict::big_spreading) {
        // sigma_* = +infinity is possible; report the one-sided result
        out.one_sided = true;
        out.sigma_lo = sigma_lo;
        out.sigma_hi = std::numeric_limits<double>::infinity();
        out.at_lo = lo;
        out.at_hi = hi;
        return out;
    }

    while (sigma_hi - sigma_lo > rel_tol * sigma_lo) {
        const double mid = 0.5 * (sigma_lo + sigma_hi);
        const ClassificationResult cm = classify(mid);
        if (cm.verdict == Verdict::big_spreading) {
            sigma_hi = mid;
            hi = cm;
        } else if (cm.verdict == Verdict::small_spreading) {
            sigma_lo = mid;
            lo = cm;
        } else {
            // transition / undecided at the budget: the bracket cannot be
            // narrowed past this sigma honestly; keep it inside and stop
            out.evidence = cm;
            break;
        }
    }
    out.sigma_lo = sigma_lo;
    out.sigma_hi = sigma_hi;
    out.at_lo = lo;
    out.at_hi = hi;

    if (out.evidence.horizon_used == 0) {
        ClassifyOptions eo = opt;
        eo.track_ground_distance = true;
        eo.T = 2 * opt.T;
        eo.max_doublings = 0;
        out.evidence = classify_sigma(0.5 * (sigma_lo + sigma_hi), phi, maps, ground, eo);
    }
    return out;
}

// ---------------------------------------------------------------------------

SpeedFit fit_front(const std::vector<FrontRecord>& history, bool right_front, double t_lo,
                   double t_hi) {
    if (history.size() < 4) throw Error(Error::Code::window, "fit_front: WindowTooShort");
    const double t0 = history.front().t, t1 = history.back().t;
    if (t_lo < 0) t_lo = t0 + 0.3 * (t1 - t0); // default: drop the transient
    if (t_hi < 0) t_hi = t1;
    std::vector<double> ts, ps;
    for (const auto& h : history) {
        if (h.t >= t_lo && h.t <= t_hi) {
            ts.push_back(h.t);
            ps.push_back(right_front ? h.r : h.l);
        }
    }
    if (ts.size() < 4) throw Error(Error::Code::window, "fit_front: WindowTooShort");
    const LineFit fit = fit_line(ts, ps);
    SpeedFit sf;
    sf.c_hat = fit.slope;
    sf.shift_hat = fit.intercept;
    sf.residual_rms = fit.residual_rms;
    sf.t_lo = ts.front();
    sf.t_hi = ts.back();
    double mn = 1e300, mx = -1e300;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        const double dev = ps[i] - fit.slope * ts[i];
        mn = std::min(mn, dev);
        mx = std::max(mx, dev);
    }
    sf.drift = mx - mn;
    return sf;
}

double front_shift_drift(const std::vector<FrontRecord>& history, double c, bool right_front,
                         double t_lo, double t_hi) {
    double mn = 1e300, mx = -1e300;
    for (const auto& h : history) {
        if (h.t < t_lo || h.t > t_hi) continue;
        const double dev = (right_front ? h.r : h.l) - c * h.t;
        mn = std::min(mn, dev);
        mx = std::max(mx, dev);
    }
    if (mn > mx) throw Error(Error::Code::window, "front_shift_drift: empty window");
    return mx - mn;
}

double profile_error(const Frame& frame, const WaveProfile& wave, double anchor, double x_lo,
                     double x_hi, bool mirror) {
    const double grid_lo = frame.x0 - anchor;
    const double grid_hi = frame.x0 + frame.dx * double(frame.u.size() - 1) - anchor;
    x_lo = std::max(x_lo, grid_lo);
    x_hi = std::min(x_hi, grid_hi);
    if (x_lo >= x_hi) throw Error(Error::Code::region, "profile_error: RegionOutsideGrid");
    double sup = 0;
    for (double x = x_lo; x <= x_hi; x += frame.dx) {
        const double q = mirror ? wave.u_at(-x) : wave.u_at(x);
        sup = std::max(sup, std::abs(frame.u_at(x + anchor) - q));
    }
    return sup;
}

LevelSetTrack track_levels(const std::vector<Frame>& frames, double s_star, double s_upper) {
    LevelSetTrack tr;
    tr.s_star = s_star;
    tr.s_upper = s_upper;
    auto rightmost = [](const Frame& f, double level) -> double {
        for (int i = int(f.u.size()) - 2; i >= 0; --i) {
            if (f.u[i] >= level && f.u[i + 1] < level) {
                const double t = (f.u[i] - level) / (f.u[i] - f.u[i + 1]);
                return f.x0 + f.dx * (i + t);
            }
        }
        return std::numeric_limits<double>::quiet_NaN();
    };
    for (const auto& f : frames) {
        const double a = rightmost(f, s_star);
        const double b = rightmost(f, s_upper);
        if (std::isnan(a) || std::isnan(b)) continue;
        tr.t.push_back(f.t);
        tr.chi_star.push_back(a);
        tr.chi_upper.push_back(b);
        tr.d.push_back(a - b);
    }
    if (tr.t.empty())
        throw Error(Error::Code::region, "track_levels: LevelNotPresent in any frame");
    return tr;
}

// ---------------------------------------------------------------------------
// Envelope verifier.

EnvelopeCheck verify_envelopes(const std::vector<Frame>& frames,
                               const std::vector<FrontRecord>& history,
                               const WaveProfile& wave, const PressureMaps& maps,
                               double viol_tol) {
    if (frames.empty() || frames.front().t != 0)
        throw Error(Error::Code::domain, "verify_envelopes: frames must start at t = 0");
    EnvelopeCheck ec;
    const double c = wave.c;
    const double phi1 = maps.phi_hat(1);

    // V(zeta) = Lambda(Q(zeta)) and its slope from the stored profile
    const auto V = [&](double z) { return wave.v_at(z); };

    // ---- wave tail measurements: z0 and eps0 for eps = 0.02 phi1
    ec.eps = 0.02 * phi1;
    {
        // first zeta (from the left) with V >= phi1 - eps gives -z0
        double z = wave.zeta.front();
        for (std::size_t i = 0; i < wave.zeta.size(); ++i) {
            if (wave.v[i] <= phi1 - ec.eps) {
                z = wave.zeta[i];
                break;
            }
        }
        ec.z0 = -z;
        double emin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < wave.zeta.size(); ++i)
            if (wave.zeta[i] >= z && wave.zeta[i] <= 0) emin = std::min(emin, -wave.psi[i]);
        ec.eps0 = emin;
    }

    // ---- alpha1_0, b1_0 from the initial datum: v(x,0) <= (1+a) V(x - b1_0)
    const Frame& f0 = frames.front();
    double r0 = history.empty() ? 0.0 : history.front().r;
    ec.b1_0 = r0;
    {
        double worst = 0;
        for (double x = 0; x < r0; x += f0.dx) {
            const double v0 = maps.Lambda(std::max(f0.u_at(x), 0.0));
            const double Vv = V(x - ec.b1_0);
            if (Vv > 1e-14) worst = std::max(worst, v0 / Vv);
        }
        ec.alpha1_0 = std::max(0.05, worst - 1.0 + 0.05);
    }
    // ---- alpha2_0, b2_0: v(x,0) > (1-a) V(x - b2_0) on [0, b2_0]
    ec.b2_0 = 0.5 * r0;
    {
        double ratio_min = std::numeric_limits<double>::infinity();
        for (double x = 0; x <= ec.b2_0; x += f0.dx) {
            const double v0 = maps.Lambda(std::max(f0.u_at(x), 0.0));
            const double Vv = V(x - ec.b2_0);
            if (Vv > 1e-14) ratio_min = std::min(ratio_min, v0 / Vv);
        }
        if (!std::isfinite(ratio_min)) ratio_min = 1.0;
        ec.alpha2_0 = std::clamp(1.0 - 0.9 * std::min(ratio_min, 1.0), 0.05, 0.95);
    }

    const double alpha_sup = 1.0 + ec.alpha1_0;
    // ---- bounds of B and B' on the working range [0, (1+alpha1_0) phi1]
    {
        const double hi = alpha_sup * phi1;
        ec.B1 = maps.B(hi);                  // B increasing
        ec.B2 = maps.B(phi1 - ec.eps);       // min over [phi1-eps, phi1]
        double b3 = 0, b4 = std::numeric_limits<double>::infinity();
        const int n = 400;
        for (int i = 1; i <= n; ++i) {
            const double v0 = hi * i / n;
            const double d = (maps.B(v0) - maps.B(v0 * (1 - 1e-6))) / (v0 * 1e-6);
            b3 = std::max(b3, d);
            b4 = std::min(b4, d);
        }
        ec.B3 = b3;
        ec.B4 = b4;
    }
    // ---- width of the h' < 0 band around phi1 and its depth H(delta_hat)
    {
        const auto hp = [&](double v0) {
            const double dv = 1e-6 * phi1;
            return (maps.h(v0 + dv) - maps.h(v0 - dv)) / (2 * dv);
        };
        double delta = 0.30 * phi1;
        while (delta > 1e-3 * phi1) {
            bool neg = true;
            for (int i = 0; i <= 64; ++i) {
                const double v0 = phi1 - delta + 2 * delta * i / 64;
                if (hp(v0) >= 0) neg = false;
            }
            if (neg) break;
            delta *= 0.7;
        }
        ec.delta_hat = delta;
        double hmin = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 128; ++i) {
            const double v0 = phi1 - delta + 2 * delta * i / 128;
            hmin = std::min(hmin, std::abs(hp(v0)));
        }
        ec.H_delta = hmin;
        if (!(ec.H_delta > 0))
            throw Error(Error::Code::construction,
                        "ConstantsInfeasible: h' does not stay negative near phi1");
    }
    // ---- reaction quotients H1(alpha1_0), H2(alpha2_0) by sampling
    {
        const auto quotient_sup = [&](double a_lo, double a_hi, bool super) {
            double worst = 0;
            for (int ia = 1; ia <= 24; ++ia) {
                const double alpha = a_lo + (a_hi - a_lo) * ia / 24 + (super ? 1e-5 : -1e-5);
                for (int ir = 1; ir <= 64; ++ir) {
                    const double r = phi1 * ir / 64.0;
                    const double num = super ? maps.h(alpha * r) -
                                                   alpha * maps.h(r) * maps.B(alpha * r) / maps.B(r)
                                             : alpha * maps.h(r) * maps.B(alpha * r) / maps.B(r) -
                                                   maps.h(alpha * r);
                    const double den = super ? (alpha - 1.0) : (1.0 - alpha);
                    if (den > 1e-12) worst = std::max(worst, num / den);
                }
            }
            return worst;
        };
        ec.H1 = quotient_sup(1.0, 1.0 + ec.alpha1_0, true);
        ec.H2 = quotient_sup(1.0 - ec.alpha2_0, 1.0, false);
    }

    // ---- mid-range decay fit: |u(r(t) - c t, t) - s1| ~ e^{-delta t}
    {
        std::vector<double> ts, ls;
        const double s1 = maps.reaction().s1();
        for (const auto& fr : frames) {
            if (fr.t <= 0) continue;
            double rt = fr.t; // find r(t) from history
            for (const auto& h : history)
                if (std::abs(h.t - fr.t) < 1e-9) rt = h.r;
            const double e = std::abs(fr.u_at(rt - c * fr.t) - s1);
            if (e > 1e-12) {
                ts.push_back(fr.t);
                ls.push_back(std::log(e));
            }
        }
        if (ts.size() >= 6) {
            // fit over the middle stretch (transient and floor excluded)
            const std::size_t a = ts.size() / 4, b = ts.size() - ts.size() / 8;
            std::vector<double> tw(ts.begin() + a, ts.begin() + b);
            std::vector<double> lw(ls.begin() + a, ls.begin() + b);
            if (tw.size() >= 4) ec.decay_rate = -fit_line(tw, lw).slope;
        }
    }

    // ---- envelope constants
    ec.delta1 = std::min(1.0, 0.5 * ec.H_delta);
    ec.delta2 = std::min({1.0, std::isfinite(ec.decay_rate) && ec.decay_rate > 0
                                   ? ec.decay_rate
                                   : 1.0,
                          0.5 * ec.H_delta});
    {
        const double lhs_floor1 = phi1 * ec.B3 / ec.B2;
        const double lhs_floor2 = ec.B3 / ec.B4 + (phi1 + ec.H1) / (ec.eps0 * c);
        ec.A1 = 1.1 * (ec.alpha1_0 / ec.delta1) * std::max(lhs_floor1, lhs_floor2);
        const double lhs_floor3 = phi1 * ec.B3 / ec.B2;
        const double lhs_floor4 =
            ec.B3 / ec.B4 + (phi1 + ec.H2) / (ec.eps0 * c * (1.0 - ec.alpha2_0));
        ec.A2 = 1.1 * (ec.alpha2_0 / ec.delta2) * std::max(lhs_floor3, lhs_floor4);

        ec.ineq1_margin = ec.A1 * ec.delta1 / ec.alpha1_0 - phi1 * ec.B3 / ec.B2;
        ec.ineq2_margin =
            ec.eps0 * c * (ec.A1 * ec.delta1 / ec.alpha1_0 - ec.B3 / ec.B4) - (phi1 + ec.H1);
        ec.ineq3_margin = ec.A2 * ec.delta2 / ec.alpha2_0 - phi1 * ec.B3 / ec.B2;
        ec.ineq4_margin = ec.eps0 * c * (1.0 - ec.alpha2_0) *
                              (ec.A2 * ec.delta2 / ec.alpha2_0 - ec.B3 / ec.B4) -
                          (phi1 + ec.H2);
        ec.inequalities_ok = ec.ineq1_margin > 0 && ec.ineq2_margin > 0 && ec.ineq3_margin > 0 &&
                             ec.ineq4_margin > 0;
    }

    // ---- sandwich check on D = {x >= r(t) - c t, t > 0}
    for (const auto& fr : frames) {
        if (fr.t <= 0) continue;
        double rt = fr.t;
        bool have_r = false;
        for (const auto& h : history)
            if (std::abs(h.t - fr.t) < 1e-9) {
                rt = h.r;
                have_r = true;
            }
        if (!have_r) continue;
        const double t = fr.t;
        const double a1t = 1.0 + ec.alpha1_0 * std::exp(-ec.delta1 * t);
        const double X1t = c * ec.A1 * (1.0 - std::exp(-ec.delta1 * t)) + ec.b1_0;
        const double a2t = 1.0 - ec.alpha2_0 * std::exp(-ec.delta2 * t);
        const double X0t = c * ec.A2 * (1.0 - std::exp(-ec.delta2 * t)) - ec.b2_0;
        const double x_hi = fr.x0 + fr.dx * double(fr.u.size() - 1);
        for (double x = rt - c * t; x <= x_hi; x += fr.dx) {
            const double v = maps.Lambda(std::max(fr.u_at(x), 0.0));
            const double vbar = a1t * V(x - c * t - X1t);
            const double vlow = a2t * V(x - c * t + X0t);
            ++ec.points_checked;
            const double viol = std::max(v - vbar, vlow - v);
            if (viol > viol_tol) {
                ++ec.violations;
                if (viol > ec.worst_violation) {
                    ec.worst_violation = viol;
                    ec.worst_x = x;
                    ec.worst_t = t;
                }
            }
        }
    }
    return ec;
}

} // namespace degwave
