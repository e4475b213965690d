#include "degwave/stationary.hpp"

#include <algorithm>
#include <cmath>

namespace degwave {

namespace {

// 2 \int_a^b A'(r) f(r) dr in scaled form: the [0,1] substitution keeps the
// adaptive tolerance relative to the integrand scale even on very short
// intervals (the gap C - FI(s) is always computed this way, never as a
// difference of two long-range integrals).
double energy_gap(const DiffusionSpec& A, const ReactionSpec& f, double a, double b) {
    if (a == b) return 0.0;
    const double L = b - a;
    const double mean = integrate(
        [&](double w) {
            const double r = a + L * w;
            return A.dA(r) * f.f(r);
        },
        0.0, 1.0, {.abs_tol = 1e-16, .rel_tol = 1e-12});
    return 2.0 * L * mean;
}

using GapFn = std::function<double(double)>;

const QuadratureOptions kMarchQuad{.abs_tol = 1e-15, .rel_tol = 1e-9, .max_depth = 50};

// int_{a}^{b} A'(s)/sqrt(gap(s)) ds on a gap-regular interval.
double arc(const DiffusionSpec& A, const GapFn& gap, double a, double b) {
    return integrate(
        [&](double s) { return A.dA(s) / std::sqrt(std::max(gap(s), 1e-300)); }, a, b,
        kMarchQuad);
}

// Turning cell: int over [q_turn - delta, q_turn] (downward = true) or
// [q_turn, q_turn + delta] with the sqrt singularity removed by s = q_turn
// -+ tau^2. gap(s) must vanish linearly at q_turn.
double turning_cell(const DiffusionSpec& A, const GapFn& gap, double q_turn, double delta,
                    bool downward) {
    const double sgn = downward ? -1.0 : 1.0;
    return integrate(
        [&](double tau) {
            const double s = q_turn + sgn * tau * tau;
            return 2.0 * tau * A.dA(s) / std::sqrt(std::max(gap(s), 1e-300));
        },
        0.0, std::sqrt(delta), kMarchQuad);
}

struct HalfBranch {
    std::vector<double> x, q, p; // x ascending from the anchor (a turning point)
};

// Right half anchored at the turning point (q_anchor, p = 0): q decreases,
// p = -sqrt(gap). Stops at q_stop, or approaches it geometrically down to
// q_stop + 1e-9 when it is an asymptote, or when x exceeds x_cap.
HalfBranch march_down(const DiffusionSpec& A, const GapFn& gap, double q_anchor, double q_stop,
                      bool stop_is_asymptote, double dx, double x_cap) {
    HalfBranch br;
    br.x.push_back(0.0);
    br.q.push_back(q_anchor);
    br.p.push_back(0.0);

    const double range = q_anchor - q_stop;
    const double delta = 0.01 * range;
    br.x.push_back(turning_cell(A, gap, q_anchor, delta, true));
    br.q.push_back(q_anchor - delta);
    br.p.push_back(-std::sqrt(std::max(gap(q_anchor - delta), 0.0)));

    double q = q_anchor - delta;
    double x = br.x.back();
    int guard = 0;
    while (++guard < 100000) {
        const double p = std::sqrt(std::max(gap(q), 0.0));
        double dq = dx * std::max(p, 1e-8) / std::max(A.dA(std::max(q, 1e-300)), 1e-12);
        dq = std::min(dq, 0.05 * range);
        double q_next;
        if (stop_is_asymptote) {
            q_next = std::max(q - dq, q_stop + 0.6 * (q - q_stop));
            if (q - q_stop < 1e-9) break;
        } else {
            // refine geometrically toward the edge: q(x) has a vertical
            // tangent there (q ~ sqrt(L - x)) and uniform q-steps would
            // smear it in the sampled profile
            const double edge_gap = q - q_stop;
            if (edge_gap > 1e-6 * range) dq = std::min(dq, std::max(0.25 * edge_gap, 1e-7));
            q_next = std::max(q - dq, q_stop);
            if (edge_gap <= 1e-6 * range) q_next = q_stop;
        }
        x += arc(A, gap, q_next, q);
        q = q_next;
        br.x.push_back(x);
        br.q.push_back(q);
        br.p.push_back(-std::sqrt(std::max(gap(q), 0.0)));
        if (!stop_is_asymptote && q <= q_stop) break;
        if (x_cap > 0 && x >= x_cap) break;
    }
    return br;
}

StationaryProfile assemble_even(StationaryCase tag, double C, const HalfBranch& right,
                                bool compact) {
    StationaryProfile prof;
    prof.case_tag = tag;
    prof.C = C;
    prof.peak = right.q.front();
    const std::size_t n = right.x.size();
    prof.x.reserve(2 * n - 1);
    prof.q.reserve(2 * n - 1);
    prof.p.reserve(2 * n - 1);
    for (std::size_t i = n; i-- > 1;) {
        prof.x.push_back(-right.x[i]);
        prof.q.push_back(right.q[i]);
        prof.p.push_back(-right.p[i]);
    }
    for (std::size_t i = 0; i < n; ++i) {
        prof.x.push_back(right.x[i]);
        prof.q.push_back(right.q[i]);
        prof.p.push_back(right.p[i]);
    }
    if (compact) {
        prof.L = right.x.back();
        prof.whole_line = false;
    } else {
        prof.whole_line = true;
    }
    return prof;
}

double default_x_max(const DiffusionSpec& A, const ReactionSpec& f) {
    // exponential approach rate toward s1 is kappa ~ sqrt(|f'(s1)| A'(s1))
    const double s1 = f.s1();
    const double kappa2 = std::abs(f.df(s1)) * A.dA(s1);
    return 50.0 / std::sqrt(std::max(kappa2, 1e-12));
}

} // namespace

double first_integral_constant(double q_peak, const DiffusionSpec& A, const ReactionSpec& f) {
    if (q_peak < 0) throw Error(Error::Code::domain, "first_integral_constant: q_peak >= 0");
    return energy_gap(A, f, 0.0, q_peak);
}

double c_star(const DiffusionSpec& A, const ReactionSpec& f) {
    return first_integral_constant(f.s1(), A, f);
}

double c_double_star(const DiffusionSpec& A, const ReactionSpec& f) {
    return first_integral_constant(1.0, A, f);
}

double half_support_length(double q1, const DiffusionSpec& A, const ReactionSpec& f) {
    const bool low = q1 > 0 && q1 < f.s1();
    const bool high = !f.monostable() && q1 < 1 && q1 > theta_of(A, f);
    if (!low && !high)
        throw Error(Error::Code::domain,
                    "half_support_length: peak must lie in (0,s1) or (theta,1)");
    const GapFn gap = [&](double s) { return energy_gap(A, f, s, q1); };
    const double delta = 0.01 * q1;
    return turning_cell(A, gap, q1, delta, true) + arc(A, gap, 0.0, q1 - delta);
}

StationaryProfile build_profile(StationaryCase tag, double target, const DiffusionSpec& A,
                                const ReactionSpec& f, double x_max, double dx) {
    if (x_max <= 0) x_max = default_x_max(A, f);
    if (dx <= 0) throw Error(Error::Code::domain, "build_profile: dx must be positive");

    switch (tag) {
        case StationaryCase::constant: {
            const double zeros[4] = {0.0, f.s1(), f.monostable() ? -1.0 : f.s2(), 1.0};
            bool is_zero = false;
            for (double z : zeros)
                if (z >= 0 && std::abs(target - z) < 1e-12) is_zero = true;
            if (!is_zero)
                throw Error(Error::Code::domain,
                            "build_profile: constant target must be a zero of f");
            StationaryProfile prof;
            prof.case_tag = tag;
            prof.C = first_integral_constant(target, A, f);
            prof.peak = target;
            prof.whole_line = true;
            for (int i = 0; i <= 10; ++i) {
                prof.x.push_back(-x_max + 2 * x_max * i / 10.0);
                prof.q.push_back(target);
                prof.p.push_back(0.0);
            }
            return prof;
        }

        case StationaryCase::ground_state: {
            const double th = theta_of(A, f);
            const double s1 = f.s1();
            // homoclinic level: gap(s) = -2 int_{s1}^{s} A' f, anchored at s1
            // so the tail keeps relative accuracy down to s - s1 ~ 1e-9
            // (gap(theta) ~ the theta root residual, consistently ~0)
            const GapFn gap = [&](double s) { return -energy_gap(A, f, s1, s); };
            HalfBranch right = march_down(A, gap, th, s1, true, dx, x_max);
            return assemble_even(tag, c_star(A, f), right, false);
        }

        case StationaryCase::compact_short: {
            if (!(target > 0 && target < f.s1()))
                throw Error(Error::Code::domain, "compact_short: peak must lie in (0, s1)");
            const GapFn gap = [&](double s) { return energy_gap(A, f, s, target); };
            HalfBranch right = march_down(A, gap, target, 0.0, false, dx, -1);
            return assemble_even(tag, first_integral_constant(target, A, f), right, true);
        }

        case StationaryCase::compact_high: {
            const double th = theta_of(A, f);
            if (!(target > th && target < 1))
                throw Error(Error::Code::domain, "compact_high: peak must lie in (theta, 1)");
            const GapFn gap = [&](double s) { return energy_gap(A, f, s, target); };
            HalfBranch right = march_down(A, gap, target, 0.0, false, dx, -1);
            return assemble_even(tag, first_integral_constant(target, A, f), right, true);
        }

        case StationaryCase::monotone_half: {
            const int sgn = target > 0 ? +1 : -1;
            const int family = std::abs(std::lround(target));
            if (family != 1 && family != 2)
                throw Error(Error::Code::domain, "monotone_half: target must be +-1 or +-2");
            const double asym = (family == 1) ? f.s1() : 1.0;
            // ascending branch from the edge q(0) = 0: p = +sqrt(gap),
            // gap(s) = 2 int_s^{asym} A' f > 0 below the asymptote
            const GapFn gap = [&](double s) { return energy_gap(A, f, s, asym); };
            StationaryProfile prof;
            prof.case_tag = tag;
            prof.C = (family == 1) ? c_star(A, f) : c_double_star(A, f);
            prof.peak = asym;
            prof.whole_line = true;
            std::vector<double> xs{0.0}, qs{0.0}, ps{std::sqrt(std::max(gap(0.0), 0.0))};
            double q = 0.0, x = 0.0;
            int guard = 0;
            while (++guard < 100000 && x < x_max && asym - q > 1e-9) {
                const double p = std::sqrt(std::max(gap(q), 0.0));
                double dq = dx * std::max(p, 1e-8) / std::max(A.dA(std::max(q, 1e-300)), 1e-12);
                dq = std::min(dq, 0.02 * asym);
                const double q_next = std::min(q + dq, asym - 0.4 * (asym - q));
                x += arc(A, gap, q, q_next);
                q = q_next;
                xs.push_back(x);
                qs.push_back(q);
                ps.push_back(std::sqrt(std::max(gap(q), 0.0)));
            }
            if (sgn > 0) {
                prof.x = xs;
                prof.q = qs;
                prof.p = ps;
            } else {
                for (std::size_t i = xs.size(); i-- > 0;) {
                    prof.x.push_back(-xs[i]);
                    prof.q.push_back(qs[i]);
                    prof.p.push_back(-ps[i]);
                }
            }
            return prof;
        }

        case StationaryCase::periodic: {
            if (f.monostable())
                throw Error(Error::Code::domain, "periodic: requires a multistable reaction");
            if (!(target > f.s1() && target < f.s2()))
                throw Error(Error::Code::domain, "periodic: min value must lie in (s1, s2)");
            const double th = theta_of(A, f);
            const double C = first_integral_constant(target, A, f);
            // upper turning point in (s2, theta): 2 int_{target}^{q_top} A'f = 0
            const double q_top = find_root(
                [&](double s) { return energy_gap(A, f, target, s); }, f.s2(), th,
                {.x_tol = 1e-13});

            const GapFn gap_top = [&](double s) { return energy_gap(A, f, s, q_top); };
            const GapFn gap_bot = [&](double s) { return -energy_gap(A, f, target, s); };

            const double delta_b = 0.01 * (q_top - target);
            HalfBranch down = march_down(A, gap_top, q_top, target + delta_b, false, dx, -1);
            // bottom turning cell (s = target + tau^2, bottom-anchored gap)
            const double bottom = turning_cell(A, gap_bot, target, delta_b, false);

            std::vector<double> xs = down.x, qs = down.q, ps = down.p;
            xs.push_back(xs.back() + bottom);
            qs.push_back(target);
            ps.push_back(0.0);

            StationaryProfile prof;
            prof.case_tag = tag;
            prof.C = C;
            prof.peak = target; // minimum value, per the type contract
            prof.whole_line = true;
            const double half = xs.back();
            prof.period = 2 * half;
            const std::size_t n = xs.size();
            for (std::size_t i = n; i-- > 0;) {
                prof.x.push_back(half - xs[i]);
                prof.q.push_back(qs[i]);
                prof.p.push_back(-ps[i]);
            }
            for (std::size_t i = 1; i < n; ++i) {
                prof.x.push_back(half + xs[i]);
                prof.q.push_back(qs[i]);
                prof.p.push_back(ps[i]);
            }
            return prof;
        }
    }
    throw Error(Error::Code::domain, "build_profile: unknown case");
}

double StationaryProfile::q_at(double xx) const {
    if (x.empty()) throw Error(Error::Code::domain, "StationaryProfile: empty");
    if (case_tag == StationaryCase::periodic && std::isfinite(period) && period > 0) {
        double t = std::fmod(xx - x.front(), period);
        if (t < 0) t += period;
        return interp_linear(x, q, x.front() + t);
    }
    if (case_tag == StationaryCase::compact_short || case_tag == StationaryCase::compact_high) {
        if (xx < x.front() || xx > x.back()) return 0.0;
    }
    return interp_linear(x, q, xx);
}

} // namespace degwave
