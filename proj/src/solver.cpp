#include "degwave/solver.hpp"

#include <algorithm>
#include <cmath>

namespace degwave {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Kernels {
    // fills Au[i] = A(u[i]) for i in [a, b]
    static void eval_A(const DiffusionSpec& A, const double* u, double* Au, int a, int b) {
        switch (A.kind()) {
            case DiffusionKind::power_law: {
                const double m = A.m();
                if (m == 2.0) {
                    for (int i = a; i <= b; ++i) Au[i] = u[i] * u[i];
                } else if (m == 3.0) {
                    for (int i = a; i <= b; ++i) Au[i] = u[i] * u[i] * u[i];
                } else {
                    for (int i = a; i <= b; ++i) Au[i] = u[i] > 0 ? std::pow(u[i], m) : 0.0;
                }
                return;
            }
            case DiffusionKind::custom:
                for (int i = a; i <= b; ++i) Au[i] = u[i] > 0 ? A.A(u[i]) : 0.0;
                return;
        }
    }

    static void add_reaction(const ReactionSpec& f, const double* u, double* out, int a, int b,
                             double dt) {
        switch (f.kind()) {
            case ReactionKind::quartic_product: {
                const double K = f.K(), s1 = f.s1(), s2 = f.s2();
                for (int i = a; i <= b; ++i) {
                    const double q = u[i];
                    out[i] += dt * K * q * (q - s1) * (q - s2) * (1.0 - q);
                }
                return;
            }
            case ReactionKind::monostable_logistic: {
                const double k = f.K(), s1 = f.s1();
                for (int i = a; i <= b; ++i) out[i] += dt * k * u[i] * (s1 - u[i]);
                return;
            }
            case ReactionKind::custom:
                for (int i = a; i <= b; ++i) out[i] += dt * f.f(u[i]);
                return;
        }
    }
};

double max_abs_fprime(const ReactionSpec& f, double u_cap) {
    double m = 0;
    for (int i = 0; i <= 512; ++i) m = std::max(m, std::abs(f.df(u_cap * i / 512.0)));
    return m;
}

} // namespace

double InitialDataSpec::eval(double x) const {
    switch (shape) {
        case Shape::constant: return level;
        case Shape::custom: return custom ? custom(x) : 0.0;
        default: break;
    }
    const double a = std::abs(x);
    if (a >= b) return 0.0;
    switch (shape) {
        case Shape::cos2: {
            const double c = std::cos(kPi * x / (2.0 * b));
            return sigma * c * c;
        }
        case Shape::tent: return sigma * (1.0 - a / b);
        case Shape::plateau: return sigma * std::min(1.0, (b - a) / (0.1 * b));
        case Shape::power_edge: {
            const double w = 1.0 - (x / b) * (x / b);
            return sigma * std::pow(w, p);
        }
        default: return 0.0;
    }
}

SolutionState init(const InitialDataSpec& u0, const Grid1D& grid,
                   std::shared_ptr<const PressureMaps> maps) {
    if (grid.dx <= 0 || grid.x_max <= grid.x_min)
        throw Error(Error::Code::domain, "init: bad grid");
    SolutionState s;
    s.maps = std::move(maps);
    s.dx = grid.dx;
    s.x0 = grid.x_min;
    s.buffer_cells = grid.buffer_cells;
    const int n = int(std::lround((grid.x_max - grid.x_min) / grid.dx)) + 1;
    s.u.resize(n);
    s.whole_line = (u0.shape == InitialDataSpec::Shape::constant) || u0.whole_line;
    for (int i = 0; i < n; ++i) {
        const double val = u0.eval(s.x_of(i));
        if (val < 0)
            throw Error(Error::Code::domain, "init: initial data must be nonnegative");
        s.u[i] = val;
    }
    if (!s.whole_line) {
        // single support component check
        int first = -1, last = -1, components = 0;
        bool inside = false;
        for (int i = 0; i < n; ++i) {
            if (s.u[i] > 0 && !inside) {
                ++components;
                inside = true;
                if (first < 0) first = i;
            }
            if (s.u[i] <= 0) inside = false;
            if (s.u[i] > 0) last = i;
        }
        if (components == 0)
            s.l = s.r = 0; // identically zero state
        else if (components > 1)
            throw Error(Error::Code::domain,
                        "init: initial data must have a single support interval");
        else {
            if (first <= grid.buffer_cells || last >= n - 1 - grid.buffer_cells)
                throw Error(Error::Code::grid, "init: support too close to the grid ends");
            s.l = (u0.shape == InitialDataSpec::Shape::custom) ? s.x_of(first) - 0.5 * s.dx
                                                               : -u0.b;
            s.r = (u0.shape == InitialDataSpec::Shape::custom) ? s.x_of(last) + 0.5 * s.dx
                                                               : u0.b;
            for (int i = first; i < std::min(first + 3, n); ++i)
                s.edge_scale_l = std::max(s.edge_scale_l, s.u[i]);
            for (int i = last; i > std::max(last - 3, -1); --i)
                s.edge_scale_r = std::max(s.edge_scale_r, s.u[i]);
        }
    }
    return s;
}

double SolutionState::u_at(double x) const {
    const double pos = (x - x0) / dx;
    if (pos <= 0) return u.front();
    if (pos >= n() - 1) return u.back();
    const int i = int(pos);
    const double t = pos - i;
    return u[i] + t * (u[i + 1] - u[i]);
}

double SolutionState::v_at(double x) const { return maps->Lambda(std::max(u_at(x), 0.0)); }

std::vector<double> SolutionState::v_array() const {
    std::vector<double> v(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) v[i] = maps->Lambda(std::max(u[i], 0.0));
    return v;
}

std::pair<int, int> SolutionState::support_cells(double floor) const {
    int lo = -1, hi = -2;
    for (int i = 0; i < n(); ++i) {
        if (u[i] > floor) {
            if (lo < 0) lo = i;
            hi = i;
        }
    }
    return {lo, hi};
}

namespace {

// Front geometry. The explicit scheme smears a few geometrically small
// cells ahead of the interface, so measurements anchor on pressure levels:
// a deep anchor (a fixed fraction of the profile scale) provides the local
// slope s0, a shallow anchor at ~6 s0 dx marks the last trustworthy cells,
// and the interface position/slope are extrapolated from there (position via
// the local linear law, slope via the one-sided 3-point quadratic evaluated
// at the interface).
double front_v_threshold(const SolutionState& s, double u_max) {
    const double v_max = s.maps->Lambda(std::max(u_max, 0.0));
    return std::min(0.05 * s.maps->phi_hat(1), 0.3 * v_max);
}

// Interface position: outermost cell above the creep floor plus the sub-cell
// zero crossing of v along the local slope (clamped to one cell). The creep
// floor excludes the geometrically vanishing crumb cells the explicit scheme
// sheds ahead of the interface.
double front_position(const SolutionState& s, bool right, double u_max) {
    const double edge_scale = right ? s.edge_scale_r : s.edge_scale_l;
    const double floor =
        std::max(1e-12 * std::max(u_max, 1e-300), 0.02 * edge_scale);
    const auto [lo, hi] = s.support_cells(floor);
    if (lo < 0) return right ? s.r : s.l;
    const int k = right ? hi : lo;
    const int in = right ? -1 : +1;
    if (k + in < 0 || k + in >= s.n()) return right ? s.r : s.l;
    const double vk = s.maps->Lambda(std::max(s.u[k], 0.0));
    const double vin = s.maps->Lambda(std::max(s.u[k + in], 0.0));
    const double slope = std::max((vin - vk) / s.dx, vk / s.dx);
    const double off = slope > 0 ? std::min(vk / slope, s.dx) : 0.5 * s.dx;
    return s.x_of(k) + (right ? off : -off);
}

double front_position_right(const SolutionState& s, double u_max) {
    return front_position(s, true, u_max);
}

double front_position_left(const SolutionState& s, double u_max) {
    return front_position(s, false, u_max);
}

// One-sided v_x at the interface. A deep pressure anchor (fixed fraction of
// the profile scale) provides the local slope s0; the stencil then sits at
// the last cells above ~6 s0 dx, inside the Darcy-linear zone but clear of
// the interface smearing, and the one-sided 3-point quadratic is
// differentiated at the interface position itself, keeping the bias O(dx^2).
double vx_one_sided(const SolutionState& s, bool right) {
    const auto [lo, hi] = s.support_cells(0.0);
    if (lo < 0 || hi - lo + 1 < 4) throw Error(Error::Code::grid, "FrontTooThin");
    double u_max = 0;
    for (int i = lo; i <= hi; ++i) u_max = std::max(u_max, s.u[i]);
    const int dir = right ? -1 : +1; // inward step
    const int end = right ? hi : lo;
    const int inner = right ? lo : hi;
    auto V = [&](int i) { return s.maps->Lambda(std::max(s.u[i], 0.0)); };

    const double vth = front_v_threshold(s, u_max);
    int k0 = end;
    while (k0 != inner && V(k0) < vth) k0 += dir;
    if (k0 == inner) throw Error(Error::Code::grid, "FrontTooThin");
    const double s0 = std::abs(V(k0 + dir) - V(k0)) / s.dx;
    if (!(s0 > 0)) throw Error(Error::Code::grid, "FrontTooThin");

    const double shallow = 6.0 * s0 * s.dx;
    int K = end;
    while (K != k0 && V(K) < shallow) K += dir;
    if (std::abs(K - inner) < 2) throw Error(Error::Code::grid, "FrontTooThin");

    const double pos = front_position(s, right, u_max);
    const double v0 = V(K), v1 = V(K + dir), v2 = V(K + 2 * dir);
    const double t = (pos - s.x_of(K + dir)) / s.dx; // cells from the middle node
    const double d1 = (v0 - v2) * (right ? 1.0 : -1.0) / (2 * s.dx);
    const double d2 = (v0 - 2 * v1 + v2) / (s.dx * s.dx);
    return d1 + t * d2 * s.dx;
}

double vx_right(const SolutionState& s) { return vx_one_sided(s, true); }
double vx_left(const SolutionState& s) { return vx_one_sided(s, false); }

// least-squares front speed over the last few records plus the given point
// (the window smooths the sub-cell jitter of the interface measure)
double smoothed_speed(const std::vector<FrontRecord>& h, double t_now, double pos_now,
                      bool right) {
    std::vector<double> ts{t_now}, ps{pos_now};
    for (std::size_t i = h.size(); i-- > 0 && ts.size() < 8;) {
        ts.push_back(h[i].t);
        ps.push_back(right ? h[i].r : h[i].l);
    }
    if (ts.size() < 2) return 0.0;
    return fit_line(ts, ps).slope;
}

struct StepScratch {
    std::vector<double> Au, un;
    double fprime_max = -1, fprime_cap = -1;
    const void* f_key = nullptr;
};

StepScratch& scratch_for(const SolutionState& s) {
    thread_local StepScratch sc;
    if (sc.Au.size() < s.u.size()) {
        sc.Au.resize(s.u.size());
        sc.un.resize(s.u.size());
    }
    if (sc.f_key != static_cast<const void*>(s.maps.get())) {
        sc.f_key = s.maps.get();
        sc.fprime_max = sc.fprime_cap = -1;
    }
    return sc;
}

void extend_grid(SolutionState& s, bool left, long max_cells) {
    const int chunk = std::max(256, s.n() / 4);
    if (long(s.u.size()) + chunk > max_cells)
        throw Error(Error::Code::grid, "GridExhausted: support outgrew the cell budget");
    if (left) {
        s.u.insert(s.u.begin(), chunk, 0.0);
        s.x0 -= chunk * s.dx;
    } else {
        s.u.insert(s.u.end(), chunk, 0.0);
    }
}

} // namespace

double step(SolutionState& s, const RunParams& p, double dt_cap) {
    auto& sc = scratch_for(s);
    const int n = s.n();
    const DiffusionSpec& A = s.maps->diffusion();
    const ReactionSpec& f = s.maps->reaction();

    int lo, hi;
    if (s.cache_lo >= 0 && s.cache_hi >= s.cache_lo) {
        lo = s.cache_lo;
        hi = s.cache_hi;
    } else {
        std::tie(lo, hi) = s.support_cells(0.0);
    }
    double u_max = 0;
    if (s.whole_line) {
        lo = 0;
        hi = n - 1;
        for (int i = 0; i < n; ++i) u_max = std::max(u_max, s.u[i]);
    } else {
        if (lo < 0) { // identically zero: nothing to do
            s.t += dt_cap;
            return dt_cap;
        }
        for (int i = lo; i <= hi; ++i) u_max = std::max(u_max, s.u[i]);
        if (lo <= s.buffer_cells) {
            extend_grid(s, true, p.max_cells);
            const int chunk = s.n() - n;
            lo += chunk;
            hi += chunk;
            if (sc.Au.size() < s.u.size()) {
                sc.Au.resize(s.u.size());
                sc.un.resize(s.u.size());
            }
        }
        if (hi >= s.n() - 1 - s.buffer_cells) {
            extend_grid(s, false, p.max_cells);
            if (sc.Au.size() < s.u.size()) {
                sc.Au.resize(s.u.size());
                sc.un.resize(s.u.size());
            }
        }
    }
    const int nn = s.n();

    // CFL bound: dt (A'max/dx^2 + |beta|/(2 dx)) <= dt_safety keeps the
    // update monotone (coefficient of u_i stays nonnegative).
    const double apmax = std::max(A.dA(u_max), 1e-300);
    double dt = p.dt_safety / (apmax / (s.dx * s.dx) + 0.5 * std::abs(p.beta) / s.dx);
    if (p.reaction_on) {
        // refresh the cached |f'| bound when the state leaves the cached
        // range in either direction (a stale high cap from a previous tall
        // run would throttle dt far below the actual stability bound)
        if (sc.fprime_max < 0 || u_max > sc.fprime_cap ||
            sc.fprime_cap > 3.0 * std::max(1.0, u_max)) {
            sc.fprime_cap = 1.5 * std::max(1.0, u_max);
            sc.fprime_max = max_abs_fprime(f, sc.fprime_cap);
        }
        dt = std::min(dt, p.react_safety / std::max(sc.fprime_max, 1e-300));
    }
    if (p.fixed_dt > 0) {
        if (p.fixed_dt > dt * (1.0 + 1e-9))
            throw Error(Error::Code::cfl,
                        "CflViolation: fixed dt " + std::to_string(p.fixed_dt) +
                            " exceeds the stability bound " + std::to_string(dt));
        dt = p.fixed_dt;
    }
    dt = std::min(dt, dt_cap);

    // update window (support can expand one cell per step)
    int a = s.whole_line ? 0 : std::max(1, lo - 1);
    int b = s.whole_line ? nn - 1 : std::min(nn - 2, hi + 1);

    double* u = s.u.data();
    double* Au = sc.Au.data();
    double* un = sc.un.data();

    const int ea = std::max(0, a - 1), eb = std::min(nn - 1, b + 1);
    Kernels::eval_A(A, u, Au, ea, eb);

    const double rA = dt / (s.dx * s.dx);
    if (s.whole_line) {
        // zero-flux ends (copy-edge): exact for constant data
        for (int i = a; i <= b; ++i) {
            const double Al = Au[std::max(i - 1, 0)];
            const double Ar = Au[std::min(i + 1, nn - 1)];
            un[i] = u[i] + rA * (Ar - 2 * Au[i] + Al);
        }
    } else {
        for (int i = a; i <= b; ++i)
            un[i] = u[i] + rA * (Au[i + 1] - 2 * Au[i] + Au[i - 1]);
    }
    if (p.beta != 0.0) {
        const double adv = p.beta * dt / s.dx;
        if (p.beta > 0) {
            for (int i = a; i <= b; ++i) un[i] -= adv * (u[i] - u[std::max(i - 1, 0)]);
        } else {
            for (int i = a; i <= b; ++i) un[i] -= adv * (u[std::min(i + 1, nn - 1)] - u[i]);
        }
    }
    if (p.reaction_on) Kernels::add_reaction(f, u, un, a, b, dt);

    double clamped = 0;
    int new_lo = -1, new_hi = -2;
    for (int i = a; i <= b; ++i) {
        if (un[i] < 0) {
            clamped -= un[i];
            un[i] = 0;
        }
        u[i] = un[i];
        if (un[i] > 0) {
            if (new_lo < 0) new_lo = i;
            new_hi = i;
        }
    }
    if (!s.whole_line) {
        s.cache_lo = new_lo;
        s.cache_hi = new_hi;
    }
    if (clamped > 0) {
        s.clamp_mass += clamped * s.dx;
        double mass = 0;
        for (int i = a; i <= b; ++i) mass += u[i];
        mass *= s.dx;
        if (s.clamp_mass > 1e-6 * std::max(mass, 1e-300))
            throw Error(Error::Code::step_failure,
                        "NegativeUndershoot: cumulative clamp mass exceeded tolerance");
    }
    s.t += dt;
    return dt;
}

void run(SolutionState& s, const RunParams& p) {
    const double t_end = p.T;
    double u_max0 = 0;
    for (double x : s.u) u_max0 = std::max(u_max0, x);

    auto record = [&]() {
        FrontRecord rec;
        rec.t = s.t;
        double u_max = 0;
        for (double x : s.u) u_max = std::max(u_max, x);
        if (!s.whole_line && u_max > 0) {
            rec.r = front_position_right(s, u_max);
            rec.l = front_position_left(s, u_max);
        } else {
            rec.r = s.r;
            rec.l = s.l;
        }
        if (!s.history.empty()) {
            rec.rp = smoothed_speed(s.history, rec.t, rec.r, true);
            rec.lp = smoothed_speed(s.history, rec.t, rec.l, false);
            const FrontRecord& first_rec = s.history.front();
            rec.moved_r = std::abs(rec.r - first_rec.r) > 0.5 * s.dx;
            rec.moved_l = std::abs(rec.l - first_rec.l) > 0.5 * s.dx;
            if (!s.whole_line && u_max > 0) {
                try {
                    rec.darcy_r = std::abs(rec.rp + vx_right(s));
                    rec.darcy_l = std::abs(rec.lp + vx_left(s));
                } catch (const Error&) {
                    rec.darcy_r = rec.darcy_l = std::numeric_limits<double>::quiet_NaN();
                }
            }
        }
        s.l = rec.l;
        s.r = rec.r;
        s.history.push_back(rec);
        if (p.on_frame) p.on_frame(s);
    };

    if (s.history.empty()) record();

    while (s.t < t_end - 1e-12) {
        const double next_out = std::min(t_end, s.history.back().t + p.dt_out);
        int guard = 0;
        while (s.t < next_out - 1e-12) {
            step(s, p, next_out - s.t);
            if (++guard > 500000000)
                throw Error(Error::Code::step_failure, "run: step budget exhausted");
        }
        record();
    }
}

void run_moving_frame(SolutionState& s, double beta, double T, const RunParams& base) {
    RunParams p = base;
    p.beta = beta;
    p.T = T;
    run(s, p);
}

std::pair<double, double> waiting_time(const std::vector<FrontRecord>& history, double dx) {
    (void)dx;
    const double inf = std::numeric_limits<double>::infinity();
    double tl = inf, tr = inf;
    for (const auto& rec : history) {
        if (rec.moved_r && tr == inf) tr = rec.t;
        if (rec.moved_l && tl == inf) tl = rec.t;
    }
    // motion within the first output interval counts as no waiting time
    if (!history.empty()) {
        const double t1 = history.size() > 1 ? history[1].t : history[0].t;
        if (tr <= t1) tr = 0;
        if (tl <= t1) tl = 0;
    }
    return {tl, tr};
}

std::pair<double, double> darcy_residual(const SolutionState& s) {
    if (s.history.size() < 2)
        throw Error(Error::Code::window, "darcy_residual: need at least two recorded frames");
    const auto& h = s.history;
    const double rp = smoothed_speed({h.begin(), h.end() - 1}, h.back().t, h.back().r, true);
    const double lp = smoothed_speed({h.begin(), h.end() - 1}, h.back().t, h.back().l, false);
    return {std::abs(lp + vx_left(s)), std::abs(rp + vx_right(s))};
}

} // namespace degwave
