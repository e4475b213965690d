#include "degwave/numerics.hpp"

#include <algorithm>
#include <limits>

namespace degwave {

namespace {

// Gauss-Kronrod 7-15 nodes and weights (positive half, QUADPACK values).
constexpr double gk_x[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
constexpr double gk_wk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
constexpr double gk_wg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

struct PanelResult {
    double kronrod;
    double err;
};

PanelResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fc = f(c);
    double kron = gk_wk[7] * fc;
    double gauss = gk_wg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        const double dx = h * gk_x[i];
        const double fsum = f(c - dx) + f(c + dx);
        kron += gk_wk[i] * fsum;
        if (i % 2 == 1) gauss += gk_wg[i / 2] * fsum;
    }
    kron *= h;
    gauss *= h;
    return {kron, std::abs(kron - gauss)};
}

double integrate_rec(const std::function<double(double)>& f, double a, double b,
                     const PanelResult& whole, double tol, int depth, int max_depth) {
    if (whole.err <= tol || depth >= max_depth) {
        if (depth >= max_depth && whole.err > 64 * tol)
            throw Error(Error::Code::quadrature, "adaptive quadrature failed to converge");
        return whole.kronrod;
    }
    const double m = 0.5 * (a + b);
    const PanelResult left = gk15(f, a, m);
    const PanelResult right = gk15(f, m, b);
    return integrate_rec(f, a, m, left, 0.5 * tol, depth + 1, max_depth) +
           integrate_rec(f, m, b, right, 0.5 * tol, depth + 1, max_depth);
}

} // namespace

double integrate(const std::function<double(double)>& f, double a, double b,
                 const QuadratureOptions& opts) {
    if (a == b) return 0.0;
    const PanelResult whole = gk15(f, a, b);
    const double tol = std::max(opts.abs_tol, opts.rel_tol * std::abs(whole.kronrod));
    return integrate_rec(f, a, b, whole, tol, 0, opts.max_depth);
}

double find_root(const std::function<double(double)>& f, double a, double b,
                 const RootOptions& opts) {
    double fa = f(a), fb = f(b);
    if (fa == 0) return a;
    if (fb == 0) return b;
    if ((fa > 0) == (fb > 0))
        throw Error(Error::Code::bracket, "find_root: endpoints do not bracket a sign change");

    // Brent's method.
    double c = a, fc = fa, d = b - a, e = d;
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        if ((fb > 0) == (fc > 0)) {
            c = a; fc = fa; d = b - a; e = d;
        }
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol1 = 2.0 * std::numeric_limits<double>::epsilon() * std::abs(b) + 0.5 * opts.x_tol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol1 || fb == 0.0 || std::abs(fb) <= opts.f_tol) return b;
        if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
            double p, q, r;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                q = fa / fc;
                r = fb / fc;
                p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
                q = (q - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
                e = d; d = p / q;
            } else {
                d = xm; e = d;
            }
        } else {
            d = xm; e = d;
        }
        a = b; fa = fb;
        b += (std::abs(d) > tol1) ? d : (xm > 0 ? tol1 : -tol1);
        fb = f(b);
    }
    return b;
}

std::pair<double, double> bisect_predicate(const std::function<bool(double)>& pred,
                                           double lo, double hi, double x_tol, int max_iter) {
    bool plo = pred(lo), phi = pred(hi);
    if (plo == phi)
        throw Error(Error::Code::bracket, "bisect_predicate: predicate equal at both ends");
    for (int i = 0; i < max_iter && std::abs(hi - lo) > x_tol; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (pred(mid) == plo)
            lo = mid;
        else
            hi = mid;
    }
    return {lo, hi};
}

// ---------------------------------------------------------------------------
// Dormand-Prince 5(4).

namespace {

constexpr double dp_c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double dp_a[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
constexpr double dp_b5[7] = {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0.0};
constexpr double dp_b4[7] = {5179.0 / 57600, 0.0,        7571.0 / 16695, 393.0 / 640,
                             -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

template <int N>
void dp_step(const OdeField<N>& field, double t, const std::array<double, N>& y, double h,
             std::array<double, N>& y5, double& err_norm, double rel_tol, double abs_tol) {
    std::array<std::array<double, N>, 7> k;
    std::array<double, N> tmp;
    field(t, y, k[0]);
    for (int s = 1; s < 7; ++s) {
        for (int i = 0; i < N; ++i) {
            double acc = 0;
            for (int j = 0; j < s; ++j) acc += dp_a[s][j] * k[j][i];
            tmp[i] = y[i] + h * acc;
        }
        field(t + dp_c[s] * h, tmp, k[s]);
    }
    err_norm = 0;
    for (int i = 0; i < N; ++i) {
        double acc5 = 0, acc4 = 0;
        for (int s = 0; s < 7; ++s) {
            acc5 += dp_b5[s] * k[s][i];
            acc4 += dp_b4[s] * k[s][i];
        }
        y5[i] = y[i] + h * acc5;
        const double sc = abs_tol + rel_tol * std::max(std::abs(y[i]), std::abs(y5[i]));
        const double e = h * (acc5 - acc4) / sc;
        err_norm += e * e;
    }
    err_norm = std::sqrt(err_norm / N);
}

} // namespace

template <int N>
OdeResult<N> integrate_ode(const OdeField<N>& field, double t0, const std::array<double, N>& y0,
                           const OdeOptions& opts, const OdeWatch<N>& watch,
                           const std::function<double(const std::array<double, N>&)>& event) {
    OdeResult<N> res;
    res.t = t0;
    res.y = y0;
    double h = opts.h_init;
    double ev_prev = event ? event(y0) : 0.0;

    for (long step = 0; step < opts.max_steps; ++step) {
        std::array<double, N> y_new;
        double err;
        dp_step<N>(field, res.t, res.y, h, y_new, err, opts.rel_tol, opts.abs_tol);
        if (err > 1.0) {
            h = std::max(opts.h_min, h * std::max(0.2, 0.9 * std::pow(err, -0.25)));
            if (h <= opts.h_min) {
                res.step_underflow = true;
                return res;
            }
            continue;
        }

        if (event) {
            const double ev_new = event(y_new);
            if (ev_prev != 0.0 && ((ev_prev > 0) != (ev_new > 0))) {
                // Locate the crossing inside the step with single RK5 substeps.
                double slo = 0.0, shi = h;
                std::array<double, N> y_hit = y_new;
                for (int it = 0; it < 60 && (shi - slo) > 1e-15 * std::max(1.0, h); ++it) {
                    const double sm = 0.5 * (slo + shi);
                    std::array<double, N> ym;
                    double e2;
                    dp_step<N>(field, res.t, res.y, sm, ym, e2, opts.rel_tol, opts.abs_tol);
                    if ((event(ym) > 0) == (ev_prev > 0)) {
                        slo = sm;
                    } else {
                        shi = sm;
                        y_hit = ym;
                    }
                }
                res.t += shi;
                res.y = y_hit;
                res.n_steps = step + 1;
                res.event_hit = true;
                if (watch) watch(res.t, res.y);
                return res;
            }
            ev_prev = ev_new;
        }

        res.t += h;
        res.y = y_new;
        res.n_steps = step + 1;
        if (watch && watch(res.t, res.y) == StepDecision::stop) return res;

        const double fac = (err > 0) ? 0.9 * std::pow(err, -0.2) : 5.0;
        h = std::min(opts.h_max, h * std::clamp(fac, 0.2, 5.0));
    }
    res.budget_exhausted = true;
    return res;
}

template OdeResult<2> integrate_ode<2>(const OdeField<2>&, double, const std::array<double, 2>&,
                                       const OdeOptions&, const OdeWatch<2>&,
                                       const std::function<double(const std::array<double, 2>&)>&);
template OdeResult<3> integrate_ode<3>(const OdeField<3>&, double, const std::array<double, 3>&,
                                       const OdeOptions&, const OdeWatch<3>&,
                                       const std::function<double(const std::array<double, 3>&)>&);

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
    LineFit fit;
    fit.n = x.size();
    if (x.size() != y.size() || x.size() < 2)
        throw Error(Error::Code::window, "fit_line: need at least two samples");
    double sx = 0, sy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / x.size(), my = sy / y.size();
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0) throw Error(Error::Code::window, "fit_line: degenerate abscissae");
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = y[i] - (fit.slope * x[i] + fit.intercept);
        ss += d * d;
        fit.max_abs_dev = std::max(fit.max_abs_dev, std::abs(d));
    }
    fit.residual_rms = std::sqrt(ss / x.size());
    return fit;
}

double interp_linear(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
    if (xs.empty()) throw Error(Error::Code::domain, "interp_linear: empty table");
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t i = std::size_t(it - xs.begin());
    const double t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    return ys[i - 1] + t * (ys[i] - ys[i - 1]);
}

} // namespace degwave
