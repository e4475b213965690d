#include "degwave/nonlinearity.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace degwave {

namespace {

// Lower edge of the pressure-integral split: on [0, eps] the integrand
// A'(r)/r is replaced by its power-law model C r^{a*-1}, whose integral is
// A'(eps)/a*. Exact for pure power laws.
constexpr double kSplitEps = 1e-6;

double lambda_quadrature_from(const DiffusionSpec& A, double u_from, double v_from, double u_to) {
    // Lambda(u_to) given Lambda(u_from); log substitution keeps the integrand
    // smooth on geometric intervals.
    if (u_to == u_from) return v_from;
    const double s0 = std::log(u_from), s1 = std::log(u_to);
    const double inc = integrate([&A](double s) { return A.dA(std::exp(s)); }, s0, s1);
    return v_from + inc;
}

double lambda_quadrature(const DiffusionSpec& A, double u) {
    if (u <= 0) return 0.0;
    if (u <= kSplitEps) return A.dA(u) / A.a_star();
    const double head = A.dA(kSplitEps) / A.a_star();
    return lambda_quadrature_from(A, kSplitEps, head, u);
}

// Inverse of the [0, eps] model Lambda(u) = A'(u)/a*: monotone bisection on
// A'(u) = a* v plus one Newton step.
double model_inverse(const DiffusionSpec& A, double v) {
    const double target = A.a_star() * v;
    double lo = 0.0, hi = kSplitEps;
    for (int i = 0; i < 100 && (hi - lo) > 1e-18 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (A.dA(mid) < target ? lo : hi) = mid;
    }
    double u = 0.5 * (lo + hi);
    const double d2 = A.ddA(u);
    if (d2 > 0 && std::isfinite(d2)) u -= (A.dA(u) - target) / d2;
    return std::clamp(u, 0.0, kSplitEps);
}

double aitken(double g1, double g2, double g3) {
    const double den = g1 - 2 * g2 + g3;
    if (std::abs(den) < 1e-14 * (std::abs(g1) + std::abs(g3))) return g3;
    return (g1 * g3 - g2 * g2) / den;
}

double estimate_a_star(const std::function<double(double)>& dA,
                       const std::function<double(double)>& ddA) {
    const auto ratio = [&](double r) { return r * ddA(r) / dA(r); };
    return aitken(ratio(1e-6), ratio(1e-7), ratio(1e-8));
}

} // namespace

// ---------------------------------------------------------------------------
// DiffusionSpec

DiffusionSpec DiffusionSpec::power_law(double m) {
    if (!(m > 1.0))
        throw Error(Error::Code::domain, "diffusion: m must exceed 1 (degeneracy requires A'(0)=0)");
    DiffusionSpec d;
    d.kind_ = DiffusionKind::power_law;
    d.m_ = m;
    d.a_star_ = m - 1.0;
    d.name_ = "power";
    if (m == 2.0) {
        d.A_ = [](double u) { return u * u; };
        d.dA_ = [](double u) { return 2.0 * u; };
        d.ddA_ = [](double) { return 2.0; };
    } else if (m == 3.0) {
        d.A_ = [](double u) { return u * u * u; };
        d.dA_ = [](double u) { return 3.0 * u * u; };
        d.ddA_ = [](double u) { return 6.0 * u; };
    } else {
        d.A_ = [m](double u) { return std::pow(u, m); };
        d.dA_ = [m](double u) { return m * std::pow(u, m - 1.0); };
        d.ddA_ = [m](double u) { return m * (m - 1.0) * std::pow(u, m - 2.0); };
    }
    return d;
}

DiffusionSpec DiffusionSpec::builtin(const std::string& name) {
    DiffusionSpec d;
    d.kind_ = DiffusionKind::custom;
    d.m_ = std::numeric_limits<double>::quiet_NaN();
    d.name_ = name;
    if (name == "u32_plus_u2") {
        d.A_ = [](double u) { return std::pow(u, 1.5) + u * u; };
        d.dA_ = [](double u) { return 1.5 * std::sqrt(u) + 2.0 * u; };
        d.ddA_ = [](double u) { return 0.75 / std::sqrt(u) + 2.0; };
    } else if (name == "u2_log1p") {
        d.A_ = [](double u) { return u * u * std::log1p(u); };
        d.dA_ = [](double u) { return 2.0 * u * std::log1p(u) + u * u / (1.0 + u); };
        d.ddA_ = [](double u) {
            return 2.0 * std::log1p(u) + 2.0 * u / (1.0 + u) + (u * u + 2.0 * u) / ((1.0 + u) * (1.0 + u));
        };
    } else {
        throw Error(Error::Code::domain, "diffusion: unknown custom builtin '" + name + "'");
    }
    d.a_star_ = estimate_a_star(d.dA_, d.ddA_);
    return d;
}

// ---------------------------------------------------------------------------
// ReactionSpec

ReactionSpec ReactionSpec::quartic(double K, double s1, double s2) {
    if (!(K > 0))
        throw Error(Error::Code::domain, "reaction: K must be positive");
    if (!(0 < s1 && s1 < s2 && s2 < 1))
        throw Error(Error::Code::domain, "reaction: zeros must satisfy 0 < s1 < s2 < 1");
    ReactionSpec r;
    r.kind_ = ReactionKind::quartic_product;
    r.K_ = K;
    r.s1_ = s1;
    r.s2_ = s2;
    r.f_ = [K, s1, s2](double u) { return K * u * (u - s1) * (u - s2) * (1.0 - u); };
    r.df_ = [K, s1, s2](double u) {
        // product rule over the four factors
        const double a = u, b = u - s1, c = u - s2, d = 1.0 - u;
        return K * (b * c * d + a * c * d + a * b * d - a * b * c);
    };
    return r;
}

ReactionSpec ReactionSpec::monostable_logistic(double k, double s1) {
    if (!(k > 0) || !(s1 > 0))
        throw Error(Error::Code::domain, "reaction: logistic parameters must be positive");
    ReactionSpec r;
    r.kind_ = ReactionKind::monostable_logistic;
    r.K_ = k;
    r.s1_ = s1;
    r.s2_ = std::numeric_limits<double>::quiet_NaN();
    r.f_ = [k, s1](double u) { return k * u * (s1 - u); };
    r.df_ = [k, s1](double u) { return k * (s1 - 2.0 * u); };
    return r;
}

double ReactionSpec::s2() const {
    if (monostable())
        throw Error(Error::Code::domain, "reaction: s2 undefined in monostable test mode");
    return s2_;
}

double theta_of(const DiffusionSpec& A, const ReactionSpec& f) {
    if (f.monostable())
        throw Error(Error::Code::domain, "theta undefined in monostable test mode");
    const double s1 = f.s1(), s2 = f.s2();
    const auto G = [&](double th) {
        return integrate([&](double r) { return A.dA(r) * f.f(r); }, s1, th);
    };
    const double G1 = G(1.0);
    if (!(G1 > 0))
        throw Error(Error::Code::bracket,
                    "ThetaNotFound: integral condition fails, \\int_{s1}^{1} A' f <= 0");
    // G is negative at s2 (f < 0 on (s1,s2)) and positive at 1.
    return find_root([&](double th) { return G(th); }, s2, 1.0, {.x_tol = 1e-12});
}

// ---------------------------------------------------------------------------
// Validation

std::string ValidationReport::summary() const {
    std::ostringstream os;
    for (const auto& it : items)
        os << (it.pass ? "  [ok]   " : "  [FAIL] ") << it.name << " = " << it.measured
           << (it.detail.empty() ? "" : "  (" + it.detail + ")") << "\n";
    return os.str();
}

ValidationReport validate_diffusion(const DiffusionSpec& A, double tol, double u_max) {
    ValidationReport rep;
    auto push = [&rep](const std::string& n, bool ok, double v, const std::string& d = "") {
        rep.items.push_back({n, ok, v, d});
    };

    push("A(0)", std::abs(A.A(0.0)) <= tol, A.A(0.0));
    const double dA0 = A.dA(0.0);
    push("A'(0)", std::abs(dA0) <= tol, dA0,
         std::abs(dA0) <= tol ? "" : "NonDegenerate");

    // positivity of A, A', A'' on a log-spaced grid
    bool positive = true;
    double worst = 1.0;
    const int n_samples = 200;
    for (int k = 0; k <= n_samples; ++k) {
        const double u = u_max * std::pow(1e-10, 1.0 - double(k) / n_samples);
        const double vals[3] = {A.A(u), A.dA(u), A.ddA(u)};
        for (double v : vals) {
            if (!(v > 0)) positive = false;
            worst = std::min(worst, v);
        }
    }
    push("A,A',A'' > 0 on (0,u_max]", positive, worst, positive ? "" : "NonMonotone");

    // pressure integral converges: the per-decade increments of the
    // quadrature on [delta, 1] must decay geometrically (a divergent 1/r-type
    // tail contributes a constant ~ln 10 per decade instead)
    const double p1 = lambda_quadrature_from(A, 1e-8, 0.0, 1.0);
    const double p2 = lambda_quadrature_from(A, 1e-10, 0.0, 1.0);
    const double p3 = lambda_quadrature_from(A, 1e-12, 0.0, 1.0);
    const double inc1 = p2 - p1, inc2 = p3 - p2;
    const bool conv = inc1 >= -1e-14 && inc2 < 0.8 * inc1 + 1e-12 * (1 + std::abs(p3));
    push("int_0^1 A'(r)/r dr finite", conv, p3, conv ? "" : "DivergentPressureIntegral");

    // a_star from the tabulated ratio r A''/A' on r = 10^{-k}
    const auto ratio = [&A](double r) { return r * A.ddA(r) / A.dA(r); };
    const double g7 = ratio(1e-7), g8 = ratio(1e-8);
    const double a_star = A.a_star();
    const bool stable = std::abs(g8 - a_star) <= 1e-3 * std::max(1.0, std::abs(a_star)) &&
                        std::abs(g8 - g7) <= 0.05 * std::max(1.0, std::abs(a_star)) && a_star > 0;
    push("r A''/A' -> a_star > 0", stable, a_star);

    return rep;
}

ValidationReport validate_reaction(const ReactionSpec& f, const DiffusionSpec& A, double tol) {
    ValidationReport rep;
    auto push = [&rep](const std::string& n, bool ok, double v, const std::string& d = "") {
        rep.items.push_back({n, ok, v, d});
    };
    if (f.monostable()) {
        push("monostable test mode: f(0)", std::abs(f.f(0)) <= tol, f.f(0));
        push("monostable test mode: f(s1)", std::abs(f.f(f.s1())) <= tol, f.f(f.s1()));
        push("f'(0) > 0", f.df(0) > 0, f.df(0));
        return rep;
    }
    const double s1 = f.s1(), s2 = f.s2();

    const double zeros[4] = {0.0, s1, s2, 1.0};
    double worst_zero = 0;
    for (double z : zeros) worst_zero = std::max(worst_zero, std::abs(f.f(z)));
    push("f vanishes at 0,s1,s2,1", worst_zero <= tol, worst_zero);

    push("f'(0) > 0", f.df(0) > 0, f.df(0));
    push("f'(s1) < 0", f.df(s1) < 0, f.df(s1));
    push("f'(1) < 0", f.df(1) < 0, f.df(1));

    // sign pattern on sampled interior points
    auto sign_on = [&](double a, double b, int want) {
        const int n = 64;
        for (int k = 1; k < n; ++k) {
            const double u = a + (b - a) * k / n;
            if (want * f.f(u) <= 0) return false;
        }
        return true;
    };
    const bool pattern = sign_on(0, s1, +1) && sign_on(s1, s2, -1) && sign_on(s2, 1, +1) &&
                         sign_on(1, 2, -1);
    push("sign pattern (+,-,+,-)", pattern, pattern ? 1 : 0,
         pattern ? "" : "SignPatternViolation");

    const double wint = integrate([&](double r) { return A.dA(r) * f.f(r); }, s1, 1.0);
    push("int_{s1}^1 A' f > 0", wint > 0, wint, wint > 0 ? "" : "IntegralConditionFailed");

    if (wint > 0) {
        try {
            const double th = theta_of(A, f);
            push("theta in (s2,1)", th > s2 && th < 1, th);
        } catch (const Error& e) {
            push("theta in (s2,1)", false, 0, e.what());
        }
    } else {
        push("theta in (s2,1)", false, 0, "ThetaNotFound");
    }
    return rep;
}

// ---------------------------------------------------------------------------
// PressureMaps

std::shared_ptr<const PressureMaps::Table> PressureMaps::build_table(const DiffusionSpec& A,
                                                                     double u_hi) {
    // Nodes carry the same eps-anchored quadrature value as the direct Lambda
    // path, so inversion and forward evaluation agree to quadrature tolerance.
    auto tab = std::make_shared<Table>();
    const int n = 2048;
    const double u_lo = kSplitEps;
    tab->u.resize(n);
    tab->v.resize(n);
    const double ratio = std::log(u_hi / u_lo) / (n - 1);
    for (int k = 0; k < n; ++k) {
        const double u = u_lo * std::exp(ratio * k);
        tab->u[k] = u;
        tab->v[k] = lambda_quadrature(A, u);
    }
    return tab;
}

PressureMaps::PressureMaps(DiffusionSpec A, ReactionSpec f) : A_(std::move(A)), f_(std::move(f)) {
    if (A_.kind() == DiffusionKind::custom) tab_ = build_table(A_, 4.0);
    phi_hat_[1] = Lambda(f_.s1());
    phi_hat_[2] = f_.monostable() ? std::numeric_limits<double>::quiet_NaN() : Lambda(f_.s2());
    phi_hat_[3] = Lambda(1.0);
}

double PressureMaps::Lambda(double u) const {
    if (u < 0) throw Error(Error::Code::domain, "Lambda: u must be nonnegative");
    if (u == 0) return 0.0;
    if (A_.kind() == DiffusionKind::power_law) {
        const double m = A_.m();
        return m / (m - 1.0) * std::pow(u, m - 1.0);
    }
    return lambda_quadrature(A_, u);
}

double PressureMaps::lambda(double v) const {
    if (v < 0) throw Error(Error::Code::domain, "lambda: v must be nonnegative");
    if (v == 0) return 0.0;
    if (A_.kind() == DiffusionKind::power_law) {
        const double m = A_.m();
        return std::pow((m - 1.0) / m * v, 1.0 / (m - 1.0));
    }
    return lambda_tabulated(v);
}

double PressureMaps::lambda_tabulated(double v) const {
    std::shared_ptr<const Table> tab;
    {
        std::lock_guard<std::mutex> lk(tab_mutex_);
        tab = tab_;
    }
    while (v > tab->v.back()) {
        // auto-extend: rebuild over a doubled range and swap in
        std::lock_guard<std::mutex> lk(tab_mutex_);
        if (v > tab_->v.back()) tab_ = build_table(A_, 2.0 * tab_->u.back());
        tab = tab_;
    }
    const auto& U = tab->u;
    const auto& V = tab->v;
    if (v <= V.front()) return model_inverse(A_, v);
    const auto it = std::upper_bound(V.begin(), V.end(), v);
    std::size_t i = std::size_t(it - V.begin());
    i = std::min(i, V.size() - 1);
    // log-log interpolation seed, then two Newton steps on Lambda(u) = v
    // using a localized quadrature anchored at the table node.
    const double t = (std::log(v) - std::log(V[i - 1])) / (std::log(V[i]) - std::log(V[i - 1]));
    double u = std::exp(std::log(U[i - 1]) + t * (std::log(U[i]) - std::log(U[i - 1])));
    for (int it2 = 0; it2 < 2; ++it2) {
        const double Lu = lambda_quadrature_from(A_, U[i - 1], V[i - 1], u);
        u -= (Lu - v) * u / A_.dA(u);
        u = std::clamp(u, U[i - 1] * 0.5, U[i] * 2.0);
    }
    return u;
}

double PressureMaps::B(double v) const {
    if (v < 0) throw Error(Error::Code::domain, "B: v must be nonnegative");
    if (v == 0) return 0.0;
    if (A_.kind() == DiffusionKind::power_law) return (A_.m() - 1.0) * v;
    return A_.dA(lambda(v));
}

double PressureMaps::h(double v) const {
    if (v < 0) throw Error(Error::Code::domain, "h: v must be nonnegative");
    if (v < h_crossover) return f_.df(0.0) * A_.a_star() * v;
    const double u = lambda(v);
    return f_.f(u) * B(v) / u; // 1/lambda'(v) = B(v)/lambda(v)
}

double PressureMaps::phi_hat(int i) const {
    if (i < 1 || i > 3) throw Error(Error::Code::domain, "phi_hat: index must be 1, 2 or 3");
    return phi_hat_[i];
}

double pressure(double u, const DiffusionSpec& A) {
    if (u < 0) throw Error(Error::Code::domain, "pressure: u must be nonnegative");
    if (u == 0) return 0.0;
    if (A.kind() == DiffusionKind::power_law) {
        const double m = A.m();
        return m / (m - 1.0) * std::pow(u, m - 1.0);
    }
    return lambda_quadrature(A, u);
}

double pressure_inverse(double v, const DiffusionSpec& A) {
    PressureMaps maps(A, ReactionSpec::monostable_logistic());
    return maps.lambda(v);
}

double pressure_quadrature(double u, const DiffusionSpec& A) {
    if (u < 0) throw Error(Error::Code::domain, "pressure: u must be nonnegative");
    return lambda_quadrature(A, u);
}

} // namespace degwave
