#ifndef DEGWAVE_NONLINEARITY_HPP
#define DEGWAVE_NONLINEARITY_HPP

#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "degwave/numerics.hpp"

namespace degwave {

// ---------------------------------------------------------------------------
// Diffusion nonlinearity A(u): degenerate at 0 (A(0) = A'(0) = 0), with
// A, A', A'' > 0 for u > 0, integrable pressure density A'(r)/r near 0 and
// r A''(r)/A'(r) -> a_star > 0.

enum class DiffusionKind { power_law, custom };

class DiffusionSpec {
public:
    // A(u) = u^m, m > 1.
    static DiffusionSpec power_law(double m);

    // Named built-in evaluators:
    //   "u32_plus_u2" : A(u) = u^{3/2} + u^2      (a_star = 1/2)
    //   "u2_log1p"    : A(u) = u^2 log(1+u)       (a_star = 2)
    static DiffusionSpec builtin(const std::string& name);

    double A(double u) const { return A_(u); }
    double dA(double u) const { return dA_(u); }
    double ddA(double u) const { return ddA_(u); }

    DiffusionKind kind() const { return kind_; }
    double m() const { return m_; } // power-law exponent; NaN for custom
    const std::string& name() const { return name_; }

    // The limit r A''(r)/A'(r) as r -> 0+, estimated from a tabulated ratio
    // for custom kinds (m - 1 in closed form for power laws).
    double a_star() const { return a_star_; }

private:
    DiffusionSpec() = default;
    DiffusionKind kind_ = DiffusionKind::power_law;
    double m_ = 2.0;
    double a_star_ = 1.0;
    std::string name_;
    std::function<double(double)> A_, dA_, ddA_;
};

// ---------------------------------------------------------------------------
// Reaction f(u): multistable with zeros 0 < s1 < s2 < 1, monostable on
// [0, s1], bistable on [s1, 1]. A pure monostable reaction (zeros 0 and s1
// only) is accepted as a test mode for the wave module.

enum class ReactionKind { quartic_product, monostable_logistic, custom };

class ReactionSpec {
public:
    // f(u) = K u (u - s1)(u - s2)(1 - u).
    static ReactionSpec quartic(double K, double s1, double s2);

    // f(u) = k u (s1 - u): the monostable test mode (no bistable range).
    static ReactionSpec monostable_logistic(double k = 1.0, double s1 = 1.0);

    double f(double u) const { return f_(u); }
    double df(double u) const { return df_(u); }

    ReactionKind kind() const { return kind_; }
    bool monostable() const { return kind_ == ReactionKind::monostable_logistic; }
    double s1() const { return s1_; }
    double s2() const; // throws for monostable mode
    double K() const { return K_; }

private:
    ReactionSpec() = default;
    ReactionKind kind_ = ReactionKind::quartic_product;
    double K_ = 1.0, s1_ = 0.3, s2_ = 0.55;
    std::function<double(double)> f_, df_;
};

// Root of G(theta) = \int_{s1}^{theta} A'(r) f(r) dr in (s2, 1). Exists iff
// the weighted integral condition \int_{s1}^1 A' f > 0 holds.
double theta_of(const DiffusionSpec& A, const ReactionSpec& f);

// ---------------------------------------------------------------------------
// Validation reports.

struct ValidationItem {
    std::string name;
    bool pass = false;
    double measured = 0;
    std::string detail;
};

struct ValidationReport {
    std::vector<ValidationItem> items;
    bool ok() const {
        for (const auto& it : items)
            if (!it.pass) return false;
        return true;
    }
    std::string summary() const;
};

// Checks the class-A membership conditions on a log-spaced sample grid and
// estimates a_star from the tabulated ratio r A''/A'. Throws Error(domain)
// on hard violations (A'(0) > tol, nonpositive derivatives, divergent
// pressure integral); soft measurements land in the report.
ValidationReport validate_diffusion(const DiffusionSpec& A, double tol = 1e-8,
                                    double u_max = 2.0);

// Checks the sign pattern of f, the derivative signs at the zeros, the
// weighted integral condition, and computes theta.
ValidationReport validate_reaction(const ReactionSpec& f, const DiffusionSpec& A,
                                   double tol = 1e-8);

// ---------------------------------------------------------------------------
// Pressure calculus: Lambda(u) = \int_0^u A'(r)/r dr, lambda = Lambda^{-1},
// B(v) = A'(lambda(v)), h(v) = f(lambda(v))/lambda'(v).

class PressureMaps {
public:
    PressureMaps(DiffusionSpec A, ReactionSpec f);

    double Lambda(double u) const;
    double lambda(double v) const;
    double B(double v) const;
    double h(double v) const;

    double a_star() const { return A_.a_star(); }
    double f_prime0() const { return f_.df(0.0); }

    // phi_hat(i) = Lambda(s_i) with s_3 = 1; index i in {1,2,3}.
    double phi_hat(int i) const;

    const DiffusionSpec& diffusion() const { return A_; }
    const ReactionSpec& reaction() const { return f_; }

    // h switches to its linearization f'(0) a_star v below this threshold
    // (direct evaluation is 0/0 there).
    static constexpr double h_crossover = 1e-8;

private:
    DiffusionSpec A_;
    ReactionSpec f_;
    double phi_hat_[4] = {0, 0, 0, 0};

    // Monotone tabulation of Lambda on a geometric u-grid (custom kinds only;
    // power laws invert in closed form). Auto-extension swaps in a larger
    // table under a mutex so read access stays safe across workers.
    struct Table {
        std::vector<double> u, v;
    };
    mutable std::shared_ptr<const Table> tab_;
    mutable std::mutex tab_mutex_;
    double lambda_tabulated(double v) const;
    static std::shared_ptr<const Table> build_table(const DiffusionSpec& A, double u_hi);
};

// Free-function views of the pressure map used by the operation-level API.
double pressure(double u, const DiffusionSpec& A);         // Lambda(u)
double pressure_inverse(double v, const DiffusionSpec& A); // lambda(v)

// Always takes the singularity-split quadrature route (power laws included);
// provides the second algebraic path for closed-form agreement checks.
double pressure_quadrature(double u, const DiffusionSpec& A);

} // namespace degwave

#endif
