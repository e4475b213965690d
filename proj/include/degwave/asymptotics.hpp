#ifndef DEGWAVE_ASYMPTOTICS_HPP
#define DEGWAVE_ASYMPTOTICS_HPP

#include <deque>
#include <limits>
#include <optional>

#include "degwave/solver.hpp"
#include "degwave/stationary.hpp"
#include "degwave/waves.hpp"

namespace degwave {

// Lightweight grid snapshot kept by experiment drivers.
struct Frame {
    double t = 0;
    double x0 = 0, dx = 0;
    std::vector<double> u;
    double u_at(double x) const;
    static Frame of(const SolutionState& s);
};

// ---------------------------------------------------------------------------
// omega-limit detection and the sigma trichotomy.

enum class Verdict { small_spreading, big_spreading, transition, undecided };
enum class OmegaTag { s1, one, ground_state, undecided };

const char* to_string(Verdict v);
const char* to_string(OmegaTag t);

struct OmegaEvidence {
    OmegaTag tag = OmegaTag::undecided;
    double dist_s1 = 0;     // sup_{|x|<=W} |u(.,T) - s1|
    double dist_one = 0;    // sup_{|x|<=W} |u(.,T) - 1|
    double dist_ground = std::numeric_limits<double>::quiet_NaN();
    double ground_shift = 0;
    double u_max_band = 0;  // max of u over the final band
    double u_max_drift = 0; // drift of max u across the band
};

// Tags the omega-limit from the final band of frames. `ground` may be null
// (then the ground-state distance is skipped). Throws Error(not_stabilized)
// when the band is too short.
OmegaEvidence detect_omega_limit(const std::deque<Frame>& band, double W, double tol_class,
                                 const ReactionSpec& f, const StationaryProfile* ground,
                                 double shift_range);

struct ClassifyOptions {
    Grid1D grid;
    double T = 60;
    double dt_out = 0.5;
    double W = 5.0;
    double tol_class = 0.02;
    int band_frames = 10;
    int max_doublings = 2;
    bool track_ground_distance = false; // per-frame shifted distance to U*
};

struct ClassificationResult {
    Verdict verdict = Verdict::undecided;
    double sigma = 0;
    OmegaEvidence omega;
    double horizon_used = 0;
    // min over time of the shifted sup-distance to the ground state
    double min_ground_dist = std::numeric_limits<double>::quiet_NaN();
    double min_ground_dist_t = 0;
};

// Runs sigma * phi and classifies the outcome, doubling the horizon while
// undecided (up to the budget).
ClassificationResult classify_sigma(double sigma, const InitialDataSpec& phi,
                                    const std::shared_ptr<const PressureMaps>& maps,
                                    const StationaryProfile& ground, const ClassifyOptions& opt);

struct SigmaStarResult {
    double sigma_lo = 0, sigma_hi = 0; // final bracket (small side, big side)
    ClassificationResult at_lo, at_hi;
    ClassificationResult evidence;     // near-critical run with ground tracking
    bool one_sided = false;            // no big spreading found up to sigma_max
};

// Bisection on the verdict; bracket auto-expands. Reports a one-sided result
// when no big spreading occurs up to sigma_max.
SigmaStarResult find_sigma_star(const InitialDataSpec& phi,
                                const std::shared_ptr<const PressureMaps>& maps,
                                const StationaryProfile& ground, double sigma_lo, double sigma_hi,
                                double rel_tol, const ClassifyOptions& opt,
                                double sigma_max = 64.0);

// ---------------------------------------------------------------------------
// Front fits and profile comparisons.

struct SpeedFit {
    double c_hat = 0;
    double shift_hat = 0; // intercept: estimates the front shift r*
    double residual_rms = 0;
    double drift = 0;     // max deviation of pos - c_hat t from its mean
    double t_lo = 0, t_hi = 0;
};

// Least-squares line through (t, r(t)) (or l(t)) over [t_lo, t_hi];
// window excludes the first 30% of the history when t_lo < 0.
SpeedFit fit_front(const std::vector<FrontRecord>& history, bool right_front, double t_lo = -1,
                   double t_hi = -1);

// sup_x |u(x + anchor, t) - Q(+-x)| over x in [x_lo, x_hi] (clipped to the
// frame's grid). mirror = true compares against Q(-x) (left fronts).
double profile_error(const Frame& frame, const WaveProfile& wave, double anchor, double x_lo,
                     double x_hi, bool mirror = false);

// drift of r(t) - c t over [t_lo, t_hi]: max - min
double front_shift_drift(const std::vector<FrontRecord>& history, double c, bool right_front,
                         double t_lo, double t_hi);

// ---------------------------------------------------------------------------
// Level-set tracking (terrace diagnostics).

struct LevelSetTrack {
    double s_star = 0, s_upper = 0;
    std::vector<double> t, chi_star, chi_upper, d; // d = chi_star - chi_upper
};

// Rightmost level crossings per frame; frames where a level is absent are
// skipped (LevelNotPresent only if no frame has both).
LevelSetTrack track_levels(const std::vector<Frame>& frames, double s_star, double s_upper);

// ---------------------------------------------------------------------------
// Envelope verifier for the small-spreading regime.

struct EnvelopeCheck {
    // measured ingredients
    double eps = 0, z0 = 0, eps0 = 0;
    double B1 = 0, B2 = 0, B3 = 0, B4 = 0;
    double delta_hat = 0, H_delta = 0;
    double H1 = 0, H2 = 0;
    // chosen constants
    double alpha1_0 = 0, b1_0 = 0, A1 = 0, delta1 = 0;
    double alpha2_0 = 0, b2_0 = 0, A2 = 0, delta2 = 0;
    bool inequalities_ok = false;
    double ineq1_margin = 0, ineq2_margin = 0; // super-solution side
    double ineq3_margin = 0, ineq4_margin = 0; // sub-solution side
    // sandwich check
    long points_checked = 0;
    long violations = 0;
    double worst_violation = 0;
    double worst_x = 0, worst_t = 0;
    // exponential mid-range decay fit of |u(r(t) - c_s t, t) - s1|
    double decay_rate = std::numeric_limits<double>::quiet_NaN();
};

// Chooses the envelope constants from the recipe (measuring everything from
// the maps, the wave and the initial data) and checks
// alpha2(t) V(x - c t + X0(t)) <= v(x,t) <= alpha1(t) V(x - c t - X^0(t))
// on the sampled domain D = {x >= r(t) - c_s t}. Frames must include t = 0.
EnvelopeCheck verify_envelopes(const std::vector<Frame>& frames,
                               const std::vector<FrontRecord>& history,
                               const WaveProfile& sharp_wave, const PressureMaps& maps,
                               double viol_tol = 1e-8);

} // namespace degwave

#endif
