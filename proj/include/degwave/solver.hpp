#ifndef DEGWAVE_SOLVER_HPP
#define DEGWAVE_SOLVER_HPP

#include <functional>
#include <limits>
#include <memory>
#include <vector>

#include "degwave/nonlinearity.hpp"

namespace degwave {

// Explicit conservative finite-difference solver for
//
//     u_t = [A(u)]_xx - beta u_x + f(u)
//
// on an auto-extending uniform grid. The scheme is monotone under the CFL
// bound dt <= dt_safety dx^2 / max A'(u) (plus advection and reaction caps),
// preserves nonnegativity and the constant equilibria, and keeps compactly
// supported data compactly supported (f(0) = 0, A(0) = 0).

struct Grid1D {
    double x_min = -20.0;
    double x_max = 20.0;
    double dx = 0.05;
    int buffer_cells = 20; // support must stay this far from the grid ends
};

struct InitialDataSpec {
    enum class Shape { cos2, tent, plateau, power_edge, constant, custom };
    Shape shape = Shape::cos2;
    double b = 1.0;     // half-width of the support (-b, b)
    double sigma = 1.0; // amplitude factor
    double p = 2.0;     // exponent for power_edge
    double level = 0.0; // value for constant mode (whole-line data)
    std::function<double(double)> custom; // used when shape == custom
    bool whole_line = false; // custom data positive on the whole grid (no fronts)

    double eval(double x) const;
};

struct FrontRecord {
    double t = 0;
    double l = 0, r = 0;          // interpolated support endpoints
    double lp = 0, rp = 0;        // front speeds (finite differences of l, r)
    double darcy_l = 0, darcy_r = 0; // |front speed + one-sided v_x|
    bool moved_l = false, moved_r = false; // past the waiting-time threshold
};

struct SolutionState {
    double t = 0;
    double x0 = 0, dx = 0.05; // x_i = x0 + i dx
    std::vector<double> u;
    std::shared_ptr<const PressureMaps> maps;
    int buffer_cells = 20;
    bool whole_line = false; // constant-data mode: no fronts tracked
    double l = 0, r = 0;
    double edge_scale_l = 0, edge_scale_r = 0; // initial edge-cell scale per side
    double clamp_mass = 0; // cumulative mass removed by the undershoot clamp
    std::vector<FrontRecord> history;

    double x_of(int i) const { return x0 + i * dx; }
    int n() const { return int(u.size()); }
    // incremental support bounds maintained by step(); -1/-2 = unknown
    int cache_lo = -1, cache_hi = -2;
    double u_at(double x) const;           // linear interpolation
    double v_at(double x) const;           // Lambda(u) at interpolated u
    std::vector<double> v_array() const;   // Lambda(u) on the grid
    // support bounds as cell indices (first/last cell with u above floor)
    std::pair<int, int> support_cells(double floor = 0.0) const;
};

struct RunParams {
    double T = 10.0;
    double dt_out = 0.1;
    double dt_safety = 0.4;     // dt <= dt_safety dx^2 / max A'(u)
    double react_safety = 0.1;  // dt <= react_safety / max |f'|
    double beta = 0.0;          // moving-frame drift (upwinded)
    bool reaction_on = true;
    double fixed_dt = 0.0;      // > 0: use this dt (still CFL-checked)
    std::function<void(const SolutionState&)> on_frame; // called at output cadence
    long max_cells = 16000000;
};

// Builds the initial state; u0 must be continuous, positive exactly on
// (-b, b) (or whole-line constant data).
SolutionState init(const InitialDataSpec& u0, const Grid1D& grid,
                   std::shared_ptr<const PressureMaps> maps);

// Advances one explicit step of size min(CFL bound, dt_cap). Returns dt.
double step(SolutionState& s, const RunParams& p, double dt_cap);

// Runs until s.t >= T, recording FrontRecords at dt_out cadence.
void run(SolutionState& s, const RunParams& p);

// Runs in the frame moving at speed beta: u_t = [A(u)]_xx - beta u_x + f(u)
// with the upwinded drift; fronts obey the modified Darcy law
// r'(t) = -v_x(r-,t) + beta.
void run_moving_frame(SolutionState& s, double beta, double T, const RunParams& base = {});

// first time each front moved by > dx/2 from its initial position
// (+inf if it never moved within the recorded history)
std::pair<double, double> waiting_time(const std::vector<FrontRecord>& history, double dx);

// |r'(t) + v_x(r-,t)| and the left analogue for the current state, with the
// front speed read from the recorded history.
std::pair<double, double> darcy_residual(const SolutionState& s);

} // namespace degwave

#endif
