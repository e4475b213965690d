#ifndef DEGWAVE_CONFIG_HPP
#define DEGWAVE_CONFIG_HPP

#include <map>
#include <memory>
#include <string>

#include "degwave/nonlinearity.hpp"
#include "degwave/solver.hpp"

namespace degwave {

// Experiment configuration, parsed from a small INI-style file:
//
//   [diffusion]
//   kind = "power"        # "power" | "custom"
//   m = 2.0               # power-law exponent (kind = power)
//   name = "u32_plus_u2"  # builtin evaluator (kind = custom)
//
//   [reaction]
//   kind = "quartic"      # "quartic" | "logistic"
//   K = 8.0
//   s1 = 0.3
//   s2 = 0.55
//
//   [grid]    dx, x_min, x_max, buffer
//   [time]    dt_safety, T, dt_out, snapshot_every
//   [init]    shape = "cos2"|"tent"|"plateau"|"power_edge"|"constant", b, sigma, p, level
//   [run]     seed, sigma_bracket_lo, sigma_bracket_hi
//
// Unknown sections or keys are rejected; values may be quoted.

struct RunConfig {
    // diffusion
    std::string diffusion_kind = "power";
    double m = 2.0;
    std::string diffusion_name;
    // reaction
    std::string reaction_kind = "quartic";
    double K = 8.0, s1 = 0.3, s2 = 0.55;
    // grid
    Grid1D grid{-40.0, 40.0, 0.05, 20};
    // time
    double dt_safety = 0.4;
    double T = 60.0;
    double dt_out = 0.5;
    double snapshot_every = 0.0; // 0 -> T/4
    // init
    std::string init_shape = "cos2";
    double b = 1.0, sigma = 1.0, p = 2.0, level = 0.0;
    // run
    long seed = 1;
    double sigma_bracket_lo = 0.25, sigma_bracket_hi = 4.0;

    DiffusionSpec make_diffusion() const;
    ReactionSpec make_reaction() const;
    std::shared_ptr<const PressureMaps> make_maps() const;
    InitialDataSpec make_init() const;

    // resolved key/value view (defaults materialized), used for echoing and
    // the config hash
    std::map<std::string, std::string> resolved() const;
    std::string resolved_text() const;
};

// Parses the file; applies overrides of the form "section.key=value" on top.
RunConfig parse_config(const std::string& path,
                       const std::vector<std::string>& overrides = {});

// Parses from an in-memory string (used by tests and --set-only runs).
RunConfig parse_config_text(const std::string& text,
                            const std::vector<std::string>& overrides = {});

} // namespace degwave

#endif
