// degwave: numerical laboratory for u_t = [A(u)]_xx + f(u) with degenerate
// diffusion and a multistable reaction. Subcommands cover validation of the
// nonlinearities, stationary profiles, traveling/sharp waves, free-boundary
// simulation, trichotomy classification, terrace diagnostics, envelope
// verification and the analytic sharp-wave oracle.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>

#include "degwave/asymptotics.hpp"
#include "degwave/config.hpp"
#include "degwave/output.hpp"

using nlohmann::json;
using namespace degwave;

namespace {

struct CommonArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir = "out";
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config file");
    cmd->add_option("--set", args.overrides, "override: section.key=value (repeatable)");
    cmd->add_option("--out", args.out_dir, "output directory");
}

RunConfig load(const CommonArgs& args) {
    if (args.config_path.empty()) return parse_config_text("", args.overrides);
    return parse_config(args.config_path, args.overrides);
}

Manifest start_manifest(const RunConfig& cfg, const CommonArgs& args) {
    Manifest m;
    m.config_hash = fnv1a_hex(cfg.resolved_text());
    write_text(args.out_dir + "/resolved_config.txt", cfg.resolved_text());
    m.add("resolved_config.txt");
    return m;
}

void write_json(Manifest& man, const CommonArgs& args, const std::string& name, const json& j) {
    write_text(args.out_dir + "/" + name, j.dump(2) + "\n");
    man.add(name);
}

void write_wave_csv(Manifest& man, const CommonArgs& args, const std::string& name,
                    const WaveProfile& w) {
    CsvWriter csv({"zeta", "u", "v", "psi"});
    for (std::size_t i = 0; i < w.zeta.size(); ++i)
        csv.row({w.zeta[i], w.u[i], w.v[i], w.psi[i]});
    csv.write(args.out_dir + "/" + name);
    man.add(name);
}

void write_plot_script(Manifest& man, const CommonArgs& args, const std::string& name,
                       const std::string& body) {
    write_text(args.out_dir + "/" + name, body);
    man.add(name);
}

// ---------------------------------------------------------------------------

int cmd_validate(const CommonArgs& args) {
    const RunConfig cfg = load(args);
    Manifest man = start_manifest(cfg, args);
    const DiffusionSpec A = cfg.make_diffusion();
    const ReactionSpec f = cfg.make_reaction();
    const ValidationReport rd = validate_diffusion(A);
    const ValidationReport rr = validate_reaction(f, A);
    std::cout << "[diffusion]\n" << rd.summary() << "[reaction]\n" << rr.summary();
    json j;
    auto items = [](const ValidationReport& r) {
        json a = json::array();
        for (const auto& it : r.items)
            a.push_back({{"name", it.name},
                         {"pass", it.pass},
                         {"measured", it.measured},
                         {"detail", it.detail}});
        return a;
    };
    j["diffusion"] = items(rd);
    j["reaction"] = items(rr);
    j["ok"] = rd.ok() && rr.ok();
    write_json(man, args, "validation.json", j);
    man.write(args.out_dir);
    if (!rd.ok() || !rr.ok()) {
        std::cerr << "validation failed: assumption (A) or (F) violated\n";
        return 2;
    }
    return 0;
}

int cmd_stationary(const CommonArgs& args, const std::string& case_tag, double target) {
    const RunConfig cfg = load(args);
    Manifest man = start_manifest(cfg, args);
    const DiffusionSpec A = cfg.make_diffusion();
    const ReactionSpec f = cfg.make_reaction();

    StationaryCase tag;
    if (case_tag == "constant") tag = StationaryCase::constant;
    else if (case_tag == "ground") tag = StationaryCase::ground_state;
    else if (case_tag == "compact_short") tag = StationaryCase::compact_short;
    else if (case_tag == "compact_high") tag = StationaryCase::compact_high;
    else if (case_tag == "monotone") tag = StationaryCase::monotone_half;
    else if (case_tag == "periodic") tag = StationaryCase::periodic;
    else throw Error(Error::Code::domain, "unknown stationary case '" + case_tag + "'");

    const StationaryProfile prof = build_profile(tag, target, A, f);
    CsvWriter csv({"x", "q", "p"});
    for (std::size_t i = 0; i < prof.x.size(); ++i) csv.row({prof.x[i], prof.q[i], prof.p[i]});
    csv.write(args.out_dir + "/stationary_" + case_tag + ".csv");
    man.add("stationary_" + case_tag + ".csv");

    json j{{"case", case_tag},
           {"C", prof.C},
           {"peak", prof.peak},
           {"whole_line", prof.whole_line}};
    if (std::isfinite(prof.L)) j["L"] = prof.L;
    if (std::isfinite(prof.period)) j["period"] = prof.period;
    write_json(man, args, "stationary_summary.json", j);
    write_plot_script(man, args, "plot_stationary.gp",
                      "set datafile separator ','\n"
                      "plot 'stationary_" + case_tag + ".csv' using 1:2 with lines title 'q(x)'\n");
    man.write(args.out_dir);
    std::cout << "case=" << case_tag << " C=" << prof.C << " peak=" << prof.peak
              << (std::isfinite(prof.L) ? " L=" + std::to_string(prof.L) : "") << "\n";
    return 0;
}

int cmd_waves(const CommonArgs& args, const std::string& which) {
    const RunConfig cfg = load(args);
    Manifest man = start_manifest(cfg, args);
    auto maps = cfg.make_maps();

    std::optional<SpeedResult> cs, cz, cb;
    const bool all = which == "all" || which == "types";
    if (all || which == "cs" || which == "cb") {
        cs = find_c_s(*maps);
        write_wave_csv(man, args, "wave_cs.csv", cs->profile);
    }
    if (!maps->reaction().monostable() && (all || which == "cz" || which == "cb")) {
        cz = find_c_z(*maps);
        write_wave_csv(man, args, "wave_cz.csv", cz->profile);
    }
    if (cs && cz) {
        cb = find_c_b(*maps, cs->c, cz->c);
        if (cb) write_wave_csv(man, args, "wave_cb.csv", cb->profile);
    }
    if (which == "types" && cs) {
        const auto types = classify_wave_types(*maps, cs->c);
        const char* names[] = {"wave_type1.csv", "wave_type2.csv", "wave_type3.csv",
                               "wave_type4.csv"};
        for (std::size_t i = 0; i < types.size() && i < 4; ++i)
            write_wave_csv(man, args, names[i], types[i]);
    }
    json j;
    j["c_s"] = cs ? json(cs->c) : json();
    j["c_z"] = cz ? json(cz->c) : json();
    j["c_b"] = cb ? json(cb->c) : json();
    if (cs && cz) {
        const double band = 1e-4;
        if (std::abs(cs->c - cz->c) <= band) j["ordering"] = "critical";
        else j["ordering"] = cs->c < cz->c ? "cs<cz" : "cs>cz";
    } else {
        j["ordering"] = "monostable";
    }
    if (cs) {
        j["darcy_defect_cs"] = cs->darcy_defect;
        j["extra_sign_changes"] = cs->extra_sign_changes;
    }
    if (cb) j["darcy_defect_cb"] = cb->darcy_defect;
    write_json(man, args, "waves.json", j);
    write_plot_script(man, args, "plot_waves.gp",
                      "set datafile separator ','\n"
                      "plot 'wave_cs.csv' using 1:2 with lines title 'Q_cs'\n");
    man.write(args.out_dir);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_simulate(const CommonArgs& args) {
    const RunConfig cfg = load(args);
    Manifest man = start_manifest(cfg, args);
    auto maps = cfg.make_maps();
    SolutionState s = init(cfg.make_init(), cfg.grid, maps);

    const double snap_every = cfg.snapshot_every > 0 ? cfg.snapshot_every : cfg.T / 4;
    CsvWriter snaps({"t", "x", "u", "v"});
    double next_snap = 0;
    RunParams rp;
    rp.T = cfg.T;
    rp.dt_out = cfg.dt_out;
    rp.dt_safety = cfg.dt_safety;
    rp.on_frame = [&](const SolutionState& st) {
        if (st.t + 1e-9 >= next_snap) {
            const auto [lo, hi] = st.support_cells(0.0);
            const int a = std::max(0, lo - 2), b = std::min(st.n() - 1, hi + 2);
            for (int i = a; i <= b && lo >= 0; ++i)
                snaps.row({st.t, st.x_of(i), st.u[i], maps->Lambda(std::max(st.u[i], 0.0))});
            next_snap += snap_every;
        }
    };
    run(s, rp);

    CsvWriter fronts({"t", "l", "r", "rp", "lp", "darcy_l", "darcy_r"});
    for (const auto& h : s.history)
        fronts.row({h.t, h.l, h.r, h.rp, h.lp, h.darcy_l, h.darcy_r});
    fronts.write(args.out_dir + "/fronts.csv");
    man.add("fronts.csv");
    snaps.write(args.out_dir + "/snapshots.csv");
    man.add("snapshots.csv");

    const auto [tl, tr] = waiting_time(s.history, s.dx);
    json j;
    j["T"] = s.t;
    j["l"] = s.l;
    j["r"] = s.r;
    j["waiting_time_left"] = std::isfinite(tl) ? json(tl) : json("inf");
    j["waiting_time_right"] = std::isfinite(tr) ? json(tr) : json("inf");
    j["clamp_mass"] = s.clamp_mass;
    try {
        const SpeedFit fit = fit_front(s.history, true);
        j["fitted_right_speed"] = fit.c_hat;
        j["fitted_right_shift"] = fit.shift_hat;
    } catch (const Error&) {
    }
    write_json(man, args, "summary.json", j);
    write_plot_script(man, args, "plot_fronts.gp",
                      "set datafile separator ','\n"
                      "plot 'fronts.csv' using 1:3 with lines title 'r(t)', "
                      "'fronts.csv' using 1:2 with lines title 'l(t)'\n");
    man.write(args.out_dir);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_classify(const CommonArgs& args, std::string bracket) {
    const RunConfig cfg = load(args);
    Manifest man = start_manifest(cfg, args);
    auto maps = cfg.make_maps();

    double blo = cfg.sigma_bracket_lo, bhi = cfg.sigma_bracket_hi;
    if (!bracket.empty()) {
        const auto comma = bracket.find(',');
        if (comma == std::string::npos)
            throw Error(Error::Code::parse, "--sigma-bracket expects 'lo,hi'");
        blo = std::stod(bracket.substr(0, comma));
        bhi = std::stod(bracket.substr(comma + 1));
    }

    const StationaryProfile ground = build_profile(
        StationaryCase::ground_state, 0, maps->diffusion(), maps->reaction(), 40.0, 0.01);
    ClassifyOptions opt;
    opt.grid = cfg.grid;
    opt.T = cfg.T;
    opt.dt_out = cfg.dt_out;
    opt.W = 5.0 * cfg.b;
    const SigmaStarResult res =
        find_sigma_star(cfg.make_init(), maps, ground, blo, bhi, 1e-2, opt);

    json j;
    j["verdict"] = res.one_sided ? "one_sided_small" : "bracketed";
    j["sigma_interval"] = {res.sigma_lo,
                           std::isfinite(res.sigma_hi) ? json(res.sigma_hi) : json("inf")};
    j["one_sided"] = res.one_sided;
    j["verdict_lo"] = to_string(res.at_lo.verdict);
    j["verdict_hi"] = to_string(res.at_hi.verdict);
    json ev;
    ev["sigma"] = res.evidence.sigma;
    ev["min_ground_dist"] = res.evidence.min_ground_dist;
    ev["min_ground_dist_t"] = res.evidence.min_ground_dist_t;
    ev["final_dist_s1"] = res.evidence.omega.dist_s1;
    ev["final_dist_one"] = res.evidence.omega.dist_one;
    j["evidence"] = ev;
    write_json(man, args, "classification.json", j);
    man.write(args.out_dir);
    std::cout << j.dump(2) << "\n";

    if (!res.one_sided && (res.at_lo.verdict == Verdict::undecided ||
                           res.at_hi.verdict == Verdict::undecided))
        return 4;
    return 0;
}

int cmd_terrace(const CommonArgs& args) {
    const RunConfig cfg = load(args);
    Manifest man = start_manifest(cfg, args);
    auto maps = cfg.make_maps();

    const SpeedResult cs = find_c_s(*maps);
    const SpeedResult cz = find_c_z(*maps);
    std::optional<SpeedResult> cb = find_c_b(*maps, cs.c, cz.c);

    std::vector<Frame> frames;
    SolutionState s = init(cfg.make_init(), cfg.grid, maps);
    RunParams rp;
    rp.T = cfg.T;
    rp.dt_out = cfg.dt_out;
    rp.dt_safety = cfg.dt_safety;
    rp.on_frame = [&](const SolutionState& st) { frames.push_back(Frame::of(st)); };
    run(s, rp);

    const double s1 = maps->reaction().s1();
    double s_up = 0.5 * (s1 + 1.0);
    if (std::abs(s_up - maps->reaction().s2()) < 1e-6) s_up += 0.05;
    const LevelSetTrack tr = track_levels(frames, 0.5 * s1, s_up);

    CsvWriter csv({"t", "chi_star", "chi_upper", "d"});
    for (std::size_t i = 0; i < tr.t.size(); ++i)
        csv.row({tr.t[i], tr.chi_star[i], tr.chi_upper[i], tr.d[i]});
    csv.write(args.out_dir + "/terrace.csv");
    man.add("terrace.csv");

    // fitted level speeds over the late window
    const double t1 = tr.t.back(), t0 = 0.5 * t1;
    std::vector<double> tw, xs, xu;
    for (std::size_t i = 0; i < tr.t.size(); ++i)
        if (tr.t[i] >= t0) {
            tw.push_back(tr.t[i]);
            xs.push_back(tr.chi_star[i]);
            xu.push_back(tr.chi_upper[i]);
        }
    json j;
    j["c_s"] = cs.c;
    j["c_z"] = cz.c;
    j["c_b"] = cb ? json(cb->c) : json();
    const double band = 1e-4;
    j["regime"] = std::abs(cs.c - cz.c) <= band ? "critical" : (cs.c < cz.c ? "cs<cz" : "cs>cz");
    if (tw.size() >= 4) {
        j["c_hat_star"] = fit_line(tw, xs).slope;  // outer (s_*) level speed
        j["c_hat_upper"] = fit_line(tw, xu).slope; // inner (s^*) level speed
        std::vector<double> dd;
        for (std::size_t i = 0; i < tw.size(); ++i) dd.push_back(xs[i] - xu[i]);
        j["d_over_t_final"] = dd.back() / tw.back();
        j["d_slope"] = fit_line(tw, dd).slope;
    }
    const SpeedFit right = fit_front(s.history, true);
    const SpeedFit left = fit_front(s.history, false);
    j["c_hat_right"] = right.c_hat;
    j["c_hat_left"] = left.c_hat;
    write_json(man, args, "speeds.json", j);
    write_plot_script(man, args, "plot_terrace.gp",
                      "set datafile separator ','\n"
                      "plot 'terrace.csv' using 1:2 with lines title 'chi_star', "
                      "'terrace.csv' using 1:3 with lines title 'chi_upper'\n");
    man.write(args.out_dir);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_envelopes(const CommonArgs& args) {
    const RunConfig cfg = load(args);
    Manifest man = start_manifest(cfg, args);
    auto maps = cfg.make_maps();

    const SpeedResult cs = find_c_s(*maps);

    std::vector<Frame> frames;
    SolutionState s = init(cfg.make_init(), cfg.grid, maps);
    frames.push_back(Frame::of(s)); // t = 0
    RunParams rp;
    rp.T = cfg.T;
    rp.dt_out = cfg.dt_out;
    rp.dt_safety = cfg.dt_safety;
    rp.on_frame = [&](const SolutionState& st) { frames.push_back(Frame::of(st)); };
    run(s, rp);

    const EnvelopeCheck ec = verify_envelopes(frames, s.history, cs.profile, *maps);
    json j;
    j["c_s"] = cs.c;
    j["constants"] = {{"alpha1_0", ec.alpha1_0}, {"b1_0", ec.b1_0},
                      {"A1", ec.A1},             {"delta1", ec.delta1},
                      {"alpha2_0", ec.alpha2_0}, {"b2_0", ec.b2_0},
                      {"A2", ec.A2},             {"delta2", ec.delta2}};
    j["measured"] = {{"eps", ec.eps},       {"z0", ec.z0},
                     {"eps0", ec.eps0},     {"B1", ec.B1},
                     {"B2", ec.B2},         {"B3", ec.B3},
                     {"B4", ec.B4},         {"delta_hat", ec.delta_hat},
                     {"H_delta", ec.H_delta}, {"H1", ec.H1},
                     {"H2", ec.H2}};
    j["inequalities_ok"] = ec.inequalities_ok;
    j["margins"] = {ec.ineq1_margin, ec.ineq2_margin, ec.ineq3_margin, ec.ineq4_margin};
    j["points_checked"] = ec.points_checked;
    j["violations"] = ec.violations;
    j["worst_violation"] = ec.worst_violation;
    j["decay_rate"] = std::isfinite(ec.decay_rate) ? json(ec.decay_rate) : json();
    write_json(man, args, "envelope_report.json", j);
    man.write(args.out_dir);
    std::cout << j.dump(2) << "\n";
    return (ec.violations == 0 && ec.inequalities_ok) ? 0 : 3;
}

int cmd_oracle(const CommonArgs& args) {
    CommonArgs a2 = args;
    a2.overrides.insert(a2.overrides.begin(),
                        {"diffusion.kind=power", "diffusion.m=2", "reaction.kind=logistic",
                         "reaction.K=1", "reaction.s1=1"});
    const RunConfig cfg = load(a2);
    Manifest man = start_manifest(cfg, args);
    auto maps = cfg.make_maps();

    // Analytic ansatz u(z) = (1 - e^{z/2})_+ solves (u^2)'' + u' + u(1-u) = 0
    // (speed 1); the residual below uses only closed-form derivatives and is
    // fully independent of the shooting path.
    double residual_sup = 0;
    for (double z = -20; z < 0; z += 1e-3) {
        const double E = std::exp(0.5 * z);
        const double u = 1 - E;
        const double d2A = -0.5 * E + E * E; // (u^2)''
        const double du = -0.5 * E;
        const double res = d2A + 1.0 * du + u * (1 - u);
        residual_sup = std::max(residual_sup, std::abs(res));
    }

    const SpeedResult cs = find_c_s(*maps, {0.2, 2.0});
    double sup = 0;
    for (double z = -30; z <= 2; z += 0.01) {
        const double exact = z < 0 ? 1.0 - std::exp(0.5 * z) : 0.0;
        sup = std::max(sup, std::abs(cs.profile.u_at(z) - exact));
    }

    json j;
    j["ansatz_residual_sup"] = residual_sup;
    j["c_s"] = cs.c;
    j["c_s_error"] = std::abs(cs.c - 1.0);
    j["profile_sup_error"] = sup;
    j["darcy_defect"] = cs.darcy_defect;
    const bool ok = residual_sup < 1e-10 && std::abs(cs.c - 1.0) < 1e-5 && sup < 1e-4;
    j["ok"] = ok;
    write_json(man, args, "oracle.json", j);
    man.write(args.out_dir);
    std::cout << j.dump(2) << "\n";
    return ok ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"degenerate diffusion wave laboratory"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string case_tag = "ground", which = "all", bracket;
    double target = 0;

    auto* v = app.add_subcommand("validate", "check assumptions (A) and (F)");
    add_common(v, args);
    auto* st = app.add_subcommand("stationary", "build a stationary profile");
    add_common(st, args);
    st->add_option("--case", case_tag,
                   "constant|ground|compact_short|compact_high|monotone|periodic");
    st->add_option("--target", target, "case parameter (peak / min / family sign)");
    auto* w = app.add_subcommand("waves", "compute traveling and sharp waves");
    add_common(w, args);
    w->add_option("--which", which, "cs|cz|cb|all|types");
    auto* sim = app.add_subcommand("simulate", "run the free-boundary Cauchy problem");
    add_common(sim, args);
    auto* cl = app.add_subcommand("classify", "sigma trichotomy bisection");
    add_common(cl, args);
    cl->add_option("--sigma-bracket", bracket, "initial bracket lo,hi");
    auto* te = app.add_subcommand("terrace", "level-set terrace diagnostics");
    add_common(te, args);
    auto* en = app.add_subcommand("envelopes", "verify the sharp-wave envelopes");
    add_common(en, args);
    auto* orc = app.add_subcommand("oracle", "analytic sharp-wave ansatz checks");
    add_common(orc, args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (v->parsed()) return cmd_validate(args);
        if (st->parsed()) return cmd_stationary(args, case_tag, target);
        if (w->parsed()) return cmd_waves(args, which);
        if (sim->parsed()) return cmd_simulate(args);
        if (cl->parsed()) return cmd_classify(args, bracket);
        if (te->parsed()) return cmd_terrace(args);
        if (en->parsed()) return cmd_envelopes(args);
        if (orc->parsed()) return cmd_oracle(args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.code) {
            case Error::Code::parse:
            case Error::Code::domain: return 2;
            case Error::Code::undecided:
            case Error::Code::ambiguous: return 4;
            default: return 3;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
