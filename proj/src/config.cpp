#include "degwave/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace degwave {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

struct Setter {
    std::function<void(RunConfig&, const std::string&)> apply;
};

double parse_num(const std::string& v, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        throw Error(Error::Code::parse, "config: bad numeric value '" + v + "' for " + key);
    }
}

const std::map<std::string, Setter>& schema() {
    static const std::map<std::string, Setter> s = {
        {"diffusion.kind", {[](RunConfig& c, const std::string& v) { c.diffusion_kind = unquote(v); }}},
        {"diffusion.m", {[](RunConfig& c, const std::string& v) { c.m = parse_num(v, "diffusion.m"); }}},
        {"diffusion.name", {[](RunConfig& c, const std::string& v) { c.diffusion_name = unquote(v); }}},
        {"reaction.kind", {[](RunConfig& c, const std::string& v) { c.reaction_kind = unquote(v); }}},
        {"reaction.K", {[](RunConfig& c, const std::string& v) { c.K = parse_num(v, "reaction.K"); }}},
        {"reaction.s1", {[](RunConfig& c, const std::string& v) { c.s1 = parse_num(v, "reaction.s1"); }}},
        {"reaction.s2", {[](RunConfig& c, const std::string& v) { c.s2 = parse_num(v, "reaction.s2"); }}},
        {"grid.dx", {[](RunConfig& c, const std::string& v) { c.grid.dx = parse_num(v, "grid.dx"); }}},
        {"grid.x_min", {[](RunConfig& c, const std::string& v) { c.grid.x_min = parse_num(v, "grid.x_min"); }}},
        {"grid.x_max", {[](RunConfig& c, const std::string& v) { c.grid.x_max = parse_num(v, "grid.x_max"); }}},
        {"grid.buffer", {[](RunConfig& c, const std::string& v) {
             c.grid.buffer_cells = int(parse_num(v, "grid.buffer"));
         }}},
        {"time.dt_safety", {[](RunConfig& c, const std::string& v) { c.dt_safety = parse_num(v, "time.dt_safety"); }}},
        {"time.T", {[](RunConfig& c, const std::string& v) { c.T = parse_num(v, "time.T"); }}},
        {"time.dt_out", {[](RunConfig& c, const std::string& v) { c.dt_out = parse_num(v, "time.dt_out"); }}},
        {"time.snapshot_every", {[](RunConfig& c, const std::string& v) {
             c.snapshot_every = parse_num(v, "time.snapshot_every");
         }}},
        {"init.shape", {[](RunConfig& c, const std::string& v) { c.init_shape = unquote(v); }}},
        {"init.b", {[](RunConfig& c, const std::string& v) { c.b = parse_num(v, "init.b"); }}},
        {"init.sigma", {[](RunConfig& c, const std::string& v) { c.sigma = parse_num(v, "init.sigma"); }}},
        {"init.p", {[](RunConfig& c, const std::string& v) { c.p = parse_num(v, "init.p"); }}},
        {"init.level", {[](RunConfig& c, const std::string& v) { c.level = parse_num(v, "init.level"); }}},
        {"run.seed", {[](RunConfig& c, const std::string& v) { c.seed = long(parse_num(v, "run.seed")); }}},
        {"run.sigma_bracket_lo", {[](RunConfig& c, const std::string& v) {
             c.sigma_bracket_lo = parse_num(v, "run.sigma_bracket_lo");
         }}},
        {"run.sigma_bracket_hi", {[](RunConfig& c, const std::string& v) {
             c.sigma_bracket_hi = parse_num(v, "run.sigma_bracket_hi");
         }}},
    };
    return s;
}

void apply_kv(RunConfig& c, const std::string& full_key, const std::string& value, int line) {
    const auto it = schema().find(full_key);
    if (it == schema().end())
        throw Error(Error::Code::parse,
                    "config: unknown key '" + full_key + "'" +
                        (line >= 0 ? " (line " + std::to_string(line) + ")" : ""));
    it->second.apply(c, value);
}

void validate(const RunConfig& c) {
    if (c.diffusion_kind != "power" && c.diffusion_kind != "custom")
        throw Error(Error::Code::domain, "config: diffusion.kind must be 'power' or 'custom'");
    if (c.diffusion_kind == "power" && !(c.m > 1.0))
        throw Error(Error::Code::domain, "config: m must exceed 1 (class A degeneracy)");
    if (c.reaction_kind != "quartic" && c.reaction_kind != "logistic")
        throw Error(Error::Code::domain, "config: reaction.kind must be 'quartic' or 'logistic'");
    if (c.reaction_kind == "quartic") {
        if (!(c.K > 0)) throw Error(Error::Code::domain, "config: K must be positive");
        if (!(0 < c.s1 && c.s1 < c.s2 && c.s2 < 1))
            throw Error(Error::Code::domain, "config: need 0 < s1 < s2 < 1 (assumption on zeros)");
    }
    if (!(c.grid.dx > 0) || !(c.grid.x_max > c.grid.x_min))
        throw Error(Error::Code::domain, "config: bad grid section");
    if (!(c.T > 0) || !(c.dt_out > 0) || !(c.dt_safety > 0) || c.dt_safety > 0.5)
        throw Error(Error::Code::domain, "config: bad time section (dt_safety in (0, 0.5])");
    const bool known_shape = c.init_shape == "cos2" || c.init_shape == "tent" ||
                             c.init_shape == "plateau" || c.init_shape == "power_edge" ||
                             c.init_shape == "constant";
    if (!known_shape) throw Error(Error::Code::domain, "config: unknown init.shape");
    if (!(c.b > 0)) throw Error(Error::Code::domain, "config: init.b must be positive");
}

RunConfig parse_stream(std::istream& in, const std::vector<std::string>& overrides) {
    RunConfig c;
    std::string section, line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw Error(Error::Code::parse,
                            "config: malformed section header (line " + std::to_string(lineno) + ")");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(Error::Code::parse,
                        "config: expected key = value (line " + std::to_string(lineno) + ")");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw Error(Error::Code::parse,
                        "config: key outside a [section] (line " + std::to_string(lineno) + ")");
        apply_kv(c, section + "." + key, value, lineno);
    }
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos)
            throw Error(Error::Code::parse, "override must look like section.key=value: " + ov);
        apply_kv(c, trim(ov.substr(0, eq)), trim(ov.substr(eq + 1)), -1);
    }
    validate(c);
    return c;
}

} // namespace

RunConfig parse_config(const std::string& path, const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw Error(Error::Code::parse, "config: cannot open '" + path + "'");
    return parse_stream(in, overrides);
}

RunConfig parse_config_text(const std::string& text, const std::vector<std::string>& overrides) {
    std::istringstream in(text);
    return parse_stream(in, overrides);
}

DiffusionSpec RunConfig::make_diffusion() const {
    if (diffusion_kind == "power") return DiffusionSpec::power_law(m);
    return DiffusionSpec::builtin(diffusion_name);
}

ReactionSpec RunConfig::make_reaction() const {
    if (reaction_kind == "quartic") return ReactionSpec::quartic(K, s1, s2);
    return ReactionSpec::monostable_logistic(K, s1);
}

std::shared_ptr<const PressureMaps> RunConfig::make_maps() const {
    return std::make_shared<PressureMaps>(make_diffusion(), make_reaction());
}

InitialDataSpec RunConfig::make_init() const {
    InitialDataSpec d;
    if (init_shape == "cos2") d.shape = InitialDataSpec::Shape::cos2;
    else if (init_shape == "tent") d.shape = InitialDataSpec::Shape::tent;
    else if (init_shape == "plateau") d.shape = InitialDataSpec::Shape::plateau;
    else if (init_shape == "power_edge") d.shape = InitialDataSpec::Shape::power_edge;
    else d.shape = InitialDataSpec::Shape::constant;
    d.b = b;
    d.sigma = sigma;
    d.p = p;
    d.level = level;
    return d;
}

std::map<std::string, std::string> RunConfig::resolved() const {
    const auto num = [](double v) {
        std::ostringstream os;
        os.precision(17);
        os << v;
        return os.str();
    };
    std::map<std::string, std::string> m2;
    m2["diffusion.kind"] = diffusion_kind;
    m2["diffusion.m"] = num(m);
    m2["diffusion.name"] = diffusion_name;
    m2["reaction.kind"] = reaction_kind;
    m2["reaction.K"] = num(K);
    m2["reaction.s1"] = num(s1);
    m2["reaction.s2"] = num(s2);
    m2["grid.dx"] = num(grid.dx);
    m2["grid.x_min"] = num(grid.x_min);
    m2["grid.x_max"] = num(grid.x_max);
    m2["grid.buffer"] = num(grid.buffer_cells);
    m2["time.dt_safety"] = num(dt_safety);
    m2["time.T"] = num(T);
    m2["time.dt_out"] = num(dt_out);
    m2["time.snapshot_every"] = num(snapshot_every);
    m2["init.shape"] = init_shape;
    m2["init.b"] = num(b);
    m2["init.sigma"] = num(sigma);
    m2["init.p"] = num(p);
    m2["init.level"] = num(level);
    m2["run.seed"] = num(double(seed));
    m2["run.sigma_bracket_lo"] = num(sigma_bracket_lo);
    m2["run.sigma_bracket_hi"] = num(sigma_bracket_hi);
    return m2;
}

std::string RunConfig::resolved_text() const {
    std::ostringstream os;
    for (const auto& [k, v] : resolved()) os << k << " = " << v << "\n";
    return os.str();
}

} // namespace degwave
