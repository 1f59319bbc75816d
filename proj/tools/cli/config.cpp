#include "cli/config.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <openssl/evp.h>

#include "cli/registry.hpp"
#include "hessian/errors.hpp"

namespace cli {

using hessian::ConfigError;
using nlohmann::json;

namespace {

const std::vector<std::pair<Experiment, std::string>>& names() {
    static const std::vector<std::pair<Experiment, std::string>> v{
        {Experiment::Solve, "solve"},
        {Experiment::Envelope, "envelope"},
        {Experiment::Capacity, "capacity"},
        {Experiment::TheoremA, "verify-theorem-a"},
        {Experiment::Lemma41, "verify-lemma41"},
        {Experiment::Holder, "verify-holder"},
        {Experiment::Stability, "verify-stability"},
        {Experiment::VolumeCapacity, "verify-volume-capacity"},
        {Experiment::OracleSuite, "oracle-suite"},
    };
    return v;
}

json balls(std::vector<double> radii) { return {{"kind", "balls"}, {"radii", radii}}; }

json off_centre_balls() {
    return {{"kind", "balls"},
            {"radii", {0.2, 0.2, 0.25, 0.25, 0.2, 0.3, 0.2, 0.25}},
            {"centers",
             {{0.3, 0, 0, 0}, {0, 0.4, 0, 0}, {0, 0, 0.35, 0}, {0, 0, 0, 0.45},
              {0.3, 0.3, 0, 0}, {0.2, 0, 0.2, 0}, {0.5, 0, 0, 0.2}, {-0.3, 0.1, -0.2, 0}}}};
}

json annuli() {
    return {{"kind", "annuli"},
            {"shells", {{0.2, 0.35}, {0.3, 0.5}, {0.4, 0.6}, {0.5, 0.7}, {0.1, 0.4}, {0.6, 0.75}}}};
}

json unions(int count, double lo, double hi, int seed_offset) {
    return {{"kind", "random_unions"}, {"count", count}, {"balls_per_set", 3},
            {"r_min", lo},            {"r_max", hi},     {"seed_offset", seed_offset}};
}

std::vector<double> linspace(double a, double step, int count) {
    std::vector<double> v;
    for (int k = 0; k < count; ++k) v.push_back(std::round((a + step * k) * 1e6) / 1e6);
    return v;
}

// 30 sets: centred balls, off-centre balls, annuli, random unions.
json family30() {
    return json::array({balls(linspace(0.2, 0.05, 10)), off_centre_balls(), annuli(), unions(6, 0.15, 0.3, 0)});
}

// family30 plus boundary collars and further unions.
json family50() {
    json f = family30();
    f.push_back({{"kind", "boundary_collars"}, {"widths", linspace(0.15, 0.05, 10)}});
    f.push_back(unions(10, 0.15, 0.25, 1));
    return f;
}

ExperimentConfig base(Experiment e, int n, std::vector<double> res) {
    ExperimentConfig c;
    c.experiment = e;
    c.name = to_string(e);
    c.domain.n = n;
    c.m = 1;
    c.resolutions = std::move(res);
    return c;
}

bool same_kind(const json& a, const json& b) {
    if (a.is_number() && b.is_number()) return !(a.is_number_integer() || a.is_number_unsigned()) || b.is_number_integer() || b.is_number_unsigned();
    return a.type() == b.type();
}

// Objects merge key by key; anything else is replaced. Keys unknown to the
// default are rejected.
void merge_strict(json& dst, const json& src, const std::string& where) {
    if (!src.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = src.begin(); it != src.end(); ++it) {
        const std::string path = where + "." + it.key();
        if (!dst.contains(it.key())) throw ConfigError("unknown key " + path);
        json& d = dst[it.key()];
        if (!same_kind(d, it.value())) throw ConfigError("wrong type for " + path);
        if (d.is_object() && !d.empty()) merge_strict(d, it.value(), path);
        else d = it.value();
    }
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> v = [] {
        std::vector<std::string> out;
        for (const auto& [e, s] : names()) out.push_back(s);
        return out;
    }();
    return v;
}

Experiment parse_experiment(const std::string& name) {
    for (const auto& [e, s] : names())
        if (s == name) return e;
    throw ConfigError("unknown experiment '" + name + "'");
}

std::string to_string(Experiment e) {
    for (const auto& [x, s] : names())
        if (x == e) return s;
    return "?";
}

json ExperimentConfig::to_json() const {
    json d{{"shape", domain.shape}, {"n", domain.n}};
    if (domain.shape == "ball") d["radius"] = domain.radius;
    else d["half_widths"] = domain.half_widths;
    json j;
    j["experiment"] = cli::to_string(experiment);
    j["name"] = name;
    j["domain"] = d;
    j["m"] = m;
    j["resolutions"] = resolutions;
    j["functions"] = functions;
    j["tolerances"] = tolerances;
    j["seed"] = seed;
    j["params"] = params;
    return j;
}

std::string ExperimentConfig::hash() const { return git_blob_sha1(to_json().dump()); }

hessian::DomainPtr ExperimentConfig::make_domain(double h) const {
    if (domain.shape == "ball") return hessian::make_ball(domain.n, domain.radius, h);
    return hessian::make_box(domain.n, domain.half_widths, h);
}

double ExperimentConfig::tol(const std::string& key) const {
    const auto it = tolerances.find(key);
    if (it == tolerances.end()) throw ConfigError("missing tolerance '" + key + "'");
    return it->second;
}

const std::string& ExperimentConfig::function(const std::string& key) const {
    const auto it = functions.find(key);
    if (it == functions.end()) throw ConfigError("missing function slot '" + key + "'");
    return it->second;
}

ExperimentConfig default_config(Experiment e) {
    ExperimentConfig c;
    switch (e) {
        case Experiment::Solve:
            c = base(e, 1, {1.0 / 32, 1.0 / 64});
            c.functions = {{"f", "constant-one"}, {"g", "quadratic"}, {"exact", "quadratic"}};
            c.tolerances = {{"sweep", 1e-12}, {"exact", 1e-8}};
            c.params = {{"f_scale", 1.0}};
            break;
        case Experiment::Envelope:
            c = base(e, 1, {1.0 / 64, 1.0 / 128});
            c.functions = {{"obstacle", "radial-bump"}, {"boundary", ""}};
            c.tolerances = {{"sweep", 1e-10}, {"complementarity", 1e-3}, {"leak", 0.02}, {"cell", 0.1}, {"penalized", 5e-3}};
            c.params = {{"penalized_ladder", json::array()}, {"tol_power", 4.0}};
            break;
        case Experiment::Capacity:
            c = base(e, 1, {1.0 / 64});
            c.tolerances = {{"sweep", 1e-9}, {"contact", 0.95}, {"boundary", 0.05}};
            c.params = {{"families", json::array({balls({0.1, 0.2, 0.3, 0.4})})}};
            break;
        case Experiment::TheoremA:
            c = base(e, 2, {1.0 / 8, 1.0 / 16});
            c.functions = {{"phi", "power-gamma-1/4"}};
            c.tolerances = {{"sweep", 1e-7}, {"refinement", 0.3}};
            c.params = {{"r", 0.5}, {"families", family50()}};
            break;
        case Experiment::Lemma41:
            c = base(e, 1, {1.0 / 64, 1.0 / 128});
            c.functions = {{"phi", "power-gamma-1/4"}};
            c.tolerances = {{"sweep", 1e-9}, {"disc", 0.3}};
            c.params = {{"families", json::array({{{"kind", "boundary_collars"},
                                                   {"widths", {0.05, 0.1, 0.15, 0.2, 0.25, 0.3}}}})}};
            break;
        case Experiment::Holder:
            c = base(e, 1, {1.0 / 128});
            c.functions = {{"g", "zero"}, {"moduli_u", "quadratic"}};
            c.tolerances = {{"sweep", 1e-10}, {"safety", 0.5}, {"slope_margin", 0.1}};
            c.params = {{"phis", {"power-gamma-1/8", "power-gamma-1/4"}},
                        {"smooth_boundary", true},
                        {"ladder_min_cells", 4.0},
                        {"ladder_count", 6},
                        {"moduli_t", {0.01, 0.02, 0.05, 0.1, 0.2, 0.5}},
                        {"moduli_k", 1}};
            break;
        case Experiment::Stability:
            c = base(e, 1, {1.0 / 32});
            c.tolerances = {{"sweep", 1e-10}, {"capslice_factor", 1.2}, {"domination_safety", 2.0}};
            c.params = {{"c", {0.5, 1.0, 2.0, 4.0}},
                        {"t_fractions", {0.1, 0.25, 0.5, 0.75, 1.0}},
                        {"tau", 2.0},
                        {"capslice_fraction", 0.1},
                        {"domination_radii", {0.05, 0.1, 0.2, 0.3, 0.37, 0.45, 0.6, 0.8}}};
            break;
        case Experiment::VolumeCapacity:
            c = base(e, 2, {1.0 / 12, 1.0 / 24});
            c.tolerances = {{"sweep", 1e-7}, {"refinement", 0.25}};
            c.params = {{"r", 0.9}, {"families", family30()}};
            break;
        case Experiment::OracleSuite:
            c = base(e, 1, {1.0 / 32});
            c.tolerances = {{"sigma", 1e-9}, {"exact", 1e-8}, {"obstacle", 1e-2}, {"capacity", 0.05}};
            c.params = {{"matrices", 2000}};
            break;
    }
    return c;
}

ExperimentConfig load_config(Experiment e, const json& user) {
    ExperimentConfig c = default_config(e);
    if (user.is_null()) return c;
    if (!user.is_object()) throw ConfigError("config: top level must be an object");
    json merged = c.to_json();
    merged["output"] = "";
    json u = user;
    if (u.contains("experiment")) {
        if (!u["experiment"].is_string() || u["experiment"].get<std::string>() != to_string(e))
            throw ConfigError("config: experiment does not match the subcommand " + to_string(e));
        u.erase("experiment");
    }
    // domain fields are optional per shape
    if (u.contains("domain")) {
        if (!u["domain"].is_object()) throw ConfigError("config.domain: expected an object");
        merged["domain"]["radius"] = c.domain.radius;
        merged["domain"]["half_widths"] = json::array();
    }
    // families and ladders are replaced wholesale, so the default shape is all that is checked
    merge_strict(merged, u, "config");

    ExperimentConfig out;
    out.experiment = e;
    out.name = merged["name"].get<std::string>();
    if (out.name.empty() || out.name.find('/') != std::string::npos) throw ConfigError("config.name: empty or contains '/'");
    const json& d = merged["domain"];
    out.domain.shape = d["shape"].get<std::string>();
    out.domain.n = d["n"].get<int>();
    if (out.domain.shape == "ball") {
        out.domain.radius = d["radius"].get<double>();
        if (!(out.domain.radius > 0.0)) throw ConfigError("config.domain.radius must be positive");
    } else if (out.domain.shape == "box") {
        if (!d.contains("half_widths") || d["half_widths"].empty()) throw ConfigError("config.domain.half_widths required for a box");
        out.domain.half_widths = d["half_widths"].get<std::vector<double>>();
        for (double w : out.domain.half_widths)
            if (!(w > 0.0)) throw ConfigError("config.domain.half_widths must be positive");
    } else {
        throw ConfigError("config.domain.shape must be 'ball' or 'box'");
    }
    if (out.domain.n < 1 || out.domain.n > 2) throw ConfigError("config.domain.n must be 1 or 2");
    out.m = merged["m"].get<int>();
    if (out.m < 1 || out.m > out.domain.n) {
        std::ostringstream os;
        os << "config.m = " << out.m << " outside [1, n = " << out.domain.n << "]";
        throw ConfigError(os.str());
    }
    out.resolutions = merged["resolutions"].get<std::vector<double>>();
    if (out.resolutions.empty()) throw ConfigError("config.resolutions: empty ladder");
    for (std::size_t k = 0; k < out.resolutions.size(); ++k) {
        if (!(out.resolutions[k] > 0.0)) throw ConfigError("config.resolutions: entries must be positive");
        if (k > 0 && !(out.resolutions[k] < out.resolutions[k - 1]))
            throw ConfigError("config.resolutions: ladder must be strictly refining");
    }
    for (auto& [k, v] : merged["functions"].items()) {
        const auto name = v.get<std::string>();
        if (!name.empty() && !registry_contains(name)) throw ConfigError("config.functions." + k + ": unknown function '" + name + "'");
        out.functions[k] = name;
    }
    for (auto& [k, v] : merged["tolerances"].items()) {
        const double t = v.get<double>();
        if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("config.tolerances." + k + " must be finite and nonnegative");
        out.tolerances[k] = t;
    }
    if (!merged["seed"].is_number_unsigned() && !(merged["seed"].is_number_integer() && merged["seed"].get<long long>() >= 0))
        throw ConfigError("config.seed must be a nonnegative integer");
    out.seed = merged["seed"].get<std::uint64_t>();
    out.params = merged["params"];
    out.output = merged["output"].get<std::string>();
    return out;
}

void override_resolution(ExperimentConfig& cfg, double h) {
    if (!(h > 0.0)) throw ConfigError("--resolution-override must be positive");
    const double s = h / cfg.resolutions.front();
    for (auto& r : cfg.resolutions) r *= s;
}

std::string git_blob_sha1(const std::string& content) {
    const std::string data = "blob " + std::to_string(content.size()) + '\0' + content;
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha1(), nullptr) != 1)
        throw std::runtime_error("SHA-1 digest failed");
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", md[i]);
        hex += buf;
    }
    return hex;
}

}  // namespace cli
