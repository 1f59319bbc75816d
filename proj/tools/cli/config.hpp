#pragma once

// Experiment configuration: JSON with a strict schema. A user config is merged
// over the experiment's defaults; keys absent from the defaults are rejected.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hessian/domain.hpp"

namespace cli {

enum class Experiment {
    Solve,
    Envelope,
    Capacity,
    TheoremA,
    Lemma41,
    Holder,
    Stability,
    VolumeCapacity,
    OracleSuite,
};

const std::vector<std::string>& experiment_names();
/// Throws hessian::ConfigError for unknown names.
Experiment parse_experiment(const std::string& name);
std::string to_string(Experiment e);

struct DomainSpec {
    std::string shape = "ball";
    int n = 1;
    double radius = 1.0;
    std::vector<double> half_widths;  // box only
};

struct ExperimentConfig {
    Experiment experiment = Experiment::OracleSuite;
    std::string name;
    DomainSpec domain;
    int m = 1;
    std::vector<double> resolutions;  // strictly decreasing
    std::map<std::string, std::string> functions;  // "" = unset
    std::map<std::string, double> tolerances;
    std::uint64_t seed = 1;
    nlohmann::json params = nlohmann::json::object();
    std::string output;  // not part of the canonical form

    /// Canonical form (sorted keys, no output directory); the hash input.
    nlohmann::json to_json() const;
    /// Git blob SHA-1 of to_json().dump().
    std::string hash() const;

    hessian::DomainPtr make_domain(double h) const;
    double tol(const std::string& key) const;
    const std::string& function(const std::string& key) const;
};

ExperimentConfig default_config(Experiment e);

/// Merges `user` over the defaults of `e` and validates. Throws hessian::ConfigError.
ExperimentConfig load_config(Experiment e, const nlohmann::json& user);

/// Scales the resolution ladder so that its first entry becomes h.
void override_resolution(ExperimentConfig& cfg, double h);

/// SHA-1 of "blob <size>\0<content>", lowercase hex.
std::string git_blob_sha1(const std::string& content);

}  // namespace cli
