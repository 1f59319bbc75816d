#pragma once

#include <vector>

#include <json.hpp>

#include "cli/config.hpp"
#include "cli/report.hpp"
#include "hessian/domain.hpp"

namespace cli {

struct RunOptions {
    int threads = 1;  // capacity families and colored sweeps; 1 = serial
};

/// Runs the configured experiment and fills a report. Library errors propagate.
Report run_experiment(const ExperimentConfig& cfg, const RunOptions& opt = {});

struct FamilyMember {
    hessian::CompactSet set;
    double centred_radius = 0.0;  // > 0 for balls centred at the origin
};

/// Builds the sets described by a JSON list of family specs:
///   {"kind": "balls", "radii": [...], "centers": [[x1, y1, x2, y2], ...]}
///   {"kind": "annuli", "shells": [[r_in, r_out], ...]}
///   {"kind": "boundary_collars", "widths": [...]}
///   {"kind": "random_unions", "count", "balls_per_set", "r_min", "r_max", "seed_offset"}
std::vector<FamilyMember> build_family(const hessian::DomainPtr& domain, const nlohmann::json& specs,
                                       std::uint64_t seed);

/// Geometric ladder of `count` radii from lo to 10 lo.
std::vector<double> decade_ladder(double lo, int count);

}  // namespace cli
