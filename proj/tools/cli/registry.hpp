#pragma once

// Catalog of named analytic test functions on C^n (coordinates x1, y1, x2, y2).

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hessian/capacity.hpp"
#include "hessian/domain.hpp"
#include "hessian/symm.hpp"

namespace cli {

struct AnalyticFunction {
    std::string name;
    std::string description;
    std::function<double(const hessian::Point&)> value;
    /// Complex Hessian (d^2 / dz_j dz_k-bar) where the function is C^2 at the point.
    std::function<std::optional<hessian::HermitianForm>(const hessian::Point&, int n)> hessian;
    /// Global Hoelder witness |f(z) - f(w)| <= kappa |z - w|^alpha on the unit ball.
    std::optional<hessian::HolderConstants> witness;
};

/// Deterministic catalog; every witness was checked on sampled pairs at
/// registration.
const std::vector<AnalyticFunction>& registry_list();

/// Throws hessian::ConfigError for unknown names. The prefix "ext:" names the
/// Hoelder extension of a catalog entry (requires a witness).
const AnalyticFunction& registry_lookup(const std::string& name);

bool registry_contains(const std::string& name);

/// Samples the named function; "ext:" entries are extended to exterior nodes.
hessian::ScalarField registry_sample(const std::string& name, const hessian::DomainPtr& domain);

/// Largest sampled |f(z) - f(w)| / (kappa |z - w|^alpha) over random pairs in the
/// unit ball of C^n; <= 1 when the witness holds.
double witness_ratio(const AnalyticFunction& f, int n, int samples = 4000, std::uint64_t seed = 3);

}  // namespace cli
