#pragma once

// m-subharmonic envelopes: the largest discretely m-sh field below an obstacle.

#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "hessian/domain.hpp"
#include "hessian/hess.hpp"
#include "hessian/sweep.hpp"

namespace hessian {

struct EnvelopeResult {
    ScalarField field;
    int iterations = 0;
    double final_update = 0.0;
    bool converged = false;
    double omega = 1.0;
    NodeSet contact;                    // interior nodes with field >= obstacle - contact_tol
    double contact_tol = 0.0;
    double complementarity_defect = 0.0;  // sum (h - field) sigma_m(field) h^{2n} kappa, signed
    double total_mass = 0.0;              // hessian_measure(field, m).total
    // Penalized scheme only.
    std::vector<double> ladder;
    std::vector<double> ladder_sup_change;  // sup |u_j - u_{j-1}|
    double monotonicity_violation = 0.0;    // max over the ladder of (u_{j-1} - u_j)_+
    std::vector<int> ladder_iterations;
    std::vector<std::string> flags;
};

nlohmann::json summary_json(const EnvelopeResult& r);

/// Contact threshold max(10 tol, h^2).
double contact_tolerance(const GridDomain& g, double tol);

/// Obstacle sweeps: every interior node moves to min(obstacle, cone top of its
/// pencil), starting from the obstacle. Boundary nodes hold `boundary` (default: the
/// obstacle) and must not exceed the obstacle there.
EnvelopeResult envelope_sweep(const ScalarField& obstacle, int m, const SweepOptions& opt = {},
                              const std::optional<ScalarField>& boundary = std::nullopt);

/// sigma_m^+ of a sampled obstacle: sigma_m of the discrete Hessian where its
/// eigenvalues lie in the cone at slack h^2, else 0.
ScalarField sigma_plus(const ScalarField& obstacle, int m);

/// Penalized equations sigma_m(u) = exp(j (u - h)) sigma_m^+(h), u = h on the
/// boundary, solved for each j of the ladder in turn (warm started).
EnvelopeResult envelope_penalized(const ScalarField& obstacle, int m, std::span<const double> j_ladder,
                                  const SweepOptions& opt = {});

struct MeasureBoundReport {
    double total_mass = 0.0;
    double leak_mass = 0.0;      // mass where field < obstacle - band
    double leak_fraction = 0.0;
    double band = 0.0;
    double worst_ratio = 0.0;    // max over the band of sigma_m(field) / sigma_m^+(obstacle)
    std::size_t cell_failures = 0;
    bool ok = true;
    double leak_tol = 0.02;
    double cell_tol = 0.1;
};

/// Compares the envelope's Hessian measure with 1_{contact} sigma_m^+(obstacle).
/// `band_factor` times h is the width of the contact band.
MeasureBoundReport measure_bound_check(const ScalarField& obstacle, const EnvelopeResult& env, int m,
                                       double band_factor = 1.0, double leak_tol = 0.02, double cell_tol = 0.1);

/// u_j = max(P(h_j), j (rho - max_boundary rho)) with h_j the running minimum of
/// max(u_delta, u) over the given radii (largest first). Fields are decreasing in j.
std::vector<ScalarField> smoothing_ladder(const ScalarField& u, int m, std::span<const double> deltas,
                                          const SweepOptions& opt = {});

}  // namespace hessian
