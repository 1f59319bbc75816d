#pragma once

// Radial mollification, Hoelder extension and empirical Hoelder moduli.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include <json.hpp>

#include "hessian/domain.hpp"

namespace hessian {

/// Discrete weights of the bump (1 - |t|^2)^3 on lattice offsets |zeta| < delta,
/// divided by their sum.
class Mollifier {
public:
    Mollifier(const GridDomain& g, double delta);

    double delta() const { return delta_; }
    /// Largest |offset| per axis in lattice units.
    int reach() const { return reach_; }
    std::size_t size() const { return weights_.size(); }
    const std::vector<std::array<int, 4>>& offsets() const { return offsets_; }
    const std::vector<std::ptrdiff_t>& flat_offsets() const { return flat_; }
    const std::vector<double>& weights() const { return weights_; }
    /// sum w |zeta|^2; the exact shift of |z|^2 under convolution.
    double second_moment() const { return second_moment_; }

private:
    double delta_;
    int reach_ = 0;
    std::vector<std::array<int, 4>> offsets_;
    std::vector<std::ptrdiff_t> flat_;
    std::vector<double> weights_;
    double second_moment_ = 0.0;
};

/// u * chi_delta at every lattice node. Kernel taps on nodes without a finite
/// value are dropped and the remaining weights renormalized, so on Omega_delta the
/// result is the plain discrete convolution. Exterior values enter when the field
/// has been extended (holder_extend). Throws ResolutionError if delta < 2h.
ScalarField regularize(const ScalarField& u, double delta);

/// sup over closure nodes zeta of u(zeta) - kappa |z - zeta|^alpha on every
/// exterior node; closure values are copied.
ScalarField holder_extend(const ScalarField& u, double alpha, double kappa);

struct HolderWitness {
    double exponent = 1.0;
    double seminorm = 0.0;
    double slope = 0.0;     // raw log-log slope of M(delta)
    double residual = 0.0;  // rms residual of the fit
    bool reliable = true;
    double delta_min = 0.0;
    std::vector<double> ladder;
    std::vector<double> interior_modulus;  // M(delta) = sup_{Omega_delta} (u_delta - u)
    double interior_exponent = 1.0;
    std::vector<double> boundary_modulus;  // sup over boundary nodes of the local oscillation
    double boundary_exponent = 1.0;
    double boundary_slope = 0.0;
    std::vector<std::string> notes;
};

nlohmann::json to_json(const HolderWitness& w);

/// Hoelder exponent from the regularization defect on a delta ladder combined with
/// the boundary-collar modulus sup_{|z - zeta| <= delta} |u(z) - u(zeta)|,
/// zeta on the boundary. Needs >= 5 deltas, all >= 2h, spanning a decade.
HolderWitness measure_holder(const ScalarField& u, std::span<const double> delta_ladder);

/// Least-squares slope and intercept of y against x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Largest |u(z) - u(w)| / |z - w|^alpha over closure node pairs at lattice
/// distance at most `reach` cells plus `samples` random far pairs (fixed seed).
double holder_seminorm(const ScalarField& u, double alpha, int reach = 3, int samples = 20000,
                       std::uint64_t seed = 7);

struct PoissonJensenReport {
    std::vector<double> ladder;
    std::vector<double> l1_defect;  // int_{Omega_delta} (u_delta - u)
    std::vector<double> mass;       // int_{Omega_delta} sigma_1(u)
    double l1_norm = 0.0;           // ||u||_1 over Omega
    double a_fit = 0.0;             // max l1 / (delta^2 mass)
    double b_fit = 0.0;             // max l1 / (delta ||u||_1)
    double slope = 0.0;             // log l1 against log delta
    double mass_slope = 0.0;        // log (l1 / mass) against log delta
    bool mass_trend_ok = true;      // mass_slope >= 2 - 0.2 (only meaningful for bounded density)
    bool norm_trend_ok = true;      // slope >= 1 - 0.2
    bool nonpositive = true;
};

PoissonJensenReport poisson_jensen_check(const ScalarField& u, std::span<const double> delta_ladder);

}  // namespace hessian
