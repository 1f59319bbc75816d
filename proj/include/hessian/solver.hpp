#pragma once

// Dirichlet problem sigma_m(U) = mu, U = g on the boundary, and the comparison,
// stability and mixed-measure checkers built on it.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hessian/domain.hpp"
#include "hessian/hess.hpp"
#include "hessian/sweep.hpp"

namespace hessian {

struct DirichletProblem {
    DomainPtr domain;
    int m = 1;
    DiscreteMeasure rhs;  // cell masses; densities are rhs / (h^{2n} kappa)
    ScalarField boundary; // read on boundary nodes only
};

/// Problem with rhs density f (sigma_m units, sampled on interior nodes) and
/// boundary data g.
DirichletProblem make_problem(int m, const ScalarField& density, const ScalarField& boundary);

struct SolveResult {
    ScalarField field;
    int iterations = 0;
    double residual = 0.0;       // sup-norm of the last sweep's change
    double measure_error = 0.0;  // |mass(U) - mass(mu)| / mass(mu), absolute if mu = 0
    bool converged = false;
    double omega = 1.0;
    double subsolution_slope = 0.0;  // A in A(|z|^2 - r_b^2) + harmonic(g)
    std::vector<double> history;
    std::vector<std::string> flags;
};

nlohmann::json summary_json(const SolveResult& r);

/// Discrete harmonic extension of boundary data (m = 1, zero right side).
ScalarField harmonic_extension(const ScalarField& boundary, const SweepOptions& opt = {});

/// Pointwise pencil sweeps from the subsolution A(|z|^2 - r_b^2) + harmonic(g).
SolveResult solve_dirichlet(const DirichletProblem& p, const SweepOptions& opt = {});

struct ComparisonReport {
    bool hypothesis_ok = true;  // sigma_m(u) <= sigma_m(v) cell-wise
    bool boundary_ok = true;    // v <= u on boundary nodes
    bool vacuous = false;
    bool ok = true;
    double worst_measure_gap = 0.0;
    double worst_violation = 0.0;  // max (v - u)
};

ComparisonReport comparison_check(const ScalarField& u, const ScalarField& v, int m, double tol = 1e-8);

struct StabilityReport {
    double lhs = 0.0;      // sup (v - u)_+
    double l1_mu = 0.0;    // int (v - u)_+ dmu
    double rhs = 0.0;
    double C = 0.0;
    double gamma = 0.0;
    bool supersolution_ok = true;  // sigma_m(u) <= mu cell-wise
    bool boundary_ok = true;       // u >= v on boundary nodes
    bool ok = true;
};

/// C = 1 + 2^tau A^{1/m} / (1 - 2^{1-tau}).
double stability_constant(double A, double tau, int m);
/// gamma = (tau - 1) / (tau (m + 1) - m).
double stability_exponent(double tau, int m);

/// Throws DomainError when tau <= 1.
StabilityReport stability_bound(const ScalarField& u, const ScalarField& v, const DiscreteMeasure& mu, double A,
                                double tau, int m, double tol = 1e-9);

struct CapsliceReport {
    bool vacuous = false;
    double lhs = 0.0;  // t^m Cap({u < v - s - t})
    double rhs = 0.0;  // mass of sigma_m(u) on {u < v - s}
    double capacity = 0.0;
    std::size_t set_size = 0;
    bool boundary_ok = true;
    bool ok = true;
    double factor = 1.2;
};

CapsliceReport capslice_inequality_check(const ScalarField& u, const ScalarField& v, double s, double t, int m,
                                         double factor = 1.2, const SweepOptions& opt = {});

struct CegrellReport {
    bool supported = true;
    std::string note;
    double lhs = 0.0;
    double rhs = 0.0;
    double Hu = 0.0, Hv = 0.0, Hw = 0.0;
    bool ok = true;
};

/// Mixed-measure inequality for radial fields:
///   int sigma(u, v^k, w^{m-k-1}) <= H(u)^{1/m} H(v)^{k/m} H(w)^{(m-k-1)/m}.
/// Non-radial inputs are reported unsupported.
CegrellReport cegrell_check(const ScalarField& u, const ScalarField& v, const ScalarField& w, int m, int k,
                            double tol = 1e-6);

/// True when u is invariant under the lattice symmetries preserving |z|.
bool is_radial(const ScalarField& u, double tol = 1e-10);

}  // namespace hessian
