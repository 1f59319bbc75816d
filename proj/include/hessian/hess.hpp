#pragma once

// Discrete complex Hessian, sigma_k fields, m-Hessian measures and pointwise
// m-subharmonicity checks.
//
// Diagonal entries use the 3-point second difference in each real axis; mixed
// entries use the 4-point cross stencil, which never reads the centre value. The
// Hessian at a node is therefore affine in the node's own value t:
//     H(t) = H0 - (t / h^2) I,
// and every pointwise solver in this library moves along that pencil.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hessian/domain.hpp"
#include "hessian/symm.hpp"

namespace hessian {

/// Conversion constant from sigma_m(lambda) dV to the measure (dd^c u)^m ^ beta^{n-m}.
/// Fixed to 1: the Hessian measure is identified with sigma_m(lambda) times Lebesgue
/// measure. Every inequality checked by this library is invariant under the choice.
double kappa(int n, int m);

/// H0 at interior node i: the discrete complex Hessian with the node's own value
/// removed from the diagonal.
HermitianForm pencil_base(const GridDomain& g, std::span<const double> u, std::size_t i);

/// Trace of H0 (enough for m = 1, no off-diagonal work).
double pencil_base_trace(const GridDomain& g, std::span<const double> u, std::size_t i);

/// Largest value t of node i keeping H(t) in the closed cone Gamma_m.
double cone_top(const GridDomain& g, std::span<const double> u, std::size_t i, int m);

/// Value t <= cone_top of node i with sigma_m(H(t)) = target (target >= 0).
double pencil_value(const GridDomain& g, std::span<const double> u, std::size_t i, int m, double target);

/// Full discrete complex Hessian at interior node i.
HermitianForm node_hessian(const GridDomain& g, std::span<const double> u, std::size_t i);

class HessianField {
public:
    HessianField(DomainPtr domain, std::vector<HermitianForm> forms)
        : domain_(std::move(domain)), forms_(std::move(forms)) {}
    const DomainPtr& domain() const { return domain_; }
    /// Forms in the order of domain().interior().
    const std::vector<HermitianForm>& forms() const { return forms_; }
    const HermitianForm& at(std::size_t k) const { return forms_[k]; }

private:
    DomainPtr domain_;
    std::vector<HermitianForm> forms_;
};

HessianField complex_hessian(const ScalarField& u);

/// sigma_k of the eigenvalues of the discrete Hessian at each interior node; NaN
/// elsewhere.
ScalarField sigma_field(const ScalarField& u, int k);

struct DiscreteMeasure {
    DomainPtr domain;
    std::vector<double> cell_mass;  // lattice-sized, zero off the interior
    double total = 0.0;
    double clamped_fraction = 0.0;  // share of interior cells clamped from negative
    double kappa = 1.0;
    std::optional<std::string> warning;

    /// Mass of a node set.
    double mass_of(std::span<const std::size_t> nodes) const;
};

/// cell_mass = max(sigma_m, 0) * h^{2n} * kappa. A clamped fraction above 10%
/// attaches a warning.
DiscreteMeasure hessian_measure(const ScalarField& u, int m);

/// Measure with cell mass density(node) * h^{2n} * kappa on interior nodes. The
/// density is in sigma_m units and must be nonnegative.
DiscreteMeasure measure_from_density(const ScalarField& density, int m);

struct MshReport {
    bool ok = true;
    std::vector<std::size_t> violations;  // flat indices
    double worst = 0.0;                   // most negative sigma_k seen at a violation
};

/// Cone membership at every interior node (nodes listed in `exclude` are skipped).
/// A negative slack selects the per-node default.
MshReport is_msh(const ScalarField& u, int m, double slack = -1.0,
                 std::span<const std::uint8_t> exclude = {});

enum class ViscositySide { Sub, Super };

struct ViscosityReport {
    bool ok = true;
    std::size_t failures = 0;
    double worst_gap = 0.0;  // largest violation of the tested inequality
};

/// Sub side: sigma_m(lambda) >= f and lambda in the closed cone. Super side:
/// [sigma_m]_+ <= f, where [.]_+ is sigma_m inside the cone and 0 outside.
ViscosityReport viscosity_check(const ScalarField& u, const ScalarField& f, int m, ViscositySide side,
                                double tol = 1e-9);

/// Mixed form of sigma_m by polarization: (1/m!) sum over subsets S of
/// (-1)^{m-|S|} sigma_m(sum_{i in S} A_i). Reduces to sigma_m(A) when all A_i = A.
double mixed_sigma(std::span<const HermitianForm> forms);

/// CSV rows: node,coords...,cell_mass for interior nodes.
void write_measure_csv(std::ostream& os, const DiscreteMeasure& mu);

}  // namespace hessian
