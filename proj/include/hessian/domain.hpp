#pragma once

// Lattice discretizations of bounded domains in C^n (n = 1, 2), scalar fields on
// them and compact-set constructors.
//
// Real axes are ordered (x1, y1, x2, y2). Lattice coordinates are i*h with
// i in [-M, M] on every axis, so the origin is always a node.

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace hessian {

enum class NodeClass : std::uint8_t { Interior, Boundary, Exterior };

using NodeSet = std::vector<std::size_t>;  // sorted flat lattice indices
using Point = std::array<double, 4>;        // unused trailing coordinates are 0

class GridDomain {
public:
    enum class Shape { Ball, Box };

    int n() const { return n_; }
    int real_dim() const { return 2 * n_; }
    double h() const { return h_; }
    int half_extent() const { return half_; }
    int side() const { return side_; }
    std::size_t size() const { return cls_.size(); }
    Shape shape() const { return shape_; }
    double radius() const { return radius_; }
    std::span<const double> half_widths() const { return half_widths_; }

    /// Cell volume h^{2n}.
    double cell_volume() const { return cell_volume_; }

    NodeClass node_class(std::size_t i) const { return cls_[i]; }
    bool is_interior(std::size_t i) const { return cls_[i] == NodeClass::Interior; }
    bool is_boundary(std::size_t i) const { return cls_[i] == NodeClass::Boundary; }
    double rho(std::size_t i) const { return rho_[i]; }
    /// Distance to the boundary surface; positive inside, negative outside.
    double dist(std::size_t i) const { return dist_[i]; }

    const NodeSet& interior() const { return interior_; }
    const NodeSet& boundary() const { return boundary_; }

    /// Scale factor c with sigma_k(c * rho) >= 1 for all k <= n; infinite when the
    /// defining function degenerates somewhere (smoothed boxes).
    double rho_normalization() const { return rho_normalization_; }
    /// Largest interior distance to the boundary.
    double inradius() const { return inradius_; }

    std::array<int, 4> lattice_index(std::size_t flat) const;
    std::size_t flat_index(const std::array<int, 4>& idx) const;
    Point coords(std::size_t flat) const;
    double abs2(std::size_t flat) const;
    /// Lattice stride of real axis a.
    std::ptrdiff_t stride(int a) const { return strides_[static_cast<std::size_t>(a)]; }
    /// Flat offsets of every node the discrete complex Hessian reads: the 4n axis
    /// neighbours followed by the diagonal neighbours of each mixed (x_j, x_k) plane
    /// with j, k in different complex coordinates.
    std::span<const std::ptrdiff_t> stencil_offsets() const { return stencil_; }

    std::string describe() const;

    friend std::shared_ptr<const GridDomain> make_ball(int n, double radius, double h, int pad);
    friend std::shared_ptr<const GridDomain> make_box(int n, std::span<const double> half_widths,
                                                      double h, int pad);

private:
    GridDomain() = default;
    void classify(const std::vector<double>& rho, const std::vector<double>& dist);

    int n_ = 1;
    double h_ = 0.0;
    int half_ = 0;
    int side_ = 0;
    double cell_volume_ = 0.0;
    Shape shape_ = Shape::Ball;
    double radius_ = 0.0;
    std::vector<double> half_widths_;
    std::array<std::ptrdiff_t, 4> strides_{};
    std::vector<std::ptrdiff_t> stencil_;
    std::vector<NodeClass> cls_;
    std::vector<double> rho_;
    std::vector<double> dist_;
    NodeSet interior_;
    NodeSet boundary_;
    double rho_normalization_ = 1.0;
    double inradius_ = 0.0;
};

using DomainPtr = std::shared_ptr<const GridDomain>;

/// Ball {|z| < radius} with rho = |z|^2 - radius^2. `pad` extra lattice layers
/// beyond the boundary layer are kept for convolutions and extensions.
DomainPtr make_ball(int n, double radius, double h, int pad = 1);

/// Smoothed polydisc-like box with rho = (sum_a (x_a / w_a)^16)^{1/8} - 1 (an l^8
/// smoothing of max_a (x_a/w_a)^2 - 1). half_widths holds one value per real axis
/// (2n entries) or a single value for all axes. Distances to the boundary use the
/// unsmoothed box, min_a (w_a - |x_a|), which is exact away from the corners.
DomainPtr make_box(int n, std::span<const double> half_widths, double h, int pad = 1);

/// Real values on every lattice node of one domain. Exterior slots hold NaN
/// unless filled by an extension.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(DomainPtr domain, double fill = 0.0);

    const DomainPtr& domain() const { return domain_; }
    const GridDomain& grid() const { return *domain_; }
    std::size_t size() const { return values_.size(); }

    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }

    /// Samples f on interior and boundary nodes; exterior stays NaN.
    template <class F>
    static ScalarField sample(DomainPtr domain, F&& f) {
        ScalarField out(domain);
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (domain->node_class(i) != NodeClass::Exterior) out.values_[i] = f(domain->coords(i));
        }
        return out;
    }

    /// Max |value| over interior and boundary nodes.
    double sup_norm() const;
    /// max - min over interior and boundary nodes.
    double oscillation() const;

private:
    DomainPtr domain_;
    std::vector<double> values_;
};

struct CompactSet {
    DomainPtr domain;
    NodeSet nodes;                       // subset of interior nodes
    double hausdorff_to_boundary = 0.0;  // sup over the set of dist to boundary
    double volume = 0.0;                 // |nodes| * h^{2n}
    std::string label;

    bool empty() const { return nodes.empty(); }
    std::vector<std::uint8_t> mask() const;
};

/// Builds a CompactSet from interior nodes; non-interior indices are dropped.
/// Throws ConfigError on an empty result.
CompactSet make_compact(DomainPtr domain, NodeSet nodes, std::string label);

enum class FamilyKind { Balls, Annuli, BoundaryCollars, RandomUnions };

struct FamilyParams {
    std::vector<double> radii;                     // balls: radii; collars: widths
    std::vector<Point> centers;                    // balls: optional centers (default 0)
    std::vector<std::pair<double, double>> shells; // annuli: (r_in, r_out)
    int count = 0;                                 // random unions: number of sets
    int balls_per_set = 3;
    double r_min = 0.1;
    double r_max = 0.3;
    std::uint64_t seed = 1;
};

FamilyKind parse_family_kind(const std::string& name);
std::string to_string(FamilyKind kind);

std::vector<CompactSet> compact_family(const DomainPtr& domain, FamilyKind kind,
                                       const FamilyParams& params);

/// Interior nodes at distance > delta from the boundary.
NodeSet omega_delta(const GridDomain& domain, double delta);

}  // namespace hessian
