#include "hessian/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hessian/errors.hpp"
#include "hessian/symm.hpp"

namespace hessian {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
double unit_uniform(std::uint64_t& state) {
    // splitmix64
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    z ^= z >> 31;
    return static_cast<double>(z >> 11) * 0x1.0p-53;
}

void init_lattice(int n, int half, std::array<std::ptrdiff_t, 4>& strides, std::vector<std::ptrdiff_t>& stencil,
                  int& side) {
    side = 2 * half + 1;
    std::ptrdiff_t s = 1;
    for (int a = 2 * n - 1; a >= 0; --a) {
        strides[static_cast<std::size_t>(a)] = s;
        s *= side;
    }
    for (int a = 2 * n; a < 4; ++a) strides[static_cast<std::size_t>(a)] = 0;
    stencil.clear();
    for (int a = 0; a < 2 * n; ++a) {
        stencil.push_back(strides[static_cast<std::size_t>(a)]);
        stencil.push_back(-strides[static_cast<std::size_t>(a)]);
    }
    for (int a = 0; a < 2 * n; ++a) {
        for (int b = a + 1; b < 2 * n; ++b) {
            if (a / 2 == b / 2) continue;
            const auto sa = strides[static_cast<std::size_t>(a)];
            const auto sb = strides[static_cast<std::size_t>(b)];
            stencil.push_back(sa + sb);
            stencil.push_back(sa - sb);
            stencil.push_back(-sa + sb);
            stencil.push_back(-sa - sb);
        }
    }
}

void check_spacing(int n, double h, double scale) {
    if (n < 1 || n > 2) throw ConfigError("complex dimension must be 1 or 2");
    if (!(h > 0.0)) throw ConfigError("grid spacing must be positive");
    if (!(h < scale / 4.0)) {
        std::ostringstream os;
        os << "grid spacing " << h << " too coarse for length scale " << scale << " (need h < scale/4)";
        throw ConfigError(os.str());
    }
}

}  // namespace

std::array<int, 4> GridDomain::lattice_index(std::size_t flat) const {
    std::array<int, 4> idx{};
    auto r = static_cast<std::ptrdiff_t>(flat);
    for (int a = 0; a < 2 * n_; ++a) {
        const auto s = strides_[static_cast<std::size_t>(a)];
        idx[static_cast<std::size_t>(a)] = static_cast<int>(r / s) - half_;
        r %= s;
    }
    return idx;
}

std::size_t GridDomain::flat_index(const std::array<int, 4>& idx) const {
    std::ptrdiff_t f = 0;
    for (int a = 0; a < 2 * n_; ++a)
        f += (idx[static_cast<std::size_t>(a)] + half_) * strides_[static_cast<std::size_t>(a)];
    return static_cast<std::size_t>(f);
}

Point GridDomain::coords(std::size_t flat) const {
    const auto idx = lattice_index(flat);
    Point p{};
    for (int a = 0; a < 2 * n_; ++a) p[static_cast<std::size_t>(a)] = idx[static_cast<std::size_t>(a)] * h_;
    return p;
}

double GridDomain::abs2(std::size_t flat) const {
    const auto p = coords(flat);
    return p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3];
}

std::string GridDomain::describe() const {
    std::ostringstream os;
    os << (shape_ == Shape::Ball ? "ball" : "box") << " n=" << n_ << " h=" << h_ << " side=" << side_
       << " interior=" << interior_.size() << " boundary=" << boundary_.size();
    return os.str();
}

void GridDomain::classify(const std::vector<double>& rho, const std::vector<double>& dist) {
    const std::size_t total = rho.size();
    rho_ = rho;
    dist_ = dist;
    cls_.assign(total, NodeClass::Exterior);
    interior_.clear();
    boundary_.clear();
    for (std::size_t i = 0; i < total; ++i) {
        if (!(rho[i] < 0.0)) continue;
        const auto idx = lattice_index(i);
        bool inside_lattice = true;
        for (int a = 0; a < 2 * n_; ++a)
            if (std::abs(idx[static_cast<std::size_t>(a)]) >= half_) inside_lattice = false;
        if (inside_lattice) cls_[i] = NodeClass::Interior;
    }
    for (std::size_t i = 0; i < total; ++i) {
        if (cls_[i] != NodeClass::Interior) continue;
        interior_.push_back(i);
        for (auto off : stencil_) {
            const auto j = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + off);
            if (cls_[j] == NodeClass::Exterior) cls_[j] = NodeClass::Boundary;
        }
    }
    for (std::size_t i = 0; i < total; ++i)
        if (cls_[i] == NodeClass::Boundary) boundary_.push_back(i);
    inradius_ = 0.0;
    for (auto i : interior_) inradius_ = std::max(inradius_, dist_[i]);
}

DomainPtr make_ball(int n, double radius, double h, int pad) {
    check_spacing(n, h, radius);
    if (pad < 1) pad = 1;
    std::shared_ptr<GridDomain> d(new GridDomain());
    d->n_ = n;
    d->h_ = h;
    d->shape_ = GridDomain::Shape::Ball;
    d->radius_ = radius;
    d->half_ = static_cast<int>(std::ceil(radius / h - 1e-9)) + pad + 1;
    init_lattice(n, d->half_, d->strides_, d->stencil_, d->side_);
    d->cell_volume_ = std::pow(h, 2 * n);

    std::size_t total = 1;
    for (int a = 0; a < 2 * n; ++a) total *= static_cast<std::size_t>(d->side_);
    std::vector<double> rho(total), dist(total);
    for (std::size_t i = 0; i < total; ++i) {
        const double r2 = d->abs2(i);
        rho[i] = r2 - radius * radius;
        dist[i] = radius - std::sqrt(r2);
    }
    d->classify(rho, dist);
    // sigma_k(I) = C(n,k) >= 1, so rho already satisfies the normalized condition.
    d->rho_normalization_ = 1.0;

    int along_axis = 0;
    for (int i = -d->half_; i <= d->half_; ++i) {
        std::array<int, 4> idx{};
        idx[0] = i;
        if (d->is_interior(d->flat_index(idx))) ++along_axis;
    }
    if (along_axis < 9) throw ConfigError("grid too coarse: fewer than 9 interior nodes per axis");
    return d;
}

DomainPtr make_box(int n, std::span<const double> half_widths, double h, int pad) {
    std::vector<double> w;
    if (half_widths.size() == 1) w.assign(static_cast<std::size_t>(2 * n), half_widths[0]);
    else w.assign(half_widths.begin(), half_widths.end());
    if (static_cast<int>(w.size()) != 2 * n) throw ConfigError("make_box: need 1 or 2n half widths");
    const double wmin = *std::min_element(w.begin(), w.end());
    const double wmax = *std::max_element(w.begin(), w.end());
    if (!(wmin > 0.0)) throw ConfigError("make_box: half widths must be positive");
    check_spacing(n, h, wmin);
    if (pad < 1) pad = 1;

    std::shared_ptr<GridDomain> d(new GridDomain());
    d->n_ = n;
    d->h_ = h;
    d->shape_ = GridDomain::Shape::Box;
    d->half_widths_ = w;
    d->radius_ = 0.0;
    for (double v : w) d->radius_ += v * v;
    d->radius_ = std::sqrt(d->radius_);
    d->half_ = static_cast<int>(std::ceil(wmax / h - 1e-9)) + pad + 1;
    init_lattice(n, d->half_, d->strides_, d->stencil_, d->side_);
    d->cell_volume_ = std::pow(h, 2 * n);

    std::size_t total = 1;
    for (int a = 0; a < 2 * n; ++a) total *= static_cast<std::size_t>(d->side_);
    std::vector<double> rho(total), dist(total);
    for (std::size_t i = 0; i < total; ++i) {
        const auto p = d->coords(i);
        double s = 0.0;
        double dmin = std::numeric_limits<double>::infinity();
        for (int a = 0; a < 2 * n; ++a) {
            const double q = p[static_cast<std::size_t>(a)] / w[static_cast<std::size_t>(a)];
            const double q2 = q * q;
            const double q4 = q2 * q2;
            const double q8 = q4 * q4;
            s += q8 * q8;
            dmin = std::min(dmin, w[static_cast<std::size_t>(a)] - std::abs(p[static_cast<std::size_t>(a)]));
        }
        rho[i] = std::pow(s, 1.0 / 8.0) - 1.0;
        dist[i] = dmin;
    }
    d->classify(rho, dist);
    // The l^8 smoothing is flat at the centre, so no finite normalization exists.
    d->rho_normalization_ = std::numeric_limits<double>::infinity();

    int along_axis = 0;
    for (int i = -d->half_; i <= d->half_; ++i) {
        std::array<int, 4> idx{};
        idx[0] = i;
        if (d->is_interior(d->flat_index(idx))) ++along_axis;
    }
    if (along_axis < 9) throw ConfigError("grid too coarse: fewer than 9 interior nodes per axis");
    return d;
}

ScalarField::ScalarField(DomainPtr domain, double fill) : domain_(std::move(domain)) {
    values_.assign(domain_->size(), kNaN);
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (domain_->node_class(i) != NodeClass::Exterior) values_[i] = fill;
}

double ScalarField::sup_norm() const {
    double s = 0.0;
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (domain_->node_class(i) != NodeClass::Exterior) s = std::max(s, std::abs(values_[i]));
    return s;
}

double ScalarField::oscillation() const {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (domain_->node_class(i) == NodeClass::Exterior) continue;
        lo = std::min(lo, values_[i]);
        hi = std::max(hi, values_[i]);
    }
    return hi - lo;
}

std::vector<std::uint8_t> CompactSet::mask() const {
    std::vector<std::uint8_t> m(domain->size(), 0);
    for (auto i : nodes) m[i] = 1;
    return m;
}

CompactSet make_compact(DomainPtr domain, NodeSet nodes, std::string label) {
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    std::erase_if(nodes, [&](std::size_t i) { return !domain->is_interior(i); });
    if (nodes.empty()) throw ConfigError("compact set '" + label + "' has an empty mask");
    CompactSet k;
    k.domain = domain;
    k.nodes = std::move(nodes);
    k.label = std::move(label);
    k.volume = static_cast<double>(k.nodes.size()) * k.domain->cell_volume();
    for (auto i : k.nodes) k.hausdorff_to_boundary = std::max(k.hausdorff_to_boundary, k.domain->dist(i));
    return k;
}

FamilyKind parse_family_kind(const std::string& name) {
    if (name == "balls") return FamilyKind::Balls;
    if (name == "annuli") return FamilyKind::Annuli;
    if (name == "boundary_collars") return FamilyKind::BoundaryCollars;
    if (name == "random_unions") return FamilyKind::RandomUnions;
    throw ConfigError("unknown compact family kind '" + name + "'");
}

std::string to_string(FamilyKind kind) {
    switch (kind) {
        case FamilyKind::Balls: return "balls";
        case FamilyKind::Annuli: return "annuli";
        case FamilyKind::BoundaryCollars: return "boundary_collars";
        case FamilyKind::RandomUnions: return "random_unions";
    }
    return "?";
}

std::vector<CompactSet> compact_family(const DomainPtr& domain, FamilyKind kind, const FamilyParams& params) {
    const GridDomain& g = *domain;
    const int dim = g.real_dim();
    const double tiny = 1e-12;
    auto dist2 = [&](std::size_t i, const Point& c) {
        const auto p = g.coords(i);
        double s = 0.0;
        for (int a = 0; a < dim; ++a) {
            const double d = p[static_cast<std::size_t>(a)] - c[static_cast<std::size_t>(a)];
            s += d * d;
        }
        return s;
    };
    std::vector<CompactSet> out;
    switch (kind) {
        case FamilyKind::Balls: {
            for (std::size_t r = 0; r < params.radii.size(); ++r) {
                const double s = params.radii[r];
                if (!(s > 0.0) || s >= g.inradius() + g.h()) throw ConfigError("ball radius outside (0, inradius)");
                const Point c = r < params.centers.size() ? params.centers[r] : Point{};
                NodeSet nodes;
                for (auto i : g.interior())
                    if (dist2(i, c) <= s * s + tiny) nodes.push_back(i);
                std::ostringstream label;
                label << "ball(s=" << s << ")";
                out.push_back(make_compact(domain, std::move(nodes), label.str()));
            }
            break;
        }
        case FamilyKind::Annuli: {
            for (const auto& [rin, rout] : params.shells) {
                if (!(rin >= 0.0 && rout > rin)) throw ConfigError("annulus needs 0 <= r_in < r_out");
                NodeSet nodes;
                for (auto i : g.interior()) {
                    const double r2 = g.abs2(i);
                    if (r2 >= rin * rin - tiny && r2 <= rout * rout + tiny) nodes.push_back(i);
                }
                std::ostringstream label;
                label << "annulus(" << rin << "," << rout << ")";
                out.push_back(make_compact(domain, std::move(nodes), label.str()));
            }
            break;
        }
        case FamilyKind::BoundaryCollars: {
            for (double w : params.radii) {
                if (!(w > 0.0)) throw ConfigError("collar width must be positive");
                NodeSet nodes;
                for (auto i : g.interior())
                    if (g.dist(i) <= w + tiny) nodes.push_back(i);
                std::ostringstream label;
                label << "collar(w=" << w << ")";
                out.push_back(make_compact(domain, std::move(nodes), label.str()));
            }
            break;
        }
        case FamilyKind::RandomUnions: {
            if (params.count < 0 || params.balls_per_set < 1) throw ConfigError("random unions: bad counts");
            if (!(params.r_min > 0.0 && params.r_max >= params.r_min)) throw ConfigError("random unions: bad radii");
            const double reach = g.inradius() - params.r_max;
            if (!(reach > 0.0)) throw ConfigError("random unions: r_max exceeds the inradius");
            std::uint64_t state = params.seed;
            int attempts = 0;
            for (int k = 0; k < params.count; ++k) {
                if (++attempts > 100 * (params.count + 1)) throw ConfigError("random unions: radii below lattice resolution");
                NodeSet nodes;
                for (int b = 0; b < params.balls_per_set; ++b) {
                    Point c{};
                    for (;;) {
                        double s = 0.0;
                        for (int a = 0; a < dim; ++a) {
                            c[static_cast<std::size_t>(a)] = reach * (2.0 * unit_uniform(state) - 1.0);
                            s += c[static_cast<std::size_t>(a)] * c[static_cast<std::size_t>(a)];
                        }
                        if (g.shape() == GridDomain::Shape::Box || s <= reach * reach) break;
                    }
                    const double r = params.r_min + (params.r_max - params.r_min) * unit_uniform(state);
                    for (auto i : g.interior())
                        if (dist2(i, c) <= r * r + tiny) nodes.push_back(i);
                }
                std::ostringstream label;
                label << "union#" << k;
                try {
                    out.push_back(make_compact(domain, std::move(nodes), label.str()));
                } catch (const ConfigError&) {
                    // a union of balls smaller than one cell; draw again
                    --k;
                }
            }
            break;
        }
    }
    return out;
}

NodeSet omega_delta(const GridDomain& domain, double delta) {
    if (!(delta >= 0.0)) throw DomainError("omega_delta: delta must be nonnegative");
    NodeSet out;
    for (auto i : domain.interior())
        if (domain.dist(i) > delta) out.push_back(i);
    if (out.empty()) throw DomainError("omega_delta: delta exceeds the inradius, empty mask");
    return out;
}

}  // namespace hessian
