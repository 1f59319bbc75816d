#include "hessian/smooth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "hessian/errors.hpp"
#include "hessian/hess.hpp"

namespace hessian {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool in_closure(const GridDomain& g, std::size_t i) { return g.node_class(i) != NodeClass::Exterior; }

// Integer offsets with sum of squares <= r2, r = floor(sqrt(r2)) per axis.
std::vector<std::array<int, 4>> ball_offsets(int dim, double radius_cells, bool strict) {
    const int r = static_cast<int>(std::floor(radius_cells));
    const double r2 = radius_cells * radius_cells;
    std::vector<std::array<int, 4>> out;
    std::array<int, 4> o{};
    auto rec = [&](auto&& self, int a, int acc) -> void {
        if (a == dim) {
            if (strict ? acc < r2 : acc <= r2) out.push_back(o);
            return;
        }
        for (int k = -r; k <= r; ++k) {
            o[static_cast<std::size_t>(a)] = k;
            self(self, a + 1, acc + k * k);
        }
        o[static_cast<std::size_t>(a)] = 0;
    };
    rec(rec, 0, 0);
    return out;
}

bool fits(const GridDomain& g, const std::array<int, 4>& idx, int reach) {
    for (int a = 0; a < g.real_dim(); ++a)
        if (std::abs(idx[static_cast<std::size_t>(a)]) + reach > g.half_extent()) return false;
    return true;
}

bool shifted(const GridDomain& g, const std::array<int, 4>& idx, const std::array<int, 4>& off,
             std::array<int, 4>& out) {
    for (int a = 0; a < g.real_dim(); ++a) {
        const auto s = static_cast<std::size_t>(a);
        out[s] = idx[s] + off[s];
        if (std::abs(out[s]) > g.half_extent()) return false;
    }
    return true;
}

void check_ladder(const GridDomain& g, std::span<const double> ladder, const char* who) {
    if (ladder.size() < 5) throw ConfigError(std::string(who) + ": need at least 5 deltas");
    for (double d : ladder)
        if (d < 2.0 * g.h() * (1.0 - 1e-12)) {
            std::ostringstream os;
            os << who << ": delta " << d << " below 2h = " << 2.0 * g.h();
            throw ResolutionError(os.str());
        }
    const auto [lo, hi] = std::minmax_element(ladder.begin(), ladder.end());
    if (*hi < 10.0 * *lo * (1.0 - 1e-12)) throw ConfigError(std::string(who) + ": ladder spans less than a decade");
}

}  // namespace

Mollifier::Mollifier(const GridDomain& g, double delta) : delta_(delta) {
    if (!(delta >= 2.0 * g.h() * (1.0 - 1e-12))) {
        std::ostringstream os;
        os << "mollifier radius " << delta << " below 2h = " << 2.0 * g.h();
        throw ResolutionError(os.str());
    }
    const double cells = delta / g.h();
    offsets_ = ball_offsets(g.real_dim(), cells, true);
    reach_ = static_cast<int>(std::floor(cells));
    double sum = 0.0;
    weights_.reserve(offsets_.size());
    for (const auto& o : offsets_) {
        double r2 = 0.0;
        for (int a = 0; a < g.real_dim(); ++a) r2 += double(o[static_cast<std::size_t>(a)]) * o[static_cast<std::size_t>(a)];
        const double t = 1.0 - r2 / (cells * cells);
        const double w = t * t * t;
        weights_.push_back(w);
        sum += w;
        std::ptrdiff_t f = 0;
        for (int a = 0; a < g.real_dim(); ++a) f += o[static_cast<std::size_t>(a)] * g.stride(a);
        flat_.push_back(f);
    }
    for (std::size_t k = 0; k < weights_.size(); ++k) {
        weights_[k] /= sum;
        double r2 = 0.0;
        for (int a = 0; a < g.real_dim(); ++a) {
            const double x = offsets_[k][static_cast<std::size_t>(a)] * g.h();
            r2 += x * x;
        }
        second_moment_ += weights_[k] * r2;
    }
}

ScalarField regularize(const ScalarField& u, double delta) {
    const GridDomain& g = u.grid();
    const Mollifier chi(g, delta);
    ScalarField out(u.domain(), kNaN);
    const auto& w = chi.weights();
    const auto& fo = chi.flat_offsets();
    const auto& off = chi.offsets();
    const double* src = u.values().data();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const auto idx = g.lattice_index(i);
        double acc = 0.0, wsum = 0.0;
        if (fits(g, idx, chi.reach())) {
            for (std::size_t k = 0; k < w.size(); ++k) {
                const double v = src[static_cast<std::ptrdiff_t>(i) + fo[k]];
                if (std::isfinite(v)) {
                    acc += w[k] * v;
                    wsum += w[k];
                }
            }
        } else {
            std::array<int, 4> j{};
            for (std::size_t k = 0; k < w.size(); ++k) {
                if (!shifted(g, idx, off[k], j)) continue;
                const double v = src[g.flat_index(j)];
                if (std::isfinite(v)) {
                    acc += w[k] * v;
                    wsum += w[k];
                }
            }
        }
        if (wsum > 0.0) out[i] = acc / wsum;
    }
    return out;
}

ScalarField holder_extend(const ScalarField& u, double alpha, double kappa) {
    const GridDomain& g = u.grid();
    if (!(alpha > 0.0 && alpha <= 1.0) || !(kappa >= 0.0)) throw DomainError("holder_extend: need 0 < alpha <= 1, kappa >= 0");
    ScalarField out(u.domain(), kNaN);
    std::vector<std::size_t> closure;
    std::vector<std::array<int, 4>> cidx;
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (in_closure(g, i)) {
            out[i] = u[i];
            closure.push_back(i);
            cidx.push_back(g.lattice_index(i));
        }
    }
    // kappa * (h sqrt(d2))^alpha by integer squared distance.
    const int span = 2 * g.half_extent();
    const std::size_t table_size = static_cast<std::size_t>(g.real_dim()) * span * span + 1;
    std::vector<double> cost(table_size);
    for (std::size_t d2 = 0; d2 < table_size; ++d2) cost[d2] = kappa * std::pow(g.h() * std::sqrt(double(d2)), alpha);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (in_closure(g, i)) continue;
        const auto idx = g.lattice_index(i);
        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < closure.size(); ++k) {
            int d2 = 0;
            for (int a = 0; a < g.real_dim(); ++a) {
                const int d = idx[static_cast<std::size_t>(a)] - cidx[k][static_cast<std::size_t>(a)];
                d2 += d * d;
            }
            best = std::max(best, u[closure[k]] - cost[static_cast<std::size_t>(d2)]);
        }
        out[i] = best;
    }
    return out;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    LineFit f;
    if (n < 2) return f;
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < n; ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0;
    for (std::size_t k = 0; k < n; ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
    }
    f.slope = sxx > 0 ? sxy / sxx : 0.0;
    f.intercept = my - f.slope * mx;
    double r = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const double e = y[k] - (f.intercept + f.slope * x[k]);
        r += e * e;
    }
    f.residual = std::sqrt(r / n);
    return f;
}

nlohmann::json to_json(const HolderWitness& w) {
    return {{"exponent", w.exponent},
            {"seminorm", w.seminorm},
            {"slope", w.slope},
            {"residual", w.residual},
            {"reliable", w.reliable},
            {"delta_min", w.delta_min},
            {"ladder", w.ladder},
            {"interior_modulus", w.interior_modulus},
            {"interior_exponent", w.interior_exponent},
            {"boundary_modulus", w.boundary_modulus},
            {"boundary_exponent", w.boundary_exponent},
            {"boundary_slope", w.boundary_slope},
            {"notes", w.notes}};
}

namespace {

// Local oscillation at boundary nodes: max over boundary zeta and closure z with
// |z - zeta| <= delta of |u(z) - u(zeta)|.
// Largest local oscillation around boundary nodes, with the largest lattice
// radius actually reached (the fit runs against that radius).
std::pair<double, double> boundary_oscillation(const ScalarField& u, double delta) {
    const GridDomain& g = u.grid();
    const auto offs = ball_offsets(g.real_dim(), delta / g.h(), false);
    int reach2 = 0;
    for (const auto& o : offs) reach2 = std::max(reach2, o[0] * o[0] + o[1] * o[1] + o[2] * o[2] + o[3] * o[3]);
    double worst = 0.0;
    std::array<int, 4> j{};
    for (auto b : g.boundary()) {
        const auto idx = g.lattice_index(b);
        const double ub = u[b];
        for (const auto& o : offs) {
            if (!shifted(g, idx, o, j)) continue;
            const auto f = g.flat_index(j);
            if (!in_closure(g, f)) continue;
            worst = std::max(worst, std::abs(u[f] - ub));
        }
    }
    return {worst, std::sqrt(double(reach2)) * g.h()};
}

struct Exponent {
    double exponent = 1.0;
    double slope = 0.0;
    double residual = 0.0;
    bool decays = true;
};

Exponent exponent_from(std::span<const double> ladder, std::span<const double> modulus, double floor) {
    Exponent e;
    std::vector<double> x, y;
    for (std::size_t k = 0; k < ladder.size(); ++k) {
        if (modulus[k] > floor) {
            x.push_back(std::log(ladder[k]));
            y.push_back(std::log(modulus[k]));
        }
    }
    if (x.size() < 2) return e;  // flat zero modulus: smooth
    const auto f = fit_line(x, y);
    e.slope = f.slope;
    e.residual = f.residual;
    e.exponent = std::clamp(f.slope, 1e-6, 1.0);
    e.decays = f.slope > 0.05;
    return e;
}

}  // namespace

HolderWitness measure_holder(const ScalarField& u, std::span<const double> delta_ladder) {
    const GridDomain& g = u.grid();
    check_ladder(g, delta_ladder, "measure_holder");
    HolderWitness w;
    w.ladder.assign(delta_ladder.begin(), delta_ladder.end());
    std::sort(w.ladder.begin(), w.ladder.end());
    w.delta_min = w.ladder.front();
    const double scale = 1.0 + u.sup_norm();
    const double floor = 1e-12 * scale;
    std::vector<double> radii;
    for (double d : w.ladder) {
        const auto ud = regularize(u, d);
        const auto inner = omega_delta(g, d);
        double m = -std::numeric_limits<double>::infinity();
        for (auto i : inner) m = std::max(m, ud[i] - u[i]);
        w.interior_modulus.push_back(m);
        const auto [osc, radius] = boundary_oscillation(u, d);
        w.boundary_modulus.push_back(osc);
        radii.push_back(radius);
    }
    const auto in = exponent_from(w.ladder, w.interior_modulus, floor);
    const auto bd = exponent_from(radii, w.boundary_modulus, floor);
    w.slope = in.slope;
    w.residual = in.residual;
    w.interior_exponent = in.exponent;
    w.boundary_slope = bd.slope;
    w.boundary_exponent = bd.exponent;
    w.exponent = in.exponent;
    if (bd.exponent < in.exponent - 0.1) {
        w.exponent = bd.exponent;
        w.notes.push_back("boundary collar modulus is rougher than the interior modulus");
    }
    for (std::size_t k = 0; k < w.ladder.size(); ++k) {
        w.seminorm = std::max(w.seminorm, std::max(w.interior_modulus[k], 0.0) / std::pow(w.ladder[k], w.exponent));
        w.seminorm = std::max(w.seminorm, w.boundary_modulus[k] / std::pow(radii[k], w.exponent));
    }
    for (std::size_t k = 1; k < w.ladder.size(); ++k) {
        const double a = w.interior_modulus[k - 1], b = w.interior_modulus[k];
        if (b < a - 0.05 * std::abs(a) - floor) {
            w.reliable = false;
            w.notes.push_back("interior modulus not monotone in delta");
            break;
        }
    }
    if (!in.decays) {
        w.reliable = false;
        w.notes.push_back("interior modulus does not decay");
    }
    if (!bd.decays) {
        w.reliable = false;
        w.notes.push_back("boundary modulus does not decay");
    }
    return w;
}

double holder_seminorm(const ScalarField& u, double alpha, int reach, int samples, std::uint64_t seed) {
    const GridDomain& g = u.grid();
    std::vector<std::size_t> closure;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (in_closure(g, i)) closure.push_back(i);
    auto dist = [&](std::size_t a, std::size_t b) {
        const auto p = g.coords(a), q = g.coords(b);
        double s = 0.0;
        for (int k = 0; k < g.real_dim(); ++k) s += (p[static_cast<std::size_t>(k)] - q[static_cast<std::size_t>(k)]) *
                                                   (p[static_cast<std::size_t>(k)] - q[static_cast<std::size_t>(k)]);
        return std::sqrt(s);
    };
    double worst = 0.0;
    const auto offs = ball_offsets(g.real_dim(), reach, false);
    std::array<int, 4> j{};
    for (auto i : closure) {
        const auto idx = g.lattice_index(i);
        for (const auto& o : offs) {
            if (!shifted(g, idx, o, j)) continue;
            const auto f = g.flat_index(j);
            if (f <= i || !in_closure(g, f)) continue;
            worst = std::max(worst, std::abs(u[f] - u[i]) / std::pow(dist(i, f), alpha));
        }
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, closure.size() - 1);
    for (int s = 0; s < samples; ++s) {
        const auto a = closure[pick(rng)], b = closure[pick(rng)];
        if (a == b) continue;
        worst = std::max(worst, std::abs(u[a] - u[b]) / std::pow(dist(a, b), alpha));
    }
    return worst;
}

PoissonJensenReport poisson_jensen_check(const ScalarField& u, std::span<const double> delta_ladder) {
    const GridDomain& g = u.grid();
    check_ladder(g, delta_ladder, "poisson_jensen_check");
    PoissonJensenReport r;
    r.ladder.assign(delta_ladder.begin(), delta_ladder.end());
    std::sort(r.ladder.begin(), r.ladder.end());
    const double cell = g.cell_volume();
    for (auto i : g.interior()) {
        r.l1_norm += std::abs(u[i]) * cell;
        if (u[i] > 0.0) r.nonpositive = false;
    }
    const auto s1 = sigma_field(u, 1);
    std::vector<double> lx, ly, mx, my;
    for (double d : r.ladder) {
        const auto ud = regularize(u, d);
        double l1 = 0.0, mass = 0.0;
        for (auto i : omega_delta(g, d)) {
            l1 += (ud[i] - u[i]) * cell;
            mass += std::max(s1[i], 0.0) * cell * kappa(g.n(), 1);
        }
        r.l1_defect.push_back(l1);
        r.mass.push_back(mass);
        if (mass > 0.0) r.a_fit = std::max(r.a_fit, l1 / (d * d * mass));
        if (r.l1_norm > 0.0) r.b_fit = std::max(r.b_fit, l1 / (d * r.l1_norm));
        if (l1 > 1e-14) {
            lx.push_back(std::log(d));
            ly.push_back(std::log(l1));
            if (mass > 0.0) {
                mx.push_back(std::log(d));
                my.push_back(std::log(l1 / mass));
            }
        }
    }
    if (lx.size() >= 2) {
        r.slope = fit_line(lx, ly).slope;
        r.norm_trend_ok = r.slope >= 1.0 - 0.2;
    }
    if (mx.size() >= 2) {
        r.mass_slope = fit_line(mx, my).slope;
        r.mass_trend_ok = r.mass_slope >= 2.0 - 0.2;
    }
    return r;
}

}  // namespace hessian
