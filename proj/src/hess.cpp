#include "hessian/hess.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "hessian/errors.hpp"

namespace hessian {

namespace {

void check_order(int n, int m, const char* who) {
    if (m < 1 || m > n) {
        std::ostringstream os;
        os << who << ": order " << m << " outside [1, " << n << "]";
        throw DomainError(os.str());
    }
}

}  // namespace

double kappa(int n, int m) {
    (void)n;
    (void)m;
    return 1.0;
}

HermitianForm pencil_base(const GridDomain& g, std::span<const double> u, std::size_t i) {
    const int n = g.n();
    const double inv4h2 = 0.25 / (g.h() * g.h());
    const double* c = u.data() + i;
    HermitianForm H(n);
    for (int j = 0; j < n; ++j) {
        const auto sx = g.stride(2 * j);
        const auto sy = g.stride(2 * j + 1);
        H.set(j, j, (c[sx] + c[-sx] + c[sy] + c[-sy]) * inv4h2);
    }
    if (n == 2) {
        const auto x1 = g.stride(0), y1 = g.stride(1), x2 = g.stride(2), y2 = g.stride(3);
        auto cross = [&](std::ptrdiff_t a, std::ptrdiff_t b) {
            return (c[a + b] - c[a - b] - c[-a + b] + c[-a - b]) * inv4h2;
        };
        const double re = cross(x1, x2) + cross(y1, y2);
        const double im = cross(x1, y2) - cross(y1, x2);
        H.set(0, 1, std::complex<double>(0.25 * re, 0.25 * im));
    }
    return H;
}

double pencil_base_trace(const GridDomain& g, std::span<const double> u, std::size_t i) {
    const double* c = u.data() + i;
    double s = 0.0;
    for (int a = 0; a < g.real_dim(); ++a) {
        const auto st = g.stride(a);
        s += c[st] + c[-st];
    }
    return s * 0.25 / (g.h() * g.h());
}

double cone_top(const GridDomain& g, std::span<const double> u, std::size_t i, int m) {
    const double h2 = g.h() * g.h();
    if (m == 1) return pencil_base_trace(g, u, i) / g.n() * h2;
    return cone_shift(eigenvalues(pencil_base(g, u, i)), m) * h2;
}

double pencil_value(const GridDomain& g, std::span<const double> u, std::size_t i, int m, double target) {
    const double h2 = g.h() * g.h();
    if (m == 1) return (pencil_base_trace(g, u, i) - std::max(target, 0.0)) / g.n() * h2;
    return pencil_shift(eigenvalues(pencil_base(g, u, i)), m, target) * h2;
}

HermitianForm node_hessian(const GridDomain& g, std::span<const double> u, std::size_t i) {
    HermitianForm H = pencil_base(g, u, i);
    H.add_diagonal(-u[i] / (g.h() * g.h()));
    return H;
}

HessianField complex_hessian(const ScalarField& u) {
    const GridDomain& g = u.grid();
    std::vector<HermitianForm> forms;
    forms.reserve(g.interior().size());
    for (auto i : g.interior()) forms.push_back(node_hessian(g, u.values(), i));
    return HessianField(u.domain(), std::move(forms));
}

ScalarField sigma_field(const ScalarField& u, int k) {
    const GridDomain& g = u.grid();
    check_order(g.n(), k, "sigma_field");
    ScalarField out(u.domain(), std::numeric_limits<double>::quiet_NaN());
    for (auto i : g.interior()) out[i] = sigma_k(eigenvalues(node_hessian(g, u.values(), i)), k);
    return out;
}

double DiscreteMeasure::mass_of(std::span<const std::size_t> nodes) const {
    double s = 0.0;
    for (auto i : nodes) s += cell_mass[i];
    return s;
}

DiscreteMeasure hessian_measure(const ScalarField& u, int m) {
    const GridDomain& g = u.grid();
    check_order(g.n(), m, "hessian_measure");
    DiscreteMeasure mu;
    mu.domain = u.domain();
    mu.kappa = kappa(g.n(), m);
    mu.cell_mass.assign(g.size(), 0.0);
    const double scale = g.cell_volume() * mu.kappa;
    std::size_t clamped = 0;
    for (auto i : g.interior()) {
        const auto lam = eigenvalues(node_hessian(g, u.values(), i));
        const double s = sigma_k(lam, m);
        if (s < 0.0) {
            if (s < -default_slack(lam)) ++clamped;
            continue;
        }
        mu.cell_mass[i] = s * scale;
        mu.total += mu.cell_mass[i];
    }
    mu.clamped_fraction = g.interior().empty() ? 0.0 : static_cast<double>(clamped) / g.interior().size();
    if (mu.clamped_fraction > 0.10) {
        std::ostringstream os;
        os << "clamped " << std::setprecision(3) << 100.0 * mu.clamped_fraction
           << "% of cells with negative sigma_" << m;
        mu.warning = os.str();
    }
    return mu;
}

DiscreteMeasure measure_from_density(const ScalarField& density, int m) {
    const GridDomain& g = density.grid();
    check_order(g.n(), m, "measure_from_density");
    DiscreteMeasure mu;
    mu.domain = density.domain();
    mu.kappa = kappa(g.n(), m);
    mu.cell_mass.assign(g.size(), 0.0);
    const double scale = g.cell_volume() * mu.kappa;
    for (auto i : g.interior()) {
        if (!(density[i] >= 0.0)) throw PreconditionError("measure_from_density: negative or NaN density");
        mu.cell_mass[i] = density[i] * scale;
        mu.total += mu.cell_mass[i];
    }
    return mu;
}

MshReport is_msh(const ScalarField& u, int m, double slack, std::span<const std::uint8_t> exclude) {
    const GridDomain& g = u.grid();
    check_order(g.n(), m, "is_msh");
    MshReport rep;
    for (auto i : g.interior()) {
        if (!exclude.empty() && exclude[i]) continue;
        const auto lam = eigenvalues(node_hessian(g, u.values(), i));
        const double s = slack < 0.0 ? default_slack(lam) : slack;
        if (!in_gamma_m(lam, m, s)) {
            rep.ok = false;
            rep.violations.push_back(i);
            double lowest = 0.0;
            for (int k = 1; k <= m; ++k) lowest = std::min(lowest, sigma_k(lam, k));
            rep.worst = std::min(rep.worst, lowest);
        }
    }
    return rep;
}

ViscosityReport viscosity_check(const ScalarField& u, const ScalarField& f, int m, ViscositySide side, double tol) {
    const GridDomain& g = u.grid();
    check_order(g.n(), m, "viscosity_check");
    ViscosityReport rep;
    for (auto i : g.interior()) {
        const auto lam = eigenvalues(node_hessian(g, u.values(), i));
        const bool cone = in_gamma_m(lam, m);
        const double s = sigma_k(lam, m);
        double gap = 0.0;
        bool failed = false;
        if (side == ViscositySide::Sub) {
            gap = f[i] - s;
            if (!cone) {
                double lowest = 0.0;
                for (int k = 1; k <= m; ++k) lowest = std::min(lowest, sigma_k(lam, k));
                gap = std::max(gap, -lowest);
                failed = true;
            }
        } else {
            const double clamped = cone ? s : 0.0;
            gap = clamped - f[i];
        }
        failed = failed || gap > tol;
        if (failed) {
            rep.ok = false;
            ++rep.failures;
            rep.worst_gap = std::max(rep.worst_gap, gap);
        }
    }
    return rep;
}

double mixed_sigma(std::span<const HermitianForm> forms) {
    const int m = static_cast<int>(forms.size());
    if (m < 1) throw DomainError("mixed_sigma: need at least one form");
    const int n = forms[0].dim();
    check_order(n, m, "mixed_sigma");
    double factorial = 1.0;
    for (int i = 2; i <= m; ++i) factorial *= i;
    double acc = 0.0;
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
        HermitianForm sum(n);
        for (int i = 0; i < m; ++i) {
            if (!(mask & (1u << i))) continue;
            for (int j = 0; j < n; ++j)
                for (int k = j; k < n; ++k) sum.set(j, k, sum(j, k) + forms[static_cast<std::size_t>(i)](j, k));
        }
        const int size = std::popcount(mask);
        const double sign = ((m - size) % 2 == 0) ? 1.0 : -1.0;
        acc += sign * sigma_k_minor_oracle(sum, m);
    }
    return acc / factorial;
}

void write_measure_csv(std::ostream& os, const DiscreteMeasure& mu) {
    const GridDomain& g = *mu.domain;
    os << "node";
    static const char* names[] = {"x1", "y1", "x2", "y2"};
    for (int a = 0; a < g.real_dim(); ++a) os << ',' << names[a];
    os << ",cell_mass\n";
    os << std::setprecision(17);
    for (auto i : g.interior()) {
        const auto p = g.coords(i);
        os << i;
        for (int a = 0; a < g.real_dim(); ++a) os << ',' << p[static_cast<std::size_t>(a)];
        os << ',' << mu.cell_mass[i] << '\n';
    }
}

}  // namespace hessian
