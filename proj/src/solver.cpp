#include "hessian/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hessian/capacity.hpp"
#include "hessian/errors.hpp"
#include "hessian/symm.hpp"

namespace hessian {

namespace {

void check_order(int n, int m, const char* who) {
    if (m < 1 || m > n) {
        std::ostringstream os;
        os << who << ": order " << m << " outside [1, " << n << "]";
        throw DomainError(os.str());
    }
}

std::vector<double> densities(const DirichletProblem& p) {
    const GridDomain& g = *p.domain;
    const double scale = g.cell_volume() * kappa(g.n(), p.m);
    std::vector<double> f(g.size(), 0.0);
    for (auto i : g.interior()) {
        const double d = p.rhs.cell_mass[i] / scale;
        if (!std::isfinite(d)) throw InfeasibleError("solve_dirichlet: non-finite density, no bounded subsolution");
        if (d < 0.0) throw PreconditionError("solve_dirichlet: negative density");
        f[i] = d;
    }
    return f;
}

}  // namespace

DirichletProblem make_problem(int m, const ScalarField& density, const ScalarField& boundary) {
    DirichletProblem p;
    p.domain = density.domain();
    check_order(p.domain->n(), m, "make_problem");
    p.m = m;
    p.rhs = measure_from_density(density, m);
    p.boundary = boundary;
    for (auto b : p.domain->boundary())
        if (!std::isfinite(boundary[b])) throw ConfigError("make_problem: boundary data not finite");
    return p;
}

nlohmann::json summary_json(const SolveResult& r) {
    return {{"iterations", r.iterations},     {"residual", r.residual},
            {"measure_error", r.measure_error}, {"converged", r.converged},
            {"omega", r.omega},               {"subsolution_slope", r.subsolution_slope},
            {"flags", r.flags}};
}

ScalarField harmonic_extension(const ScalarField& boundary, const SweepOptions& opt) {
    const GridDomain& g = boundary.grid();
    ScalarField out(boundary.domain(), std::numeric_limits<double>::quiet_NaN());
    double mean = 0.0;
    for (auto b : g.boundary()) {
        out[b] = boundary[b];
        mean += boundary[b];
    }
    if (!g.boundary().empty()) mean /= static_cast<double>(g.boundary().size());
    for (auto i : g.interior()) out[i] = mean;
    std::vector<double> u(out.values().begin(), out.values().end());
    run_sweeps(
        g, u, opt, [&](std::size_t i, const std::vector<double>& v) { return pencil_value(g, v, i, 1, 0.0); },
        [](std::size_t, double v) { return v; });
    std::copy(u.begin(), u.end(), out.values().begin());
    return out;
}

SolveResult solve_dirichlet(const DirichletProblem& p, const SweepOptions& opt) {
    const GridDomain& g = *p.domain;
    const int n = g.n(), m = p.m;
    check_order(n, m, "solve_dirichlet");
    const auto f = densities(p);

    SweepOptions hopt = opt;
    hopt.omega = 0.0;
    hopt.tol = std::min(opt.tol, 1e-12);
    const auto harm = harmonic_extension(p.boundary, hopt);

    double fmax = 0.0;
    for (auto i : g.interior()) fmax = std::max(fmax, f[i]);
    double A = 0.0;
    if (m == 1) {
        A = fmax / n;
    } else {
        double hnorm = 0.0;
        for (auto i : g.interior()) hnorm = std::max(hnorm, eigenvalues(node_hessian(g, harm.values(), i)).sup_norm());
        A = std::pow(fmax / binomial(n, m), 1.0 / m) + hnorm;
    }
    if (!std::isfinite(A)) throw InfeasibleError("solve_dirichlet: no bounded subsolution");
    double rb2 = 0.0;
    for (auto b : g.boundary()) rb2 = std::max(rb2, g.abs2(b));

    SolveResult r;
    r.subsolution_slope = A;
    r.field = harm;
    for (auto i : g.interior()) r.field[i] = harm[i] + A * (g.abs2(i) - rb2);
    std::vector<double> u(r.field.values().begin(), r.field.values().end());
    const auto stats = run_sweeps(
        g, u, opt, [&](std::size_t i, const std::vector<double>& v) { return pencil_value(g, v, i, m, f[i]); },
        [](std::size_t, double v) { return v; });
    std::copy(u.begin(), u.end(), r.field.values().begin());
    r.iterations = stats.iterations;
    r.residual = stats.final_update;
    r.converged = stats.converged;
    r.omega = stats.omega;
    r.history = stats.history;
    if (!r.converged) r.flags.push_back("not converged");
    const double got = hessian_measure(r.field, m).total;
    r.measure_error = p.rhs.total > 0.0 ? std::abs(got - p.rhs.total) / p.rhs.total : std::abs(got);
    return r;
}

ComparisonReport comparison_check(const ScalarField& u, const ScalarField& v, int m, double tol) {
    const GridDomain& g = u.grid();
    check_order(g.n(), m, "comparison_check");
    ComparisonReport rep;
    for (auto i : g.interior()) {
        const double su = sigma_k(eigenvalues(node_hessian(g, u.values(), i)), m);
        const double sv = sigma_k(eigenvalues(node_hessian(g, v.values(), i)), m);
        const double gap = su - sv;
        rep.worst_measure_gap = std::max(rep.worst_measure_gap, gap);
        if (gap > tol * (1.0 + std::abs(sv))) rep.hypothesis_ok = false;
    }
    for (auto b : g.boundary())
        if (v[b] > u[b] + tol) rep.boundary_ok = false;
    if (!rep.hypothesis_ok || !rep.boundary_ok) {
        rep.vacuous = true;
        return rep;
    }
    for (auto i : g.interior()) rep.worst_violation = std::max(rep.worst_violation, v[i] - u[i]);
    rep.ok = rep.worst_violation <= tol;
    return rep;
}

double stability_constant(double A, double tau, int m) {
    if (!(tau > 1.0)) throw DomainError("stability constant needs tau > 1");
    return 1.0 + std::pow(2.0, tau) * std::pow(A, 1.0 / m) / (1.0 - std::pow(2.0, 1.0 - tau));
}

double stability_exponent(double tau, int m) {
    if (!(tau > 1.0)) throw DomainError("stability exponent needs tau > 1");
    return (tau - 1.0) / (tau * (m + 1) - m);
}

StabilityReport stability_bound(const ScalarField& u, const ScalarField& v, const DiscreteMeasure& mu, double A,
                                double tau, int m, double tol) {
    const GridDomain& g = u.grid();
    check_order(g.n(), m, "stability_bound");
    StabilityReport rep;
    rep.C = stability_constant(A, tau, m);
    rep.gamma = stability_exponent(tau, m);
    const auto mu_u = hessian_measure(u, m);
    for (auto i : g.interior()) {
        const double d = std::max(v[i] - u[i], 0.0);
        rep.lhs = std::max(rep.lhs, d);
        rep.l1_mu += d * mu.cell_mass[i];
        if (mu_u.cell_mass[i] > mu.cell_mass[i] * (1.0 + 1e-6) + 1e-12 * g.cell_volume()) rep.supersolution_ok = false;
    }
    for (auto b : g.boundary())
        if (v[b] > u[b] + tol) rep.boundary_ok = false;
    rep.rhs = 2.0 * std::pow(rep.l1_mu, 1.0 / (m + 1)) + rep.C * std::pow(rep.l1_mu, rep.gamma);
    rep.ok = rep.lhs <= rep.rhs * (1.0 + tol);
    return rep;
}

CapsliceReport capslice_inequality_check(const ScalarField& u, const ScalarField& v, double s, double t, int m,
                                         double factor, const SweepOptions& opt) {
    const GridDomain& g = u.grid();
    check_order(g.n(), m, "capslice_inequality_check");
    CapsliceReport rep;
    rep.factor = factor;
    for (auto b : g.boundary())
        if (u[b] - v[b] < -1e-12) rep.boundary_ok = false;
    NodeSet slice;
    const auto mu = hessian_measure(u, m);
    for (auto i : g.interior()) {
        if (u[i] < v[i] - s - t) slice.push_back(i);
        if (u[i] < v[i] - s) rep.rhs += mu.cell_mass[i];
    }
    rep.set_size = slice.size();
    if (slice.empty()) {
        rep.vacuous = true;
        return rep;
    }
    CompactSet K;
    K.domain = u.domain();
    K.nodes = std::move(slice);
    K.volume = static_cast<double>(K.nodes.size()) * g.cell_volume();
    for (auto i : K.nodes) K.hausdorff_to_boundary = std::max(K.hausdorff_to_boundary, g.dist(i));
    K.label = "sublevel";
    rep.capacity = capacity(K, m, opt).value;
    rep.lhs = std::pow(t, m) * rep.capacity;
    rep.ok = rep.lhs <= rep.rhs * factor;
    return rep;
}

bool is_radial(const ScalarField& u, double tol) {
    const GridDomain& g = u.grid();
    const double scale = tol * (1.0 + u.sup_norm());
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (g.node_class(i) == NodeClass::Exterior) continue;
        auto idx = g.lattice_index(i);
        // reflections x -> -x on each axis and the swap of the two real axes of z1
        for (int a = 0; a < g.real_dim(); ++a) {
            auto r = idx;
            r[static_cast<std::size_t>(a)] = -r[static_cast<std::size_t>(a)];
            if (std::abs(u[g.flat_index(r)] - u[i]) > scale) return false;
        }
        auto sw = idx;
        std::swap(sw[0], sw[1]);
        if (std::abs(u[g.flat_index(sw)] - u[i]) > scale) return false;
        if (g.n() == 2) {
            auto sw2 = idx;
            std::swap(sw2[0], sw2[2]);
            std::swap(sw2[1], sw2[3]);
            if (std::abs(u[g.flat_index(sw2)] - u[i]) > scale) return false;
        }
    }
    return true;
}

CegrellReport cegrell_check(const ScalarField& u, const ScalarField& v, const ScalarField& w, int m, int k,
                            double tol) {
    const GridDomain& g = u.grid();
    check_order(g.n(), m, "cegrell_check");
    if (k < 0 || k > m - 1) throw DomainError("cegrell_check: need 0 <= k <= m - 1");
    CegrellReport rep;
    if (!is_radial(u) || !is_radial(v) || !is_radial(w)) {
        rep.supported = false;
        rep.note = "mixed products are only formed for radial fields";
        return rep;
    }
    rep.note = "radial commuting family";
    const double scale = g.cell_volume() * kappa(g.n(), m);
    std::vector<HermitianForm> forms(static_cast<std::size_t>(m));
    for (auto i : g.interior()) {
        const auto Hu = node_hessian(g, u.values(), i);
        const auto Hv = node_hessian(g, v.values(), i);
        const auto Hw = node_hessian(g, w.values(), i);
        forms[0] = Hu;
        for (int a = 0; a < k; ++a) forms[static_cast<std::size_t>(1 + a)] = Hv;
        for (int a = 1 + k; a < m; ++a) forms[static_cast<std::size_t>(a)] = Hw;
        rep.lhs += mixed_sigma(forms) * scale;
        rep.Hu += sigma_k(eigenvalues(Hu), m) * scale;
        rep.Hv += sigma_k(eigenvalues(Hv), m) * scale;
        rep.Hw += sigma_k(eigenvalues(Hw), m) * scale;
    }
    rep.rhs = std::pow(std::max(rep.Hu, 0.0), 1.0 / m) * std::pow(std::max(rep.Hv, 0.0), double(k) / m) *
              std::pow(std::max(rep.Hw, 0.0), double(m - k - 1) / m);
    rep.ok = rep.lhs <= rep.rhs * (1.0 + tol) + 1e-12;
    return rep;
}

}  // namespace hessian
