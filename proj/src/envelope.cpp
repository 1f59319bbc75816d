#include "hessian/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hessian/errors.hpp"
#include "hessian/smooth.hpp"
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

void finalize(EnvelopeResult& r, const ScalarField& obstacle, int m, double tol) {
    const GridDomain& g = obstacle.grid();
    r.contact_tol = contact_tolerance(g, tol);
    const double scale = g.cell_volume() * kappa(g.n(), m);
    r.contact.clear();
    r.complementarity_defect = 0.0;
    for (auto i : g.interior()) {
        if (r.field[i] >= obstacle[i] - r.contact_tol) r.contact.push_back(i);
        const double s = sigma_k(eigenvalues(node_hessian(g, r.field.values(), i)), m);
        r.complementarity_defect += (obstacle[i] - r.field[i]) * s * scale;
    }
    r.total_mass = hessian_measure(r.field, m).total;
}

// Node value t with sigma_m(lambda - t/h^2) = exp(j (t - obst)) splus, t below the cone top.
double penalized_node(const EigenTuple& lam, int n, int m, double h2, double obst, double splus, double j,
                      double current) {
    const double top = cone_shift(lam, m);
    if (!(splus > 0.0)) return top * h2;
    const double log_plus = std::log(splus);
    const double deg = n - m + 1;
    auto F = [&](double s) {
        const double sm = sigma_k(lam.shifted(s), m);
        if (!(sm > 0.0)) return -std::numeric_limits<double>::infinity();
        return std::log(sm) - j * (h2 * s - obst) - log_plus;
    };
    auto dF = [&](double s) {
        const auto e = lam.shifted(s);
        return -deg * sigma_k(e, m - 1) / sigma_k(e, m) - j * h2;
    };
    // bracket around the current value
    double hi = top, lo;
    double s = std::min(current / h2, top);
    double step = std::max(1.0, std::pow(splus / binomial(n, m), 1.0 / m));
    if (s < top && F(s) > 0.0) {
        lo = s;
    } else {
        hi = s < top ? s : top;
        lo = hi - step;
        while (!(F(lo) > 0.0)) {
            step *= 2.0;
            lo = hi - step;
            if (step > 1e300) break;
        }
        s = lo;
    }
    for (int it = 0; it < 200; ++it) {
        const double f = F(s);
        if (f > 0.0) lo = s;
        else hi = s;
        if (f == 0.0) break;
        double next = s - f / dF(s);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - s) <= 1e-15 * (1.0 + std::abs(s)) || hi - lo <= 1e-15 * (1.0 + std::abs(s))) {
            s = next;
            break;
        }
        s = next;
    }
    return s * h2;
}

}  // namespace

double contact_tolerance(const GridDomain& g, double tol) { return std::max(10.0 * tol, g.h() * g.h()); }

nlohmann::json summary_json(const EnvelopeResult& r) {
    nlohmann::json j;
    j["iterations"] = r.iterations;
    j["final_update"] = r.final_update;
    j["converged"] = r.converged;
    j["omega"] = r.omega;
    j["contact_nodes"] = r.contact.size();
    j["contact_tol"] = r.contact_tol;
    j["complementarity_defect"] = r.complementarity_defect;
    j["total_mass"] = r.total_mass;
    // run-length encoding of the contact set over interior order: alternating
    // counts, starting with a (possibly zero) run of contact nodes
    const GridDomain& g = r.field.grid();
    std::vector<std::size_t> runs;
    bool state = true;
    std::size_t count = 0, k = 0;
    for (auto i : g.interior()) {
        const bool in = k < r.contact.size() && r.contact[k] == i;
        if (in) ++k;
        if (in != state) {
            runs.push_back(count);
            count = 0;
            state = in;
        }
        ++count;
    }
    runs.push_back(count);
    j["contact_rle"] = runs;
    if (!r.ladder.empty()) {
        j["ladder"] = r.ladder;
        j["ladder_sup_change"] = r.ladder_sup_change;
        j["ladder_iterations"] = r.ladder_iterations;
        j["monotonicity_violation"] = r.monotonicity_violation;
    }
    j["flags"] = r.flags;
    return j;
}

EnvelopeResult envelope_sweep(const ScalarField& obstacle, int m, const SweepOptions& opt,
                              const std::optional<ScalarField>& boundary) {
    const GridDomain& g = obstacle.grid();
    check_order(g.n(), m, "envelope_sweep");
    EnvelopeResult r;
    r.field = obstacle;
    if (boundary) {
        for (auto b : g.boundary()) {
            if ((*boundary)[b] > obstacle[b] + 1e-14 * (1.0 + std::abs(obstacle[b])))
                throw PreconditionError("envelope_sweep: boundary data above the obstacle");
            r.field[b] = (*boundary)[b];
        }
    }
    std::vector<double> u(r.field.values().begin(), r.field.values().end());
    const auto stats = run_sweeps(
        g, u, opt, [&](std::size_t i, const std::vector<double>& v) { return cone_top(g, v, i, m); },
        [&](std::size_t i, double v) { return std::min(obstacle[i], v); });
    std::copy(u.begin(), u.end(), r.field.values().begin());
    r.iterations = stats.iterations;
    r.final_update = stats.final_update;
    r.converged = stats.converged;
    r.omega = stats.omega;
    if (!r.converged) r.flags.push_back("not converged");
    finalize(r, obstacle, m, opt.tol);
    return r;
}

ScalarField sigma_plus(const ScalarField& obstacle, int m) {
    const GridDomain& g = obstacle.grid();
    check_order(g.n(), m, "sigma_plus");
    ScalarField out(obstacle.domain(), 0.0);
    const double slack = g.h() * g.h();
    for (auto i : g.interior()) {
        const auto lam = eigenvalues(node_hessian(g, obstacle.values(), i));
        out[i] = in_gamma_m(lam, m, slack) ? std::max(sigma_k(lam, m), 0.0) : 0.0;
    }
    return out;
}

EnvelopeResult envelope_penalized(const ScalarField& obstacle, int m, std::span<const double> j_ladder,
                                  const SweepOptions& opt) {
    const GridDomain& g = obstacle.grid();
    check_order(g.n(), m, "envelope_penalized");
    if (j_ladder.empty()) throw ConfigError("envelope_penalized: empty j ladder");
    for (std::size_t k = 1; k < j_ladder.size(); ++k)
        if (!(j_ladder[k] > j_ladder[k - 1])) throw ConfigError("envelope_penalized: j ladder must increase");
    const auto splus = sigma_plus(obstacle, m);
    const int n = g.n();
    const double h2 = g.h() * g.h();

    EnvelopeResult r;
    r.field = obstacle;
    // Subsolution start: min h + A (|z|^2 - max boundary |z|^2) with A^m C(n,m) >= max sigma^+.
    double lo = std::numeric_limits<double>::infinity(), smax = 0.0, rb2 = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.node_class(i) != NodeClass::Exterior) lo = std::min(lo, obstacle[i]);
    for (auto i : g.interior()) smax = std::max(smax, splus[i]);
    for (auto b : g.boundary()) rb2 = std::max(rb2, g.abs2(b));
    const double A = std::pow(smax / binomial(n, m), 1.0 / m);
    for (auto i : g.interior()) r.field[i] = lo + A * (g.abs2(i) - rb2);

    std::vector<double> u(r.field.values().begin(), r.field.values().end());
    std::vector<double> prev;
    r.ladder.assign(j_ladder.begin(), j_ladder.end());
    for (double j : j_ladder) {
        const auto stats = run_sweeps(
            g, u, opt,
            [&](std::size_t i, const std::vector<double>& v) {
                if (m == 1) {
                    // only the trace matters: use (T/n, ..., T/n)
                    const double T = pencil_base_trace(g, v, i);
                    std::array<double, kMaxDim> vals{};
                    for (int a = 0; a < n; ++a) vals[static_cast<std::size_t>(a)] = T / n;
                    return penalized_node(EigenTuple(std::span<const double>(vals.data(), static_cast<std::size_t>(n))),
                                          n, m, h2, obstacle[i], splus[i], j, v[i]);
                }
                return penalized_node(eigenvalues(pencil_base(g, v, i)), n, m, h2, obstacle[i], splus[i], j, v[i]);
            },
            [](std::size_t, double v) { return v; });
        r.iterations += stats.iterations;
        r.ladder_iterations.push_back(stats.iterations);
        r.final_update = stats.final_update;
        r.converged = stats.converged;
        r.omega = stats.omega;
        if (!stats.converged) {
            std::ostringstream os;
            os << "j=" << j << " not converged";
            r.flags.push_back(os.str());
        }
        if (!prev.empty()) {
            double sup = 0.0, back = 0.0;
            for (auto i : g.interior()) {
                sup = std::max(sup, std::abs(u[i] - prev[i]));
                back = std::max(back, prev[i] - u[i]);
            }
            r.ladder_sup_change.push_back(sup);
            r.monotonicity_violation = std::max(r.monotonicity_violation, back);
        }
        prev = u;
    }
    if (r.monotonicity_violation > opt.tol * 10.0) r.flags.push_back("ladder not monotone in j");
    std::copy(u.begin(), u.end(), r.field.values().begin());
    finalize(r, obstacle, m, opt.tol);
    return r;
}

MeasureBoundReport measure_bound_check(const ScalarField& obstacle, const EnvelopeResult& env, int m,
                                       double band_factor, double leak_tol, double cell_tol) {
    const GridDomain& g = obstacle.grid();
    check_order(g.n(), m, "measure_bound_check");
    MeasureBoundReport rep;
    rep.leak_tol = leak_tol;
    rep.cell_tol = cell_tol;
    rep.band = band_factor * g.h();
    const auto splus = sigma_plus(obstacle, m);
    const auto mu = hessian_measure(env.field, m);
    const double scale = g.cell_volume() * kappa(g.n(), m);
    double smax = 0.0;
    for (auto i : g.interior()) smax = std::max(smax, splus[i]);
    const double abs_tol = 1e-6 * (1.0 + smax);
    rep.total_mass = mu.total;
    for (auto i : g.interior()) {
        const double cell = mu.cell_mass[i];
        if (env.field[i] < obstacle[i] - rep.band) {
            rep.leak_mass += cell;
            continue;
        }
        const double s = cell / scale;
        if (splus[i] > 0.0) rep.worst_ratio = std::max(rep.worst_ratio, s / splus[i]);
        if (s > splus[i] * (1.0 + cell_tol) + abs_tol) ++rep.cell_failures;
    }
    rep.leak_fraction = rep.total_mass > 0.0 ? rep.leak_mass / rep.total_mass : 0.0;
    rep.ok = rep.leak_fraction <= leak_tol && rep.cell_failures == 0;
    return rep;
}

std::vector<ScalarField> smoothing_ladder(const ScalarField& u, int m, std::span<const double> deltas,
                                          const SweepOptions& opt) {
    const GridDomain& g = u.grid();
    check_order(g.n(), m, "smoothing_ladder");
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.node_class(i) != NodeClass::Exterior && u[i] > 1e-12)
            throw PreconditionError("smoothing_ladder: field must be nonpositive");
    std::vector<double> ds(deltas.begin(), deltas.end());
    std::sort(ds.begin(), ds.end(), std::greater<>());
    // rho shifted to be <= 0 on every boundary node, so j * rho stays below the
    // boundary values and the max with it is m-sh on the whole stencil
    double rho_b = 0.0;
    for (auto b : g.boundary()) rho_b = std::max(rho_b, g.rho(b));
    std::vector<ScalarField> out;
    ScalarField running(u.domain(), std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < ds.size(); ++k) {
        const double j = static_cast<double>(k + 1);
        const auto reg = regularize(u, ds[k]);
        ScalarField hj(u.domain(), std::numeric_limits<double>::quiet_NaN());
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g.node_class(i) == NodeClass::Exterior) continue;
            const double v = std::isfinite(reg[i]) ? std::max(reg[i], u[i]) : u[i];
            running[i] = std::min(running[i], v);
            hj[i] = running[i];
        }
        auto env = envelope_sweep(hj, m, opt);
        ScalarField uj = env.field;
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (g.node_class(i) == NodeClass::Exterior) continue;
            uj[i] = std::max(uj[i], j * (g.rho(i) - rho_b));
        }
        out.push_back(std::move(uj));
    }
    return out;
}

}  // namespace hessian
