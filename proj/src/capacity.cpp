#include "hessian/capacity.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "hessian/envelope.hpp"
#include "hessian/errors.hpp"
#include "hessian/solver.hpp"

namespace hessian {

namespace {

void check_order(int n, int m, const char* who) {
    if (m < 1 || m > n) {
        std::ostringstream os;
        os << who << ": order " << m << " outside [1, " << n << "]";
        throw DomainError(os.str());
    }
}

std::vector<CapacityResult> ensure_caps(const std::vector<CompactSet>& family, int m,
                                        const std::vector<CapacityResult>* caps, const SweepOptions& opt,
                                        int threads) {
    if (caps) {
        if (caps->size() != family.size()) throw ConfigError("capacity list does not match the family");
        return *caps;
    }
    return capacities(family, m, opt, threads);
}

SetRow base_row(const CompactSet& K, const CapacityResult& c) {
    SetRow r;
    r.label = K.label;
    r.delta = K.hausdorff_to_boundary;
    r.volume = K.volume;
    r.capacity = c.value;
    return r;
}

}  // namespace

nlohmann::json to_json(const SetRow& r) {
    return {{"label", r.label}, {"delta", r.delta},   {"volume", r.volume}, {"mass", r.mass},
            {"capacity", r.capacity}, {"bound", r.bound}, {"ratio", r.ratio}, {"asserted", r.asserted},
            {"pass", r.pass}};
}

CapacityResult capacity(const CompactSet& K, int m, const SweepOptions& opt) {
    const GridDomain& g = *K.domain;
    check_order(g.n(), m, "capacity");
    CapacityResult res;
    res.set = K;
    if (K.empty()) {
        res.extremal = ScalarField(K.domain, 0.0);
        return res;
    }
    ScalarField obstacle(K.domain, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t i = 0; i < g.size(); ++i)
        if (g.node_class(i) != NodeClass::Exterior) obstacle[i] = 0.0;
    for (auto i : K.nodes) obstacle[i] = -1.0;
    auto env = envelope_sweep(obstacle, m, opt);
    res.extremal = std::move(env.field);
    res.iterations = env.iterations;
    res.final_update = env.final_update;
    res.converged = env.converged;
    res.value = env.total_mass;
    std::size_t hit = 0;
    for (auto i : K.nodes)
        if (res.extremal[i] <= -1.0 + env.contact_tol) ++hit;
    res.contact_fraction = static_cast<double>(hit) / static_cast<double>(K.nodes.size());
    for (auto b : g.boundary()) res.boundary_max = std::max(res.boundary_max, std::abs(res.extremal[b]));
    return res;
}

std::vector<CapacityResult> capacities(const std::vector<CompactSet>& family, int m, const SweepOptions& opt,
                                       int threads, bool keep_extremal) {
    std::vector<CapacityResult> out(family.size());
    auto one = [&](std::size_t k, const SweepOptions& o) {
        out[k] = capacity(family[k], m, o);
        if (!keep_extremal) out[k].extremal = ScalarField();
    };
    SweepOptions serial = opt;
    serial.threads = 1;
    const auto workers = static_cast<std::size_t>(std::max(1, std::min<int>(threads, static_cast<int>(family.size()))));
    if (workers <= 1) {
        for (std::size_t k = 0; k < family.size(); ++k) one(k, serial);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                try {
                    for (std::size_t k = next++; k < family.size(); k = next++) one(k, serial);
                } catch (...) {
                    errors[w] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
    return out;
}

DominationFit fit_domination(std::vector<std::pair<double, double>> pairs, double tau) {
    DominationFit fit;
    fit.tau = tau;
    fit.pairs = std::move(pairs);
    for (std::size_t k = 0; k < fit.pairs.size(); ++k) {
        const auto [mass, cap] = fit.pairs[k];
        if (cap > 1.0 || cap <= 0.0) continue;
        const double ratio = mass / std::pow(cap, tau);
        if (ratio > fit.max_ratio) {
            fit.max_ratio = ratio;
            fit.arg_max = k;
        }
    }
    fit.A = fit.max_ratio;
    return fit;
}

VolumeCapacityReport volume_capacity_check(const std::vector<CompactSet>& family, int m, double r,
                                           const std::vector<CapacityResult>* caps, const SweepOptions& opt,
                                           int threads) {
    if (family.empty()) throw ConfigError("volume_capacity_check: empty family");
    const GridDomain& g = *family.front().domain;
    check_order(g.n(), m, "volume_capacity_check");
    if (m == g.n()) throw DomainError("volume_capacity_check: m = n is not supported");
    const double rmax = double(m) / (g.n() - m);
    if (!(r > 0.0 && r < rmax)) {
        std::ostringstream os;
        os << "volume_capacity_check: r must lie in (0, " << rmax << ")";
        throw DomainError(os.str());
    }
    const auto cs = ensure_caps(family, m, caps, opt, threads);
    VolumeCapacityReport rep;
    rep.r = r;
    rep.single_sample = family.size() == 1;
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < family.size(); ++k) {
        SetRow row = base_row(family[k], cs[k]);
        row.mass = row.volume;
        row.ratio = row.capacity > 0.0 ? row.volume / std::pow(row.capacity, 1.0 + r) : 0.0;
        if (row.ratio > rep.N) {
            rep.N = row.ratio;
            rep.arg_max = k;
        }
        if (row.capacity > 0.0 && row.volume > 0.0) {
            lx.push_back(std::log(row.capacity));
            ly.push_back(std::log(row.volume));
        }
        rep.rows.push_back(row);
    }
    for (auto& row : rep.rows) row.bound = rep.N * std::pow(row.capacity, 1.0 + r);
    if (lx.size() >= 2) rep.slope = fit_line(lx, ly).slope;
    return rep;
}

double theorem_a_epsilon(double alpha, double r, int m) {
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("theorem_a_epsilon: alpha outside (0, 1]");
    return alpha * r / ((2.0 - alpha) * m + alpha);
}

namespace {

void check_phi(const ScalarField& phi, const HolderConstants& w, const char* who) {
    const GridDomain& g = phi.grid();
    const double bscale = 1e-9 * (1.0 + phi.sup_norm());
    for (auto b : g.boundary())
        if (std::abs(phi[b]) > bscale) throw PreconditionError(std::string(who) + ": phi must vanish on boundary nodes");
    const double semi = holder_seminorm(phi, w.alpha);
    if (semi > w.L * (1.0 + 1e-6)) {
        std::ostringstream os;
        os << who << ": Hoelder witness fails (sampled seminorm " << semi << " > " << w.L << ")";
        throw PreconditionError(os.str());
    }
}

}  // namespace

TheoremAReport theorem_a_check(const ScalarField& phi, const HolderConstants& witness,
                               const std::vector<CompactSet>& family, int m, double r,
                               const std::vector<CapacityResult>* caps, const SweepOptions& opt, int threads) {
    const GridDomain& g = phi.grid();
    check_order(g.n(), m, "theorem_a_check");
    if (m == g.n()) throw DomainError("theorem_a_check: m = n is not supported");
    const double rmax = double(m) / (g.n() - m);
    if (!(r > 0.0 && r < rmax)) throw DomainError("theorem_a_check: r outside (0, m/(n-m))");
    check_phi(phi, witness, "theorem_a_check");
    const auto cs = ensure_caps(family, m, caps, opt, threads);
    const auto mu = hessian_measure(phi, m);
    TheoremAReport rep;
    rep.alpha = witness.alpha;
    rep.kappa = witness.L;
    rep.r = r;
    rep.epsilon = theorem_a_epsilon(witness.alpha, r, m);
    for (std::size_t k = 0; k < family.size(); ++k) {
        SetRow row = base_row(family[k], cs[k]);
        row.mass = mu.mass_of(family[k].nodes);
        const double c = row.capacity;
        const double shape = std::pow(c, 1.0 + rep.epsilon) + std::pow(c, 1.0 + m * rep.epsilon);
        row.ratio = shape > 0.0 ? row.mass / shape : 0.0;
        if (c <= 1.0 && row.ratio > rep.A) {
            rep.A = row.ratio;
            rep.arg_max = k;
        }
        rep.rows.push_back(row);
    }
    for (auto& row : rep.rows) {
        const double c = row.capacity;
        row.bound = rep.A * (std::pow(c, 1.0 + rep.epsilon) + std::pow(c, 1.0 + m * rep.epsilon));
        row.pass = c > 1.0 || row.mass <= row.bound * (1.0 + 1e-12);
        if (!row.pass) ++rep.violations;
    }
    return rep;
}

BoundaryMassReport boundary_mass_check(const ScalarField& phi, const std::optional<HolderConstants>& witness,
                                       const std::vector<CompactSet>& family, int m, double disc_tol,
                                       const std::vector<CapacityResult>* caps, const SweepOptions& opt,
                                       int threads) {
    if (!witness) throw PreconditionError("boundary_mass_check: Hoelder witness missing");
    const GridDomain& g = phi.grid();
    check_order(g.n(), m, "boundary_mass_check");
    check_phi(phi, *witness, "boundary_mass_check");
    const auto cs = ensure_caps(family, m, caps, opt, threads);
    const auto mu = hessian_measure(phi, m);
    BoundaryMassReport rep;
    rep.disc_tol = disc_tol;
    for (std::size_t k = 0; k < family.size(); ++k) {
        SetRow row = base_row(family[k], cs[k]);
        row.asserted = true;
        row.mass = mu.mass_of(family[k].nodes);
        row.bound = std::pow(witness->L, m) * std::pow(row.delta, m * witness->alpha) * row.capacity;
        row.ratio = row.bound > 0.0 ? row.mass / row.bound : (row.mass > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
        row.pass = row.mass <= row.bound * (1.0 + disc_tol);
        rep.max_ratio = std::max(rep.max_ratio, row.ratio);
        if (!row.pass) ++rep.failures;
        rep.rows.push_back(row);
    }
    rep.ok = rep.failures == 0;
    return rep;
}

ModuliReport moduli_estimate_check(const ScalarField& phi, double alpha, const ScalarField& u,
                                   const std::vector<ScalarField>& ladder, int m, int k, double R) {
    const GridDomain& g = phi.grid();
    check_order(g.n(), m, "moduli_estimate_check");
    if (k < 1 || k > m) throw DomainError("moduli_estimate_check: need 1 <= k <= m");
    ModuliReport rep;
    rep.k = k;
    rep.alpha = alpha;
    rep.predicted = std::pow(alpha / 2.0, k);
    rep.predicted_tilde = rep.predicted / m;
    const auto mu = hessian_measure(phi, k);
    const double cell = g.cell_volume();
    for (const auto& v : ladder) {
        double l1 = 0.0, lhs = 0.0;
        for (auto i : g.interior()) {
            const double d = std::abs(u[i] - v[i]);
            l1 += d * cell;
            lhs += d * mu.cell_mass[i];
        }
        if (l1 > 1.0) throw PreconditionError("moduli_estimate_check: ||u - v||_1 > 1");
        rep.l1.push_back(l1);
        rep.lhs.push_back(lhs);
    }
    std::vector<double> lx, ly;
    for (std::size_t t = 0; t < rep.l1.size(); ++t) {
        if (rep.l1[t] <= 0.0) continue;
        rep.C_tilde = std::max(rep.C_tilde, rep.lhs[t] / (R * std::pow(rep.l1[t], rep.predicted_tilde)));
        rep.C = std::max(rep.C, rep.lhs[t] / (R * std::pow(rep.l1[t], rep.predicted)));
        if (rep.lhs[t] > 0.0) {
            lx.push_back(std::log(rep.l1[t]));
            ly.push_back(std::log(rep.lhs[t]));
        }
    }
    if (lx.size() >= 2) {
        rep.slope = fit_line(lx, ly).slope;
        rep.tilde_ok = rep.slope >= rep.predicted_tilde - 0.1;
        rep.c11_ok = rep.slope >= rep.predicted - 0.1;
    }
    return rep;
}

TheoremBExponents theorem_b_exponents(int m, int n, double alpha) {
    if (m < 1 || m > n) throw DomainError("theorem_b_exponents: need 1 <= m <= n");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("theorem_b_exponents: alpha outside (0, 1]");
    TheoremBExponents e;
    const double den = m * (m + 1) * alpha + (n - m) * ((2.0 - alpha) * m + alpha);
    e.gamma = m * alpha / den;
    e.gamma_prime = alpha / den;
    const double pw = std::pow(alpha, m) / std::pow(2.0, m);
    e.alpha_prime = 2.0 * e.gamma * pw;
    e.alpha_second = e.gamma_prime * pw;
    return e;
}

TheoremBReport theorem_b_experiment(const ScalarField& phi, double alpha, const ScalarField& g, int m,
                                    std::span<const double> delta_ladder, bool smooth_boundary,
                                    const SweepOptions& opt) {
    const GridDomain& dom = phi.grid();
    TheoremBReport rep;
    rep.predicted = theorem_b_exponents(m, dom.n(), alpha);
    rep.bound = smooth_boundary ? rep.predicted.alpha_prime : rep.predicted.alpha_second;
    DirichletProblem p;
    p.domain = phi.domain();
    p.m = m;
    p.rhs = hessian_measure(phi, m);
    p.boundary = g;
    const auto sol = solve_dirichlet(p, opt);
    rep.solve_iterations = sol.iterations;
    rep.solve_residual = sol.residual;
    rep.measured = measure_holder(sol.field, delta_ladder);
    rep.ok = rep.measured.exponent >= 0.5 * rep.bound;
    return rep;
}

}  // namespace hessian
