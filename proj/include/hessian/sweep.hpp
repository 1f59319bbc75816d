#pragma once

// Pointwise relaxation sweeps shared by the envelope and Dirichlet solvers.
//
// Serial mode visits interior nodes in lexicographic order. Parallel mode uses a
// coloring by the parity of i_x + i_y in each complex coordinate (2 colors for
// n = 1, 4 for n = 2): no stencil offset joins two nodes of one color, so each
// color is updated concurrently and the result does not depend on the number of
// threads. The two orderings agree only up to the stopping tolerance.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <thread>
#include <vector>

#include "hessian/domain.hpp"

namespace hessian {

struct SweepOptions {
    double tol = 1e-10;     // stop when the sup-norm of one sweep's change is below tol
    int max_iter = 200000;
    double omega = 1.0;     // relaxation factor; <= 0 picks auto_relaxation()
    int threads = 1;        // > 1 selects the colored parallel ordering
};

struct SweepStats {
    int iterations = 0;
    double final_update = 0.0;
    bool converged = false;
    double omega = 1.0;
    std::vector<double> history;  // sup change per sweep
};

/// SOR factor for the 2n-dimensional 5-point-type Laplacian on a domain of the
/// given inradius: 2 / (1 + sqrt(1 - rho_J^2)) with the Jacobi radius from the
/// first Dirichlet eigenvalue of the ball.
inline double auto_relaxation(const GridDomain& g) {
    const double j = g.n() == 1 ? 2.404825557695773 : 3.831705970207512;
    const double r = std::max(g.inradius(), 4.0 * g.h());
    const double lambda = (j / r) * (j / r);
    const double rho_j = 1.0 - g.h() * g.h() * lambda / (2.0 * g.real_dim());
    return 2.0 / (1.0 + std::sqrt(std::max(0.0, 1.0 - rho_j * rho_j)));
}

namespace detail {

inline std::vector<std::vector<std::size_t>> color_classes(const GridDomain& g) {
    const int colors = 1 << g.n();
    std::vector<std::vector<std::size_t>> out(static_cast<std::size_t>(colors));
    for (auto i : g.interior()) {
        const auto idx = g.lattice_index(i);
        int c = 0;
        for (int j = 0; j < g.n(); ++j) {
            const int p = (idx[static_cast<std::size_t>(2 * j)] + idx[static_cast<std::size_t>(2 * j + 1)]) & 1;
            c |= p << j;
        }
        out[static_cast<std::size_t>(c)].push_back(i);
    }
    return out;
}

}  // namespace detail

/// Runs sweeps until convergence. `candidate(i, u)` proposes the node value from
/// the current neighbours; `project(i, v)` post-processes the relaxed value (for
/// example min with an obstacle). Only interior values are written.
template <class Candidate, class Project>
SweepStats run_sweeps(const GridDomain& g, std::vector<double>& u, const SweepOptions& opt, Candidate&& candidate,
                      Project&& project) {
    SweepStats stats;
    stats.omega = opt.omega > 0.0 ? opt.omega : auto_relaxation(g);
    const double w = stats.omega;
    auto relax = [&](std::size_t i) {
        const double old = u[i];
        const double cand = candidate(i, static_cast<const std::vector<double>&>(u));
        const double next = project(i, old + w * (cand - old));
        u[i] = next;
        return std::abs(next - old);
    };
    if (opt.threads <= 1) {
        for (int it = 0; it < opt.max_iter; ++it) {
            double change = 0.0;
            for (auto i : g.interior()) change = std::max(change, relax(i));
            ++stats.iterations;
            stats.final_update = change;
            stats.history.push_back(change);
            if (!(change >= opt.tol)) {
                stats.converged = std::isfinite(change);
                break;
            }
        }
        return stats;
    }
    const auto classes = detail::color_classes(g);
    const auto nt = static_cast<std::size_t>(opt.threads);
    std::vector<double> partial(nt, 0.0);
    for (int it = 0; it < opt.max_iter; ++it) {
        double change = 0.0;
        for (const auto& cls : classes) {
            std::fill(partial.begin(), partial.end(), 0.0);
            {
                std::vector<std::jthread> pool;
                const std::size_t chunk = (cls.size() + nt - 1) / nt;
                for (std::size_t t = 0; t < nt; ++t) {
                    const std::size_t lo = t * chunk;
                    const std::size_t hi = std::min(cls.size(), lo + chunk);
                    if (lo >= hi) break;
                    pool.emplace_back([&, t, lo, hi] {
                        double c = 0.0;
                        for (std::size_t k = lo; k < hi; ++k) c = std::max(c, relax(cls[k]));
                        partial[t] = c;
                    });
                }
            }
            for (double c : partial) change = std::max(change, c);
        }
        ++stats.iterations;
        stats.final_update = change;
        stats.history.push_back(change);
        if (!(change >= opt.tol)) {
            stats.converged = std::isfinite(change);
            break;
        }
    }
    return stats;
}

}  // namespace hessian
