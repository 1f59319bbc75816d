#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include <cmath>
#include <numbers>
#include <unordered_map>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include "hessian/domain.hpp"

namespace oracle {

// (1/4) Delta_h U = f on interior nodes, U = g on boundary nodes (n = 1, 5-point
// stencil), solved directly.
inline hessian::ScalarField poisson_direct(const hessian::ScalarField& f, const hessian::ScalarField& g) {
    using namespace hessian;
    const GridDomain& d = f.grid();
    std::unordered_map<std::size_t, int> row;
    int k = 0;
    for (auto i : d.interior()) row[i] = k++;
    const double h2 = d.h() * d.h();
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs(k);
    for (auto i : d.interior()) {
        const int r = row[i];
        // -(Delta_h U) = -4 f, symmetric positive definite
        double b = -4.0 * f[i] * h2;
        trip.emplace_back(r, r, 4.0);
        for (int a = 0; a < 2; ++a)
            for (int s : {-1, 1}) {
                const auto nb = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + s * d.stride(a));
                if (d.is_interior(nb))
                    trip.emplace_back(r, row[nb], -1.0);
                else
                    b += g[nb];
            }
        rhs[r] = b;
    }
    Eigen::SparseMatrix<double> A(k, k);
    A.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    const Eigen::VectorXd x = solver.solve(rhs);
    ScalarField out = g;
    for (auto i : d.interior()) out[i] = x[row[i]];
    return out;
}

// Harmonic extension of boundary data on the unit disc by the Poisson integral.
template <class G>
double poisson_integral(G&& boundary, double x, double y, int quad = 4096) {
    const double r2 = x * x + y * y;
    double s = 0.0;
    for (int k = 0; k < quad; ++k) {
        const double t = 2.0 * std::numbers::pi * (k + 0.5) / quad;
        const double c = std::cos(t), sn = std::sin(t);
        const double d2 = (c - x) * (c - x) + (sn - y) * (sn - y);
        s += (1.0 - r2) / d2 * boundary(c, sn);
    }
    return s / quad;
}

}  // namespace oracle
