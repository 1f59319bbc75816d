#include "hessian/symm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "hessian/errors.hpp"

namespace hessian {

namespace {

void check_dim(int n) {
    if (n < 1 || n > kMaxDim) {
        throw DomainError("dimension must be in [1, 4], got " + std::to_string(n));
    }
}

// Determinant of a small complex matrix by Gaussian elimination with partial pivoting.
std::complex<double> small_det(std::array<std::complex<double>, 16> a, int k) {
    std::complex<double> det = 1.0;
    for (int c = 0; c < k; ++c) {
        int piv = c;
        for (int r = c + 1; r < k; ++r) {
            if (std::abs(a[r * 4 + c]) > std::abs(a[piv * 4 + c])) piv = r;
        }
        if (std::abs(a[piv * 4 + c]) == 0.0) return 0.0;
        if (piv != c) {
            for (int j = 0; j < k; ++j) std::swap(a[c * 4 + j], a[piv * 4 + j]);
            det = -det;
        }
        det *= a[c * 4 + c];
        for (int r = c + 1; r < k; ++r) {
            const std::complex<double> f = a[r * 4 + c] / a[c * 4 + c];
            for (int j = c; j < k; ++j) a[r * 4 + j] -= f * a[c * 4 + j];
        }
    }
    return det;
}

// Cyclic Jacobi on a real symmetric matrix of order dim <= 8, stored row-major
// with leading dimension 8. Leaves eigenvalues on the diagonal.
void cyclic_jacobi(std::array<double, 64>& a, int dim, double tol) {
    auto off_norm = [&] {
        double s = 0.0;
        for (int p = 0; p < dim; ++p)
            for (int q = 0; q < dim; ++q)
                if (p != q) s += a[p * 8 + q] * a[p * 8 + q];
        return std::sqrt(s);
    };
    for (int sweep = 0; sweep < 100 && off_norm() > tol; ++sweep) {
        for (int p = 0; p < dim - 1; ++p) {
            for (int q = p + 1; q < dim; ++q) {
                const double apq = a[p * 8 + q];
                if (std::abs(apq) < 1e-300) continue;
                const double theta = (a[q * 8 + q] - a[p * 8 + p]) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < dim; ++k) {
                    const double akp = a[k * 8 + p];
                    const double akq = a[k * 8 + q];
                    a[k * 8 + p] = c * akp - s * akq;
                    a[k * 8 + q] = s * akp + c * akq;
                }
                for (int k = 0; k < dim; ++k) {
                    const double apk = a[p * 8 + k];
                    const double aqk = a[q * 8 + k];
                    a[p * 8 + k] = c * apk - s * aqk;
                    a[q * 8 + k] = s * apk + c * aqk;
                }
            }
        }
    }
}

}  // namespace

EigenTuple::EigenTuple(std::span<const double> values) : n_(static_cast<int>(values.size())) {
    check_dim(n_);
    std::copy(values.begin(), values.end(), v_.begin());
    std::sort(v_.begin(), v_.begin() + n_);
}

double EigenTuple::sup_norm() const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) s = std::max(s, std::abs(v_[static_cast<std::size_t>(i)]));
    return s;
}

EigenTuple EigenTuple::shifted(double s) const {
    EigenTuple out = *this;
    for (int i = 0; i < n_; ++i) out.v_[static_cast<std::size_t>(i)] -= s;
    return out;
}

HermitianForm::HermitianForm(int dim) : dim_(dim) { check_dim(dim); }

HermitianForm HermitianForm::identity(int dim) {
    HermitianForm h(dim);
    for (int j = 0; j < dim; ++j) h.set(j, j, 1.0);
    return h;
}

HermitianForm HermitianForm::diagonal(std::span<const double> d) {
    HermitianForm h(static_cast<int>(d.size()));
    for (int j = 0; j < h.dim(); ++j) h.set(j, j, d[static_cast<std::size_t>(j)]);
    return h;
}

void HermitianForm::set(int j, int k, std::complex<double> value) {
    if (j == k) {
        a_[idx(j, j)] = value.real();
        return;
    }
    a_[idx(j, k)] = value;
    a_[idx(k, j)] = std::conj(value);
}

void HermitianForm::add_diagonal(double t) {
    for (int j = 0; j < dim_; ++j) a_[idx(j, j)] += t;
}

double HermitianForm::inf_norm() const {
    double best = 0.0;
    for (int j = 0; j < dim_; ++j) {
        double row = 0.0;
        for (int k = 0; k < dim_; ++k) row += std::abs(a_[idx(j, k)]);
        best = std::max(best, row);
    }
    return best;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

double sigma_k(const EigenTuple& lambda, int k) {
    const int n = lambda.size();
    if (k < 0 || k > n) {
        throw DomainError("sigma_k: k=" + std::to_string(k) + " outside [0, " + std::to_string(n) + "]");
    }
    if (k == 0) return 1.0;
    double sum = 0.0;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        if (std::popcount(mask) != k) continue;
        double prod = 1.0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) prod *= lambda[i];
        sum += prod;
    }
    return sum;
}

double sigma_k_minor_oracle(const HermitianForm& H, int k) {
    const int n = H.dim();
    if (k < 0 || k > n) {
        throw DomainError("sigma_k_minor_oracle: k=" + std::to_string(k) + " outside [0, " +
                          std::to_string(n) + "]");
    }
    if (k == 0) return 1.0;
    double sum = 0.0;
    for (unsigned mask = 1; mask < (1u << n); ++mask) {
        if (std::popcount(mask) != k) continue;
        std::array<int, kMaxDim> rows{};
        int r = 0;
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) rows[static_cast<std::size_t>(r++)] = i;
        std::array<std::complex<double>, 16> sub{};
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) sub[a * 4 + b] = H(rows[a], rows[b]);
        sum += small_det(sub, k).real();
    }
    return sum;
}

EigenTuple eigenvalues(const HermitianForm& H) {
    const int n = H.dim();
    if (n == 1) {
        const double v = H(0, 0).real();
        return EigenTuple(std::span<const double>(&v, 1));
    }
    if (n == 2) {
        const double a = H(0, 0).real();
        const double d = H(1, 1).real();
        const double b = std::abs(H(0, 1));
        const double mid = 0.5 * (a + d);
        const double rad = std::hypot(0.5 * (a - d), b);
        const std::array<double, 2> v{mid - rad, mid + rad};
        return EigenTuple(v);
    }
    // Real embedding [[Re, -Im], [Im, Re]] doubles every eigenvalue.
    std::array<double, 64> a{};
    const int dim = 2 * n;
    for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
            const auto z = H(j, k);
            a[j * 8 + k] = z.real();
            a[(j + n) * 8 + (k + n)] = z.real();
            a[j * 8 + (k + n)] = -z.imag();
            a[(j + n) * 8 + k] = z.imag();
        }
    }
    cyclic_jacobi(a, dim, 1e-12 * std::max(1.0, H.inf_norm()));
    std::array<double, 8> d{};
    for (int i = 0; i < dim; ++i) d[static_cast<std::size_t>(i)] = a[i * 8 + i];
    std::sort(d.begin(), d.begin() + dim);
    std::array<double, kMaxDim> v{};
    for (int i = 0; i < n; ++i)
        v[static_cast<std::size_t>(i)] = 0.5 * (d[2 * i] + d[2 * i + 1]);
    return EigenTuple(std::span<const double>(v.data(), static_cast<std::size_t>(n)));
}

double default_slack(const EigenTuple& lambda) { return 1e-10 * std::max(1.0, lambda.sup_norm()); }

bool in_gamma_m(const EigenTuple& lambda, int m, double slack) {
    if (m < 1 || m > lambda.size()) {
        throw DomainError("in_gamma_m: m=" + std::to_string(m) + " outside [1, n]");
    }
    for (int k = 1; k <= m; ++k)
        if (sigma_k(lambda, k) < -slack) return false;
    return true;
}

bool in_gamma_m(const EigenTuple& lambda, int m) { return in_gamma_m(lambda, m, default_slack(lambda)); }

double cone_shift(const EigenTuple& lambda, int m) {
    const int n = lambda.size();
    if (m < 1 || m > n) throw DomainError("cone_shift: m outside [1, n]");
    double mean = 0.0;
    for (double v : lambda.values()) mean += v;
    mean /= n;
    if (m == 1) return mean;
    if (m == n) return lambda.min();
    // The feasible shifts form a half-line; lambda_min is inside, the mean is the
    // sigma_1 = 0 end and so bounds it from above.
    double lo = lambda.min();
    double hi = mean;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (in_gamma_m(lambda.shifted(mid), m, 0.0)) lo = mid;
        else hi = mid;
    }
    return lo;
}

double pencil_shift_bisect(const EigenTuple& lambda, int m, double target) {
    const int n = lambda.size();
    if (target < 0.0) target = 0.0;
    const double s_star = cone_shift(lambda, m);
    if (target == 0.0) return s_star;
    const double base = std::min(lambda.min(), s_star);
    // For s <= lambda_min every shifted eigenvalue exceeds lambda_min - s, hence
    // sigma_m >= C(n,m) (lambda_min - s)^m.
    double lo = base - std::pow(target / binomial(n, m), 1.0 / m) - 1e-300;
    double hi = s_star;
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (sigma_k(lambda.shifted(mid), m) > target) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

double pencil_shift(const EigenTuple& lambda, int m, double target) {
    const int n = lambda.size();
    if (m < 1 || m > n) throw DomainError("pencil_shift: m outside [1, n]");
    if (target < 0.0) target = 0.0;
    if (m == 1) {
        double tr = 0.0;
        for (double v : lambda.values()) tr += v;
        return (tr - target) / n;
    }
    if (n == 2) {
        const double a = lambda[0];
        const double b = lambda[1];
        return 0.5 * ((a + b) - std::sqrt((b - a) * (b - a) + 4.0 * target));
    }
    return pencil_shift_bisect(lambda, m, target);
}

}  // namespace hessian
