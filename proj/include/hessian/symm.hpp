#pragma once

// Elementary symmetric functions, the Garding cone and small Hermitian
// eigenproblems. Dimensions are tiny (n <= 4), so everything here works on
// fixed-capacity stack arrays.

#include <array>
#include <complex>
#include <cstddef>
#include <span>

namespace hessian {

inline constexpr int kMaxDim = 4;

/// Sorted (ascending) eigenvalues of an n x n Hermitian form.
class EigenTuple {
public:
    EigenTuple() = default;
    /// Takes the values as given and sorts them.
    explicit EigenTuple(std::span<const double> values);

    int size() const { return n_; }
    double operator[](int i) const { return v_[static_cast<std::size_t>(i)]; }
    std::span<const double> values() const { return {v_.data(), static_cast<std::size_t>(n_)}; }

    double min() const { return v_[0]; }
    double max() const { return v_[static_cast<std::size_t>(n_ - 1)]; }
    double sup_norm() const;

    /// lambda - s * (1, ..., 1); order is preserved.
    EigenTuple shifted(double s) const;

private:
    std::array<double, kMaxDim> v_{};
    int n_ = 0;
};

/// n x n complex Hermitian matrix, n in {1,...,4}.
class HermitianForm {
public:
    explicit HermitianForm(int dim = 1);

    static HermitianForm identity(int dim);
    static HermitianForm diagonal(std::span<const double> d);

    int dim() const { return dim_; }
    std::complex<double> operator()(int j, int k) const { return a_[idx(j, k)]; }

    /// Sets entry (j,k) and its mirror (k,j) = conj. Diagonal imaginary parts are dropped.
    void set(int j, int k, std::complex<double> value);
    void add_diagonal(double t);

    /// Max absolute row sum.
    double inf_norm() const;

private:
    static std::size_t idx(int j, int k) { return static_cast<std::size_t>(j * kMaxDim + k); }
    std::array<std::complex<double>, kMaxDim * kMaxDim> a_{};
    int dim_;
};

/// Binomial coefficient C(n, k) for small arguments.
double binomial(int n, int k);

/// k-th elementary symmetric polynomial; sigma_0 = 1. Throws DomainError when k is
/// outside [0, n].
double sigma_k(const EigenTuple& lambda, int k);

/// Sum of all k x k principal minors of H. Independent of the eigen path.
double sigma_k_minor_oracle(const HermitianForm& H, int k);

/// Closed form for n <= 2, cyclic Jacobi on the real 2n x 2n embedding otherwise.
EigenTuple eigenvalues(const HermitianForm& H);

/// Default cone slack: 1e-10 * max(1, |lambda|_inf).
double default_slack(const EigenTuple& lambda);

/// Membership in the closed cone Gamma_m: sigma_k >= -slack for k = 1..m.
bool in_gamma_m(const EigenTuple& lambda, int m, double slack);
bool in_gamma_m(const EigenTuple& lambda, int m);

/// Largest shift s such that lambda - s*e lies in the closed cone Gamma_m.
/// On that shift sigma_m(lambda - s*e) = 0.
double cone_shift(const EigenTuple& lambda, int m);

/// Shift s <= cone_shift(lambda, m) with sigma_m(lambda - s*e) = target (target >= 0).
/// sigma_m is strictly decreasing in s on (-inf, cone_shift], so s is unique.
double pencil_shift(const EigenTuple& lambda, int m, double target);

/// Same as pencil_shift but always by bisection; used to test the closed forms.
double pencil_shift_bisect(const EigenTuple& lambda, int m, double target);

}  // namespace hessian
