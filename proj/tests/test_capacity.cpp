#include <doctest.h>

#include <cmath>
#include <numbers>

#include "hessian/capacity.hpp"
#include "hessian/domain.hpp"
#include "hessian/errors.hpp"
#include "hessian/smooth.hpp"

using namespace hessian;

namespace {

double r2(const Point& p) { return p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3]; }

SweepOptions fast(double tol = 1e-9) {
    SweepOptions o;
    o.tol = tol;
    o.omega = 0.0;
    return o;
}

CompactSet ball_set(const DomainPtr& g, double s, double cx = 0.0) {
    FamilyParams p;
    p.radii = {s};
    if (cx != 0.0) p.centers = {Point{cx, 0.0, 0.0, 0.0}};
    return compact_family(g, FamilyKind::Balls, p).front();
}

// Capacity of the centred ball of radius s in the unit ball of C^n for m = 1,
// from the radial extremal function and the boundary flux.
double ball_capacity_oracle(int n, double s) {
    if (n == 1) return std::numbers::pi / (2.0 * std::log(1.0 / s));
    return std::numbers::pi * std::numbers::pi * s * s / (1.0 - s * s);
}

std::vector<double> ladder(double lo, int count) {
    std::vector<double> out;
    for (int k = 0; k < count; ++k) out.push_back(lo * std::pow(10.0, double(k) / (count - 1)));
    return out;
}

}  // namespace

TEST_CASE("capacity of the empty set and of balls in the disc") {
    const auto g = make_ball(1, 1.0, 1.0 / 64);
    CompactSet empty;
    empty.domain = g;
    const auto c0 = capacity(empty, 1, fast());
    CHECK(c0.value == 0.0);

    for (double s : {0.2, 0.3, 0.5}) {
        const auto c = capacity(ball_set(g, s), 1, fast());
        CHECK(c.converged);
        CHECK(c.value == doctest::Approx(ball_capacity_oracle(1, s)).epsilon(0.04));
        CHECK(c.contact_fraction >= 0.95);
        CHECK(c.boundary_max <= 0.05);
        for (auto i : g->interior()) {
            CHECK(c.extremal[i] >= -1.0 - 1e-9);
            CHECK(c.extremal[i] <= 1e-9);
        }
    }
}

TEST_CASE("capacity is monotone in the set and antitone in the domain") {
    const auto g = make_ball(1, 1.0, 1.0 / 32);
    const auto small = capacity(ball_set(g, 0.2, 0.1), 1, fast());
    const auto large = capacity(ball_set(g, 0.4, 0.1), 1, fast());
    CHECK(small.value <= large.value);

    const std::vector<double> w1{0.8}, w2{1.2};
    const auto b1 = make_box(1, w1, 1.0 / 32);
    const auto b2 = make_box(1, w2, 1.0 / 32);
    const auto in1 = capacity(ball_set(b1, 0.3), 1, fast());
    const auto in2 = capacity(ball_set(b2, 0.3), 1, fast());
    CHECK(in2.value <= in1.value);
}

TEST_CASE("outer and inner discretizations agree") {
    const auto g = make_ball(1, 1.0, 1.0 / 64);
    // slightly larger and slightly smaller node sets for the same disc
    const auto inner = capacity(ball_set(g, 0.3 - 0.5 * g->h()), 1, fast());
    const auto outer = capacity(ball_set(g, 0.3 + 0.5 * g->h()), 1, fast());
    CHECK(inner.value <= outer.value);
    CHECK(outer.value <= 1.1 * inner.value);
}

TEST_CASE("parallel capacities match serial ones") {
    const auto g = make_ball(1, 1.0, 1.0 / 32);
    FamilyParams p;
    p.radii = {0.1, 0.2, 0.3, 0.4};
    const auto fam = compact_family(g, FamilyKind::Balls, p);
    const auto a = capacities(fam, 1, fast(), 1);
    const auto b = capacities(fam, 1, fast(), 3);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
        CHECK(a[k].value == b[k].value);
        CHECK(a[k].set.label == fam[k].label);
    }
}

TEST_CASE("domination fit") {
    const std::vector<std::pair<double, double>> pairs{{0.1, 0.5}, {0.02, 0.1}, {5.0, 2.0}, {0.3, 0.8}};
    const auto fit = fit_domination(pairs, 1.5);
    double expect = 0.0;
    for (auto [m, c] : pairs)
        if (c <= 1.0) expect = std::max(expect, m / std::pow(c, 1.5));
    CHECK(fit.A == doctest::Approx(expect));
    for (auto [m, c] : pairs)
        if (c <= 1.0) CHECK(m <= fit.A * std::pow(c, 1.5) * (1.0 + 1e-12));
}

TEST_CASE("volume against capacity in two complex dimensions") {
    const auto g = make_ball(2, 1.0, 1.0 / 12);
    FamilyParams p;
    p.radii = {0.15, 0.2, 0.3, 0.4};
    const auto fam = compact_family(g, FamilyKind::Balls, p);
    const auto rep = volume_capacity_check(fam, 1, 0.9, nullptr, fast(1e-8));
    CHECK_FALSE(rep.single_sample);
    // slope of log volume against log capacity from the exact radial capacities
    std::vector<double> lx, ly;
    for (double s : p.radii) {
        lx.push_back(std::log(ball_capacity_oracle(2, s)));
        ly.push_back(std::log(std::numbers::pi * std::numbers::pi * std::pow(s, 4) / 2.0));
    }
    const double exact = fit_line(lx, ly).slope;
    CHECK(std::abs(rep.slope - exact) <= 0.15);
    CHECK(rep.slope >= 1.0 + rep.r - 0.3);
    for (const auto& row : rep.rows) CHECK(row.volume <= row.bound * (1.0 + 1e-12));

    CHECK_THROWS_AS(volume_capacity_check(fam, 2, 0.5), DomainError);
    CHECK_THROWS_AS(volume_capacity_check(fam, 1, 1.0), DomainError);
    CHECK_THROWS_AS(volume_capacity_check(fam, 1, 0.0), DomainError);
    const std::vector<CompactSet> one{fam.front()};
    CHECK(volume_capacity_check(one, 1, 0.5, nullptr, fast(1e-8)).single_sample);
}

TEST_CASE("capacity inequality exponents") {
    CHECK(theorem_a_epsilon(1.0, 0.5, 1) == doctest::Approx(0.25));
    for (int m : {2, 3})
        for (double a : {0.25, 0.5, 1.0}) {
            const double e = theorem_a_epsilon(a, 0.5, m);
            CHECK(1.0 + e <= 1.0 + m * e);
        }
    CHECK_THROWS_AS(theorem_a_epsilon(0.0, 0.5, 1), DomainError);
    CHECK_THROWS_AS(theorem_a_epsilon(1.5, 0.5, 1), DomainError);
}

TEST_CASE("capacity inequality preconditions") {
    const auto g = make_ball(2, 1.0, 1.0 / 8);
    FamilyParams p;
    p.radii = {0.3};
    const auto fam = compact_family(g, FamilyKind::Balls, p);
    const auto bad = ScalarField::sample(g, [](const Point& q) { return r2(q); });
    CHECK_THROWS_AS(theorem_a_check(bad, {1.0, 10.0}, fam, 1, 0.5), PreconditionError);
    const auto phi = ScalarField::sample(g, [](const Point& q) { return r2(q) - 1.0; });
    CHECK_THROWS_AS(theorem_a_check(phi, {1.0, 0.5}, fam, 1, 0.5), PreconditionError);
    CHECK_THROWS_AS(theorem_a_check(phi, {1.0, 3.0}, fam, 2, 0.5), DomainError);
    CHECK_THROWS_AS(boundary_mass_check(phi, std::nullopt, fam, 1), PreconditionError);
}

TEST_CASE("boundary mass inequality on collars") {
    const auto g = make_ball(1, 1.0, 1.0 / 64);
    FamilyParams p;
    p.radii = {0.1, 0.2, 0.3};
    const auto fam = compact_family(g, FamilyKind::BoundaryCollars, p);
    const double alpha = 0.5;
    const auto phi = ScalarField::sample(g, [&](const Point& q) { return std::min(std::pow(r2(q), alpha / 2.0), 1.0) - 1.0; });
    const HolderConstants w{alpha, holder_seminorm(phi, alpha) * (1.0 + 1e-9)};
    const auto rep = boundary_mass_check(phi, w, fam, 1, 0.3, nullptr, fast());
    CHECK(rep.ok);
    CHECK(rep.rows.size() == fam.size());

    const ScalarField zero(g, 0.0);
    const auto rz = boundary_mass_check(zero, HolderConstants{1.0, 1.0}, fam, 1, 0.3, nullptr, fast());
    CHECK(rz.ok);
    for (const auto& row : rz.rows) CHECK(row.mass == 0.0);
}

TEST_CASE("Hoelder exponent predictions") {
    for (int m : {1, 2, 3}) {
        const auto e = theorem_b_exponents(m, m, 1.0);
        CHECK(e.gamma == doctest::Approx(1.0 / (m + 1)));
    }
    const auto e = theorem_b_exponents(1, 2, 1.0);
    CHECK(e.gamma == doctest::Approx(0.25));
    CHECK(e.alpha_prime == doctest::Approx(0.25));
    for (double a : {0.25, 0.5, 1.0}) {
        const auto f = theorem_b_exponents(1, 2, a);
        CHECK(f.gamma_prime == doctest::Approx(f.gamma));
        CHECK(f.alpha_second == doctest::Approx(f.gamma_prime * a / 2.0));
    }
}

TEST_CASE("moduli estimate") {
    const auto g = make_ball(2, 1.0, 1.0 / 8);
    const auto u = ScalarField::sample(g, [](const Point& q) { return r2(q) - 1.0; });
    const std::vector<ScalarField> same{u, u};
    const auto rep = moduli_estimate_check(u, 1.0, u, same, 2, 2);
    CHECK(rep.predicted == doctest::Approx(0.25));
    CHECK(rep.predicted_tilde == doctest::Approx(0.125));
    for (double v : rep.lhs) CHECK(v == 0.0);

    const auto g1 = make_ball(1, 1.0, 1.0 / 32);
    const auto u1 = ScalarField::sample(g1, [](const Point& q) { return r2(q) - 1.0; });
    std::vector<ScalarField> lad;
    for (double t : {0.01, 0.02, 0.05, 0.1, 0.2}) {
        ScalarField v = u1;
        for (auto& x : v.values()) x *= (1.0 - t);
        lad.push_back(v);
    }
    const auto r1 = moduli_estimate_check(u1, 1.0, u1, lad, 1, 1);
    CHECK(r1.slope >= r1.predicted - 0.1);
    CHECK(r1.tilde_ok);

    ScalarField far = u1;
    for (auto& x : far.values()) x -= 5.0;
    const std::vector<ScalarField> bad{far};
    CHECK_THROWS_AS(moduli_estimate_check(u1, 1.0, u1, bad, 1, 1), PreconditionError);
}

TEST_CASE("Hoelder continuity of Dirichlet solutions") {
    const auto g = make_ball(1, 1.0, 1.0 / 64);
    const auto lad = ladder(4.0 * g->h(), 6);
    const auto phi = ScalarField::sample(g, [](const Point& q) { return r2(q) - 1.0; });
    const ScalarField zero(g, 0.0);
    const auto smooth = theorem_b_experiment(phi, 1.0, zero, 1, lad, true, fast(1e-10));
    CHECK(smooth.ok);
    CHECK(smooth.measured.exponent >= 0.75);

    const auto wave = ScalarField::sample(g, [](const Point& q) { return 0.3 * std::sqrt(std::abs(std::sin(2.0 * std::atan2(q[1], q[0])))); });
    const auto rough = theorem_b_experiment(phi, 1.0, wave, 1, lad, false, fast(1e-10));
    CHECK(rough.ok);
    CHECK(rough.measured.exponent >= 0.2);
    CHECK(rough.measured.exponent <= 1.0);
}
