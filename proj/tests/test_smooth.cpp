#include <doctest.h>

#include <cmath>
#include <random>

#include "hessian/domain.hpp"
#include "hessian/errors.hpp"
#include "hessian/smooth.hpp"

using namespace hessian;

namespace {

double r2(const Point& p) { return p[0] * p[0] + p[1] * p[1] + p[2] * p[2] + p[3] * p[3]; }

// Discrete second moment of the (1 - r^2)^3 bump on the lattice, n = 1.
double bump_moment(double delta, double h) {
    const int reach = static_cast<int>(std::floor(delta / h));
    double mass = 0.0, moment = 0.0;
    for (int i = -reach; i <= reach; ++i)
        for (int j = -reach; j <= reach; ++j) {
            const double s = (i * i + j * j) * h * h;
            if (s >= delta * delta) continue;
            const double w = std::pow(1.0 - s / (delta * delta), 3);
            mass += w;
            moment += w * s;
        }
    return moment / mass;
}

std::vector<double> ladder(double lo, int count) {
    std::vector<double> out;
    for (int k = 0; k < count; ++k) out.push_back(lo * std::pow(10.0, double(k) / (count - 1)));
    return out;
}

}  // namespace

TEST_CASE("mollifier weights") {
    const auto g = make_ball(1, 1.0, 1.0 / 32);
    const Mollifier k(*g, 0.2);
    double sum = 0.0;
    for (double w : k.weights()) {
        CHECK(w >= 0.0);
        sum += w;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(k.second_moment() == doctest::Approx(bump_moment(0.2, g->h())).epsilon(1e-12));
    CHECK_THROWS_AS(Mollifier(*g, 1.5 * g->h()), ResolutionError);
}

TEST_CASE("regularization of constants and quadratics") {
    const auto g = make_ball(1, 1.0, 1.0 / 32);
    const ScalarField c(g, 2.5);
    const auto rc = regularize(c, 0.15);
    for (auto i : g->interior()) CHECK(std::abs(rc[i] - 2.5) <= 1e-12);

    const auto q = ScalarField::sample(g, r2);
    const double delta = 0.15;
    const auto rq = regularize(q, delta);
    const double shift = bump_moment(delta, g->h());
    for (auto i : omega_delta(*g, delta)) CHECK(rq[i] == doctest::Approx(q[i] + shift).epsilon(1e-10));
}

TEST_CASE("regularization of m-sh fields dominates and decreases") {
    const auto g = make_ball(1, 1.0, 1.0 / 32);
    const auto u = ScalarField::sample(g, [](const Point& p) { return std::sqrt(r2(p)) - 1.0; });
    const auto ext = holder_extend(u, 1.0, 1.0);
    const auto small = regularize(ext, 0.1);
    const auto large = regularize(ext, 0.2);
    for (auto i : omega_delta(*g, 0.2)) {
        CHECK(small[i] >= u[i] - 1e-10);
        CHECK(large[i] >= small[i] - 1e-10 - g->h() * g->h());
    }
}

TEST_CASE("Hoelder extension") {
    const auto g = make_ball(1, 1.0, 1.0 / 16, 4);
    const ScalarField zero(g, 0.0);
    const double alpha = 0.5, kap = 2.0;
    const auto ext = holder_extend(zero, alpha, kap);
    for (std::size_t i = 0; i < g->size(); ++i) {
        if (g->node_class(i) != NodeClass::Exterior) {
            CHECK(ext[i] == 0.0);
            continue;
        }
        // nearest closure node by brute force
        double best = 1e9;
        const auto p = g->coords(i);
        for (std::size_t j = 0; j < g->size(); ++j) {
            if (g->node_class(j) == NodeClass::Exterior) continue;
            const auto q = g->coords(j);
            best = std::min(best, std::hypot(p[0] - q[0], p[1] - q[1]));
        }
        CHECK(ext[i] == doctest::Approx(-kap * std::pow(best, alpha)));
    }

    const auto u = ScalarField::sample(g, [](const Point& p) { return std::pow(r2(p), 0.25) - 1.0; });
    const auto e = holder_extend(u, 0.5, 1.0);
    for (std::size_t i = 0; i < g->size(); ++i)
        if (g->node_class(i) != NodeClass::Exterior) CHECK(e[i] == u[i]);
    CHECK(holder_seminorm(e, 0.5) <= 1.0 + 1e-9);
    const auto e2 = holder_extend(e, 0.5, 1.0);
    for (std::size_t i = 0; i < g->size(); ++i) CHECK(std::abs(e2[i] - e[i]) <= 1e-12);
    CHECK_THROWS_AS(holder_extend(u, 1.5, 1.0), DomainError);
}

TEST_CASE("Hoelder measurement") {
    const auto g = make_ball(1, 1.0, 1.0 / 64);
    const auto lad = ladder(2.0 * g->h(), 6);

    const auto q = ScalarField::sample(g, [](const Point& p) { return r2(p) - 1.0; });
    const auto wq = measure_holder(q, lad);
    CHECK(wq.exponent == doctest::Approx(1.0));
    CHECK(wq.interior_modulus.size() == lad.size());
    CHECK(wq.delta_min == doctest::Approx(2.0 * g->h()));

    const auto s = ScalarField::sample(g, [](const Point& p) { return -std::sqrt(std::max(0.0, 1.0 - r2(p))); });
    const auto ws = measure_holder(s, lad);
    CHECK(ws.exponent == doctest::Approx(0.5).epsilon(0.2));
    CHECK(std::abs(ws.exponent - 0.5) <= 0.1);

    const auto jump = ScalarField::sample(g, [](const Point& p) { return p[0] > 0.0 ? 1.0 : 0.0; });
    CHECK_FALSE(measure_holder(jump, lad).reliable);

    const std::vector<double> few{0.05, 0.1, 0.2, 0.4};
    CHECK_THROWS_AS(measure_holder(q, few), ConfigError);
    const std::vector<double> narrow{0.05, 0.06, 0.07, 0.08, 0.09};
    CHECK_THROWS_AS(measure_holder(q, narrow), ConfigError);
    const std::vector<double> coarse{0.01, 0.03, 0.05, 0.08, 0.2};
    CHECK_THROWS_AS(measure_holder(q, coarse), ResolutionError);

    const auto j = to_json(wq);
    CHECK(j.contains("exponent"));
    CHECK(j.contains("ladder"));
}

TEST_CASE("Hoelder exponent recovery on extended power profiles") {
    const auto g = make_ball(1, 1.0, 1.0 / 64);
    const auto lad = ladder(4.0 * g->h(), 6);
    for (double alpha : {0.25, 0.5, 0.75}) {
        const auto u = ScalarField::sample(g, [&](const Point& p) { return std::pow(r2(p), alpha / 2.0) - 1.0; });
        const auto w = measure_holder(holder_extend(u, alpha, 1.0), lad);
        CHECK(std::abs(w.exponent - alpha) <= 0.1);
        CHECK(w.seminorm > 0.0);
    }
}

TEST_CASE("line fits and sampled seminorms") {
    const std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
    const auto f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(2.0));
    CHECK(f.intercept == doctest::Approx(1.0));
    CHECK(f.residual <= 1e-12);

    const auto g = make_ball(1, 1.0, 1.0 / 32);
    const auto lin = ScalarField::sample(g, [](const Point& p) { return 0.6 * p[0] - 0.8 * p[1]; });
    CHECK(holder_seminorm(lin, 1.0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("Poisson-Jensen trends") {
    const auto g = make_ball(1, 1.0, 1.0 / 64);
    const auto lad = ladder(2.0 * g->h(), 5);
    const auto harm = ScalarField::sample(g, [](const Point& p) { return p[0] * p[0] - p[1] * p[1] - 2.0; });
    const auto rh = poisson_jensen_check(harm, lad);
    for (double d : rh.l1_defect) CHECK(std::abs(d) <= 1e-10);

    const auto q = ScalarField::sample(g, [](const Point& p) { return r2(p) - 1.0; });
    const auto rq = poisson_jensen_check(q, lad);
    for (std::size_t k = 0; k < lad.size(); ++k) {
        const auto inner = omega_delta(*g, lad[k]);
        const double expect = bump_moment(lad[k], g->h()) * double(inner.size()) * g->cell_volume();
        CHECK(rq.l1_defect[k] == doctest::Approx(expect).epsilon(1e-9));
    }
    CHECK(rq.mass_trend_ok);
    CHECK(rq.norm_trend_ok);
    CHECK(rq.nonpositive);

    const auto s = ScalarField::sample(g, [](const Point& p) { return -std::sqrt(std::max(0.0, 1.0 - r2(p))); });
    const auto rs = poisson_jensen_check(s, lad);
    CHECK(rs.slope >= 1.0 - 0.2);
}
