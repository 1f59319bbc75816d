#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hessian/domain.hpp"
#include "hessian/errors.hpp"
#include "hessian/hess.hpp"

using namespace hessian;

TEST_CASE("ball domains") {
    const auto g = make_ball(1, 1.0, 1.0 / 32);
    const double expected = std::numbers::pi * 32.0 * 32.0;
    CHECK(std::abs(double(g->interior().size()) - expected) / expected < 0.05);

    std::array<int, 4> zero{};
    CHECK(g->rho(g->flat_index(zero)) == -1.0);
    CHECK(g->dist(g->flat_index(zero)) == doctest::Approx(1.0));

    const auto g2 = make_ball(2, 1.0, 0.1);
    CHECK(g2->real_dim() == 4);
    CHECK(g2->cell_volume() == doctest::Approx(1e-4));
    // volume of the unit ball in R^4 is pi^2 / 2
    const double vol = double(g2->interior().size()) * g2->cell_volume();
    CHECK(vol == doctest::Approx(std::numbers::pi * std::numbers::pi / 2.0).epsilon(0.15));

    CHECK_THROWS_AS(make_ball(1, 1.0, 0.3), ConfigError);
    CHECK_THROWS_AS(make_ball(3, 1.0, 0.1), ConfigError);
}

TEST_CASE("node classification and distances") {
    const auto g = make_ball(1, 1.0, 1.0 / 32);
    for (auto i : g->interior()) {
        CHECK(g->abs2(i) < 1.0);
        for (auto off : g->stencil_offsets())
            CHECK(g->node_class(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + off)) != NodeClass::Exterior);
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < g->size(); ++i) {
        if (g->node_class(i) == NodeClass::Exterior) continue;
        worst = std::max(worst, std::abs(g->dist(i) - (1.0 - std::sqrt(g->abs2(i)))));
    }
    CHECK(worst <= 2.0 * g->h());
    for (auto b : g->boundary()) CHECK(std::abs(g->dist(b)) <= 2.0 * g->h());
}

TEST_CASE("flat and lattice indices round trip") {
    const auto g = make_ball(2, 1.0, 0.125);
    for (std::size_t i = 0; i < g->size(); i += 37) {
        CHECK(g->flat_index(g->lattice_index(i)) == i);
        const auto p = g->coords(i);
        const auto idx = g->lattice_index(i);
        for (int a = 0; a < 4; ++a) CHECK(p[static_cast<std::size_t>(a)] == doctest::Approx(idx[static_cast<std::size_t>(a)] * g->h()));
    }
}

TEST_CASE("defining function of the ball has identity Hessian") {
    for (int n : {1, 2}) {
        const auto g = make_ball(n, 1.0, n == 1 ? 1.0 / 16 : 0.125);
        ScalarField rho(g);
        for (std::size_t i = 0; i < g->size(); ++i) rho[i] = g->rho(i);
        for (auto i : g->interior()) {
            const auto lam = eigenvalues(node_hessian(*g, rho.values(), i));
            for (int k = 0; k < n; ++k) CHECK(lam[k] == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("box domains") {
    const std::vector<double> w{1.0, 1.0};
    const auto g = make_box(1, w, 1.0 / 16);
    std::size_t inside = 0;
    for (std::size_t i = 0; i < g->size(); ++i) {
        if (g->node_class(i) == NodeClass::Exterior) continue;
        const auto p = g->coords(i);
        const bool in = std::max(std::abs(p[0]), std::abs(p[1])) < 1.0;
        if (in) CHECK(g->rho(i) < 0.0);
        if (std::max(std::abs(p[0]), std::abs(p[1])) > 1.0) CHECK(g->rho(i) > 0.0);
        inside += g->is_interior(i);
    }
    CHECK(inside > 0);
    const auto fine = make_box(1, w, 1.0 / 32);
    const double vol = double(fine->interior().size()) * fine->cell_volume();
    CHECK(vol == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("compact families") {
    const auto g = make_ball(1, 1.0, 1.0 / 64);
    FamilyParams p;
    p.radii = {0.5};
    const auto balls = compact_family(g, FamilyKind::Balls, p);
    REQUIRE(balls.size() == 1);
    const auto& K = balls[0];
    for (auto i : K.nodes) {
        CHECK(g->is_interior(i));
        CHECK(g->abs2(i) <= 0.25 + 1e-12);
    }
    // sup over the set of the distance to the boundary: attained at the centre
    CHECK(K.hausdorff_to_boundary == doctest::Approx(1.0));
    CHECK(K.volume == double(K.nodes.size()) * g->cell_volume());
    CHECK(K.volume == doctest::Approx(std::numbers::pi * 0.25).epsilon(0.03));

    FamilyParams c;
    c.radii = {0.1, 0.3};
    for (const auto& collar : compact_family(g, FamilyKind::BoundaryCollars, c)) CHECK(collar.hausdorff_to_boundary <= 0.3 + 1e-12);
    CHECK(compact_family(g, FamilyKind::BoundaryCollars, c)[0].hausdorff_to_boundary <= 0.1 + 1e-12);

    FamilyParams a;
    a.shells = {{0.5, 0.8}};
    const auto ann = compact_family(g, FamilyKind::Annuli, a);
    CHECK(ann[0].volume == doctest::Approx(std::numbers::pi * (0.64 - 0.25)).epsilon(0.03));

    FamilyParams u;
    u.count = 5;
    u.seed = 3;
    const auto un1 = compact_family(g, FamilyKind::RandomUnions, u);
    const auto un2 = compact_family(g, FamilyKind::RandomUnions, u);
    REQUIRE(un1.size() == 5);
    for (std::size_t k = 0; k < un1.size(); ++k) {
        CHECK(un1[k].nodes == un2[k].nodes);
        CHECK(std::is_sorted(un1[k].nodes.begin(), un1[k].nodes.end()));
    }

    CHECK_THROWS_AS(make_compact(g, {}, "empty"), ConfigError);
    CHECK_THROWS_AS(parse_family_kind("blobs"), ConfigError);
    CHECK(parse_family_kind("boundary_collars") == FamilyKind::BoundaryCollars);
}

TEST_CASE("omega_delta") {
    const auto g = make_ball(1, 1.0, 1.0 / 64);
    CHECK(omega_delta(*g, 0.0).size() == g->interior().size());
    const auto half = omega_delta(*g, 0.5);
    for (auto i : half) CHECK(std::sqrt(g->abs2(i)) < 0.5 + g->h());
    const auto inner = omega_delta(*g, 0.7);
    CHECK(std::includes(half.begin(), half.end(), inner.begin(), inner.end()));
    CHECK_THROWS_AS(omega_delta(*g, 1.5), DomainError);
}

TEST_CASE("scalar fields") {
    const auto g = make_ball(1, 1.0, 1.0 / 16);
    const auto u = ScalarField::sample(g, [](const Point& p) { return p[0] - 2.0 * p[1]; });
    double lo = 1e9, hi = -1e9;
    for (std::size_t i = 0; i < g->size(); ++i) {
        if (g->node_class(i) == NodeClass::Exterior) {
            CHECK(std::isnan(u[i]));
            continue;
        }
        lo = std::min(lo, u[i]);
        hi = std::max(hi, u[i]);
    }
    CHECK(u.oscillation() == doctest::Approx(hi - lo));
    CHECK(u.sup_norm() == doctest::Approx(std::max(hi, -lo)));
}
