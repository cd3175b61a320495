#include "emacfem/space.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <random>

using namespace emacfem;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// int_ref x^a y^b = a! b! / (a+b+2)!
double ref_monomial(int a, int b) {
    return factorial(a) * factorial(b) / factorial(a + b + 2);
}

} // namespace

TEST_CASE("taylor-hood: dof counts") {
    const Mesh m1 = generate_rectangle(1, 1, {0, 1, 0, 1});
    const TaylorHoodSpace s1 = build_taylor_hood(m1);
    CHECK(s1.n_velocity == 18); // 2 * (4 vertices + 5 edges)
    CHECK(s1.n_pressure == 4);

    const Mesh m48 = generate_rectangle(48, 48, {-0.5, 0.5, -0.5, 0.5});
    const TaylorHoodSpace s48 = build_taylor_hood(m48);
    CHECK(s48.n_pressure == 2401);
    CHECK(s48.n_velocity == 2 * (2401 + static_cast<int>(s48.edges.size())));
}

TEST_CASE("taylor-hood: shared edge midpoint maps to one global dof") {
    const Mesh m = generate_rectangle(1, 1, {0, 1, 0, 1});
    const TaylorHoodSpace sp = build_taylor_hood(m);
    // the diagonal (0,3) is shared by both triangles
    const auto n0 = sp.local_scalar_nodes(0);
    const auto n1 = sp.local_scalar_nodes(1);
    int shared0 = -1, shared1 = -1;
    for (int e = 0; e < 3; ++e) {
        const auto& tri0 = m.triangles[0];
        const auto& tri1 = m.triangles[1];
        if (detail::edge_key(tri0[e], tri0[(e + 1) % 3]) == std::pair<int, int>{0, 3})
            shared0 = n0[3 + e];
        if (detail::edge_key(tri1[e], tri1[(e + 1) % 3]) == std::pair<int, int>{0, 3})
            shared1 = n1[3 + e];
    }
    REQUIRE(shared0 >= 0);
    CHECK(shared0 == shared1);
}

TEST_CASE("taylor-hood: numbering is deterministic") {
    const Mesh m = generate_rectangle(5, 3, {0, 1, 0, 1});
    const TaylorHoodSpace a = build_taylor_hood(m);
    const TaylorHoodSpace b = build_taylor_hood(m);
    CHECK(a.edges == b.edges);
    CHECK(a.triangle_edges == b.triangle_edges);
    CHECK(a.node_coords == b.node_coords);
}

TEST_CASE("quadrature: degree-1 midpoint rule") {
    const QuadratureRule r = quadrature_rule(1);
    REQUIRE(r.size() == 1);
    CHECK(r.weights[0] == Catch::Approx(0.5).margin(1e-16));
    CHECK(r.points[0][0] == Catch::Approx(1.0 / 3.0));
}

TEST_CASE("quadrature: declared exactness on reference monomials") {
    for (int degree = 1; degree <= 6; ++degree) {
        const QuadratureRule r = quadrature_rule(degree);
        for (int a = 0; a + 0 <= degree; ++a)
            for (int b = 0; a + b <= degree; ++b) {
                double v = 0.0;
                for (int q = 0; q < r.size(); ++q)
                    v += r.weights[q] * std::pow(r.points[q][1], a) * std::pow(r.points[q][2], b);
                INFO("degree " << degree << " monomial x^" << a << " y^" << b);
                CHECK(v == Catch::Approx(ref_monomial(a, b)).margin(2e-15));
            }
    }
}

TEST_CASE("quadrature: named spot values") {
    const QuadratureRule r5 = quadrature_rule(5);
    REQUIRE(r5.size() == 7);
    double x2y2 = 0.0;
    for (int q = 0; q < r5.size(); ++q)
        x2y2 += r5.weights[q] * r5.points[q][1] * r5.points[q][1] * r5.points[q][2] *
                r5.points[q][2];
    CHECK(x2y2 == Catch::Approx(1.0 / 180.0).margin(1e-15));

    const QuadratureRule r6 = quadrature_rule(6);
    REQUIRE(r6.size() == 12);
    double x3y3 = 0.0;
    for (int q = 0; q < r6.size(); ++q)
        x3y3 += r6.weights[q] * std::pow(r6.points[q][1], 3) * std::pow(r6.points[q][2], 3);
    CHECK(x3y3 == Catch::Approx(1.0 / 1120.0).margin(1e-15));

    CHECK_THROWS_AS(quadrature_rule(7), config_error);
    CHECK_THROWS_AS(quadrature_rule(0), config_error);
}

TEST_CASE("p2 basis: partition of unity and zero gradient sum") {
    std::mt19937 rng(91);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const Mesh m = generate_rectangle(3, 3, {0, 1, 0, 1});
    const TaylorHoodSpace sp = build_taylor_hood(m);
    for (int rep = 0; rep < 50; ++rep) {
        double l1 = unif(rng), l2 = unif(rng) * (1.0 - l1);
        const auto s = p2_shape({1.0 - l1 - l2, l1, l2});
        double sum = 0.0;
        for (double n : s.N) sum += n;
        CHECK(sum == Catch::Approx(1.0).margin(1e-14));

        const int t = rep % 18;
        const auto grads = detail::physical_gradients(s, sp.barycentric_gradients(t));
        Vec2 g = {0.0, 0.0};
        for (const auto& gi : grads) {
            g[0] += gi[0];
            g[1] += gi[1];
        }
        CHECK(std::abs(g[0]) < 1e-13);
        CHECK(std::abs(g[1]) < 1e-13);
    }
}

TEST_CASE("interpolation: constants and linears are reproduced") {
    const Mesh m = generate_rectangle(4, 4, {0, 1, 0, 1});
    const TaylorHoodSpace sp = build_taylor_hood(m);

    const Vector c = interpolate_velocity(
        sp, [](double, double, double) { return Vec2{1.0, 0.0}; }, 0.0);
    for (int k = 0; k < sp.n_scalar; ++k) {
        CHECK(c[2 * k] == 1.0);
        CHECK(c[2 * k + 1] == 0.0);
    }

    const Vector lin = interpolate_velocity(
        sp, [](double x, double y, double) { return Vec2{y, x}; }, 0.0);
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unif(0.02, 0.98);
    for (int rep = 0; rep < 25; ++rep) {
        const Vec2 x = {unif(rng), unif(rng)};
        const Vec2 v = evaluate_velocity(sp, lin, x);
        CHECK(v[0] == Catch::Approx(x[1]).margin(1e-14));
        CHECK(v[1] == Catch::Approx(x[0]).margin(1e-14));
    }
}

TEST_CASE("evaluation: P2 reproduces quadratics exactly") {
    const Mesh m = generate_rectangle(3, 5, {0, 1, 0, 1});
    const TaylorHoodSpace sp = build_taylor_hood(m);
    const Vector q = interpolate_velocity(
        sp, [](double x, double y, double) { return Vec2{x * x, x * y}; }, 0.0);
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unif(0.01, 0.99);
    for (int rep = 0; rep < 25; ++rep) {
        const Vec2 x = {unif(rng), unif(rng)};
        const Vec2 v = evaluate_velocity(sp, q, x, rep % 30); // varying walk start
        CHECK(v[0] == Catch::Approx(x[0] * x[0]).margin(1e-13));
        CHECK(v[1] == Catch::Approx(x[0] * x[1]).margin(1e-13));
    }
}

TEST_CASE("evaluation: interpolant of cos(y) is O(h^3) pointwise") {
    const Mesh m = generate_rectangle(64, 64, {0, 1, 0, 1});
    const TaylorHoodSpace sp = build_taylor_hood(m);
    const Vector u = interpolate_velocity(
        sp, [](double, double y, double) { return Vec2{std::cos(y), 0.0}; }, 0.0);
    const Vec2 v = evaluate_velocity(sp, u, {0.5, 0.5});
    CHECK(std::abs(v[0] - std::cos(0.5)) < 1e-4);
}

TEST_CASE("evaluation: pressure is P1") {
    const Mesh m = generate_rectangle(4, 4, {0, 1, 0, 1});
    const TaylorHoodSpace sp = build_taylor_hood(m);
    const Vector p = interpolate_pressure(
        sp, [](double x, double y, double) { return 2.0 * x - y; }, 0.0);
    CHECK(evaluate_pressure(sp, p, {0.3, 0.4}) == Catch::Approx(0.2).margin(1e-14));
}

TEST_CASE("evaluation: outside point raises a location error") {
    const Mesh m = generate_rectangle(2, 2, {0, 1, 0, 1});
    const TaylorHoodSpace sp = build_taylor_hood(m);
    const Vector u = Vector::Zero(sp.n_velocity);
    CHECK_THROWS_AS(evaluate_velocity(sp, u, {1.5, 0.5}), std::invalid_argument);
}

TEST_CASE("interpolation: non-finite data names the node") {
    const Mesh m = generate_rectangle(2, 2, {0, 1, 0, 1});
    const TaylorHoodSpace sp = build_taylor_hood(m);
    auto f = [](double x, double y, double) {
        return Vec2{(x == 0.5 && y == 0.5) ? std::numeric_limits<double>::infinity() : 0.0, 0.0};
    };
    CHECK_THROWS_WITH(interpolate_velocity(sp, f, 0.0),
                      Catch::Matchers::ContainsSubstring("0.5"));
}
