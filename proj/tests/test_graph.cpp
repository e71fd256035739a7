#include <doctest.h>

#include <cmath>

#include "csvortex/graph.hpp"
#include "csvortex/linear_solve.hpp"
#include "test_support.hpp"

using namespace csvortex;
using namespace csvortex::testing;

namespace {
const double kPi = std::acos(-1.0);
}

TEST_SUITE("graph-core") {

TEST_CASE("laplacian on K3 matches hand values and the dense oracle") {
    WeightedGraph g = WeightedGraph::complete(3);
    VertexField u(std::vector<double>{1.0, 0.0, 0.0});
    VertexField lap = laplacian_apply(g, u);
    CHECK(lap[0] == doctest::Approx(-2.0).epsilon(1e-15));
    CHECK(lap[1] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(lap[2] == doctest::Approx(1.0).epsilon(1e-15));

    Eigen::VectorXd oracle = dense_laplacian(g) * to_vec(u);
    for (int i = 0; i < 3; ++i) CHECK(lap[i] == doctest::Approx(oracle(i)).epsilon(1e-14));
}

TEST_CASE("laplacian of a constant vanishes") {
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        WeightedGraph g = random_graph(seed, 17, 12);
        VertexField c(static_cast<std::size_t>(g.vertex_count()), 4.25);
        CHECK(sup_norm(laplacian_apply(g, c)) == 0.0);
    }
}

TEST_CASE("laplacian on K2") {
    WeightedGraph g = WeightedGraph::path(2);
    VertexField u(std::vector<double>{0.0, 2.0 * kPi});
    VertexField lap = laplacian_apply(g, u);
    CHECK(lap[0] == doctest::Approx(2.0 * kPi).epsilon(1e-15));
    CHECK(lap[1] == doctest::Approx(-2.0 * kPi).epsilon(1e-15));
}

TEST_CASE("laplacian agrees with the dense oracle on random graphs") {
    for (std::uint64_t seed = 10; seed < 16; ++seed) {
        WeightedGraph g = random_graph(seed, 23, 20);
        Rng rng(seed * 77);
        VertexField u = random_field(rng, 23, -3.0, 3.0);
        VertexField lap = laplacian_apply(g, u);
        Eigen::VectorXd oracle = dense_laplacian(g) * to_vec(u);
        for (int i = 0; i < 23; ++i)
            CHECK(lap[static_cast<std::size_t>(i)] == doctest::Approx(oracle(i)).epsilon(1e-12));
    }
}

TEST_CASE("misaligned fields are rejected") {
    WeightedGraph g = WeightedGraph::complete(3);
    VertexField u(2);
    CHECK_THROWS_AS(laplacian_apply(g, u), AlignmentError);
    CHECK_THROWS_AS(integrate(g, u), AlignmentError);
    CHECK_THROWS_AS(gradient_form(g, u, u), AlignmentError);
}

TEST_CASE("vertex fields reject non-finite entries at construction") {
    CHECK_THROWS(VertexField(std::vector<double>{1.0, std::nan("")}));
    CHECK_THROWS(VertexField(std::vector<double>{1.0, INFINITY}));
}

TEST_CASE("gradient form examples") {
    WeightedGraph k2 = WeightedGraph::path(2);
    VertexField u(std::vector<double>{0.0, 1.0});
    VertexField gamma = gradient_form(k2, u, u);
    CHECK(gamma[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(gamma[1] == doctest::Approx(0.5).epsilon(1e-15));

    WeightedGraph k3 = WeightedGraph::complete(3);
    VertexField a(std::vector<double>{1.0, 0.0, 0.0});
    VertexField b(std::vector<double>{0.0, 1.0, 0.0});
    CHECK(gradient_form(k3, a, b)[0] == doctest::Approx(-0.5).epsilon(1e-15));

    VertexField c(static_cast<std::size_t>(3), 9.0);
    CHECK(sup_norm(gradient_form(k3, a, c)) == 0.0);
}

TEST_CASE("gradient norm squares back to the gradient form") {
    WeightedGraph k2 = WeightedGraph::path(2);
    VertexField u(std::vector<double>{0.0, 1.0});
    VertexField gn = gradient_norm(k2, u);
    CHECK(gn[0] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(gn[1] == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));

    WeightedGraph g = random_graph(4, 15, 10);
    Rng rng(99);
    VertexField v = random_field(rng, 15, -2.0, 2.0);
    VertexField gamma = gradient_form(g, v, v);
    VertexField norm = gradient_norm(g, v);
    for (std::size_t i = 0; i < v.size(); ++i) {
        CHECK(norm[i] >= 0.0);
        CHECK(norm[i] * norm[i] == doctest::Approx(gamma[i]).epsilon(1e-15));
    }
}

TEST_CASE("integrate examples") {
    WeightedGraph k3 = WeightedGraph::complete(3);
    CHECK(integrate(k3, VertexField(std::vector<double>{1.0, 2.0, 0.0})) == doctest::Approx(3.0));

    WeightedGraph p3 = WeightedGraph::path(3).with_measure({1.0, 2.0, 1.0});
    CHECK(integrate(p3, VertexField(static_cast<std::size_t>(3), 1.0)) == doctest::Approx(4.0));
}

TEST_CASE("integral of the laplacian vanishes") {
    for (std::uint64_t seed = 20; seed < 26; ++seed) {
        WeightedGraph g = random_graph(seed, 31, 25);
        Rng rng(seed);
        VertexField u = random_field(rng, 31, -5.0, 5.0);
        const double val = integrate(g, laplacian_apply(g, u));
        CHECK(std::abs(val) <= 1e-13 * std::max(1.0, sup_norm(u)));
    }
}

TEST_CASE("volume") {
    CHECK(volume(WeightedGraph::complete(3)) == doctest::Approx(3.0));
    CHECK(volume(WeightedGraph::path(2).with_measure({2.0, 3.0})) == doctest::Approx(5.0));
    WeightedGraph g = random_graph(7, 12, 6);
    CHECK(volume(g) ==
          doctest::Approx(integrate(g, VertexField(static_cast<std::size_t>(12), 1.0))));
}

TEST_CASE("p-norms") {
    WeightedGraph k2 = WeightedGraph::path(2);
    CHECK(norm_p(k2, VertexField(std::vector<double>{3.0, 4.0}), 2.0) == doctest::Approx(5.0));
    CHECK(norm_p(k2, VertexField(2), 2.0) == 0.0);
    CHECK(norm_p(k2, VertexField(2), 7.5) == 0.0);
    WeightedGraph k3 = WeightedGraph::complete(3);
    CHECK(norm_p(k3, VertexField(static_cast<std::size_t>(3), 1.0), 1.0) == doctest::Approx(3.0));
    CHECK_THROWS(norm_p(k2, VertexField(2), 0.5));

    WeightedGraph g = random_graph(5, 9, 5);
    Rng rng(5);
    VertexField u = random_field(rng, 9, -2.0, 2.0);
    VertexField u2(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) u2[i] = u[i] * u[i];
    CHECK(norm_p(g, u, 2.0) == doctest::Approx(std::sqrt(integrate(g, u2))).epsilon(1e-14));
}

TEST_CASE("sobolev norm") {
    WeightedGraph k3 = WeightedGraph::complete(3);
    VertexField c(static_cast<std::size_t>(3), -2.5);
    CHECK(sobolev_norm(k3, c) == doctest::Approx(2.5 * std::sqrt(3.0)).epsilon(1e-14));

    WeightedGraph k2 = WeightedGraph::path(2);
    VertexField u(std::vector<double>{0.0, 1.0});
    CHECK(sobolev_norm(k2, u) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    WeightedGraph g = random_graph(6, 11, 7);
    Rng rng(6);
    VertexField v = random_field(rng, 11, -2.0, 2.0);
    CHECK(sobolev_norm(g, v) >= norm_p(g, v, 2.0));
}

TEST_CASE("dirac mass") {
    WeightedGraph k2 = WeightedGraph::path(2);
    VertexField d0 = dirac_mass(k2, 0);
    CHECK(d0[0] == 1.0);
    CHECK(d0[1] == 0.0);

    WeightedGraph k2m = k2.with_measure({2.0, 3.0});
    VertexField d1 = dirac_mass(k2m, 1);
    CHECK(d1[0] == 0.0);
    CHECK(d1[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-16));
    CHECK(integrate(k2m, d1) == doctest::Approx(1.0).epsilon(1e-16));

    WeightedGraph g = random_graph(8, 10, 6);
    VertexField sum(static_cast<std::size_t>(10));
    for (int p : {0, 3, 7}) {
        VertexField d = dirac_mass(g, p);
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += d[i];
    }
    CHECK(integrate(g, sum) == doctest::Approx(3.0).epsilon(1e-14));

    CHECK_THROWS(dirac_mass(g, -1));
    CHECK_THROWS(dirac_mass(g, 10));
}

TEST_CASE("poincare constant on K2 and K3") {
    CHECK(poincare_constant(WeightedGraph::path(2)) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(poincare_constant(WeightedGraph::complete(3)) ==
          doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("poincare constant scales inversely with the weights") {
    WeightedGraph g = random_graph(9, 14, 9);
    const double c = poincare_constant(g);
    const double c_scaled = poincare_constant(g.with_scaled_weights(4.0));
    CHECK(c_scaled == doctest::Approx(c / 4.0).epsilon(1e-10));
}

TEST_CASE("poincare inequality holds for random mean-zero fields, tight at the gap eigenvector") {
    WeightedGraph g = random_graph(11, 13, 8);
    const double c = poincare_constant(g);
    Rng rng(123);
    for (int trial = 0; trial < 1000; ++trial) {
        VertexField u = mean_zero(g, random_field(rng, 13, -1.0, 1.0));
        VertexField u2(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) u2[i] = u[i] * u[i];
        const double lhs = integrate(g, u2);
        const double rhs = c * integrate(g, gradient_form(g, u, u));
        CHECK(lhs <= rhs * (1.0 + 1e-12) + 1e-15);
    }

    VertexField phi;
    const double gap = spectral_gap(g, &phi);
    // independent certification that phi is the claimed eigenvector
    VertexField lap = laplacian_apply(g, phi);
    for (std::size_t i = 0; i < phi.size(); ++i)
        CHECK(-lap[i] == doctest::Approx(gap * phi[i]).epsilon(1e-9));
    CHECK(std::abs(integrate(g, phi)) <= 1e-10);

    VertexField phi2(phi.size());
    for (std::size_t i = 0; i < phi.size(); ++i) phi2[i] = phi[i] * phi[i];
    const double lhs = integrate(g, phi2);
    const double rhs = c * integrate(g, gradient_form(g, phi, phi));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("maximum principle via shifted solves with signed data") {
    // (Δ−K)u = b ≥ 0 forces u ≤ 0 (K > 0)
    for (std::uint64_t seed = 40; seed < 44; ++seed) {
        WeightedGraph g = random_graph(seed, 19, 12);
        Rng rng(seed);
        VertexField b(static_cast<std::size_t>(19));
        for (std::size_t i = 0; i < b.size(); ++i) b[i] = rng.uniform(0.0, 2.0);
        VertexField u = solve_shifted(g, rng.uniform(0.1, 5.0), b);
        CHECK(max_value(u) <= 1e-12);
    }
}

TEST_CASE("laplacian commutes with adding constants") {
    WeightedGraph g = random_graph(13, 16, 10);
    Rng rng(13);
    VertexField u = random_field(rng, 16, -2.0, 2.0);
    VertexField shifted(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) shifted[i] = u[i] + 3.75;
    VertexField a = laplacian_apply(g, u);
    VertexField b = laplacian_apply(g, shifted);
    for (std::size_t i = 0; i < u.size(); ++i)
        CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-13));
}

TEST_CASE("integration by parts ties the gradient form to the laplacian") {
    for (std::uint64_t seed = 50; seed < 53; ++seed) {
        WeightedGraph g = random_graph(seed, 21, 15);
        Rng rng(seed * 3 + 1);
        for (int trial = 0; trial < 200; ++trial) {
            VertexField u = random_field(rng, 21, -2.0, 2.0);
            VertexField v = random_field(rng, 21, -2.0, 2.0);
            const double lhs = integrate(g, gradient_form(g, u, v));
            VertexField ulapv(u.size());
            VertexField lapv = laplacian_apply(g, v);
            for (std::size_t i = 0; i < u.size(); ++i) ulapv[i] = u[i] * lapv[i];
            const double rhs = -integrate(g, ulapv);
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max({1.0, std::abs(lhs), std::abs(rhs)}));
        }
    }
}

TEST_CASE("graph generators") {
    WeightedGraph k3 = generate_graph(GraphKind::complete, 3);
    CHECK(k3.vertex_count() == 3);
    CHECK(k3.edge_count() == 3);

    WeightedGraph torus = generate_graph(GraphKind::torus_grid, 4, 4);
    CHECK(torus.vertex_count() == 16);
    CHECK(torus.edge_count() == 32);
    for (int x = 0; x < 16; ++x) CHECK(torus.neighbors(x).size() == 4);

    WeightedGraph c5 = generate_graph(GraphKind::cycle, 5);
    CHECK(c5.vertex_count() == 5);
    CHECK(c5.edge_count() == 5);

    WeightedGraph p4 = generate_graph(GraphKind::path, 4);
    CHECK(p4.edge_count() == 3);

    CHECK_THROWS(WeightedGraph::cycle(2));
    CHECK_THROWS(WeightedGraph::path(1));
    CHECK_THROWS(WeightedGraph::complete(1));
    CHECK_THROWS(WeightedGraph::torus_grid(2, 2));
    CHECK_THROWS(WeightedGraph::torus_grid(1, 5));
}

TEST_CASE("graph construction invariants") {
    CHECK_THROWS(WeightedGraph(2, {{0, 0, 1.0}}));              // self-loop
    CHECK_THROWS(WeightedGraph(2, {{0, 1, 1.0}, {1, 0, 2.0}})); // duplicate edge
    CHECK_THROWS(WeightedGraph(2, {{0, 1, -1.0}}));             // nonpositive weight
    CHECK_THROWS(WeightedGraph(2, {{0, 2, 1.0}}));              // out of range
    CHECK_THROWS(WeightedGraph(4, {{0, 1, 1.0}, {2, 3, 1.0}})); // disconnected
    CHECK_THROWS(WeightedGraph(2, {{0, 1, 1.0}}, {1.0, 0.0}));  // nonpositive measure
}

TEST_CASE("graph JSON round trip and validation") {
    WeightedGraph g = random_graph(60, 9, 4);
    const std::string text = graph_to_canonical_json(g);
    WeightedGraph back = graph_from_json_text(text);
    CHECK(back.vertex_count() == g.vertex_count());
    CHECK(back.edge_count() == g.edge_count());
    CHECK(graph_hash(back) == graph_hash(g));

    // mu optional, unordered edges are normalized
    WeightedGraph h = graph_from_json_text(R"({"n": 3, "edges": [[2,1,1.0],[0,1,1.0]]})");
    CHECK(h.mu(0) == 1.0);
    CHECK(h.edges()[0].x == 0);

    CHECK_THROWS(graph_from_json_text("not json"));
    CHECK_THROWS(graph_from_json_text(R"({"n": 2, "edges": [[0,0,1.0]]})"));
    CHECK_THROWS(graph_from_json_text(R"({"n": 2, "edges": [[0,1,1.0]], "mu": [1.0]})"));
}

} // TEST_SUITE
