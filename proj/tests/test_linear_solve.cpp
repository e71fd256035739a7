#include <doctest.h>

#include <cmath>

#include "csvortex/errors.hpp"
#include "csvortex/linear_solve.hpp"
#include "test_support.hpp"

using namespace csvortex;
using namespace csvortex::testing;

namespace {
const double kPi = std::acos(-1.0);

VertexField permute(const VertexField& u, const std::vector<int>& perm) {
    VertexField out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        out[static_cast<std::size_t>(perm[i])] = u[i];
    return out;
}
} // namespace

TEST_SUITE("linear-solve") {

TEST_CASE("shifted solve on K2 reproduces the 2x2 hand solution") {
    WeightedGraph k2 = WeightedGraph::path(2);
    VertexField b(std::vector<double>{1.0, -1.0});
    VertexField x = solve_shifted(k2, 1.0, b);
    CHECK(x[0] == doctest::Approx(-1.0 / 3.0).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("zero data gives the zero solution") {
    WeightedGraph g = random_graph(1, 12, 8);
    VertexField x = solve_shifted(g, 2.0, VertexField(12));
    CHECK(sup_norm(x) == 0.0);
}

TEST_CASE("shifted solve round-trips random fields") {
    for (auto method : {SolveMethod::direct, SolveMethod::conjugate_gradient}) {
        LinearSolveConfig cfg;
        cfg.method = method;
        for (std::uint64_t seed = 2; seed < 5; ++seed) {
            WeightedGraph g = random_graph(seed, 18, 12);
            Rng rng(seed * 7);
            VertexField y = random_field(rng, 18, -2.0, 2.0);
            const double K = rng.uniform(0.5, 4.0);
            VertexField lap = laplacian_apply(g, y);
            VertexField b(y.size());
            for (std::size_t i = 0; i < y.size(); ++i) b[i] = lap[i] - K * y[i];
            VertexField x = solve_shifted(g, K, b, cfg);
            for (std::size_t i = 0; i < y.size(); ++i)
                CHECK(x[i] == doctest::Approx(y[i]).epsilon(1e-10));
        }
    }
}

TEST_CASE("nonpositive shift is rejected") {
    WeightedGraph k2 = WeightedGraph::path(2);
    CHECK_THROWS(solve_shifted(k2, 0.0, VertexField(2)));
    CHECK_THROWS(solve_shifted(k2, -1.0, VertexField(2)));
}

TEST_CASE("maximum principle corollary: nonpositive data, nonnegative solution") {
    for (std::uint64_t seed = 5; seed < 9; ++seed) {
        WeightedGraph g = random_graph(seed, 15, 9);
        Rng rng(seed + 100);
        VertexField b(static_cast<std::size_t>(15));
        for (std::size_t i = 0; i < b.size(); ++i) b[i] = -rng.uniform(0.0, 3.0);
        VertexField x = solve_shifted(g, rng.uniform(0.2, 3.0), b);
        CHECK(min_value(x) >= -1e-12);
    }
}

TEST_CASE("poisson solve on K2 reproduces the hand solution with zero mean") {
    WeightedGraph k2 = WeightedGraph::path(2);
    VertexField f(std::vector<double>{2.0 * kPi, -2.0 * kPi});
    VertexField x = solve_poisson_mean_zero(k2, f);
    CHECK(x[0] == doctest::Approx(-kPi).epsilon(1e-12));
    CHECK(x[1] == doctest::Approx(kPi).epsilon(1e-12));
    CHECK(std::abs(integrate(k2, x)) <= 1e-12);
}

TEST_CASE("poisson with zero data returns zero") {
    WeightedGraph g = random_graph(21, 14, 8);
    VertexField x = solve_poisson_mean_zero(g, VertexField(14));
    CHECK(sup_norm(x) <= 1e-13);
}

TEST_CASE("poisson round-trips laplacian images") {
    for (auto method : {SolveMethod::direct, SolveMethod::conjugate_gradient}) {
        LinearSolveConfig cfg;
        cfg.method = method;
        WeightedGraph g = random_graph(22, 20, 14);
        Rng rng(22);
        VertexField y = random_field(rng, 20, -2.0, 2.0);
        VertexField f = laplacian_apply(g, y);
        VertexField x = solve_poisson_mean_zero(g, f, cfg);
        const double mean = integrate(g, y) / g.volume();
        for (std::size_t i = 0; i < y.size(); ++i)
            CHECK(x[i] == doctest::Approx(y[i] - mean).epsilon(1e-10));
    }
}

TEST_CASE("poisson rejects data with nonzero mean and reports the integral") {
    WeightedGraph k2 = WeightedGraph::path(2);
    VertexField f(std::vector<double>{1.0, 0.5});
    try {
        solve_poisson_mean_zero(k2, f);
        FAIL("expected CompatibilityError");
    } catch (const CompatibilityError& e) {
        CHECK(e.integral() == doctest::Approx(1.5).epsilon(1e-15));
    }
}

TEST_CASE("direct and conjugate-gradient answers agree") {
    WeightedGraph g = random_graph(23, 26, 18);
    Rng rng(23);
    VertexField f = mean_zero(g, random_field(rng, 26, -2.0, 2.0));
    LinearSolveConfig direct;
    direct.method = SolveMethod::direct;
    LinearSolveConfig cg;
    cg.method = SolveMethod::conjugate_gradient;

    VertexField xd = solve_poisson_mean_zero(g, f, direct);
    VertexField xc = solve_poisson_mean_zero(g, f, cg);
    for (std::size_t i = 0; i < f.size(); ++i)
        CHECK(xd[i] == doctest::Approx(xc[i]).epsilon(1e-10));

    VertexField b = random_field(rng, 26, -2.0, 2.0);
    VertexField sd = solve_shifted(g, 1.5, b, direct);
    VertexField sc = solve_shifted(g, 1.5, b, cg);
    for (std::size_t i = 0; i < b.size(); ++i)
        CHECK(sd[i] == doctest::Approx(sc[i]).epsilon(1e-10));
}

TEST_CASE("solutions are equivariant under vertex relabeling") {
    const int n = 13;
    WeightedGraph g = random_graph(24, n, 9);
    Rng rng(24);
    VertexField b = random_field(rng, n, -2.0, 2.0);
    const double K = 1.25;
    VertexField x = solve_shifted(g, K, b);

    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = (i * 5 + 3) % n;  // bijection for gcd(5,13)=1
    std::vector<Edge> edges;
    for (const Edge& e : g.edges()) edges.push_back({perm[e.x], perm[e.y], e.w});
    std::vector<double> mu(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) mu[static_cast<std::size_t>(perm[i])] = g.mu(i);
    WeightedGraph gp(n, std::move(edges), std::move(mu));

    VertexField xp = solve_shifted(gp, K, permute(b, perm));
    for (int i = 0; i < n; ++i)
        CHECK(xp[static_cast<std::size_t>(perm[i])] ==
              doctest::Approx(x[static_cast<std::size_t>(i)]).epsilon(1e-12));
}

TEST_CASE("exhausted iteration budget raises a convergence failure with the residual") {
    WeightedGraph g = random_graph(25, 30, 20);
    Rng rng(25);
    VertexField b = random_field(rng, 30, -1.0, 1.0);
    LinearSolveConfig cfg;
    cfg.method = SolveMethod::conjugate_gradient;
    cfg.max_iter = 1;
    try {
        solve_shifted(g, 0.01, b, cfg);
        FAIL("expected ConvergenceFailure");
    } catch (const ConvergenceFailure& e) {
        CHECK(e.residual() > 0.0);
    }
}

TEST_CASE("automatic method switches to conjugate gradient above the dense threshold") {
    WeightedGraph g = WeightedGraph::torus_grid(24, 24);  // 576 > 512 vertices
    Rng rng(27);
    VertexField y = random_field(rng, 576, -1.0, 1.0);

    VertexField lap = laplacian_apply(g, y);
    VertexField b(y.size());
    const double K = 1.5;
    for (std::size_t i = 0; i < y.size(); ++i) b[i] = lap[i] - K * y[i];
    VertexField x = solve_shifted(g, K, b);  // automatic → CG here
    for (std::size_t i = 0; i < y.size(); ++i)
        CHECK(x[i] == doctest::Approx(y[i]).epsilon(1e-9));

    VertexField f = laplacian_apply(g, y);
    VertexField xp = solve_poisson_mean_zero(g, f);
    const double mean = integrate(g, y) / g.volume();
    for (std::size_t i = 0; i < y.size(); ++i)
        CHECK(xp[i] == doctest::Approx(y[i] - mean).epsilon(1e-8));
    CHECK(std::abs(integrate(g, xp)) <= 1e-9);
}

TEST_CASE("reusable shifted solver matches the one-shot entry point") {
    WeightedGraph g = random_graph(26, 17, 11);
    Rng rng(26);
    ShiftedSolver solver(g, 2.5);
    for (int trial = 0; trial < 5; ++trial) {
        VertexField b = random_field(rng, 17, -2.0, 2.0);
        VertexField a = solver.solve(b);
        VertexField c = solve_shifted(g, 2.5, b);
        for (std::size_t i = 0; i < b.size(); ++i)
            CHECK(a[i] == doctest::Approx(c[i]).epsilon(1e-12));
    }
}

} // TEST_SUITE
