#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "csvortex/critical.hpp"
#include "csvortex/errors.hpp"
#include "test_support.hpp"

using namespace csvortex;
using namespace csvortex::testing;

TEST_SUITE("critical-sweep") {

TEST_CASE("bisection brackets the critical coupling on K2") {
    WeightedGraph k2 = WeightedGraph::path(2);
    std::vector<Vortex> vs{{0, 1}};
    CriticalEstimate est = find_critical_lambda(k2, vs, {});

    VortexProblem p0(k2, 1.0, vs);
    const double bound = necessary_lambda_bound(p0);
    CHECK(est.bound == doctest::Approx(bound));
    CHECK(est.lambda_lo < est.lambda_hi);
    CHECK(est.lambda_hi >= bound - 1e-9);
    CHECK((est.lambda_hi - est.lambda_lo) / est.lambda_hi <= 1e-3);

    // bracket endpoints carry the right evidence
    bool lo_diverged = false, hi_converged = false;
    for (const ProbeRecord& p : est.probes) {
        if (p.lambda == est.lambda_lo) {
            lo_diverged = p.report.status == SolveStatus::diverged;
            CHECK_FALSE(p.report.min_value_trace.empty());
        }
        if (p.lambda == est.lambda_hi && p.report.status == SolveStatus::converged) {
            hi_converged = true;
            VertexField u0 = compute_u0(VortexProblem(k2, p.lambda, vs));
            VertexField u(u0.size());
            for (std::size_t i = 0; i < u0.size(); ++i) u[i] = u0[i] + (*p.report.solution_v)[i];
            CHECK(verify_solution(VortexProblem(k2, p.lambda, vs), u).all_ok());
        }
    }
    CHECK(lo_diverged);
    CHECK(hi_converged);

    // interval structure: no converged probe below any diverged probe
    for (const ProbeRecord& a : est.probes)
        for (const ProbeRecord& b : est.probes)
            if (a.report.status == SolveStatus::converged &&
                b.report.status == SolveStatus::diverged)
                CHECK(a.lambda > b.lambda);
}

TEST_CASE("tighter widths give nested brackets") {
    WeightedGraph g = WeightedGraph::torus_grid(4, 4);
    std::vector<Vortex> vs{{5, 1}};
    CriticalConfig coarse;
    coarse.rel_width = 1e-2;
    CriticalConfig fine;
    fine.rel_width = 1e-3;
    CriticalEstimate a = find_critical_lambda(g, vs, coarse);
    CriticalEstimate b = find_critical_lambda(g, vs, fine);
    CHECK(b.lambda_lo >= a.lambda_lo - 1e-12 * a.lambda_lo);
    CHECK(b.lambda_hi <= a.lambda_hi + 1e-12 * a.lambda_hi);
    CHECK((b.lambda_hi - b.lambda_lo) / b.lambda_hi <= 1e-3);
}

TEST_CASE("sweep statuses transition from diverged to converged exactly once") {
    WeightedGraph torus = WeightedGraph::torus_grid(4, 4);
    std::vector<Vortex> vs{{0, 1}};
    VortexProblem p0(torus, 1.0, vs);
    const double bound = necessary_lambda_bound(p0);

    std::vector<double> lambdas{0.5 * bound, 1.0 * bound, 2.0 * bound, 4.0 * bound};
    SweepOptions opts;
    std::vector<SweepRow> rows = sweep_lambda(torus, vs, lambdas, opts);
    REQUIRE(rows.size() == 4);

    int transitions = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i - 1].status != rows[i].status) ++transitions;
    CHECK(transitions == 1);
    CHECK(rows.front().status == SolveStatus::diverged);
    CHECK(rows.back().status == SolveStatus::converged);

    for (const SweepRow& row : rows) {
        CHECK(row.error.empty());
        CHECK(row.lambda > 0.0);
        if (row.status == SolveStatus::converged) {
            CHECK(row.min_u < 0.0);
            CHECK(row.energy_maximal.has_value());
            CHECK(row.energy_min.has_value());
        }
    }

    // maximal solutions grow pointwise with lambda across converged rows
    const SweepRow* prev = nullptr;
    for (const SweepRow& row : rows) {
        if (row.status != SolveStatus::converged) continue;
        if (prev) {
            const VertexField& lo = *prev->v_max;
            const VertexField& hi = *row.v_max;
            for (std::size_t i = 0; i < lo.size(); ++i) CHECK(lo[i] <= hi[i] + 1e-8);
        }
        prev = &row;
    }
}

TEST_CASE("a hard cap on the doubling phase raises an error carrying the probe log") {
    WeightedGraph c8 = WeightedGraph::cycle(8);  // critical coupling near 3.2x bound
    CriticalConfig cfg;
    cfg.hard_cap_factor = 1.5;
    try {
        find_critical_lambda(c8, {{0, 1}}, cfg);
        FAIL("expected ConvergenceFailure");
    } catch (const ConvergenceFailure& e) {
        CHECK(std::string(e.what()).find("lambda=") != std::string::npos);
    }
}

TEST_CASE("per-lambda failures are recorded in-row without aborting the sweep") {
    WeightedGraph k2 = WeightedGraph::path(2);
    std::vector<Vortex> vs{{0, 1}};
    std::vector<double> lambdas{-1.0, 500.0};
    std::vector<SweepRow> rows = sweep_lambda(k2, vs, lambdas, {});
    REQUIRE(rows.size() == 2);
    CHECK_FALSE(rows[0].error.empty());
    CHECK(rows[1].error.empty());
    CHECK(rows[1].status == SolveStatus::converged);
}

TEST_CASE("parallel sweeps emit byte-identical CSV") {
    WeightedGraph torus = WeightedGraph::torus_grid(4, 4);
    std::vector<Vortex> vs{{0, 1}};
    VortexProblem p0(torus, 1.0, vs);
    const double bound = necessary_lambda_bound(p0);
    std::vector<double> lambdas{0.8 * bound, 1.6 * bound, 3.0 * bound};

    SweepOptions serial;
    serial.jobs = 1;
    SweepOptions parallel;
    parallel.jobs = 3;

    std::ostringstream a, b;
    write_sweep_csv(a, sweep_lambda(torus, vs, lambdas, serial), "{}");
    write_sweep_csv(b, sweep_lambda(torus, vs, lambdas, parallel), "{}");
    CHECK(a.str() == b.str());
    CHECK(a.str().rfind("# manifest: {}", 0) == 0);
}

TEST_CASE("sweep csv has one row per lambda and the pinned column header") {
    WeightedGraph k2 = WeightedGraph::path(2);
    std::vector<Vortex> vs{{0, 1}};
    std::vector<double> lambdas{10.0, 400.0};
    SweepOptions opts;
    opts.with_minimizer = false;
    std::ostringstream os;
    write_sweep_csv(os, sweep_lambda(k2, vs, lambdas, opts), "{}");
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);  // manifest comment
    std::getline(in, line);
    CHECK(line == "lambda,status,iterations,residual,min_u,energy_maximal,energy_min,energy_gap,wall_ms");
    int rows = 0;
    while (std::getline(in, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 2);
}

} // TEST_SUITE
