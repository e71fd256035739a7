#include "csvortex/critical.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "csvortex/errors.hpp"
#include "csvortex/serialize.hpp"

namespace csvortex {

namespace {

SchemeConfig probe_scheme(const SchemeConfig& base, double lambda) {
    SchemeConfig cfg = base;
    // the scheme needs K ≥ λ at every probed coupling
    cfg.shift = std::max(base.shift.value_or(lambda), lambda);
    return cfg;
}

SolveReport run_probe(const WeightedGraph& g, const std::vector<Vortex>& vortices,
                      const VertexField& u0, double lambda, const SchemeConfig& base,
                      int retries) {
    VortexProblem prob(g, lambda, vortices);
    SchemeConfig cfg = probe_scheme(base, lambda);
    SolveReport report = monotone_iterate(prob, u0, cfg);
    for (int r = 0; r < retries && report.status == SolveStatus::stalled; ++r) {
        cfg.max_iter *= 4;
        report = monotone_iterate(prob, u0, cfg);
    }
    return report;
}

std::string probe_log(const std::vector<ProbeRecord>& probes) {
    std::ostringstream os;
    for (const ProbeRecord& p : probes)
        os << "\n  lambda=" << format_g17(p.lambda) << " status=" << to_string(p.report.status)
           << " iterations=" << p.report.iterations
           << " residual=" << format_g17(p.report.final_residual());
    return os.str();
}

} // namespace

CriticalEstimate find_critical_lambda(const WeightedGraph& g, const std::vector<Vortex>& vortices,
                                      const CriticalConfig& cfg) {
    if (!(cfg.rel_width > 0.0)) throw std::invalid_argument("rel_width must be positive");

    CriticalEstimate est;
    {
        VortexProblem probe(g, 1.0, vortices);  // λ placeholder; bound is λ-independent
        est.bound = necessary_lambda_bound(probe);
    }
    VortexProblem prob0(g, 1.0, vortices);
    VertexField u0 = compute_u0(prob0, cfg.scheme.linear);

    auto probe = [&](double lambda) -> const SolveReport& {
        est.probes.push_back({lambda, run_probe(g, vortices, u0, lambda, cfg.scheme, cfg.stall_retries)});
        const SolveReport& rep = est.probes.back().report;
        if (rep.status == SolveStatus::stalled)
            throw ConvergenceFailure(
                "inconclusive probe at lambda=" + format_g17(lambda) +
                    " (neither converged nor certified divergent); probe log:" + probe_log(est.probes),
                rep.final_residual());
        return rep;
    };

    // certainly-divergent seed just below the necessary bound
    est.lambda_lo = est.bound * (1.0 - cfg.seed_epsilon);
    probe(est.lambda_lo);
    if (est.probes.back().report.status == SolveStatus::converged)
        throw std::runtime_error("probe below the necessary bound converged; check the instance");

    // double until a solution appears
    const double cap = est.bound * cfg.hard_cap_factor;
    double hi = est.bound * 2.0;
    while (true) {
        const SolveReport& rep = probe(hi);
        if (rep.status == SolveStatus::converged) break;
        est.lambda_lo = hi;
        hi *= 2.0;
        if (hi > cap)
            throw ConvergenceFailure("no converged probe found below the hard cap bound*" +
                                         format_g17(cfg.hard_cap_factor) + "; probe log:" +
                                         probe_log(est.probes),
                                     0.0);
    }
    est.lambda_hi = hi;

    // log-scale bisection
    while ((est.lambda_hi - est.lambda_lo) / est.lambda_hi > cfg.rel_width) {
        const double mid = std::sqrt(est.lambda_lo * est.lambda_hi);
        if (!(mid > est.lambda_lo && mid < est.lambda_hi)) break;  // no representable midpoint
        const SolveReport& rep = probe(mid);
        if (rep.status == SolveStatus::converged)
            est.lambda_hi = mid;
        else
            est.lambda_lo = mid;
    }

    // estimate invariants
    if (!(est.lambda_lo < est.lambda_hi) || !(est.lambda_hi >= est.bound - 1e-9))
        throw std::logic_error("critical estimate violates its bracket invariants");
    for (const ProbeRecord& a : est.probes)
        for (const ProbeRecord& b : est.probes)
            if (a.report.status == SolveStatus::converged &&
                b.report.status == SolveStatus::diverged && a.lambda <= b.lambda)
                throw std::logic_error(
                    "probe list violates the interval structure of the solvable set");
    return est;
}

std::vector<SweepRow> sweep_lambda(const WeightedGraph& g, const std::vector<Vortex>& vortices,
                                   const std::vector<double>& lambdas, const SweepOptions& opts) {
    std::vector<SweepRow> rows(lambdas.size());

    VertexField u0;
    std::string u0_error;
    try {
        VortexProblem prob0(g, 1.0, vortices);
        u0 = compute_u0(prob0, opts.scheme.linear);
    } catch (const std::exception& e) {
        u0_error = e.what();
    }

    auto run_one = [&](std::size_t idx) {
        SweepRow& row = rows[idx];
        row.lambda = lambdas[idx];
        const auto t0 = std::chrono::steady_clock::now();
        try {
            if (!u0_error.empty()) throw std::runtime_error(u0_error);
            VortexProblem prob(g, row.lambda, vortices);
            SolveReport rep = monotone_iterate(prob, u0, probe_scheme(opts.scheme, row.lambda));
            row.status = rep.status;
            row.iterations = rep.iterations;
            row.residual = rep.final_residual();
            {
                VertexField u(u0.size());
                for (std::size_t i = 0; i < u0.size(); ++i) u[i] = u0[i] + rep.last_iterate[i];
                row.min_u = min_value(u);
            }
            if (rep.status == SolveStatus::converged) {
                const VertexField& v = *rep.solution_v;
                row.energy_maximal = energy(prob, u0, v);
                row.v_max = v;
                if (opts.with_minimizer) {
                    VertexField start(u0.size());
                    for (std::size_t i = 0; i < u0.size(); ++i) start[i] = -u0[i];
                    MinimizeResult m = minimize(prob, u0, start, opts.descent);
                    if (m.converged) {
                        row.energy_min = m.energy;
                        if (opts.with_mountain_pass) {
                            SolveReport mp = mountain_pass(prob, u0, m.v, opts.mountain, opts.descent);
                            if (mp.status == SolveStatus::converged)
                                row.energy_gap = energy(prob, u0, *mp.solution_v) - m.energy;
                        }
                    }
                }
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        if (opts.wall_clock) {
            const auto t1 = std::chrono::steady_clock::now();
            row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        }
    };

    const int jobs = std::max(1, opts.jobs);
    if (jobs == 1 || rows.size() <= 1) {
        for (std::size_t i = 0; i < rows.size(); ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= rows.size()) return;
                run_one(i);
            }
        };
        std::vector<std::thread> pool;
        const int count = std::min<std::size_t>(jobs, rows.size());
        pool.reserve(static_cast<std::size_t>(count));
        for (int t = 0; t < count; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     const std::string& manifest_json) {
    os << "# manifest: " << manifest_json << "\n";
    os << "lambda,status,iterations,residual,min_u,energy_maximal,energy_min,energy_gap,wall_ms\n";
    for (const SweepRow& row : rows) {
        if (!row.error.empty()) {
            os << format_g17(row.lambda) << ",error,0,,,,,," << format_g17(row.wall_ms) << "\n";
            continue;
        }
        os << format_g17(row.lambda) << "," << to_string(row.status) << "," << row.iterations << ","
           << format_g17(row.residual) << "," << format_g17(row.min_u) << ",";
        if (row.energy_maximal) os << format_g17(*row.energy_maximal);
        os << ",";
        if (row.energy_min) os << format_g17(*row.energy_min);
        os << ",";
        if (row.energy_gap) os << format_g17(*row.energy_gap);
        os << "," << format_g17(row.wall_ms) << "\n";
    }
}

} // namespace csvortex
