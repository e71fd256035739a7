#include "csvortex/chern_simons.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "csvortex/errors.hpp"

namespace csvortex {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kMonotoneTol = 1e-10;
constexpr double kBarrierSlack = 1e-6;
constexpr double kSubsolutionBarrierTol = 1e-8;
} // namespace

VortexProblem::VortexProblem(const WeightedGraph& g, double lambda, std::vector<Vortex> vortices)
    : graph_(&g), lambda_(lambda), vortices_(std::move(vortices)), total_(0) {
    if (!(lambda_ > 0.0) || !std::isfinite(lambda_))
        throw std::invalid_argument("coupling lambda must be positive");
    if (vortices_.empty()) throw std::invalid_argument("at least one vortex is required");
    std::set<int> seen;
    for (const Vortex& v : vortices_) {
        if (v.vertex < 0 || v.vertex >= g.vertex_count())
            throw std::invalid_argument("vortex vertex out of range");
        if (v.multiplicity < 1) throw std::invalid_argument("vortex multiplicity must be >= 1");
        if (!seen.insert(v.vertex).second)
            throw std::invalid_argument("duplicate vortex vertex; use the multiplicity instead");
        total_ += v.multiplicity;
    }
}

double VortexProblem::vortex_density() const {
    return 4.0 * kPi * total_ / graph_->volume();
}

VortexProblem VortexProblem::with_lambda(double lambda) const {
    return VortexProblem(*graph_, lambda, vortices_);
}

double nonlinearity_F(double y) {
    const double t = std::expm1(y);
    const double t2 = t * t;
    return t2 * t2 * t * std::exp(y);
}

double nonlinearity_F_prime(double y) {
    const double e = std::exp(y);
    const double t = std::expm1(y);
    const double t2 = t * t;
    return e * t2 * t2 * (6.0 * e - 1.0);
}

double nonlinearity_argmin() { return -std::log(6.0); }

double nonlinearity_lower_root(double c) {
    if (!(c > 0.0) || !(c < -kNonlinearityMin))
        throw std::invalid_argument("nonlinearity_lower_root requires 0 < c < 5^5/6^6");
    // F is strictly decreasing on (−∞, −ln6] from 0⁻ to the minimum, and
    // F(ln c) = −c(1−c)^5 > −c, so the root is bracketed by [ln c, −ln 6].
    double lo = std::log(c);
    double hi = nonlinearity_argmin();
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (nonlinearity_F(mid) > -c)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double necessary_lambda_bound(const VortexProblem& prob) {
    return (46656.0 / 3125.0) * prob.vortex_density();
}

VertexField compute_u0(const VortexProblem& prob, const LinearSolveConfig& cfg) {
    const WeightedGraph& g = prob.graph();
    const double density = prob.vortex_density();
    VertexField rhs(static_cast<std::size_t>(g.vertex_count()), -density);
    for (const Vortex& v : prob.vortices())
        rhs[static_cast<std::size_t>(v.vertex)] += 4.0 * kPi * v.multiplicity / g.mu(v.vertex);

    const double mass = integrate(g, rhs);
    const double scale = 4.0 * kPi * prob.total_vortex_count();
    if (std::abs(mass) > 1e-12 * std::max(1.0, scale))
        throw CompatibilityError("background right-hand side failed its mean-zero check", mass);

    return solve_poisson_mean_zero(g, rhs, cfg);
}

VertexField residual_reduced(const VortexProblem& prob, const VertexField& u0,
                             const VertexField& v) {
    const WeightedGraph& g = prob.graph();
    g.check_aligned(u0);
    g.check_aligned(v);
    const double density = prob.vortex_density();
    const double lambda = prob.lambda();
    VertexField lap = laplacian_apply(g, v);
    VertexField out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        out[i] = lap[i] - lambda * nonlinearity_F(u0[i] + v[i]) - density;
    return out;
}

bool is_subsolution(const VortexProblem& prob, const VertexField& u0, const VertexField& w,
                    double slack) {
    VertexField r = residual_reduced(prob, u0, w);
    for (std::size_t i = 0; i < r.size(); ++i)
        if (r[i] < -slack) return false;
    return true;
}

const char* to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::diverged: return "diverged";
        case SolveStatus::stalled: return "stalled";
    }
    return "unknown";
}

SolveReport monotone_iterate(const VortexProblem& prob, const VertexField& u0,
                             const SchemeConfig& cfg,
                             const VertexField* subsolution_barrier) {
    const WeightedGraph& g = prob.graph();
    g.check_aligned(u0);
    const double lambda = prob.lambda();
    const double K = cfg.shift.value_or(lambda);
    if (K < lambda)
        throw std::invalid_argument("scheme shift K must satisfy K >= lambda");
    if (!(cfg.residual_tol > 0.0)) throw std::invalid_argument("residual_tol must be positive");
    if (subsolution_barrier) g.check_aligned(*subsolution_barrier);

    const double density = prob.vortex_density();
    const std::size_t n = u0.size();

    SolveReport report;

    // Nonexistence certificate: a solution v′ has Δv′ ≥ 0 at its minimum, so
    // F(u₀+v′) ≤ −4πN/(λ·Vol) there, pinning v′ ≥ y₁(c) − max u₀ everywhere;
    // the iterates dominate every solution, so dipping below proves there is none.
    const double level = density / lambda;  // c = 4πN/(λ·Vol)
    if (cfg.barrier_certificate && level < -kNonlinearityMin)
        report.divergence_barrier = nonlinearity_lower_root(level) - max_value(u0) - kBarrierSlack;

    ShiftedSolver solver(g, K, cfg.linear);

    VertexField w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = -u0[i];

    report.residual_history.push_back(sup_norm(residual_reduced(prob, u0, w)));
    report.min_value_trace.push_back(min_value(w));

    int large_step_streak = 0;
    VertexField rhs(n);
    for (int it = 1; it <= cfg.max_iter; ++it) {
        for (std::size_t i = 0; i < n; ++i)
            rhs[i] = lambda * nonlinearity_F(u0[i] + w[i]) - K * w[i] + density;
        VertexField w_next = solver.solve(rhs, &w);

        double step = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (w_next[i] > w[i] + kMonotoneTol) report.monotonicity_certified = false;
            step = std::max(step, std::abs(w_next[i] - w[i]));
        }
        if (subsolution_barrier) {
            for (std::size_t i = 0; i < n; ++i)
                if (w_next[i] < (*subsolution_barrier)[i] - kSubsolutionBarrierTol)
                    report.lower_barrier_certified = false;
        }

        w = std::move(w_next);
        report.iterations = it;
        report.min_value_trace.push_back(min_value(w));
        const double res = sup_norm(residual_reduced(prob, u0, w));
        report.residual_history.push_back(res);

        if (res <= cfg.residual_tol) {
            report.status = SolveStatus::converged;
            report.solution_v = w;
            report.last_iterate = std::move(w);
            return report;
        }
        const double wmin = report.min_value_trace.back();
        if (wmin < cfg.divergence_floor ||
            (report.divergence_barrier && wmin < *report.divergence_barrier)) {
            report.status = SolveStatus::diverged;
            report.last_iterate = std::move(w);
            return report;
        }
        if (cfg.stall_step > 0.0) {
            large_step_streak = (step >= cfg.stall_step) ? large_step_streak + 1 : 0;
            if (large_step_streak >= cfg.stall_window) {
                report.status = SolveStatus::diverged;
                report.last_iterate = std::move(w);
                return report;
            }
        }
    }
    report.status = SolveStatus::stalled;
    report.last_iterate = std::move(w);
    return report;
}

VerifyReport verify_solution(const VortexProblem& prob, const VertexField& u,
                             double residual_tol) {
    const WeightedGraph& g = prob.graph();
    g.check_aligned(u);
    const double lambda = prob.lambda();

    VerifyReport rep;
    VertexField lap = laplacian_apply(g, u);
    VertexField dirac(u.size());
    for (const Vortex& v : prob.vortices())
        dirac[static_cast<std::size_t>(v.vertex)] += 4.0 * kPi * v.multiplicity / g.mu(v.vertex);

    double res = 0.0;
    VertexField f_of_u(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        f_of_u[i] = nonlinearity_F(u[i]);
        res = std::max(res, std::abs(lap[i] - lambda * f_of_u[i] - dirac[i]));
    }
    rep.residual_sup = res;
    rep.residual_ok = res <= residual_tol;

    rep.max_u = max_value(u);
    rep.negativity_ok = rep.max_u < 0.0;

    rep.integral_defect = lambda * integrate(g, f_of_u) + 4.0 * kPi * prob.total_vortex_count();
    rep.integral_ok = std::abs(rep.integral_defect) <= 1e-8;
    return rep;
}

LambdaComparison compare_lambda_monotonicity(const VortexProblem& prob_high,
                                             const VortexProblem& prob_low,
                                             const SchemeConfig& cfg) {
    if (&prob_high.graph() != &prob_low.graph())
        throw std::invalid_argument("lambda comparison requires the same graph instance");
    if (!(prob_high.lambda() >= prob_low.lambda()))
        throw std::invalid_argument("lambda comparison expects lambda_high >= lambda_low");
    {
        const auto& a = prob_high.vortices();
        const auto& b = prob_low.vortices();
        bool same = a.size() == b.size();
        for (std::size_t i = 0; same && i < a.size(); ++i)
            same = a[i].vertex == b[i].vertex && a[i].multiplicity == b[i].multiplicity;
        if (!same) throw std::invalid_argument("lambda comparison requires identical vortices");
    }

    VertexField u0 = compute_u0(prob_high, cfg.linear);
    LambdaComparison cmp;
    cmp.report_high = monotone_iterate(prob_high, u0, cfg);
    cmp.report_low = monotone_iterate(prob_low, u0, cfg);
    cmp.applicable = cmp.report_high.status == SolveStatus::converged &&
                     cmp.report_low.status == SolveStatus::converged;
    if (cmp.applicable) {
        const VertexField& vh = *cmp.report_high.solution_v;
        const VertexField& vl = *cmp.report_low.solution_v;
        cmp.monotone = true;
        for (std::size_t i = 0; i < vh.size(); ++i)
            if (vl[i] > vh[i] + 1e-8) cmp.monotone = false;
    }
    return cmp;
}

} // namespace csvortex
