#include "csvortex/variational.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Dense>

#include "csvortex/errors.hpp"

namespace csvortex {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// (e^y−1)^6 overflows double once 6y exceeds ~709.
constexpr double kExpSaturation = 118.0;

} // namespace

double energy(const VortexProblem& prob, const VertexField& u0, const VertexField& v) {
    const WeightedGraph& g = prob.graph();
    g.check_aligned(u0);
    g.check_aligned(v);
    const double lambda = prob.lambda();
    const double density = prob.vortex_density();

    double sum = 0.0;
    for (int x = 0; x < g.vertex_count(); ++x) {
        const std::size_t i = static_cast<std::size_t>(x);
        const double y = u0[i] + v[i];
        if (y > kExpSaturation) return kInf;  // documented saturation
        const double t = std::expm1(y);
        const double t3 = t * t * t;
        sum += g.mu(x) * ((lambda / 6.0) * t3 * t3 + density * v[i]);
    }
    // ∫ ½|∇v|² dμ = ½ Σ_{edges} w (v(y)−v(x))²
    for (const Edge& e : g.edges()) {
        const double d = v[static_cast<std::size_t>(e.y)] - v[static_cast<std::size_t>(e.x)];
        sum += 0.5 * e.w * d * d;
    }
    return sum;
}

VertexField energy_gradient(const VortexProblem& prob, const VertexField& u0,
                            const VertexField& v) {
    const WeightedGraph& g = prob.graph();
    g.check_aligned(u0);
    g.check_aligned(v);
    const double lambda = prob.lambda();
    const double density = prob.vortex_density();
    VertexField lap = laplacian_apply(g, v);
    VertexField out(v.size());
    for (int x = 0; x < g.vertex_count(); ++x) {
        const std::size_t i = static_cast<std::size_t>(x);
        out[i] = g.mu(x) * (-lap[i] + lambda * nonlinearity_F(u0[i] + v[i]) + density);
    }
    return out;
}

namespace {

// One damped Newton trial on the reduced residual; used to finish the descent
// once the gradient is already small. nullopt if no admissible step was found.
std::optional<VertexField> newton_trial(const VortexProblem& prob, const VertexField& u0,
                                        const VertexField& v) {
    const WeightedGraph& g = prob.graph();
    const int n = g.vertex_count();
    const double lambda = prob.lambda();
    VertexField r = residual_reduced(prob, u0, v);
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int x = 0; x < n; ++x) {
        double degw = 0.0;
        for (const auto& nb : g.neighbors(x)) {
            degw += nb.w;
            J(x, nb.to) = nb.w / g.mu(x);
        }
        const std::size_t i = static_cast<std::size_t>(x);
        J(x, x) = -degw / g.mu(x) - lambda * nonlinearity_F_prime(u0[i] + v[i]);
    }
    Eigen::VectorXd rhs(n);
    for (int x = 0; x < n; ++x) rhs(x) = -r[static_cast<std::size_t>(x)];
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(J);
    Eigen::VectorXd delta = lu.solve(rhs);
    if (!delta.allFinite()) return std::nullopt;
    VertexField trial(v.size());
    for (std::size_t i = 0; i < v.size(); ++i)
        trial[i] = v[i] + delta(static_cast<Eigen::Index>(i));
    return trial;
}

} // namespace

MinimizeResult minimize(const VortexProblem& prob, const VertexField& u0,
                        const VertexField& start, const DescentConfig& cfg) {
    if (!(cfg.armijo_c > 0.0 && cfg.armijo_c < 1.0))
        throw std::invalid_argument("armijo_c must be in (0,1)");
    if (!(cfg.backtrack > 0.0 && cfg.backtrack < 1.0))
        throw std::invalid_argument("backtrack must be in (0,1)");

    MinimizeResult res;
    res.v = start;
    res.energy = energy(prob, u0, res.v);
    if (!std::isfinite(res.energy))
        throw std::invalid_argument("minimize requires finite energy at the start point");

    VertexField grad = energy_gradient(prob, u0, res.v);
    res.grad_sup = sup_norm(grad);

    VertexField prev_v;
    VertexField prev_grad;
    double step = cfg.init_step;
    const bool newton_ok = prob.graph().vertex_count() <= 2048;

    for (int it = 0; it < cfg.max_steps; ++it) {
        if (res.grad_sup <= cfg.grad_tol) {
            res.converged = true;
            res.steps = it;
            return res;
        }

        // Endgame: once the basin is reached, a Newton step on the residual
        // finishes quadratically. Accepted only if it keeps the descent
        // contract (energy non-increasing, gradient shrinking).
        if (newton_ok && res.grad_sup < 1e-4) {
            if (auto trial = newton_trial(prob, u0, res.v)) {
                const double e_trial = energy(prob, u0, *trial);
                VertexField g_trial = energy_gradient(prob, u0, *trial);
                const double gs = sup_norm(g_trial);
                // energy comparison up to representation noise near the minimum
                const double slack = 1e-14 * (1.0 + std::abs(res.energy));
                if (e_trial <= res.energy + slack && gs < res.grad_sup) {
                    prev_v = std::move(res.v);
                    prev_grad = std::move(grad);
                    res.v = std::move(*trial);
                    res.energy = e_trial;
                    grad = std::move(g_trial);
                    res.grad_sup = gs;
                    res.steps = it + 1;
                    continue;
                }
            }
        }

        // Barzilai–Borwein step from the last accepted pair, clamped
        if (it > 0) {
            double ss = 0.0, sy = 0.0;
            for (std::size_t i = 0; i < res.v.size(); ++i) {
                const double s = res.v[i] - prev_v[i];
                const double y = grad[i] - prev_grad[i];
                ss += s * s;
                sy += s * y;
            }
            if (sy > 0.0 && ss > 0.0) step = std::clamp(ss / sy, 1e-14, 1e14);
        }

        const double slope = -dot(grad, grad);  // ⟨g, d⟩ with d = −g
        double t = step;
        double e_new = kInf;
        VertexField trial(res.v.size());
        while (true) {
            for (std::size_t i = 0; i < res.v.size(); ++i) trial[i] = res.v[i] - t * grad[i];
            e_new = energy(prob, u0, trial);
            if (e_new <= res.energy + cfg.armijo_c * t * slope) break;
            t *= cfg.backtrack;
            if (t < 1e-18) {
                // no representable progress left
                res.steps = it;
                res.converged = res.grad_sup <= 10.0 * cfg.grad_tol;
                return res;
            }
        }

        prev_v = std::move(res.v);
        prev_grad = std::move(grad);
        res.v = std::move(trial);
        res.energy = e_new;
        grad = energy_gradient(prob, u0, res.v);
        res.grad_sup = sup_norm(grad);
        res.steps = it + 1;
    }
    res.converged = res.grad_sup <= cfg.grad_tol;
    return res;
}

PolishResult polish_critical_point(const VortexProblem& prob, const VertexField& u0,
                                   VertexField v, double tol, int max_steps) {
    const WeightedGraph& g = prob.graph();
    const int n = g.vertex_count();
    const double lambda = prob.lambda();

    PolishResult out;
    VertexField r = residual_reduced(prob, u0, v);
    out.residual_sup = sup_norm(r);

    // Jacobian of the reduced residual: Δ − λ F′(u₀+v), dense.
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
    for (int x = 0; x < n; ++x) {
        double degw = 0.0;
        for (const auto& nb : g.neighbors(x)) {
            degw += nb.w;
            lap(x, nb.to) = nb.w / g.mu(x);
        }
        lap(x, x) = -degw / g.mu(x);
    }

    for (int it = 0; it < max_steps; ++it) {
        if (out.residual_sup <= tol) {
            out.converged = true;
            break;
        }
        Eigen::MatrixXd J = lap;
        for (int x = 0; x < n; ++x) {
            const std::size_t i = static_cast<std::size_t>(x);
            J(x, x) -= lambda * nonlinearity_F_prime(u0[i] + v[i]);
        }
        Eigen::VectorXd rhs(n);
        for (int x = 0; x < n; ++x) rhs(x) = -r[static_cast<std::size_t>(x)];
        Eigen::VectorXd delta = J.partialPivLu().solve(rhs);

        double t = 1.0;
        VertexField trial(v.size());
        bool accepted = false;
        while (t > 1e-12) {
            for (std::size_t i = 0; i < v.size(); ++i)
                trial[i] = v[i] + t * delta(static_cast<Eigen::Index>(i));
            VertexField r_trial = residual_reduced(prob, u0, trial);
            const double rn = sup_norm(r_trial);
            if (rn < (1.0 - 1e-4 * t) * out.residual_sup) {
                v = std::move(trial);
                r = std::move(r_trial);
                out.residual_sup = rn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        out.steps = it + 1;
        if (!accepted) break;  // stagnated
    }
    if (out.residual_sup <= tol) out.converged = true;
    out.v = std::move(v);
    return out;
}

double find_endpoint_drop(const VortexProblem& prob, const VertexField& u0,
                          const VertexField& v_min, double c0) {
    if (!(c0 > 0.0)) throw std::invalid_argument("c0_search must be positive");
    const double e_min = energy(prob, u0, v_min);
    double c = c0;
    for (int it = 0; it < 200; ++it) {
        VertexField shifted(v_min.size());
        for (std::size_t i = 0; i < v_min.size(); ++i) shifted[i] = v_min[i] - c;
        if (energy(prob, u0, shifted) <= e_min - 1.0) return c;
        c *= 2.0;
    }
    throw ConvergenceFailure("could not find an endpoint drop below I(v_min) - 1", c);
}

namespace {

// Re-space interior nodes to uniform arc length by linear interpolation along
// the polygonal path. Endpoints stay fixed.
void respace_path(std::vector<VertexField>& path) {
    const std::size_t p = path.size();
    const std::size_t n = path[0].size();
    std::vector<double> cum(p, 0.0);
    for (std::size_t i = 1; i < p; ++i) {
        double d2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double d = path[i][j] - path[i - 1][j];
            d2 += d * d;
        }
        cum[i] = cum[i - 1] + std::sqrt(d2);
    }
    const double total = cum[p - 1];
    if (!(total > 0.0)) return;

    std::vector<VertexField> fresh(p, VertexField(n));
    fresh[0] = path[0];
    fresh[p - 1] = path[p - 1];
    std::size_t seg = 1;
    for (std::size_t i = 1; i + 1 < p; ++i) {
        const double target = total * static_cast<double>(i) / static_cast<double>(p - 1);
        while (seg + 1 < p && cum[seg] < target) ++seg;
        const double seg_len = cum[seg] - cum[seg - 1];
        const double a = seg_len > 0.0 ? (target - cum[seg - 1]) / seg_len : 0.0;
        for (std::size_t j = 0; j < n; ++j)
            fresh[i][j] = (1.0 - a) * path[seg - 1][j] + a * path[seg][j];
    }
    path = std::move(fresh);
}

} // namespace

SolveReport mountain_pass(const VortexProblem& prob, const VertexField& u0,
                          const VertexField& v_min, const MountainPassConfig& cfg,
                          const DescentConfig& dcfg) {
    if (cfg.path_points < 3) throw std::invalid_argument("path_points must be >= 3");
    {
        const double gmin = sup_norm(energy_gradient(prob, u0, v_min));
        if (gmin > 100.0 * dcfg.grad_tol)
            throw std::invalid_argument("mountain_pass requires a certified local minimizer "
                                        "(gradient sup norm at v_min is too large)");
    }

    SolveReport report;
    const std::size_t n = v_min.size();
    const double e_min = energy(prob, u0, v_min);
    const double c0 = find_endpoint_drop(prob, u0, v_min, cfg.c0_search);

    const std::size_t p = static_cast<std::size_t>(cfg.path_points);
    std::vector<VertexField> path(p, VertexField(n));
    for (std::size_t i = 0; i < p; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(p - 1);
        for (std::size_t j = 0; j < n; ++j) path[i][j] = v_min[j] - t * c0;
    }

    std::vector<double> energies(p);
    for (std::size_t i = 0; i < p; ++i) energies[i] = energy(prob, u0, path[i]);

    // Accept a candidate only if it meets the full contract: polished residual,
    // distinct from the minimizer, and strictly above its energy level.
    auto try_accept = [&](const VertexField& candidate) -> bool {
        PolishResult polished = polish_critical_point(prob, u0, candidate, cfg.residual_tol);
        if (!polished.converged) return false;
        double dist = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            dist = std::max(dist, std::abs(polished.v[j] - v_min[j]));
        if (dist <= 1e3 * cfg.deform_tol) return false;
        if (!(energy(prob, u0, polished.v) > e_min)) return false;
        report.status = SolveStatus::converged;
        report.residual_history.push_back(polished.residual_sup);
        report.solution_v = std::move(polished.v);
        return true;
    };

    double armijo_t = dcfg.init_step;
    std::size_t best = 1;
    int collapse_streak = 0;

    for (int it = 0; it < cfg.max_deform; ++it) {
        best = 1;
        for (std::size_t i = 2; i + 1 < p; ++i)
            if (energies[i] > energies[best]) best = i;

        // Sampled max below the start level: the ridge sits between nodes.
        // Re-spacing re-samples it; a persistent deficit means genuine collapse.
        if (energies[best] <= e_min + 1e-14) {
            respace_path(path);
            for (std::size_t i = 1; i + 1 < p; ++i) energies[i] = energy(prob, u0, path[i]);
            report.iterations = it + 1;
            if (++collapse_streak > 50) {
                report.status = SolveStatus::stalled;
                return report;
            }
            continue;
        }
        collapse_streak = 0;

        VertexField grad = energy_gradient(prob, u0, path[best]);
        const double gsup = sup_norm(grad);
        report.residual_history.push_back(gsup);
        report.min_value_trace.push_back(energies[best]);
        report.iterations = it + 1;

        if (gsup <= cfg.deform_tol) break;

        // Periodic polish attempts: the relaxed path max snaps to the saddle
        // long before deform_tol is certified. try_accept keeps this sound
        // (a polish landing on v_min or below its level is rejected).
        if ((it + 1) % 500 == 0 && try_accept(path[best])) return report;

        // Step along −gradient with the component along the path tangent
        // removed; raw gradient steps just slide nodes along the path and
        // collapse it instead of descending the ridge transversally.
        VertexField dir(n);
        {
            double tnorm2 = 0.0;
            VertexField tangent(n);
            for (std::size_t j = 0; j < n; ++j) {
                tangent[j] = path[best + 1][j] - path[best - 1][j];
                tnorm2 += tangent[j] * tangent[j];
            }
            double gdott = 0.0;
            for (std::size_t j = 0; j < n; ++j) gdott += grad[j] * tangent[j];
            const double coef = tnorm2 > 0.0 ? gdott / tnorm2 : 0.0;
            double dnorm2 = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                dir[j] = -(grad[j] - coef * tangent[j]);
                dnorm2 += dir[j] * dir[j];
            }
            if (dnorm2 <= 1e-24 * gsup * gsup)
                for (std::size_t j = 0; j < n; ++j) dir[j] = -grad[j];
        }

        const double slope = dot(grad, dir);  // = −‖projected gradient‖²
        double t = armijo_t;
        bool moved = false;
        VertexField trial(n);
        while (t >= 1e-18) {
            for (std::size_t j = 0; j < n; ++j) trial[j] = path[best][j] + t * dir[j];
            const double e_new = energy(prob, u0, trial);
            if (e_new <= energies[best] + dcfg.armijo_c * t * slope) {
                path[best] = std::move(trial);
                energies[best] = e_new;
                moved = true;
                break;
            }
            t *= dcfg.backtrack;
        }
        armijo_t = std::clamp(t * 2.0, 1e-16, 1e6);

        if (!moved) {
            // transversally critical: try to certify it outright
            if (try_accept(path[best])) return report;
            break;
        }

        if ((it + 1) % 100 == 0) {
            respace_path(path);
            for (std::size_t i = 1; i + 1 < p; ++i) energies[i] = energy(prob, u0, path[i]);
        }
    }

    // budget exhausted or tolerance reached: one last certification attempt
    if (try_accept(path[best])) return report;
    report.status = SolveStatus::stalled;
    return report;
}

} // namespace csvortex
