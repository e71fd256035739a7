#ifndef CSVORTEX_CHERN_SIMONS_HPP
#define CSVORTEX_CHERN_SIMONS_HPP

#include <optional>
#include <string>
#include <vector>

#include "csvortex/graph.hpp"
#include "csvortex/linear_solve.hpp"

namespace csvortex {

struct Vortex {
    int vertex;
    int multiplicity = 1;
};

/// The equation Δu = λ e^u (e^u − 1)^5 + 4π Σ_s n_s δ_{p_s} on a connected
/// finite weighted graph. Multiplicities n_s ≥ 1 generalize the distinct
/// unit-vortex setting; with all n_s = 1 this is exactly the classical problem.
class VortexProblem {
public:
    VortexProblem(const WeightedGraph& g, double lambda, std::vector<Vortex> vortices);
    // the problem keeps a pointer to the graph, which must outlive it
    VortexProblem(WeightedGraph&&, double, std::vector<Vortex>) = delete;

    const WeightedGraph& graph() const { return *graph_; }
    double lambda() const { return lambda_; }
    const std::vector<Vortex>& vortices() const { return vortices_; }
    int total_vortex_count() const { return total_; }  // N = Σ n_s

    /// 4πN / Vol(V) — the constant source in the reduced equation.
    double vortex_density() const;

    VortexProblem with_lambda(double lambda) const;

private:
    const WeightedGraph* graph_;  // not owned; must outlive the problem
    double lambda_;
    std::vector<Vortex> vortices_;
    int total_;
};

/// F(y) = (e^y − 1)^5 e^y. Underflows harmlessly to 0 for very negative y.
double nonlinearity_F(double y);

/// F′(y) = e^y (e^y − 1)^4 (6 e^y − 1).
double nonlinearity_F_prime(double y);

/// Global minimum of F: value −5⁵/6⁶ attained at y = −ln 6.
inline constexpr double kNonlinearityMin = -3125.0 / 46656.0;
double nonlinearity_argmin();

/// For 0 < c < 5⁵/6⁶: the smaller root of F(y) = −c (F is strictly decreasing
/// on (−∞, −ln 6]). Used by the divergence certificate.
double nonlinearity_lower_root(double c);

/// λ must satisfy λ ≥ (6⁶/5⁵)·4πN/Vol(V) for any solution to exist.
double necessary_lambda_bound(const VortexProblem& prob);

/// Mean-zero background u₀ with Δu₀ = −4πN/Vol(V) + 4π Σ n_s δ_{p_s}.
VertexField compute_u0(const VortexProblem& prob, const LinearSolveConfig& cfg = {});

/// Reduced-equation defect: Δv − λ e^{u₀+v}(e^{u₀+v}−1)^5 − 4πN/Vol(V).
/// v solves the reduced equation iff this vanishes.
VertexField residual_reduced(const VortexProblem& prob, const VertexField& u0,
                             const VertexField& v);

/// True iff Δw ≥ λ e^{u₀+w}(e^{u₀+w}−1)^5 + 4πN/Vol(V) pointwise, with `slack`
/// of tolerance below zero allowed.
bool is_subsolution(const VortexProblem& prob, const VertexField& u0, const VertexField& w,
                    double slack = 1e-12);

enum class SolveStatus { converged, diverged, stalled };
const char* to_string(SolveStatus s);

struct SchemeConfig {
    /// Shift K of the linear step; must satisfy K ≥ λ. Unset → K = λ.
    std::optional<double> shift;
    double residual_tol = 1e-10;
    int max_iter = 100000;
    double divergence_floor = -1e3;
    int stall_window = 50;
    /// Step threshold for the consecutive-large-step divergence rule;
    /// 0 disables the rule.
    double stall_step = 0.0;
    /// Certify divergence as soon as an iterate drops below the subsolution
    /// barrier y₁(4πN/(λ·Vol)) − max u₀ (no solution can lie below it).
    bool barrier_certificate = true;
    LinearSolveConfig linear;
};

struct SolveReport {
    SolveStatus status = SolveStatus::stalled;
    std::optional<VertexField> solution_v;  // present iff converged
    int iterations = 0;
    std::vector<double> residual_history;   // sup-norm reduced residual per iterate
    bool monotonicity_certified = true;     // W_n ≤ W_{n−1} + 1e−10 at every step
    std::vector<double> min_value_trace;    // min_x W_n per iterate
    VertexField last_iterate;               // final W_n regardless of status

    /// Nonexistence threshold used by the certificate (when applicable):
    /// any solution stays ≥ this value pointwise.
    std::optional<double> divergence_barrier;
    /// True when a supplied subsolution stayed a lower bound for all iterates.
    bool lower_barrier_certified = true;

    double final_residual() const { return residual_history.empty() ? 0.0 : residual_history.back(); }
    double final_min_value() const { return min_value_trace.empty() ? 0.0 : min_value_trace.back(); }
};

/// The monotone scheme: W₀ = −u₀ and
///   (Δ−K) W_n = λ e^{u₀+W_{n−1}}(e^{u₀+W_{n−1}}−1)^5 − K W_{n−1} + 4πN/Vol(V).
/// The iterates decrease pointwise; on convergence the limit is the maximal
/// solution of the reduced equation (every other solution lies below it).
/// If subsolution_barrier is given (and is a subsolution), every iterate is
/// checked to stay above it up to 1e−8.
SolveReport monotone_iterate(const VortexProblem& prob, const VertexField& u0,
                             const SchemeConfig& cfg = {},
                             const VertexField* subsolution_barrier = nullptr);

struct VerifyReport {
    bool residual_ok = false;
    double residual_sup = 0.0;
    bool negativity_ok = false;
    double max_u = 0.0;
    bool integral_ok = false;
    double integral_defect = 0.0;  // λ∫e^u(e^u−1)^5 dμ + 4πN
    bool all_ok() const { return residual_ok && negativity_ok && integral_ok; }
};

/// Checks a candidate solution u of the original equation: (a) sup-norm residual
/// against the Dirac right-hand side ≤ residual_tol, (b) u < 0 everywhere,
/// (c) λ∫e^u(e^u−1)^5 dμ + 4πN = 0 to 1e−8.
VerifyReport verify_solution(const VortexProblem& prob, const VertexField& u,
                             double residual_tol = 1e-8);

struct LambdaComparison {
    bool applicable = false;  // both probes converged
    bool monotone = false;    // v at the smaller λ ≤ v at the larger λ + 1e−8
    SolveReport report_high;
    SolveReport report_low;
};

/// Runs the scheme at two couplings on the same graph/vortices (λ_high > λ_low)
/// and, when both converge, checks that maximal solutions are monotone in λ.
LambdaComparison compare_lambda_monotonicity(const VortexProblem& prob_high,
                                             const VortexProblem& prob_low,
                                             const SchemeConfig& cfg = {});

} // namespace csvortex

#endif
