#ifndef CSVORTEX_LINEAR_SOLVE_HPP
#define CSVORTEX_LINEAR_SOLVE_HPP

#include <memory>

#include "csvortex/graph.hpp"

namespace csvortex {

enum class SolveMethod { automatic, direct, conjugate_gradient };

struct LinearSolveConfig {
    double rel_tol = 1e-12;
    int max_iter = 0;  // 0 → 10·n
    SolveMethod method = SolveMethod::automatic;  // automatic: direct for n ≤ 512
};

/// Solve (Δ−K)x = b for K > 0. The operator K−Δ is positive definite in the
/// μ-weighted inner product, so the solution is unique. The returned x satisfies
/// ‖(Δ−K)x − b‖_∞ ≤ rel_tol·(1+‖b‖_∞).
VertexField solve_shifted(const WeightedGraph& g, double K, const VertexField& b,
                          const LinearSolveConfig& cfg = {});

/// Solve Δx = f with the gauge ∫x dμ = 0. Requires mean-zero data:
/// |∫f dμ| ≤ 1e−10·Vol(V)·(1+‖f‖_∞), otherwise a CompatibilityError carrying
/// ∫f dμ is thrown.
VertexField solve_poisson_mean_zero(const WeightedGraph& g, const VertexField& f,
                                    const LinearSolveConfig& cfg = {});

/// Reusable solver for (Δ−K)x = b with a fixed graph and shift: factors the
/// dense matrix once (direct path) or runs warm-started CG (iterative path).
class ShiftedSolver {
public:
    ShiftedSolver(const WeightedGraph& g, double K, LinearSolveConfig cfg = {});
    ~ShiftedSolver();
    ShiftedSolver(ShiftedSolver&&) noexcept;
    ShiftedSolver& operator=(ShiftedSolver&&) noexcept;

    VertexField solve(const VertexField& b, const VertexField* warm_start = nullptr) const;

    double shift() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

} // namespace csvortex

#endif
