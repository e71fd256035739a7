#ifndef CSVORTEX_VARIATIONAL_HPP
#define CSVORTEX_VARIATIONAL_HPP

#include "csvortex/chern_simons.hpp"

namespace csvortex {

struct DescentConfig {
    double grad_tol = 1e-9;  // sup norm of the μ-scaled gradient
    int max_steps = 200000;
    double armijo_c = 1e-4;
    double backtrack = 0.5;
    double init_step = 1.0;
};

struct MountainPassConfig {
    int path_points = 51;
    double deform_tol = 1e-7;
    int max_deform = 50000;
    double c0_search = 1.0;  // initial endpoint-drop candidate, doubled until the drop ≥ 1
    double residual_tol = 1e-9;  // acceptance tolerance for the polished critical point
};

/// I_λ(v) = ∫ [ ½|∇v|² + (λ/6)(e^{u₀+v}−1)⁶ + (4πN/Vol)·v ] dμ.
/// Returns +inf when e^{u₀+v} would overflow (saturation; hugely positive v).
double energy(const VortexProblem& prob, const VertexField& u0, const VertexField& v);

/// Coordinate gradient of I_λ: component x is μ(x)·[−Δv + λe^{u₀+v}(e^{u₀+v}−1)^5 + 4πN/Vol](x).
/// Zero gradient ⇔ v solves the reduced equation.
VertexField energy_gradient(const VortexProblem& prob, const VertexField& u0,
                            const VertexField& v);

struct MinimizeResult {
    VertexField v;
    double energy = 0.0;
    int steps = 0;
    double grad_sup = 0.0;
    bool converged = false;  // false ⇔ step budget exhausted; v is the last iterate
};

/// Backtracking-Armijo gradient descent (Barzilai–Borwein initial step). Energy
/// is non-increasing along accepted steps; stops when ‖gradient‖_∞ ≤ grad_tol.
MinimizeResult minimize(const VortexProblem& prob, const VertexField& u0,
                        const VertexField& start, const DescentConfig& cfg = {});

struct PolishResult {
    VertexField v;
    double residual_sup = 0.0;
    int steps = 0;
    bool converged = false;
};

/// Damped Newton on the reduced residual; polishes any near-critical point
/// (minimizer or saddle) to the requested residual.
PolishResult polish_critical_point(const VortexProblem& prob, const VertexField& u0,
                                   VertexField v, double tol, int max_steps = 200);

/// Doubles c from c0 until I(v_min − c) ≤ I(v_min) − 1; returns that c.
double find_endpoint_drop(const VortexProblem& prob, const VertexField& u0,
                          const VertexField& v_min, double c0);

/// Numerical mountain pass between the local minimizer v_min and the dropped
/// endpoint v_min − c₀: the maximal-energy interior node of a discrete path is
/// repeatedly moved one Armijo step downhill, the path is re-spaced by arc
/// length, and the near-critical node is polished by damped Newton. Converged
/// reports carry the second solution; the path collapsing onto v_min (or a
/// numerical twin of it) yields a stalled report.
/// Report fields: residual_history = max-node gradient sup norm per deformation,
/// min_value_trace = max-node energy per deformation.
SolveReport mountain_pass(const VortexProblem& prob, const VertexField& u0,
                          const VertexField& v_min, const MountainPassConfig& cfg = {},
                          const DescentConfig& dcfg = {});

} // namespace csvortex

#endif
