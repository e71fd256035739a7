#ifndef CSVORTEX_CRITICAL_HPP
#define CSVORTEX_CRITICAL_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "csvortex/chern_simons.hpp"
#include "csvortex/variational.hpp"

namespace csvortex {

struct ProbeRecord {
    double lambda;
    SolveReport report;
};

/// Bracket [lambda_lo, lambda_hi] for the critical coupling: lambda_lo is the
/// largest probed λ with certified divergence, lambda_hi the smallest with a
/// converged (and verified) solution. The solvable set is an interval, so no
/// converged probe can sit below a diverged one.
struct CriticalEstimate {
    double lambda_lo = 0.0;
    double lambda_hi = 0.0;
    double bound = 0.0;  // (6⁶/5⁵)·4πN/Vol(V)
    std::vector<ProbeRecord> probes;  // in probe order
};

struct CriticalConfig {
    double rel_width = 1e-3;
    double seed_epsilon = 1e-6;     // lower seed at bound·(1−ε)
    double hard_cap_factor = 1e6;   // give up above bound·cap
    int stall_retries = 3;          // budget ×4 per retry for inconclusive probes
    SchemeConfig scheme;
};

/// Log-scale bisection for the critical coupling. Seeds with a certainly
/// divergent probe just under the necessary bound, doubles until a converged
/// probe is found, then bisects until (hi−lo)/hi ≤ rel_width. Every probe runs
/// the monotone scheme with shift max(K, λ).
CriticalEstimate find_critical_lambda(const WeightedGraph& g, const std::vector<Vortex>& vortices,
                                      const CriticalConfig& cfg = {});

struct SweepOptions {
    bool with_minimizer = true;
    bool with_mountain_pass = false;
    SchemeConfig scheme;
    DescentConfig descent;
    MountainPassConfig mountain;
    int jobs = 1;
    bool wall_clock = false;  // off → wall_ms column is 0 and rows are byte-stable
};

struct SweepRow {
    double lambda = 0.0;
    SolveStatus status = SolveStatus::stalled;
    int iterations = 0;
    double residual = 0.0;
    double min_u = 0.0;  // min of u₀+W at the last iterate (solution when converged)
    std::optional<double> energy_maximal;
    std::optional<double> energy_min;
    std::optional<double> energy_gap;
    double wall_ms = 0.0;
    std::optional<VertexField> v_max;  // maximal solution when converged
    std::string error;                 // per-λ failure, recorded instead of aborting
};

/// One row per requested λ, emitted in input order; probes may run in parallel
/// (jobs > 1) without changing any output byte.
std::vector<SweepRow> sweep_lambda(const WeightedGraph& g, const std::vector<Vortex>& vortices,
                                   const std::vector<double>& lambdas,
                                   const SweepOptions& opts = {});

/// CSV with a leading "# manifest: ..." comment line.
/// Columns: lambda,status,iterations,residual,min_u,energy_maximal,energy_min,energy_gap,wall_ms
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows,
                     const std::string& manifest_json);

} // namespace csvortex

#endif
