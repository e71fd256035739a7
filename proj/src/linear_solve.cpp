#include "csvortex/linear_solve.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "csvortex/errors.hpp"
#include "csvortex/serialize.hpp"

namespace csvortex {

namespace {

constexpr int kDirectThreshold = 512;

int effective_max_iter(const LinearSolveConfig& cfg, int n) {
    return cfg.max_iter > 0 ? cfg.max_iter : 10 * n;
}

bool use_direct(const LinearSolveConfig& cfg, int n) {
    switch (cfg.method) {
        case SolveMethod::direct: return true;
        case SolveMethod::conjugate_gradient: return false;
        case SolveMethod::automatic: return n <= kDirectThreshold;
    }
    return true;
}

double mu_dot(const WeightedGraph& g, const VertexField& a, const VertexField& b) {
    double s = 0.0;
    for (int x = 0; x < g.vertex_count(); ++x)
        s += g.mu(x) * a[static_cast<std::size_t>(x)] * b[static_cast<std::size_t>(x)];
    return s;
}

// (K−Δ)u
VertexField apply_shifted(const WeightedGraph& g, double K, const VertexField& u) {
    VertexField lap = laplacian_apply(g, u);
    VertexField out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = K * u[i] - lap[i];
    return out;
}

double shifted_residual_sup(const WeightedGraph& g, double K, const VertexField& x,
                            const VertexField& b) {
    VertexField lap = laplacian_apply(g, x);
    double r = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        r = std::max(r, std::abs(lap[i] - K * x[i] - b[i]));
    return r;
}

void project_mean_zero(const WeightedGraph& g, VertexField& u) {
    const double mean = integrate(g, u) / g.volume();
    for (std::size_t i = 0; i < u.size(); ++i) u[i] -= mean;
}

// CG in the μ-weighted inner product for a self-adjoint positive (semi)definite
// operator. If project is set, iterates and residuals are re-projected onto the
// mean-zero subspace every iteration (singular Poisson system).
template <typename Op>
VertexField cg_solve(const WeightedGraph& g, const Op& apply, const VertexField& rhs,
                     int max_iter, double abs_tol_sup, bool project,
                     const VertexField* warm_start) {
    const std::size_t n = rhs.size();
    VertexField x = warm_start ? *warm_start : VertexField::zeros(n);
    if (project) project_mean_zero(g, x);

    VertexField ax = apply(x);
    VertexField r(n);
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - ax[i];
    if (project) project_mean_zero(g, r);
    VertexField p = r;
    double rs = mu_dot(g, r, r);

    double last_sup = sup_norm(r);
    if (last_sup <= abs_tol_sup) return x;

    for (int it = 0; it < max_iter; ++it) {
        VertexField ap = apply(p);
        if (project) project_mean_zero(g, ap);
        const double pap = mu_dot(g, p, ap);
        if (!(pap > 0.0)) throw ConvergenceFailure("conjugate gradient broke down", last_sup);
        const double alpha = rs / pap;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if (project) {
            project_mean_zero(g, x);
            project_mean_zero(g, r);
        }
        last_sup = sup_norm(r);
        if (last_sup <= abs_tol_sup) return x;
        const double rs_new = mu_dot(g, r, r);
        const double beta = rs_new / rs;
        rs = rs_new;
        for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
    }
    throw ConvergenceFailure("conjugate gradient exhausted its iteration budget", last_sup);
}

Eigen::VectorXd to_eigen(const VertexField& u) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(u.size()));
    for (std::size_t i = 0; i < u.size(); ++i) v(static_cast<Eigen::Index>(i)) = u[i];
    return v;
}

VertexField from_eigen(const Eigen::VectorXd& v) {
    VertexField u(static_cast<std::size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) u[static_cast<std::size_t>(i)] = v(i);
    return u;
}

// D·(K−Δ): symmetric positive definite for K > 0.
Eigen::MatrixXd assemble_shifted_spd(const WeightedGraph& g, double K) {
    const int n = g.vertex_count();
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
    for (int x = 0; x < n; ++x) {
        double degw = 0.0;
        for (const auto& nb : g.neighbors(x)) {
            degw += nb.w;
            S(x, nb.to) = -nb.w;
        }
        S(x, x) = g.mu(x) * K + degw;
    }
    return S;
}

} // namespace

struct ShiftedSolver::Impl {
    const WeightedGraph* g;
    double K;
    LinearSolveConfig cfg;
    bool direct;
    Eigen::LLT<Eigen::MatrixXd> llt;
};

ShiftedSolver::ShiftedSolver(const WeightedGraph& g, double K, LinearSolveConfig cfg)
    : impl_(new Impl{&g, K, cfg, use_direct(cfg, g.vertex_count()), {}}) {
    if (!(K > 0.0)) throw std::invalid_argument("solve_shifted requires K > 0");
    if (impl_->direct) {
        impl_->llt.compute(assemble_shifted_spd(g, K));
        if (impl_->llt.info() != Eigen::Success)
            throw std::runtime_error("Cholesky factorization of the shifted system failed");
    }
}

ShiftedSolver::~ShiftedSolver() = default;
ShiftedSolver::ShiftedSolver(ShiftedSolver&&) noexcept = default;
ShiftedSolver& ShiftedSolver::operator=(ShiftedSolver&&) noexcept = default;

double ShiftedSolver::shift() const { return impl_->K; }

VertexField ShiftedSolver::solve(const VertexField& b, const VertexField* warm_start) const {
    const WeightedGraph& g = *impl_->g;
    g.check_aligned(b);
    const double K = impl_->K;
    const double tol = impl_->cfg.rel_tol * (1.0 + sup_norm(b));

    if (impl_->direct) {
        // (Δ−K)x = b  ⇔  D(K−Δ)x = −D b
        Eigen::VectorXd rhs = -to_eigen(b);
        for (int x = 0; x < g.vertex_count(); ++x) rhs(x) *= g.mu(x);
        Eigen::VectorXd xe = impl_->llt.solve(rhs);
        VertexField x = from_eigen(xe);
        // one round of iterative refinement if rounding left the contract unmet
        for (int pass = 0; pass < 2 && shifted_residual_sup(g, K, x, b) > tol; ++pass) {
            VertexField lap = laplacian_apply(g, x);
            Eigen::VectorXd res(g.vertex_count());
            for (int i = 0; i < g.vertex_count(); ++i)
                res(i) = -g.mu(i) * (b[static_cast<std::size_t>(i)] -
                                     (lap[static_cast<std::size_t>(i)] - K * x[static_cast<std::size_t>(i)]));
            Eigen::VectorXd corr = impl_->llt.solve(res);
            for (int i = 0; i < g.vertex_count(); ++i) x[static_cast<std::size_t>(i)] += corr(i);
        }
        const double r = shifted_residual_sup(g, K, x, b);
        if (r > tol) throw ConvergenceFailure("direct shifted solve missed its residual contract", r);
        return x;
    }

    // (K−Δ)x = −b, CG in the μ-inner product
    VertexField rhs(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) rhs[i] = -b[i];
    auto apply = [&](const VertexField& u) { return apply_shifted(g, K, u); };
    return cg_solve(g, apply, rhs, effective_max_iter(impl_->cfg, g.vertex_count()), tol,
                    /*project=*/false, warm_start);
}

VertexField solve_shifted(const WeightedGraph& g, double K, const VertexField& b,
                          const LinearSolveConfig& cfg) {
    return ShiftedSolver(g, K, cfg).solve(b);
}

VertexField solve_poisson_mean_zero(const WeightedGraph& g, const VertexField& f,
                                    const LinearSolveConfig& cfg) {
    g.check_aligned(f);
    const double mean_f = integrate(g, f);
    const double tol_compat = 1e-10 * g.volume() * (1.0 + sup_norm(f));
    if (std::abs(mean_f) > tol_compat)
        throw CompatibilityError("solve_poisson_mean_zero requires mean-zero data; integral of f is " +
                                     format_g17(mean_f),
                                 mean_f);

    const int n = g.vertex_count();
    const double tol = cfg.rel_tol * (1.0 + sup_norm(f));

    if (use_direct(cfg, n)) {
        // L = D(−Δ) is PSD with kernel = constants; the rank-one term pins the
        // gauge ∫x dμ = 0 and makes the matrix positive definite.
        Eigen::MatrixXd A = assemble_shifted_spd(g, 0.0);
        Eigen::VectorXd m(n);
        for (int x = 0; x < n; ++x) m(x) = g.mu(x);
        A += (m * m.transpose()) / g.volume();
        Eigen::LLT<Eigen::MatrixXd> llt(A);
        if (llt.info() != Eigen::Success)
            throw std::runtime_error("Cholesky factorization of the Poisson system failed");
        Eigen::VectorXd rhs(n);
        for (int x = 0; x < n; ++x) rhs(x) = -g.mu(x) * f[static_cast<std::size_t>(x)];
        VertexField x = from_eigen(llt.solve(rhs));
        project_mean_zero(g, x);

        VertexField lap = laplacian_apply(g, x);
        double r = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) r = std::max(r, std::abs(lap[i] - f[i]));
        if (r > tol) throw ConvergenceFailure("direct Poisson solve missed its residual contract", r);
        return x;
    }

    // CG on the mean-zero subspace: Δx = f ⇔ (−Δ)x = −f; re-project each step.
    VertexField rhs(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) rhs[i] = -f[i];
    project_mean_zero(g, rhs);
    auto apply = [&](const VertexField& u) {
        VertexField lap = laplacian_apply(g, u);
        for (std::size_t i = 0; i < lap.size(); ++i) lap[i] = -lap[i];
        return lap;
    };
    VertexField x = cg_solve(g, apply, rhs, effective_max_iter(cfg, n), tol,
                             /*project=*/true, nullptr);
    project_mean_zero(g, x);
    return x;
}

} // namespace csvortex
