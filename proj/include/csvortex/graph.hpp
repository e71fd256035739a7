#ifndef CSVORTEX_GRAPH_HPP
#define CSVORTEX_GRAPH_HPP

#include <cstddef>
#include <string>
#include <vector>

#include "csvortex/errors.hpp"

namespace csvortex {

/// Real-valued function on the vertex set of a graph. Entries must be finite;
/// NaN/±inf are rejected at construction.
class VertexField {
public:
    VertexField() = default;
    explicit VertexField(std::size_t n, double value = 0.0);
    explicit VertexField(std::vector<double> values);

    static VertexField zeros(std::size_t n) { return VertexField(n, 0.0); }

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    const std::vector<double>& values() const { return values_; }

    /// Re-check the finiteness invariant after in-place mutation.
    void validate() const;

private:
    std::vector<double> values_;
};

double sup_norm(const VertexField& u);
double min_value(const VertexField& u);
double max_value(const VertexField& u);
/// Plain coordinate dot product (no measure weighting).
double dot(const VertexField& a, const VertexField& b);

struct Edge {
    int x;
    int y;
    double w;
};

/// Connected finite graph with symmetric positive edge weights and a positive
/// vertex measure. Construction validates: indices in range, no self-loops, no
/// duplicate undirected edges, w > 0, mu > 0, connectivity.
class WeightedGraph {
public:
    struct Neighbor {
        int to;
        double w;
    };

    WeightedGraph(int n, std::vector<Edge> edges, std::vector<double> mu);

    /// Same as above with mu ≡ 1.
    WeightedGraph(int n, std::vector<Edge> edges);

    static WeightedGraph complete(int n);
    static WeightedGraph cycle(int n);
    static WeightedGraph path(int n);
    /// m×k 4-neighbor grid with wraparound; requires m ≥ 3 and k ≥ 3 (smaller
    /// tori would create self-loops or duplicate edges).
    static WeightedGraph torus_grid(int m, int k);

    int vertex_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }
    double mu(int x) const { return mu_[static_cast<std::size_t>(x)]; }
    const std::vector<double>& measure() const { return mu_; }
    double volume() const { return volume_; }
    double min_mu() const { return min_mu_; }

    /// Neighbors of x in ascending index order (summation order is fixed so
    /// runs are bit-reproducible).
    const std::vector<Neighbor>& neighbors(int x) const {
        return adjacency_[static_cast<std::size_t>(x)];
    }

    /// Canonical undirected edge list: x < y, sorted lexicographically.
    const std::vector<Edge>& edges() const { return edges_; }

    WeightedGraph with_measure(std::vector<double> mu) const;
    WeightedGraph with_scaled_weights(double t) const;
    WeightedGraph with_scaled_measure(double t) const;

    void check_aligned(const VertexField& u) const {
        if (u.size() != static_cast<std::size_t>(n_))
            throw AlignmentError(u.size(), static_cast<std::size_t>(n_));
    }

private:
    int n_ = 0;
    std::vector<Edge> edges_;
    std::vector<double> mu_;
    std::vector<std::vector<Neighbor>> adjacency_;
    double volume_ = 0.0;
    double min_mu_ = 0.0;
};

enum class GraphKind { torus_grid, complete, cycle, path };

WeightedGraph generate_graph(GraphKind kind, int a, int b = 0);

// ---- discrete calculus ----

/// (Δu)(x) = (1/μ(x)) Σ_{y~x} w_yx (u(y) − u(x))
VertexField laplacian_apply(const WeightedGraph& g, const VertexField& u);

/// Γ(u,v)(x) = (1/2μ(x)) Σ_{y~x} w_xy (u(y) − u(x)) (v(y) − v(x))
VertexField gradient_form(const WeightedGraph& g, const VertexField& u, const VertexField& v);

/// |∇u|(x) = sqrt(Γ(u,u)(x))
VertexField gradient_norm(const WeightedGraph& g, const VertexField& u);

/// ∫_V u dμ = Σ_x μ(x) u(x)
double integrate(const WeightedGraph& g, const VertexField& u);

double volume(const WeightedGraph& g);

/// (∫ |u|^p dμ)^{1/p}, p ≥ 1.
double norm_p(const WeightedGraph& g, const VertexField& u, double p);

/// sqrt(∫ (|∇u|² + u²) dμ)
double sobolev_norm(const WeightedGraph& g, const VertexField& u);

/// Unit point mass at p: value 1/μ(p) at p, zero elsewhere, so ∫ δ_p dμ = 1.
VertexField dirac_mass(const WeightedGraph& g, int p);

/// Smallest nonzero eigenvalue of u ↦ −Δu (self-adjoint in the μ-weighted
/// inner product). Dense eigendecomposition, O(n³); guarded to n ≤ 4096.
/// If eigenvector is non-null it receives a corresponding mean-zero eigenvector.
double spectral_gap(const WeightedGraph& g, VertexField* eigenvector = nullptr);

/// Optimal C with ∫u² dμ ≤ C ∫|∇u|² dμ over mean-zero u; equals 1/spectral_gap.
double poincare_constant(const WeightedGraph& g);

// ---- graph JSON ----
// Schema: {"n": int, "edges": [[x, y, w], ...], "mu": [m_0, ...]} with "mu"
// optional (defaults to all 1.0). Each undirected edge appears once.

WeightedGraph graph_from_json_text(const std::string& text);
WeightedGraph load_graph(const std::string& path);

/// Canonical serialization (sorted edges, explicit mu, 17 significant digits).
/// Used both for file emission and for hashing.
std::string graph_to_canonical_json(const WeightedGraph& g);

/// FNV-1a 64 hash of the canonical serialization, as "fnv1a64:<hex>".
std::string graph_hash(const WeightedGraph& g);

} // namespace csvortex

#endif
