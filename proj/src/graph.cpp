#include "csvortex/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>
#include <json.hpp>

#include "csvortex/serialize.hpp"

namespace csvortex {

VertexField::VertexField(std::size_t n, double value) : values_(n, value) {
    if (!std::isfinite(value))
        throw std::invalid_argument("vertex field entries must be finite");
}

VertexField::VertexField(std::vector<double> values) : values_(std::move(values)) {
    validate();
}

void VertexField::validate() const {
    for (double v : values_)
        if (!std::isfinite(v))
            throw std::invalid_argument("vertex field entries must be finite");
}

double sup_norm(const VertexField& u) {
    double m = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, std::abs(u[i]));
    return m;
}

double min_value(const VertexField& u) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.size(); ++i) m = std::min(m, u[i]);
    return m;
}

double max_value(const VertexField& u) {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < u.size(); ++i) m = std::max(m, u[i]);
    return m;
}

double dot(const VertexField& a, const VertexField& b) {
    if (a.size() != b.size()) throw AlignmentError(a.size(), b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

namespace {

void check_connected(int n, const std::vector<std::vector<WeightedGraph::Neighbor>>& adj) {
    if (n <= 1) return;
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
        int x = q.front();
        q.pop();
        for (const auto& nb : adj[static_cast<std::size_t>(x)]) {
            if (!seen[static_cast<std::size_t>(nb.to)]) {
                seen[static_cast<std::size_t>(nb.to)] = 1;
                ++reached;
                q.push(nb.to);
            }
        }
    }
    if (reached != n) throw std::invalid_argument("graph must be connected");
}

} // namespace

WeightedGraph::WeightedGraph(int n, std::vector<Edge> edges, std::vector<double> mu)
    : n_(n), mu_(std::move(mu)) {
    if (n_ < 1) throw std::invalid_argument("graph needs at least one vertex");
    if (mu_.size() != static_cast<std::size_t>(n_))
        throw std::invalid_argument("measure length must equal the vertex count");
    for (double m : mu_)
        if (!(m > 0.0) || !std::isfinite(m))
            throw std::invalid_argument("vertex measure must be positive and finite");

    std::set<std::pair<int, int>> seen;
    edges_.reserve(edges.size());
    for (Edge e : edges) {
        if (e.x < 0 || e.x >= n_ || e.y < 0 || e.y >= n_)
            throw std::invalid_argument("edge endpoint out of range");
        if (e.x == e.y) throw std::invalid_argument("self-loops are not allowed");
        if (!(e.w > 0.0) || !std::isfinite(e.w))
            throw std::invalid_argument("edge weights must be positive and finite");
        if (e.x > e.y) std::swap(e.x, e.y);
        if (!seen.insert({e.x, e.y}).second)
            throw std::invalid_argument("duplicate undirected edge");
        edges_.push_back(e);
    }
    std::sort(edges_.begin(), edges_.end(),
              [](const Edge& a, const Edge& b) { return std::tie(a.x, a.y) < std::tie(b.x, b.y); });

    adjacency_.assign(static_cast<std::size_t>(n_), {});
    for (const Edge& e : edges_) {
        adjacency_[static_cast<std::size_t>(e.x)].push_back({e.y, e.w});
        adjacency_[static_cast<std::size_t>(e.y)].push_back({e.x, e.w});
    }
    for (auto& nbrs : adjacency_)
        std::sort(nbrs.begin(), nbrs.end(),
                  [](const Neighbor& a, const Neighbor& b) { return a.to < b.to; });

    check_connected(n_, adjacency_);

    volume_ = 0.0;
    min_mu_ = std::numeric_limits<double>::infinity();
    for (double m : mu_) {
        volume_ += m;
        min_mu_ = std::min(min_mu_, m);
    }
}

WeightedGraph::WeightedGraph(int n, std::vector<Edge> edges)
    : WeightedGraph(n, std::move(edges), std::vector<double>(static_cast<std::size_t>(std::max(n, 0)), 1.0)) {}

WeightedGraph WeightedGraph::complete(int n) {
    if (n < 2) throw std::invalid_argument("complete(n) requires n >= 2");
    std::vector<Edge> edges;
    for (int x = 0; x < n; ++x)
        for (int y = x + 1; y < n; ++y) edges.push_back({x, y, 1.0});
    return WeightedGraph(n, std::move(edges));
}

WeightedGraph WeightedGraph::cycle(int n) {
    if (n < 3) throw std::invalid_argument("cycle(n) requires n >= 3 (cycle(2) would duplicate an edge)");
    std::vector<Edge> edges;
    for (int x = 0; x < n; ++x) edges.push_back({x, (x + 1) % n, 1.0});
    return WeightedGraph(n, std::move(edges));
}

WeightedGraph WeightedGraph::path(int n) {
    if (n < 2) throw std::invalid_argument("path(n) requires n >= 2");
    std::vector<Edge> edges;
    for (int x = 0; x + 1 < n; ++x) edges.push_back({x, x + 1, 1.0});
    return WeightedGraph(n, std::move(edges));
}

WeightedGraph WeightedGraph::torus_grid(int m, int k) {
    if (m * k < 2) throw std::invalid_argument("torus_grid(m,k) requires m*k >= 2");
    if (m < 3 || k < 3)
        throw std::invalid_argument("torus_grid(m,k) requires m >= 3 and k >= 3 "
                                    "(smaller wraparounds create self-loops or duplicate edges)");
    auto id = [k](int i, int j) { return i * k + j; };
    std::vector<Edge> edges;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < k; ++j) {
            edges.push_back({id(i, j), id(i, (j + 1) % k), 1.0});
            edges.push_back({id(i, j), id((i + 1) % m, j), 1.0});
        }
    return WeightedGraph(m * k, std::move(edges));
}

WeightedGraph WeightedGraph::with_measure(std::vector<double> mu) const {
    return WeightedGraph(n_, edges_, std::move(mu));
}

WeightedGraph WeightedGraph::with_scaled_weights(double t) const {
    if (!(t > 0.0)) throw std::invalid_argument("weight scale must be positive");
    std::vector<Edge> edges = edges_;
    for (Edge& e : edges) e.w *= t;
    return WeightedGraph(n_, std::move(edges), mu_);
}

WeightedGraph WeightedGraph::with_scaled_measure(double t) const {
    if (!(t > 0.0)) throw std::invalid_argument("measure scale must be positive");
    std::vector<double> mu = mu_;
    for (double& m : mu) m *= t;
    return WeightedGraph(n_, edges_, std::move(mu));
}

WeightedGraph generate_graph(GraphKind kind, int a, int b) {
    switch (kind) {
        case GraphKind::torus_grid: return WeightedGraph::torus_grid(a, b);
        case GraphKind::complete: return WeightedGraph::complete(a);
        case GraphKind::cycle: return WeightedGraph::cycle(a);
        case GraphKind::path: return WeightedGraph::path(a);
    }
    throw std::invalid_argument("unknown graph kind");
}

VertexField laplacian_apply(const WeightedGraph& g, const VertexField& u) {
    g.check_aligned(u);
    const int n = g.vertex_count();
    VertexField out(static_cast<std::size_t>(n));
    for (int x = 0; x < n; ++x) {
        double acc = 0.0;
        const double ux = u[static_cast<std::size_t>(x)];
        for (const auto& nb : g.neighbors(x)) acc += nb.w * (u[static_cast<std::size_t>(nb.to)] - ux);
        out[static_cast<std::size_t>(x)] = acc / g.mu(x);
    }
    return out;
}

VertexField gradient_form(const WeightedGraph& g, const VertexField& u, const VertexField& v) {
    g.check_aligned(u);
    g.check_aligned(v);
    const int n = g.vertex_count();
    VertexField out(static_cast<std::size_t>(n));
    for (int x = 0; x < n; ++x) {
        double acc = 0.0;
        const double ux = u[static_cast<std::size_t>(x)];
        const double vx = v[static_cast<std::size_t>(x)];
        for (const auto& nb : g.neighbors(x)) {
            const std::size_t y = static_cast<std::size_t>(nb.to);
            acc += nb.w * (u[y] - ux) * (v[y] - vx);
        }
        out[static_cast<std::size_t>(x)] = acc / (2.0 * g.mu(x));
    }
    return out;
}

VertexField gradient_norm(const WeightedGraph& g, const VertexField& u) {
    VertexField gamma = gradient_form(g, u, u);
    for (std::size_t i = 0; i < gamma.size(); ++i) gamma[i] = std::sqrt(std::max(gamma[i], 0.0));
    return gamma;
}

double integrate(const WeightedGraph& g, const VertexField& u) {
    g.check_aligned(u);
    double s = 0.0;
    for (int x = 0; x < g.vertex_count(); ++x) s += g.mu(x) * u[static_cast<std::size_t>(x)];
    return s;
}

double volume(const WeightedGraph& g) { return g.volume(); }

double norm_p(const WeightedGraph& g, const VertexField& u, double p) {
    g.check_aligned(u);
    if (!(p >= 1.0)) throw std::invalid_argument("norm_p requires p >= 1");
    double s = 0.0;
    for (int x = 0; x < g.vertex_count(); ++x)
        s += g.mu(x) * std::pow(std::abs(u[static_cast<std::size_t>(x)]), p);
    return std::pow(s, 1.0 / p);
}

double sobolev_norm(const WeightedGraph& g, const VertexField& u) {
    VertexField gamma = gradient_form(g, u, u);
    double s = 0.0;
    for (int x = 0; x < g.vertex_count(); ++x) {
        const std::size_t i = static_cast<std::size_t>(x);
        s += g.mu(x) * (gamma[i] + u[i] * u[i]);
    }
    return std::sqrt(s);
}

VertexField dirac_mass(const WeightedGraph& g, int p) {
    if (p < 0 || p >= g.vertex_count()) throw std::invalid_argument("dirac_mass: vertex out of range");
    VertexField out(static_cast<std::size_t>(g.vertex_count()));
    out[static_cast<std::size_t>(p)] = 1.0 / g.mu(p);
    return out;
}

double spectral_gap(const WeightedGraph& g, VertexField* eigenvector) {
    const int n = g.vertex_count();
    if (n > 4096)
        throw std::invalid_argument("spectral_gap uses a dense O(n^3) eigendecomposition; n <= 4096 required");
    if (n < 2) throw std::invalid_argument("spectral_gap requires at least two vertices");

    // Symmetrize −Δ: S = D^{1/2} (−Δ) D^{−1/2}, similar so same spectrum.
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
    for (int x = 0; x < n; ++x) {
        double degw = 0.0;
        for (const auto& nb : g.neighbors(x)) {
            degw += nb.w;
            S(x, nb.to) = -nb.w / std::sqrt(g.mu(x) * g.mu(nb.to));
        }
        S(x, x) = degw / g.mu(x);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
    const Eigen::VectorXd ev = es.eigenvalues();
    const double lambda2 = ev(1);
    if (!(lambda2 > 1e-12 * std::max(1.0, ev(n - 1))))
        throw std::runtime_error("spectral gap is numerically zero (graph effectively disconnected)");
    if (eigenvector) {
        VertexField phi(static_cast<std::size_t>(n));
        for (int x = 0; x < n; ++x) phi[static_cast<std::size_t>(x)] = es.eigenvectors()(x, 1) / std::sqrt(g.mu(x));
        // remove the numerically tiny mean so callers get an exactly mean-zero field
        double mean = integrate(g, phi) / g.volume();
        for (std::size_t i = 0; i < phi.size(); ++i) phi[i] -= mean;
        *eigenvector = std::move(phi);
    }
    return lambda2;
}

double poincare_constant(const WeightedGraph& g) { return 1.0 / spectral_gap(g); }

// ---- JSON ----

namespace {

WeightedGraph graph_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw std::invalid_argument("graph JSON must be an object");
    if (!j.contains("n") || !j["n"].is_number_integer())
        throw std::invalid_argument("graph JSON needs an integer field \"n\"");
    const int n = j["n"].get<int>();
    if (!j.contains("edges") || !j["edges"].is_array())
        throw std::invalid_argument("graph JSON needs an array field \"edges\"");

    std::vector<Edge> edges;
    for (const auto& je : j["edges"]) {
        if (!je.is_array() || je.size() != 3)
            throw std::invalid_argument("each edge must be [x, y, w]");
        edges.push_back({je[0].get<int>(), je[1].get<int>(), je[2].get<double>()});
    }
    std::vector<double> mu(static_cast<std::size_t>(std::max(n, 0)), 1.0);
    if (j.contains("mu")) {
        if (!j["mu"].is_array()) throw std::invalid_argument("\"mu\" must be an array");
        mu = j["mu"].get<std::vector<double>>();
    }
    return WeightedGraph(n, std::move(edges), std::move(mu));
}

} // namespace

WeightedGraph graph_from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("invalid JSON: ") + e.what());
    }
    return graph_from_json(j);
}

WeightedGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open graph file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return graph_from_json_text(ss.str());
}

std::string graph_to_canonical_json(const WeightedGraph& g) {
    std::ostringstream os;
    os << "{\"n\": " << g.vertex_count() << ", \"edges\": [";
    bool first = true;
    for (const Edge& e : g.edges()) {
        if (!first) os << ", ";
        first = false;
        os << "[" << e.x << ", " << e.y << ", " << format_g17(e.w) << "]";
    }
    os << "], \"mu\": [";
    for (int x = 0; x < g.vertex_count(); ++x) {
        if (x) os << ", ";
        os << format_g17(g.mu(x));
    }
    os << "]}";
    return os.str();
}

std::string graph_hash(const WeightedGraph& g) {
    return "fnv1a64:" + hex64(fnv1a64(graph_to_canonical_json(g)));
}

} // namespace csvortex
