#include "csvortex/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "csvortex/critical.hpp"
#include "csvortex/errors.hpp"
#include "csvortex/serialize.hpp"

namespace csvortex {

namespace {

struct GlobalOpts {
    std::uint64_t seed = 0;
    bool wall_clock = false;
    std::string command_line;
};

std::vector<Vortex> parse_vortices(const std::vector<std::string>& specs) {
    if (specs.empty()) throw std::invalid_argument("at least one --vortex is required");
    std::vector<Vortex> out;
    for (const std::string& s : specs) {
        Vortex v;
        const auto colon = s.find(':');
        try {
            v.vertex = std::stoi(s.substr(0, colon));
            v.multiplicity = colon == std::string::npos ? 1 : std::stoi(s.substr(colon + 1));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad vortex spec '" + s + "' (expected p or p:n)");
        }
        out.push_back(v);
    }
    return out;
}

void emit(const std::string& out_path, const std::string& content) {
    if (out_path.empty()) {
        std::cout << content;
        if (!content.empty() && content.back() != '\n') std::cout << "\n";
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open output file: " + out_path);
    f << content;
}

int default_jobs() {
    if (const char* env = std::getenv("CSV_SOLVER_JOBS")) {
        try {
            return std::max(1, std::stoi(env));
        } catch (const std::exception&) {
            return 1;
        }
    }
    return 1;
}

std::string vortices_json(const std::vector<Vortex>& vs) {
    JsonWriter w;
    w.begin_array();
    for (const Vortex& v : vs) {
        w.begin_array();
        w.value(v.vertex);
        w.value(v.multiplicity);
        w.end_array();
    }
    w.end_array();
    return w.str();
}

std::string scheme_config_json(const SchemeConfig& cfg) {
    JsonWriter w;
    w.begin_object();
    if (cfg.shift)
        w.key("K").value(*cfg.shift);
    else
        w.key("K").raw("null");  // defaults to the coupling of each solve
    w.key("residual_tol").value(cfg.residual_tol);
    w.key("max_iter").value(cfg.max_iter);
    w.key("divergence_floor").value(cfg.divergence_floor);
    w.key("stall_window").value(cfg.stall_window);
    w.key("stall_step").value(cfg.stall_step);
    w.key("barrier_certificate").value(cfg.barrier_certificate);
    w.end_object();
    return w.str();
}

std::string verify_json(const VerifyReport& v) {
    JsonWriter w;
    w.begin_object();
    w.key("residual_ok").value(v.residual_ok);
    w.key("residual_sup").value(v.residual_sup);
    w.key("negativity_ok").value(v.negativity_ok);
    w.key("max_u").value(v.max_u);
    w.key("integral_ok").value(v.integral_ok);
    w.key("integral_defect").value(v.integral_defect);
    w.end_object();
    return w.str();
}

struct SolutionDoc {
    std::string status;
    const VertexField* v = nullptr;
    double residual = 0.0;
    std::optional<std::string> kind;
    std::optional<double> energy_value;
    std::optional<double> energy_gap;
    std::optional<int> iterations;
    const SolveReport* report = nullptr;        // traces + certificates when present
    const VerifyReport* verify = nullptr;
};

std::string solution_json(const VortexProblem& prob, const VertexField& u0,
                          const SolutionDoc& doc, const RunManifest& manifest) {
    JsonWriter w;
    w.begin_object();
    w.key("graph_hash").value(graph_hash(prob.graph()));
    w.key("lambda").value(prob.lambda());
    w.key("vortices").raw(vortices_json(prob.vortices()));
    w.key("u0").value_array(u0.values());
    w.key("v").value_array(doc.v->values());
    w.key("residual").value(doc.residual);
    w.key("status").value(doc.status);
    if (doc.kind) w.key("kind").value(*doc.kind);
    if (doc.energy_value) w.key("energy").value(*doc.energy_value);
    if (doc.energy_gap) w.key("energy_gap").value(*doc.energy_gap);
    if (doc.iterations) w.key("iterations").value(*doc.iterations);
    if (doc.report) {
        w.key("monotonicity_certified").value(doc.report->monotonicity_certified);
        if (doc.report->divergence_barrier)
            w.key("divergence_barrier").value(*doc.report->divergence_barrier);
        w.key("min_value_trace").value_array(doc.report->min_value_trace);
        w.key("residual_history").value_array(doc.report->residual_history);
    }
    if (doc.verify) w.key("verify").raw(verify_json(*doc.verify));
    w.key("manifest").raw(manifest.to_json());
    w.end_object();
    return w.str();
}

int status_exit_code(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return 0;
        case SolveStatus::diverged: return 2;
        case SolveStatus::stalled: return 3;
    }
    return 1;
}

// ---- subcommand state ----

struct GraphCmd {
    std::string kind;
    int m = 0, k = 0, n = 0;
    std::string from;
    double uniform_weight = 1.0;
    double uniform_mu = 1.0;
    std::string out;
};

struct ProblemArgs {
    std::string graph_path;
    std::vector<std::string> vortex_specs;
    double lambda = 0.0;
    double lambda_rel = 0.0;  // multiple of the necessary bound
};

struct SolveCmd {
    ProblemArgs p;
    std::string mode = "iterate";
    double shift = 0.0;  // 0 → K = λ
    double tol = 1e-10;
    int max_iter = 100000;
    double floor = -1e3;
    bool no_barrier = false;
    std::string out;
};

struct CriticalCmd {
    ProblemArgs p;  // lambda unused
    double rel_width = 1e-3;
    double tol = 1e-10;
    int max_iter = 100000;
    std::string out;
};

struct SweepCmd {
    ProblemArgs p;  // lambda unused
    std::string lambdas;
    bool relative_to_bound = false;
    bool no_minimize = false;
    bool mountain = false;
    int jobs = default_jobs();
    double tol = 1e-10;
    int max_iter = 100000;
    std::string out;
};

struct MountainCmd {
    ProblemArgs p;
    int path_points = 51;
    double deform_tol = 1e-7;
    int max_deform = 50000;
    double c0_search = 1.0;
    double residual_tol = 1e-9;
    double grad_tol = 1e-9;
    std::string out;
};

WeightedGraph load_problem_graph(const std::string& path) {
    if (path.empty()) throw std::invalid_argument("--graph is required");
    return load_graph(path);
}

double resolve_lambda(const ProblemArgs& p, const WeightedGraph& g,
                      const std::vector<Vortex>& vortices) {
    if (p.lambda > 0.0 && p.lambda_rel > 0.0)
        throw std::invalid_argument("--lambda and --lambda-rel are mutually exclusive");
    if (p.lambda > 0.0) return p.lambda;
    if (p.lambda_rel > 0.0) {
        VortexProblem probe(g, 1.0, vortices);
        return p.lambda_rel * necessary_lambda_bound(probe);
    }
    throw std::invalid_argument("a positive --lambda (or --lambda-rel) is required");
}

RunManifest make_manifest(const GlobalOpts& g, const std::string& config_json,
                          const std::string& input_hash, double wall_ms) {
    RunManifest m;
    m.command = g.command_line;
    m.tool_version = kToolVersion;
    m.seed = g.seed;
    m.config_json = config_json;
    m.input_hash = input_hash;
    m.wall_ms = g.wall_clock ? wall_ms : 0.0;
    return m;
}

int run_graph(const GraphCmd& cmd, const GlobalOpts& g) {
    std::optional<WeightedGraph> graph;
    std::string config;
    if (!cmd.from.empty()) {
        graph = load_graph(cmd.from);  // validates invariants; re-emitted normalized
        config = "{\"from\": \"" + json_escape(cmd.from) + "\"}";
    } else {
        if (cmd.kind == "torus") {
            graph = WeightedGraph::torus_grid(cmd.m, cmd.k);
        } else if (cmd.kind == "complete") {
            graph = WeightedGraph::complete(cmd.n);
        } else if (cmd.kind == "cycle") {
            graph = WeightedGraph::cycle(cmd.n);
        } else if (cmd.kind == "path") {
            graph = WeightedGraph::path(cmd.n);
        } else {
            throw std::invalid_argument("--kind must be torus|complete|cycle|path (or use --from)");
        }
        if (cmd.uniform_weight != 1.0) graph = graph->with_scaled_weights(cmd.uniform_weight);
        if (cmd.uniform_mu != 1.0) graph = graph->with_scaled_measure(cmd.uniform_mu);
        JsonWriter w;
        w.begin_object();
        w.key("kind").value(cmd.kind);
        w.key("m").value(cmd.m);
        w.key("k").value(cmd.k);
        w.key("n").value(cmd.n);
        w.key("uniform_weight").value(cmd.uniform_weight);
        w.key("uniform_mu").value(cmd.uniform_mu);
        w.end_object();
        config = w.str();
    }

    RunManifest manifest = make_manifest(g, config, graph_hash(*graph), 0.0);
    std::string body = graph_to_canonical_json(*graph);
    body.pop_back();  // replace closing brace to splice the manifest in
    body += ", \"manifest\": " + manifest.to_json() + "}";
    emit(cmd.out, body);
    std::cerr << "graph: " << graph->vertex_count() << " vertices, " << graph->edge_count()
              << " edges, volume " << format_g17(graph->volume()) << "\n";
    return 0;
}

int run_solve(const SolveCmd& cmd, const GlobalOpts& g) {
    const auto t0 = std::chrono::steady_clock::now();
    WeightedGraph graph = load_problem_graph(cmd.p.graph_path);
    std::vector<Vortex> vortices = parse_vortices(cmd.p.vortex_specs);
    const double lambda = resolve_lambda(cmd.p, graph, vortices);
    VortexProblem prob(graph, lambda, vortices);

    SchemeConfig scheme;
    if (cmd.shift > 0.0) scheme.shift = cmd.shift;
    scheme.residual_tol = cmd.tol;
    scheme.max_iter = cmd.max_iter;
    scheme.divergence_floor = cmd.floor;
    scheme.barrier_certificate = !cmd.no_barrier;

    if (cmd.mode != "iterate" && cmd.mode != "minimize" && cmd.mode != "both")
        throw std::invalid_argument("--mode must be iterate|minimize|both");

    VertexField u0 = compute_u0(prob, scheme.linear);

    auto wall = [&]() {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    };

    JsonWriter cw;
    cw.begin_object();
    cw.key("lambda").value(lambda);
    cw.key("mode").value(cmd.mode);
    cw.key("scheme").raw(scheme_config_json(scheme));
    cw.end_object();
    const std::string config = cw.str();

    int exit_iterate = -1;
    int exit_minimize = -1;

    auto out_path_for = [&](const std::string& suffix) {
        if (cmd.out.empty()) return std::string();
        if (cmd.mode != "both") return cmd.out;
        const auto dotpos = cmd.out.rfind(".json");
        const std::string stem = dotpos == std::string::npos ? cmd.out : cmd.out.substr(0, dotpos);
        return stem + "." + suffix + ".json";
    };

    if (cmd.mode == "iterate" || cmd.mode == "both") {
        SolveReport rep = monotone_iterate(prob, u0, scheme);
        SolutionDoc doc;
        doc.status = to_string(rep.status);
        doc.iterations = rep.iterations;
        doc.report = &rep;
        doc.residual = rep.final_residual();
        VerifyReport verify;
        std::optional<double> energy_value;
        const VertexField& shown = rep.solution_v ? *rep.solution_v : rep.last_iterate;
        doc.v = &shown;
        if (rep.status == SolveStatus::converged) {
            VertexField u(u0.size());
            for (std::size_t i = 0; i < u0.size(); ++i) u[i] = u0[i] + shown[i];
            verify = verify_solution(prob, u);
            doc.verify = &verify;
            energy_value = energy(prob, u0, shown);
            doc.energy_value = energy_value;
        }
        RunManifest manifest = make_manifest(g, config, graph_hash(graph), wall());
        emit(out_path_for("iterate"), solution_json(prob, u0, doc, manifest));
        std::cerr << "solve/iterate: " << doc.status << " after " << rep.iterations
                  << " iterations, residual " << format_g17(doc.residual) << "\n";
        exit_iterate = status_exit_code(rep.status);
    }

    if (cmd.mode == "minimize" || cmd.mode == "both") {
        VertexField start(u0.size());
        for (std::size_t i = 0; i < u0.size(); ++i) start[i] = -u0[i];
        MinimizeResult m = minimize(prob, u0, start);
        SolutionDoc doc;
        doc.status = m.converged ? "converged" : "stalled";
        doc.kind = "minimizer";
        doc.v = &m.v;
        doc.energy_value = m.energy;
        doc.iterations = m.steps;
        doc.residual = sup_norm(residual_reduced(prob, u0, m.v));
        VerifyReport verify;
        if (m.converged) {
            VertexField u(u0.size());
            for (std::size_t i = 0; i < u0.size(); ++i) u[i] = u0[i] + m.v[i];
            verify = verify_solution(prob, u);
            doc.verify = &verify;
        }
        RunManifest manifest = make_manifest(g, config, graph_hash(graph), wall());
        emit(out_path_for("minimize"), solution_json(prob, u0, doc, manifest));
        std::cerr << "solve/minimize: " << doc.status << " after " << m.steps
                  << " steps, gradient " << format_g17(m.grad_sup) << ", energy "
                  << format_g17(m.energy) << "\n";
        exit_minimize = m.converged ? 0 : 3;
    }

    if (cmd.mode == "iterate") return exit_iterate;
    if (cmd.mode == "minimize") return exit_minimize;
    if (exit_iterate == 3 || exit_minimize == 3) return 3;
    if (exit_iterate == 2) return 2;
    return std::max(exit_iterate, exit_minimize);
}

int run_critical(const CriticalCmd& cmd, const GlobalOpts& g) {
    const auto t0 = std::chrono::steady_clock::now();
    WeightedGraph graph = load_problem_graph(cmd.p.graph_path);
    std::vector<Vortex> vortices = parse_vortices(cmd.p.vortex_specs);

    CriticalConfig cfg;
    cfg.rel_width = cmd.rel_width;
    cfg.scheme.residual_tol = cmd.tol;
    cfg.scheme.max_iter = cmd.max_iter;

    CriticalEstimate est = find_critical_lambda(graph, vortices, cfg);

    // verification data for the bracket endpoints
    VortexProblem prob_hi(graph, est.lambda_hi, vortices);
    VertexField u0 = compute_u0(prob_hi, cfg.scheme.linear);
    std::optional<VerifyReport> hi_verify;
    for (const ProbeRecord& p : est.probes) {
        if (p.lambda == est.lambda_hi && p.report.status == SolveStatus::converged) {
            VertexField u(u0.size());
            const VertexField& v = *p.report.solution_v;
            for (std::size_t i = 0; i < u0.size(); ++i) u[i] = u0[i] + v[i];
            hi_verify = verify_solution(prob_hi, u);
        }
    }

    JsonWriter cw;
    cw.begin_object();
    cw.key("rel_width").value(cmd.rel_width);
    cw.key("scheme").raw(scheme_config_json(cfg.scheme));
    cw.end_object();
    RunManifest manifest = make_manifest(
        g, cw.str(), graph_hash(graph),
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());

    JsonWriter w;
    w.begin_object();
    w.key("graph_hash").value(graph_hash(graph));
    w.key("vortices").raw(vortices_json(vortices));
    w.key("bound").value(est.bound);
    w.key("lambda_lo").value(est.lambda_lo);
    w.key("lambda_hi").value(est.lambda_hi);
    w.key("achieved_rel_width").value((est.lambda_hi - est.lambda_lo) / est.lambda_hi);
    w.key("probes").begin_array();
    for (const ProbeRecord& p : est.probes) {
        w.begin_object();
        w.key("lambda").value(p.lambda);
        w.key("status").value(to_string(p.report.status));
        w.key("iterations").value(p.report.iterations);
        w.key("residual").value(p.report.final_residual());
        w.key("min_value").value(p.report.final_min_value());
        if (p.report.divergence_barrier)
            w.key("divergence_barrier").value(*p.report.divergence_barrier);
        if (p.lambda == est.lambda_lo && p.report.status == SolveStatus::diverged)
            w.key("min_value_trace").value_array(p.report.min_value_trace);
        if (p.lambda == est.lambda_hi && hi_verify) w.key("verify").raw(verify_json(*hi_verify));
        w.end_object();
    }
    w.end_array();
    w.key("manifest").raw(manifest.to_json());
    w.end_object();

    emit(cmd.out, w.str());
    std::cerr << "critical: bracket [" << format_g17(est.lambda_lo) << ", "
              << format_g17(est.lambda_hi) << "], bound " << format_g17(est.bound) << ", "
              << est.probes.size() << " probes\n";
    return 0;
}

int run_sweep(const SweepCmd& cmd, const GlobalOpts& g) {
    WeightedGraph graph = load_problem_graph(cmd.p.graph_path);
    std::vector<Vortex> vortices = parse_vortices(cmd.p.vortex_specs);

    std::vector<double> lambdas;
    {
        std::stringstream ss(cmd.lambdas);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            if (tok.empty()) continue;
            lambdas.push_back(std::stod(tok));
        }
    }
    if (lambdas.empty()) throw std::invalid_argument("--lambdas must list at least one value");
    if (cmd.relative_to_bound) {
        VortexProblem probe(graph, 1.0, vortices);
        const double bound = necessary_lambda_bound(probe);
        for (double& l : lambdas) l *= bound;
    }

    SweepOptions opts;
    opts.with_minimizer = !cmd.no_minimize;
    opts.with_mountain_pass = cmd.mountain;
    opts.scheme.residual_tol = cmd.tol;
    opts.scheme.max_iter = cmd.max_iter;
    opts.jobs = cmd.jobs;
    opts.wall_clock = g.wall_clock;

    std::vector<SweepRow> rows = sweep_lambda(graph, vortices, lambdas, opts);

    JsonWriter cw;
    cw.begin_object();
    cw.key("lambdas").value_array(lambdas);
    cw.key("relative_to_bound").value(cmd.relative_to_bound);
    cw.key("with_minimizer").value(opts.with_minimizer);
    cw.key("with_mountain_pass").value(opts.with_mountain_pass);
    cw.key("jobs").value(cmd.jobs);
    cw.key("scheme").raw(scheme_config_json(opts.scheme));
    cw.end_object();
    RunManifest manifest = make_manifest(g, cw.str(), graph_hash(graph), 0.0);

    std::ostringstream os;
    write_sweep_csv(os, rows, manifest.to_json());
    emit(cmd.out, os.str());
    std::cerr << "sweep: " << rows.size() << " rows\n";
    return 0;
}

int run_mountain(const MountainCmd& cmd, const GlobalOpts& g) {
    const auto t0 = std::chrono::steady_clock::now();
    WeightedGraph graph = load_problem_graph(cmd.p.graph_path);
    std::vector<Vortex> vortices = parse_vortices(cmd.p.vortex_specs);
    const double lambda = resolve_lambda(cmd.p, graph, vortices);
    VortexProblem prob(graph, lambda, vortices);

    DescentConfig dcfg;
    dcfg.grad_tol = cmd.grad_tol;
    MountainPassConfig mcfg;
    mcfg.path_points = cmd.path_points;
    mcfg.deform_tol = cmd.deform_tol;
    mcfg.max_deform = cmd.max_deform;
    mcfg.c0_search = cmd.c0_search;
    mcfg.residual_tol = cmd.residual_tol;

    VertexField u0 = compute_u0(prob, {});
    VertexField start(u0.size());
    for (std::size_t i = 0; i < u0.size(); ++i) start[i] = -u0[i];
    MinimizeResult vmin = minimize(prob, u0, start, dcfg);
    if (!vmin.converged)
        throw ConvergenceFailure("descent failed to certify a local minimizer", vmin.grad_sup);

    SolveReport mp = mountain_pass(prob, u0, vmin.v, mcfg, dcfg);

    JsonWriter cw;
    cw.begin_object();
    cw.key("lambda").value(lambda);
    cw.key("path_points").value(mcfg.path_points);
    cw.key("deform_tol").value(mcfg.deform_tol);
    cw.key("max_deform").value(mcfg.max_deform);
    cw.key("c0_search").value(mcfg.c0_search);
    cw.key("residual_tol").value(mcfg.residual_tol);
    cw.key("grad_tol").value(dcfg.grad_tol);
    cw.end_object();
    RunManifest manifest = make_manifest(
        g, cw.str(), graph_hash(graph),
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());

    JsonWriter w;
    w.begin_object();
    w.key("graph_hash").value(graph_hash(graph));
    w.key("lambda").value(lambda);
    w.key("vortices").raw(vortices_json(vortices));
    w.key("u0").value_array(u0.values());
    w.key("minimizer_v").value_array(vmin.v.values());
    w.key("minimizer_energy").value(vmin.energy);
    w.key("kind").value("mountain_pass");
    w.key("status").value(to_string(mp.status));
    if (mp.status == SolveStatus::converged) {
        const VertexField& v2 = *mp.solution_v;
        const double e2 = energy(prob, u0, v2);
        w.key("v").value_array(v2.values());
        w.key("residual").value(sup_norm(residual_reduced(prob, u0, v2)));
        w.key("energy").value(e2);
        w.key("energy_gap").value(e2 - vmin.energy);
        VertexField u(u0.size());
        for (std::size_t i = 0; i < u0.size(); ++i) u[i] = u0[i] + v2[i];
        w.key("verify").raw(verify_json(verify_solution(prob, u)));
    }
    w.key("deform_iterations").value(mp.iterations);
    w.key("manifest").raw(manifest.to_json());
    w.end_object();

    emit(cmd.out, w.str());
    std::cerr << "mountain: " << to_string(mp.status) << " after " << mp.iterations
              << " deformations\n";
    return mp.status == SolveStatus::converged ? 0 : 3;
}

} // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"Solver suite for the self-dual Chern-Simons vortex equation on finite weighted graphs"};
    app.require_subcommand(1);

    GlobalOpts global;
    {
        std::ostringstream os;
        os << "csvortex";
        for (const std::string& a : args) os << " " << a;
        global.command_line = os.str();
    }
    app.add_option("--seed", global.seed, "Seed for randomized components (recorded in manifests)");
    app.add_flag("--wall-clock", global.wall_clock,
                 "Record real wall times (off by default so outputs are byte-stable)");

    GraphCmd graph_cmd;
    auto* sg = app.add_subcommand("graph", "Generate or normalize a graph JSON file");
    sg->add_option("--kind", graph_cmd.kind, "torus|complete|cycle|path");
    sg->add_option("--m", graph_cmd.m, "torus rows");
    sg->add_option("--k", graph_cmd.k, "torus columns");
    sg->add_option("--n", graph_cmd.n, "vertex count for complete/cycle/path");
    sg->add_option("--from", graph_cmd.from, "validate and normalize an existing graph file");
    sg->add_option("--uniform-weight", graph_cmd.uniform_weight, "scale all edge weights");
    sg->add_option("--uniform-mu", graph_cmd.uniform_mu, "scale the vertex measure");
    sg->add_option("--out", graph_cmd.out, "output path (stdout if omitted)");

    SolveCmd solve_cmd;
    auto* ss = app.add_subcommand("solve", "Solve at one coupling (monotone scheme and/or descent)");
    ss->add_option("--graph", solve_cmd.p.graph_path, "graph JSON file")->required();
    ss->add_option("--vortex", solve_cmd.p.vortex_specs, "vortex p or p:n (repeatable)");
    ss->add_option("--lambda", solve_cmd.p.lambda, "coupling");
    ss->add_option("--lambda-rel", solve_cmd.p.lambda_rel, "coupling as a multiple of the necessary bound");
    ss->add_option("--K", solve_cmd.shift, "scheme shift (default: lambda)");
    ss->add_option("--tol", solve_cmd.tol, "residual tolerance");
    ss->add_option("--max-iter", solve_cmd.max_iter, "iteration budget");
    ss->add_option("--floor", solve_cmd.floor, "divergence floor");
    ss->add_flag("--no-barrier", solve_cmd.no_barrier, "disable the nonexistence certificate");
    ss->add_option("--mode", solve_cmd.mode, "iterate|minimize|both");
    ss->add_option("--out", solve_cmd.out, "output path (stdout if omitted)");

    CriticalCmd critical_cmd;
    auto* sc = app.add_subcommand("critical", "Bracket the critical coupling by bisection");
    sc->add_option("--graph", critical_cmd.p.graph_path, "graph JSON file")->required();
    sc->add_option("--vortex", critical_cmd.p.vortex_specs, "vortex p or p:n (repeatable)");
    sc->add_option("--rel-width", critical_cmd.rel_width, "target relative bracket width");
    sc->add_option("--tol", critical_cmd.tol, "scheme residual tolerance");
    sc->add_option("--max-iter", critical_cmd.max_iter, "scheme iteration budget");
    sc->add_option("--out", critical_cmd.out, "output path (stdout if omitted)");

    SweepCmd sweep_cmd;
    auto* sw = app.add_subcommand("sweep", "Run the scheme across couplings, emit CSV");
    sw->add_option("--graph", sweep_cmd.p.graph_path, "graph JSON file")->required();
    sw->add_option("--vortex", sweep_cmd.p.vortex_specs, "vortex p or p:n (repeatable)");
    sw->add_option("--lambdas", sweep_cmd.lambdas, "comma-separated couplings")->required();
    sw->add_flag("--relative-to-bound", sweep_cmd.relative_to_bound,
                 "interpret --lambdas as multiples of the necessary bound");
    sw->add_flag("--no-minimize", sweep_cmd.no_minimize, "skip the variational minimizer column");
    sw->add_flag("--mountain", sweep_cmd.mountain, "also run the mountain pass (energy_gap column)");
    sw->add_option("--jobs", sweep_cmd.jobs, "parallel probes (default: CSV_SOLVER_JOBS or 1)");
    sw->add_option("--tol", sweep_cmd.tol, "scheme residual tolerance");
    sw->add_option("--max-iter", sweep_cmd.max_iter, "scheme iteration budget");
    sw->add_option("--out", sweep_cmd.out, "output path (stdout if omitted)");

    MountainCmd mountain_cmd;
    auto* sm = app.add_subcommand("mountain", "Find a second solution via the mountain pass");
    sm->add_option("--graph", mountain_cmd.p.graph_path, "graph JSON file")->required();
    sm->add_option("--vortex", mountain_cmd.p.vortex_specs, "vortex p or p:n (repeatable)");
    sm->add_option("--lambda", mountain_cmd.p.lambda, "coupling");
    sm->add_option("--lambda-rel", mountain_cmd.p.lambda_rel, "coupling as a multiple of the necessary bound");
    sm->add_option("--path-points", mountain_cmd.path_points, "path discretization");
    sm->add_option("--deform-tol", mountain_cmd.deform_tol, "gradient tolerance at the path max");
    sm->add_option("--max-deform", mountain_cmd.max_deform, "deformation budget");
    sm->add_option("--c0", mountain_cmd.c0_search, "initial endpoint drop candidate");
    sm->add_option("--residual-tol", mountain_cmd.residual_tol, "polish residual tolerance");
    sm->add_option("--grad-tol", mountain_cmd.grad_tol, "descent gradient tolerance");
    sm->add_option("--out", mountain_cmd.out, "output path (stdout if omitted)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e);  // --help
            return 0;
        }
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (sg->parsed()) return run_graph(graph_cmd, global);
        if (ss->parsed()) return run_solve(solve_cmd, global);
        if (sc->parsed()) return run_critical(critical_cmd, global);
        if (sw->parsed()) return run_sweep(sweep_cmd, global);
        if (sm->parsed()) return run_mountain(mountain_cmd, global);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    std::cerr << "error: no subcommand\n";
    return 1;
}

} // namespace csvortex
