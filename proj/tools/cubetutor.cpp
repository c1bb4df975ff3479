// cubetutor: solver builds, graph synthesis, cohort simulation, analysis and the session server.

#include "cubetutor/analytics/pipeline.hpp"
#include "cubetutor/app/session.hpp"
#include "cubetutor/guidance.hpp"
#include "cubetutor/subgoal.hpp"

#include "cubetutor/app/http.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

namespace ct = cubetutor;
namespace fs = std::filesystem;

namespace {

void spit(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw ct::Error(ct::ErrorKind::Io, "cannot write " + path.string());
}

ct::PatternDatabase obtain_pdb(const std::string& path, ct::Metric metric) {
    if (!path.empty()) {
        auto pdb = ct::load_pdb(path);
        if (pdb.metric() != metric)
            throw ct::invalid_argument(path + " was built for " + ct::to_string(pdb.metric()));
        return pdb;
    }
    return ct::build_pdb(ct::white_cross_pattern(), metric);
}

// A 54-letter color string is a state; anything else is move notation applied to solved.
ct::CubeState parse_position(const std::string& text) {
    if (text.size() == static_cast<std::size_t>(ct::kFacelets) && text.find(' ') == std::string::npos) {
        try {
            return ct::CubeState::from_string(text);
        } catch (const ct::Error&) {
            // not a color string after all; try notation
        }
    }
    return ct::apply_sequence(ct::CubeState::solved(), text);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct SolveArgs {
    std::string position;
    std::string metric = "qtm";
    std::string pdb;
    std::string graph;
    bool explain = false;
};

int run_solve(const SolveArgs& a) {
    const ct::Metric metric = ct::parse_metric(a.metric);
    const ct::PatternDatabase pdb = obtain_pdb(a.pdb, metric);
    const ct::CubeState start = parse_position(a.position);
    std::cout << "state     " << start.to_string() << "\n";
    std::cout << "distance  " << ct::heuristic(start, pdb) << " (" << a.metric << ")\n";

    const ct::Solution sol = ct::solve_optimal(start, pdb);
    std::cout << "optimal   " << (sol.seq.moves.empty() ? "-" : ct::to_string(sol.seq)) << "\n";
    std::cout << "length    " << sol.seq.moves.size() << "\n";
    std::cout << "expanded  " << sol.nodes_expanded << "\n";

    std::optional<ct::SubgoalGraph> graph;
    if (!a.graph.empty()) {
        graph = ct::load_graph(a.graph);
        if (graph->metric != metric) throw ct::invalid_argument(a.graph + " uses a different metric");
        const ct::PolicyRun run = ct::run_policy(start, *graph, pdb);
        std::cout << "policy    " << (run.seq.moves.empty() ? "-" : ct::to_string(run.seq)) << "\n";
        std::cout << "subgoals  ";
        for (std::size_t i = 0; i < run.visited.size(); ++i) std::cout << (i ? " -> " : "") << run.visited[i];
        std::cout << "\n";
    }
    if (a.explain) {
        const ct::Walkthrough w =
            ct::plan_walkthrough(start, ct::white_cross_pattern(), pdb, graph ? &*graph : nullptr);
        for (const auto& st : w.steps())
            std::cout << st.index + 1 << ". " << ct::to_string(st.move) << "  " << st.explanation << "\n";
    }
    return 0;
}

int run_pdb_build(const std::string& metric_text, const std::string& out) {
    const auto t0 = std::chrono::steady_clock::now();
    const ct::PatternDatabase pdb = ct::build_pdb(ct::white_cross_pattern(), ct::parse_metric(metric_text));
    ct::save_pdb(pdb, out);
    std::cerr << "wrote " << out << ": " << pdb.size() << " entries, max depth " << pdb.max_depth() << ", "
              << seconds_since(t0) << " s\n";
    return 0;
}

struct GraphArgs {
    int sample = 10000;
    std::uint64_t seed = 7;
    std::string metric = "qtm";
    std::string pdb;
    std::string group = ct::to_string(ct::GraphOptions{}.group);
    int scramble_length = ct::GraphOptions{}.scramble_length;
    std::string out;
};

int run_graph_build(const GraphArgs& a) {
    const auto t0 = std::chrono::steady_clock::now();
    const ct::PatternDatabase pdb = obtain_pdb(a.pdb, ct::parse_metric(a.metric));
    ct::GraphOptions opt;
    opt.group = ct::parse_symmetry_group(a.group);
    opt.scramble_length = a.scramble_length;
    const ct::SubgoalGraph g = ct::build_graph(ct::white_cross_pattern(), a.seed, a.sample, pdb, opt);
    ct::save_graph(g, a.out);
    std::cerr << "wrote " << a.out << ": " << g.nodes.size() << " nodes, " << g.edges.size() << " edges, coverage "
              << g.coverage.matched << "/" << g.coverage.sample_size << ", " << seconds_since(t0) << " s\n";
    return g.coverage.matched == g.coverage.sample_size ? 0 : 3;
}

int run_scenarios(std::uint64_t seed, const std::string& out) {
    const auto text = ct::scenarios_to_text(ct::scenario_catalog(seed, obtain_pdb("", ct::Metric::QTM)));
    if (out.empty()) {
        std::cout << text;
    } else {
        spit(out, text);
    }
    return 0;
}

struct SimulateArgs {
    int per_cluster = 20;
    double noise = 0.3;
    std::uint64_t seed = 1;
    std::string out = "cohort";
};

int run_simulate(const SimulateArgs& a) {
    const auto cohort = ct::analytics::simulate_cohort(a.per_cluster, a.noise, a.seed);
    const fs::path dir(a.out);
    spit(dir / "events.log", ct::format_log(cohort.events));
    spit(dir / "scores.csv", ct::analytics::scores_to_csv(cohort.scores));
    spit(dir / "features.csv", ct::features_to_csv(cohort.features));
    std::ostringstream labels;
    labels << "student_id\tprofile\n";
    for (std::size_t i = 0; i < cohort.students.size(); ++i)
        labels << cohort.students[i] << "\t" << ct::analytics::kClusterNames[static_cast<std::size_t>(cohort.labels[i])]
               << "\n";
    spit(dir / "labels.tsv", labels.str());
    std::cerr << "wrote " << cohort.students.size() << " students, " << cohort.events.size() << " events to "
              << dir.string() << "\n";
    return 0;
}

struct AnalyzeArgs {
    std::string log;
    std::string scores;
    std::string out = "reports";
    ct::analytics::PipelineOptions opt;
};

int run_analyze(const AnalyzeArgs& a) {
    const auto events = ct::read_log(a.log);
    if (events.empty()) {
        std::cerr << a.log << ": log is empty\n";
        return 2;
    }
    if (const auto v = ct::validate_log(events); !v.empty()) {
        std::cerr << a.log << ": " << v.size() << " violation(s)\n";
        for (const auto& x : v) std::cerr << "  event " << x.index << ": " << x.message << "\n";
        return 2;
    }
    const auto t0 = std::chrono::steady_clock::now();
    const auto result = ct::analytics::run_pipeline(events, ct::analytics::read_scores(a.scores), a.opt);
    ct::analytics::write_reports(result, a.out);
    for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
    std::cerr << "k = " << result.k << "; reports in " << a.out << " (" << seconds_since(t0) << " s)\n";
    return 0;
}

struct ServeArgs {
    std::string host = "0.0.0.0";
    int port = 8080;
    std::string data_dir;
    std::string pdb;
    std::string graph;
    std::uint64_t scenario_seed = ct::kDefaultScenarioSeed;
    std::uint64_t challenge_seed = ct::app::kDefaultChallengeSeed;
};

int run_serve(ServeArgs a) {
    if (a.data_dir.empty())
        if (const char* env = std::getenv("CUBETUTOR_DATA_DIR")) a.data_dir = env;
    const ct::PatternDatabase pdb = obtain_pdb(a.pdb, ct::Metric::QTM);
    std::optional<ct::SubgoalGraph> graph;
    if (!a.graph.empty()) graph = ct::load_graph(a.graph);
    ct::app::AppConfig cfg;
    cfg.data_dir = a.data_dir;
    cfg.scenario_seed = a.scenario_seed;
    cfg.challenge_seed = a.challenge_seed;
    ct::app::SessionManager sessions(pdb, cfg, graph ? &*graph : nullptr);
    ct::app::HttpService http(sessions);
    if (!http.bind(a.host, a.port)) {
        std::cerr << "cannot bind " << a.host << ":" << a.port << "\n";
        return 1;
    }
    std::cerr << "listening on " << a.host << ":" << a.port
              << (a.data_dir.empty() ? " (in-memory logs)" : ", logs under " + a.data_dir) << "\n";
    return http.listen_after_bind() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cross tutor: solver, subgoal graphs, cohort analytics and session server"};
    app.require_subcommand(1);

    SolveArgs solve;
    auto* solve_cmd = app.add_subcommand("solve", "Optimal white cross for a state or scramble");
    solve_cmd->add_option("position", solve.position, "54-letter facelet string (ULFRBD) or move notation")->required();
    solve_cmd->add_option("--metric", solve.metric, "qtm or htm")->capture_default_str();
    solve_cmd->add_option("--pdb", solve.pdb, "pattern database file (built in memory when omitted)");
    solve_cmd->add_option("--graph", solve.graph, "subgoal graph to follow as well");
    solve_cmd->add_flag("--explain", solve.explain, "print a step-by-step walkthrough");

    auto* pdb_cmd = app.add_subcommand("pdb", "Pattern database tools");
    pdb_cmd->require_subcommand(1);
    std::string pdb_metric = "qtm", pdb_out = "cross.pdb";
    auto* pdb_build = pdb_cmd->add_subcommand("build", "Build the cross distance table");
    pdb_build->add_option("--metric", pdb_metric, "qtm or htm")->capture_default_str();
    pdb_build->add_option("--out", pdb_out, "output file")->capture_default_str();

    GraphArgs graph;
    auto* graph_cmd = app.add_subcommand("graph", "Subgoal graph tools");
    graph_cmd->require_subcommand(1);
    auto* graph_build = graph_cmd->add_subcommand("build", "Induce a subgoal graph from a seeded sample");
    graph_build->add_option("--sample", graph.sample, "sample size")->capture_default_str();
    graph_build->add_option("--seed", graph.seed, "sample seed")->capture_default_str();
    graph_build->add_option("--metric", graph.metric, "qtm or htm")->capture_default_str();
    graph_build->add_option("--pdb", graph.pdb, "pattern database file");
    graph_build->add_option("--group", graph.group, "symmetry group for path signatures")->capture_default_str();
    graph_build->add_option("--scramble-length", graph.scramble_length, "random moves per sampled state")
        ->capture_default_str();
    graph_build->add_option("--out", graph.out, "output file")->required();

    std::uint64_t scen_seed = ct::kDefaultScenarioSeed;
    std::string scen_out;
    auto* scen_cmd = app.add_subcommand("scenarios", "Print or write the practice scenario catalogue");
    scen_cmd->add_option("--seed", scen_seed, "catalogue seed")->capture_default_str();
    scen_cmd->add_option("--out", scen_out, "output file (stdout when omitted)");

    SimulateArgs sim;
    auto* sim_cmd = app.add_subcommand("simulate", "Write a synthetic cohort: events.log, scores.csv, labels");
    sim_cmd->add_option("--per-cluster", sim.per_cluster, "students per profile")->capture_default_str();
    sim_cmd->add_option("--noise", sim.noise, "standard deviation around each profile, in z units")
        ->capture_default_str();
    sim_cmd->add_option("--seed", sim.seed, "generator seed")->capture_default_str();
    sim_cmd->add_option("--out", sim.out, "output directory")->capture_default_str();

    AnalyzeArgs an;
    auto* an_cmd = app.add_subcommand("analyze", "Run the analysis pipeline over a session log");
    an_cmd->add_option("log", an.log, "event log")->required()->check(CLI::ExistingFile);
    an_cmd->add_option("--scores", an.scores, "pre/post and construct scores CSV")->required()->check(CLI::ExistingFile);
    an_cmd->add_option("--out", an.out, "report directory")->capture_default_str();
    an_cmd->add_option("--seed", an.opt.seed, "clustering and posterior seed")->capture_default_str();
    an_cmd->add_option("--draws", an.opt.draws, "posterior draws")->capture_default_str();
    an_cmd->add_option("--restarts", an.opt.restarts, "k-means restarts")->capture_default_str();
    an_cmd->add_option("--kmax", an.opt.kmax, "largest k on the elbow curve")->capture_default_str();

    ServeArgs serve;
    auto* serve_cmd = app.add_subcommand("serve", "HTTP session service (data dir from CUBETUTOR_DATA_DIR)");
    serve_cmd->add_option("--port", serve.port, "listen port")->capture_default_str();
    serve_cmd->add_option("--host", serve.host, "listen address")->capture_default_str();
    serve_cmd->add_option("--data-dir", serve.data_dir, "session log directory (overrides the env var)");
    serve_cmd->add_option("--pdb", serve.pdb, "pattern database file");
    serve_cmd->add_option("--graph", serve.graph, "subgoal graph for walkthroughs");
    serve_cmd->add_option("--scenario-seed", serve.scenario_seed, "practice scenario seed")->capture_default_str();
    serve_cmd->add_option("--challenge-seed", serve.challenge_seed, "challenge task seed")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*solve_cmd) return run_solve(solve);
        if (*pdb_build) return run_pdb_build(pdb_metric, pdb_out);
        if (*graph_build) return run_graph_build(graph);
        if (*scen_cmd) return run_scenarios(scen_seed, scen_out);
        if (*sim_cmd) return run_simulate(sim);
        if (*an_cmd) return run_analyze(an);
        if (*serve_cmd) return run_serve(serve);
    } catch (const ct::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.kind() == ct::ErrorKind::Validation ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
