#pragma once

// Subgoal graphs: sample states, group them by their optimal paths to the
// goal, generalise the closest group into a masked pattern, wire it to an
// existing node, and repeat until the sample is covered.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cubetutor/solver.hpp"
#include "cubetutor/symmetry.hpp"

namespace cubetutor {

enum class ClusterKey { PathSignature, DistanceOnly };

struct PathCluster {
    int distance = 0;
    std::string signature;
    std::vector<CubeState> members;    // distinct aligned representatives, sorted
    std::vector<std::size_t> sources;  // indices into the input
};

namespace subgoal_detail {

struct PathInfo {
    int distance = 0;
    std::string signature;
    CubeState aligned;
};

/// Under the path key the signature is the least solution string over all
/// group images and `aligned` is the image that produces it (least facelets
/// on a tie), so the key and the representative are constant on each orbit.
inline PathInfo path_info(const CubeState& s, const PatternDatabase& pdb, SymmetryGroup group, ClusterKey key) {
    if (key == ClusterKey::DistanceOnly) return {heuristic(s, pdb), "", canonicalize(s, group)};
    std::optional<PathInfo> best;
    for (const Symmetry& g : elements(group)) {
        const CubeState image = g.apply(s);
        const Solution sol = solve_optimal(image, pdb);
        PathInfo info{static_cast<int>(sol.seq.size()), to_string(sol.seq), image};
        if (!best || std::tie(info.signature, info.aligned) < std::tie(best->signature, best->aligned))
            best = std::move(info);
    }
    return *best;
}

inline std::vector<PathCluster> group_infos(const std::vector<PathInfo>& infos) {
    std::map<std::pair<int, std::string>, PathCluster> by_key;
    for (std::size_t i = 0; i < infos.size(); ++i) {
        PathCluster& c = by_key[{infos[i].distance, infos[i].signature}];
        c.distance = infos[i].distance;
        c.signature = infos[i].signature;
        c.members.push_back(infos[i].aligned);
        c.sources.push_back(i);
    }
    std::vector<PathCluster> out;
    for (auto& [key, c] : by_key) {
        std::sort(c.members.begin(), c.members.end());
        c.members.erase(std::unique(c.members.begin(), c.members.end()), c.members.end());
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace subgoal_detail

/// Groups states by (optimal distance, symmetry-reduced solution string);
/// clusters come back in ascending key order.
inline std::vector<PathCluster> cluster_by_paths(const std::vector<CubeState>& states, const MaskedPattern& goal,
                                                 const PatternDatabase& pdb, SymmetryGroup group,
                                                 ClusterKey key = ClusterKey::PathSignature) {
    if (states.empty()) return {};
    std::optional<PatternDatabase> own;
    if (!(goal == pdb.goal())) own = build_pdb(goal, pdb.metric());
    const PatternDatabase& table = own ? *own : pdb;
    std::vector<subgoal_detail::PathInfo> infos;
    infos.reserve(states.size());
    for (const CubeState& s : states) infos.push_back(subgoal_detail::path_info(s, table, group, key));
    return subgoal_detail::group_infos(infos);
}

// ---------------------------------------------------------------------------
// Mask induction

/// Candidate constraints offered to the learner. `Facelets` offers every
/// agreed cell on its own. `CrossPieces` keeps the result inside the cross
/// abstraction: a white edge sticker alone, or together with its mate.
enum class MaskFeatures { Facelets, CrossPieces };

namespace subgoal_detail {

using Bits = std::vector<std::uint64_t>;

inline std::size_t popcount_and(const Bits& a, const Bits& b) {
    std::size_t n = 0;
    for (std::size_t i = 0; i < a.size(); ++i) n += static_cast<std::size_t>(__builtin_popcountll(a[i] & b[i]));
    return n;
}

inline std::vector<std::vector<int>> candidate_features(const Facelets& agreed_cells, const std::array<bool, kFacelets>& agreed,
                                                         MaskFeatures kind) {
    std::vector<std::vector<int>> out;
    if (kind == MaskFeatures::Facelets) {
        for (int i = 0; i < kFacelets; ++i)
            if (agreed[static_cast<std::size_t>(i)]) out.push_back({i});
        return out;
    }
    for (const auto& slot : cubies::edge_facelets())
        for (std::size_t k = 0; k < 2; ++k) {
            const int cell = slot[k];
            const int mate = slot[1 - k];
            if (!agreed[static_cast<std::size_t>(cell)] || agreed_cells[static_cast<std::size_t>(cell)] != Color::White) continue;
            out.push_back({cell});
            if (agreed[static_cast<std::size_t>(mate)]) out.push_back({std::min(cell, mate), std::max(cell, mate)});
        }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::pair(a.front(), a.size()) < std::pair(b.front(), b.size());
    });
    return out;
}

}  // namespace subgoal_detail

/// A pattern matching every positive and no negative. With no negatives the
/// result is the agreement of the positives. Otherwise the learner starts
/// from all grey and repeatedly fixes the feature that rules out the most
/// still-matching negatives (ties: lowest cell index).
inline MaskedPattern learn_mask(const std::vector<CubeState>& positives, const std::vector<CubeState>& negatives,
                                MaskFeatures kind = MaskFeatures::Facelets) {
    if (positives.empty()) throw invalid_argument("no positive examples");
    {
        std::vector<CubeState> sorted = positives;
        std::sort(sorted.begin(), sorted.end());
        for (const CubeState& n : negatives)
            if (std::binary_search(sorted.begin(), sorted.end(), n)) throw invalid_argument("inseparable examples");
    }
    Facelets agreed_cells = positives.front().facelets();
    std::array<bool, kFacelets> agreed{};
    agreed.fill(true);
    for (const CubeState& p : positives)
        for (std::size_t i = 0; i < agreed_cells.size(); ++i)
            if (p.facelets()[i] != agreed_cells[i]) agreed[i] = false;
    const auto features = subgoal_detail::candidate_features(agreed_cells, agreed, kind);

    Facelets cells{};
    cells.fill(Color::Grey);
    auto fix = [&](const std::vector<int>& f) {
        for (int c : f) cells[static_cast<std::size_t>(c)] = agreed_cells[static_cast<std::size_t>(c)];
    };

    if (negatives.empty()) {
        for (const auto& f : features) fix(f);
        if (std::all_of(cells.begin(), cells.end(), [](Color c) { return c == Color::Grey; }))
            return MaskedPattern::universal();
        return MaskedPattern(cells);
    }

    const std::size_t words = (negatives.size() + 63) / 64;
    std::vector<subgoal_detail::Bits> rules_out(features.size(), subgoal_detail::Bits(words, 0));
    for (std::size_t f = 0; f < features.size(); ++f)
        for (std::size_t j = 0; j < negatives.size(); ++j)
            for (int c : features[f])
                if (negatives[j][c] != agreed_cells[static_cast<std::size_t>(c)]) {
                    rules_out[f][j / 64] |= std::uint64_t{1} << (j % 64);
                    break;
                }
    subgoal_detail::Bits alive(words, ~std::uint64_t{0});
    if (negatives.size() % 64) alive.back() = (std::uint64_t{1} << (negatives.size() % 64)) - 1;

    std::size_t remaining = negatives.size();
    while (remaining > 0) {
        std::size_t best = features.size();
        std::size_t best_gain = 0;
        for (std::size_t f = 0; f < features.size(); ++f) {
            const std::size_t gain = subgoal_detail::popcount_and(alive, rules_out[f]);
            if (gain > best_gain) {
                best = f;
                best_gain = gain;
            }
        }
        if (best == features.size()) throw invalid_argument("inseparable examples");
        fix(features[best]);
        for (std::size_t w = 0; w < words; ++w) alive[w] &= ~rules_out[best][w];
        remaining -= best_gain;
    }

    const MaskedPattern out(cells);
    for (const CubeState& p : positives)
        if (!matches(p, out)) throw std::logic_error("learned mask rejects a positive");
    for (const CubeState& n : negatives)
        if (matches(n, out)) throw std::logic_error("learned mask accepts a negative");
    return out;
}

// ---------------------------------------------------------------------------
// Graphs

struct SubgoalNode {
    int id = 0;
    MaskedPattern pattern = MaskedPattern::universal();
    int depth_bound = 0;  // max distance to the goal over the node's match set
};

struct SubgoalEdge {
    int from = 0;
    int to = 0;
    MoveSequence exemplar;
    int bound = 0;  // max moves into `to` over the match set of `from`
};

struct Coverage {
    std::size_t sample_size = 0;
    std::size_t matched = 0;
    double fraction() const { return sample_size ? static_cast<double>(matched) / static_cast<double>(sample_size) : 1.0; }
};

/// Node ids are dense and every edge points to a smaller id; the goal is id 0.
struct SubgoalGraph {
    Metric metric = Metric::QTM;
    std::vector<SubgoalNode> nodes;
    std::vector<SubgoalEdge> edges;
    int goal_id = 0;
    Coverage coverage;
    int iterations = 0;

    const SubgoalNode& node(int id) const { return nodes.at(static_cast<std::size_t>(id)); }

    const SubgoalEdge* edge_from(int id) const {
        for (const SubgoalEdge& e : edges)
            if (e.from == id) return &e;
        return nullptr;
    }

    /// Lowest id whose pattern matches, or -1.
    int first_match(const CubeState& s) const {
        for (const SubgoalNode& n : nodes)
            if (matches(s, n.pattern)) return n.id;
        return -1;
    }
};

enum class NegativeScope {
    NoFarther,  // other uncovered states no farther from the goal than the cluster
    All,        // every uncovered state outside the cluster
};

/// The examples a node was induced from, reported once per learned mask.
struct Induction {
    int node_id;
    const std::vector<CubeState>& positives;
    const std::vector<CubeState>& negatives;
    const MaskedPattern& mask;
};

struct GraphOptions {
    SymmetryGroup group = SymmetryGroup::UpAxis;
    ClusterKey key = ClusterKey::PathSignature;
    NegativeScope negatives = NegativeScope::NoFarther;
    int iteration_cap = 64;
    int scramble_length = 20;
    std::function<void(const Induction&)> on_induction;
};

inline std::vector<CubeState> sample_states(std::uint64_t seed, int count, int length, Metric metric) {
    if (count < 1) throw invalid_argument("sample size must be at least 1");
    std::mt19937_64 rng(seed);
    std::vector<CubeState> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(scramble(rng(), length, metric).first);
    return out;
}

namespace subgoal_detail {

/// Breadth-first search from every start at once; returns the node that all
/// starts reach soonest (lowest id on a tie).
inline int nearest_node(const std::vector<std::uint32_t>& starts, const std::vector<CrossGoal>& nodes, Metric metric) {
    const auto& next = cross_move_table();
    const auto moves = generators(metric);
    struct Search {
        std::vector<bool> seen;
        std::vector<std::uint32_t> frontier;
        std::vector<bool> reached;
    };
    std::vector<Search> searches;
    for (std::uint32_t s : starts) {
        Search x{std::vector<bool>(kCrossSize, false), {s}, std::vector<bool>(nodes.size(), false)};
        x.seen[s] = true;
        searches.push_back(std::move(x));
    }
    for (;;) {
        for (Search& x : searches)
            for (std::uint32_t c : x.frontier) {
                const CrossPlacement p = decode(CrossCoordinate{c});
                for (std::size_t t = 0; t < nodes.size(); ++t)
                    if (!x.reached[t] && nodes[t].matches(p)) x.reached[t] = true;
            }
        for (std::size_t t = 0; t < nodes.size(); ++t)
            if (std::all_of(searches.begin(), searches.end(), [&](const Search& x) { return x.reached[t]; }))
                return static_cast<int>(t);
        for (Search& x : searches) {
            std::vector<std::uint32_t> following;
            for (std::uint32_t c : x.frontier)
                for (Move m : moves) {
                    const std::uint32_t n = next[static_cast<std::size_t>(c) * 18 + static_cast<std::size_t>(m.index())];
                    if (x.seen[n]) continue;
                    x.seen[n] = true;
                    following.push_back(n);
                }
            x.frontier = std::move(following);
        }
    }
}

}  // namespace subgoal_detail

inline SubgoalGraph build_graph_from_sample(const MaskedPattern& goal, const std::vector<CubeState>& sample,
                                            const PatternDatabase& pdb, const GraphOptions& options = {}) {
    if (sample.empty()) throw invalid_argument("sample size must be at least 1");
    if (!(goal == pdb.goal())) throw invalid_argument("pattern database was built for a different goal");
    for (const Symmetry& g : elements(options.group))
        if (!(g.apply(goal) == goal)) throw invalid_argument("goal is not invariant under the symmetry group");

    SubgoalGraph graph;
    graph.metric = pdb.metric();
    graph.nodes.push_back({0, goal, 0});
    std::vector<CrossGoal> compiled{CrossGoal(goal)};
    std::map<MaskedPattern, int> ids{{goal, 0}};
    DistanceCache cache;

    std::vector<CrossPlacement> placements;
    for (const CubeState& s : sample) placements.push_back(decode(cross_coordinate(s)));
    std::vector<bool> covered(sample.size(), false);
    auto refresh = [&](std::size_t first_new) {
        for (std::size_t i = 0; i < sample.size(); ++i)
            for (std::size_t t = first_new; t < compiled.size() && !covered[i]; ++t)
                covered[i] = compiled[t].matches(placements[i]);
    };
    refresh(0);

    std::vector<std::optional<subgoal_detail::PathInfo>> infos(sample.size());
    for (; graph.iterations < options.iteration_cap; ++graph.iterations) {
        std::vector<std::size_t> open;
        for (std::size_t i = 0; i < sample.size(); ++i)
            if (!covered[i]) open.push_back(i);
        if (open.empty()) break;
        for (std::size_t i : open)
            if (!infos[i]) infos[i] = subgoal_detail::path_info(sample[i], pdb, options.group, options.key);

        std::pair<int, std::string> key{infos[open.front()]->distance, infos[open.front()]->signature};
        for (std::size_t i : open) key = std::min(key, {infos[i]->distance, infos[i]->signature});

        std::vector<CubeState> positives;
        std::vector<CubeState> negatives;
        for (std::size_t i : open) {
            const auto& info = *infos[i];
            if (std::pair(info.distance, info.signature) == key) {
                positives.push_back(info.aligned);
            } else if (options.negatives == NegativeScope::All || info.distance <= key.first) {
                // Every image node must also reject it, so the learner sees the whole orbit.
                for (const Symmetry& g : elements(options.group)) negatives.push_back(g.apply(sample[i]));
            }
        }
        for (auto* v : {&positives, &negatives}) {
            std::sort(v->begin(), v->end());
            v->erase(std::unique(v->begin(), v->end()), v->end());
        }

        const MaskedPattern mask = learn_mask(positives, negatives, MaskFeatures::CrossPieces);
        const CrossGoal learned(mask);

        std::vector<std::uint32_t> starts;
        for (const CubeState& p : positives) starts.push_back(cross_coordinate(p).value);
        std::sort(starts.begin(), starts.end());
        starts.erase(std::unique(starts.begin(), starts.end()), starts.end());
        const int target = subgoal_detail::nearest_node(starts, compiled, pdb.metric());
        const MaskedPattern target_pattern = graph.node(target).pattern;
        const MoveSequence exemplar = solve_to_node(positives.front(), target_pattern, pdb, &cache).seq;

        // Bounds hold for the whole match set, not just the sampled members.
        const auto into_target = target == 0 ? nullptr : cache.get(target_pattern, pdb.metric());
        int bound = 0;
        int depth = 0;
        for (std::uint32_t c = 0; c < kCrossSize; ++c) {
            const CrossPlacement p = decode(CrossCoordinate{c});
            if (!learned.matches(p)) continue;
            const int to_goal = pdb.distance(CrossCoordinate{c});
            depth = std::max(depth, to_goal);
            bound = std::max(bound, into_target ? into_target->distance(CrossCoordinate{c}) : to_goal);
        }

        const std::size_t first_new = compiled.size();
        if (options.on_induction) options.on_induction({static_cast<int>(first_new), positives, negatives, mask});
        for (const Symmetry& g : elements(options.group)) {
            const MaskedPattern image = g.apply(mask);
            if (ids.count(image)) continue;
            const int id = static_cast<int>(graph.nodes.size());
            ids[image] = id;
            graph.nodes.push_back({id, image, depth});
            compiled.emplace_back(image);
            graph.edges.push_back({id, ids.at(g.apply(target_pattern)), g.apply(exemplar), bound});
        }
        refresh(first_new);
    }

    graph.coverage.sample_size = sample.size();
    graph.coverage.matched = static_cast<std::size_t>(std::count(covered.begin(), covered.end(), true));
    return graph;
}

inline SubgoalGraph build_graph(const MaskedPattern& goal, std::uint64_t sample_seed, int sample_size,
                                const PatternDatabase& pdb, const GraphOptions& options = {}) {
    return build_graph_from_sample(goal, sample_states(sample_seed, sample_size, options.scramble_length, pdb.metric()),
                                   pdb, options);
}

// ---------------------------------------------------------------------------
// Following the graph

struct PolicyRun {
    MoveSequence seq;
    std::vector<int> visited;  // node ids, ending at the goal
    int bound_sum = 0;
};

inline PolicyRun run_policy(const CubeState& start, const SubgoalGraph& graph, const PatternDatabase& pdb,
                            DistanceCache* cache = nullptr) {
    PolicyRun run;
    run.seq.metric = graph.metric;
    CubeState s = start;
    for (;;) {
        const int id = graph.first_match(s);
        if (id < 0) throw invalid_argument("uncovered state");
        run.visited.push_back(id);
        if (id == graph.goal_id) return run;
        const SubgoalEdge* e = graph.edge_from(id);
        if (!e) throw Error(ErrorKind::Validation, "node " + std::to_string(id) + " has no outgoing edge");
        const Solution step = solve_to_node(s, graph.node(e->to).pattern, pdb, cache);
        s = apply_sequence(s, step.seq);
        run.seq.moves.insert(run.seq.moves.end(), step.seq.moves.begin(), step.seq.moves.end());
        run.bound_sum += e->bound;
    }
}

inline MoveSequence execute_policy(const CubeState& start, const SubgoalGraph& graph, const PatternDatabase& pdb,
                                   DistanceCache* cache = nullptr) {
    return run_policy(start, graph, pdb, cache).seq;
}

// ---------------------------------------------------------------------------
// Text format, one record per line:
//   cubetutor-graph 1
//   metric qtm
//   goal 0
//   coverage <sample_size> <matched>
//   iterations <n>
//   node <id> <54-char pattern> <depth_bound>
//   edge <from> <to> <bound> <exemplar notation...>

inline std::string to_text(const SubgoalGraph& g) {
    std::ostringstream out;
    out << "cubetutor-graph 1\n";
    out << "metric " << to_string(g.metric) << "\n";
    out << "goal " << g.goal_id << "\n";
    out << "coverage " << g.coverage.sample_size << " " << g.coverage.matched << "\n";
    out << "iterations " << g.iterations << "\n";
    for (const SubgoalNode& n : g.nodes) out << "node " << n.id << " " << n.pattern.to_string() << " " << n.depth_bound << "\n";
    for (const SubgoalEdge& e : g.edges) {
        out << "edge " << e.from << " " << e.to << " " << e.bound;
        if (!e.exemplar.empty()) out << " " << to_string(e.exemplar);
        out << "\n";
    }
    return out.str();
}

inline SubgoalGraph parse_graph(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    auto bad = [](const std::string& why) { return Error(ErrorKind::Validation, "graph file: " + why); };
    if (!std::getline(in, line) || line != "cubetutor-graph 1") throw bad("missing header");
    SubgoalGraph g;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream rec(line);
        std::string tag;
        rec >> tag;
        if (tag == "metric") {
            std::string m;
            rec >> m;
            g.metric = parse_metric(m);
        } else if (tag == "goal") {
            rec >> g.goal_id;
        } else if (tag == "coverage") {
            rec >> g.coverage.sample_size >> g.coverage.matched;
        } else if (tag == "iterations") {
            rec >> g.iterations;
        } else if (tag == "node") {
            SubgoalNode n;
            std::string pattern;
            rec >> n.id >> pattern >> n.depth_bound;
            if (n.id != static_cast<int>(g.nodes.size())) throw bad("node ids must be dense, line " + std::to_string(lineno));
            n.pattern = MaskedPattern::from_string(pattern);
            g.nodes.push_back(n);
        } else if (tag == "edge") {
            SubgoalEdge e;
            rec >> e.from >> e.to >> e.bound;
            if (rec.fail()) throw bad("malformed record, line " + std::to_string(lineno));
            std::string rest;
            std::getline(rec, rest);
            rec.clear();
            e.exemplar = parse_sequence(rest);
            e.exemplar.metric = g.metric;
            if (e.to >= e.from) throw bad("edge must point to a smaller id, line " + std::to_string(lineno));
            g.edges.push_back(e);
        } else {
            throw bad("unknown record '" + tag + "', line " + std::to_string(lineno));
        }
        if (rec.fail()) throw bad("malformed record, line " + std::to_string(lineno));
    }
    for (const SubgoalEdge& e : g.edges)
        if (e.from >= static_cast<int>(g.nodes.size())) throw bad("edge from unknown node");
    return g;
}

inline void save_graph(const SubgoalGraph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
    out << to_text(g);
}

inline SubgoalGraph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_graph(buf.str());
}

}  // namespace cubetutor
