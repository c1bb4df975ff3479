#pragma once

// Human-facing guidance: step walkthroughs, hints, templated explanations and
// the practice scenario catalogue.

#include <fstream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cubetutor/subgoal.hpp"

namespace cubetutor {

// ---------------------------------------------------------------------------
// Explanations

namespace guidance_detail {

inline std::string direction(Move m) {
    switch (m.turns) {
        case 1: return "clockwise";
        case 3: return "counterclockwise";
        default: return "twice";
    }
}

inline bool in_home(const CrossPlacement& p, std::size_t edge) {
    return p.slots[edge] == static_cast<int>(edge) && p.flips[edge] == 0;
}

inline bool on_top(const CrossPlacement& p, std::size_t edge) { return p.slots[edge] < 4; }

}  // namespace guidance_detail

/// One sentence naming the face, the direction and the white edge the move
/// works on. Priority: an edge that lands in the cross, then one that reaches
/// the top layer, then any edge the move carries along.
inline std::string explain_move(const CubeState& before, Move m) {
    using namespace guidance_detail;
    const CrossPlacement a = decode(cross_coordinate(before));
    const CrossPlacement b = decode(cross_coordinate(apply_move(before, m)));
    std::string purpose;
    auto edge_name = [](std::size_t i) { return "white-" + color_name(cross_detail::kMateColors[i]) + " edge"; };
    for (std::size_t i = 0; i < 4 && purpose.empty(); ++i)
        if (!in_home(a, i) && in_home(b, i)) purpose = "to place the " + edge_name(i) + " into the cross";
    for (std::size_t i = 0; i < 4 && purpose.empty(); ++i)
        if (!on_top(a, i) && on_top(b, i)) purpose = "to bring the " + edge_name(i) + " onto the top layer";
    for (std::size_t i = 0; i < 4 && purpose.empty(); ++i)
        if (a.slots[i] != b.slots[i] || a.flips[i] != b.flips[i]) purpose = "to reposition the " + edge_name(i);
    if (purpose.empty()) purpose = "to set up the next move";
    return "Turn the " + face_name(m.face) + " face " + direction(m) + " " + purpose + ".";
}

// ---------------------------------------------------------------------------
// Walkthroughs

struct WalkthroughStep {
    int index = 0;
    Move move;
    CubeState pre_state;
    CubeState post_state;
    std::string explanation;
    std::optional<int> subgoal_id;
};

/// Immutable; stepping returns a new value.
class Walkthrough {
public:
    Walkthrough(CubeState start, std::vector<WalkthroughStep> steps, std::size_t cursor = 0)
        : start_(std::move(start)), steps_(std::move(steps)), cursor_(cursor) {
        if (cursor_ > steps_.size()) throw invalid_argument("cursor out of range");
    }

    const std::vector<WalkthroughStep>& steps() const { return steps_; }
    std::size_t size() const { return steps_.size(); }
    std::size_t cursor() const { return cursor_; }
    const CubeState& start_state() const { return start_; }

    /// The state shown at the cursor: the start before any step, else the last step's result.
    const CubeState& current_state() const { return cursor_ == 0 ? start_ : steps_[cursor_ - 1].post_state; }

    Walkthrough step_forward() const {
        if (cursor_ >= steps_.size()) throw Error(ErrorKind::Conflict, "cursor at boundary");
        return Walkthrough(start_, steps_, cursor_ + 1);
    }

    Walkthrough step_rewind() const {
        if (cursor_ == 0) throw Error(ErrorKind::Conflict, "cursor at boundary");
        return Walkthrough(start_, steps_, cursor_ - 1);
    }

private:
    CubeState start_;
    std::vector<WalkthroughStep> steps_;
    std::size_t cursor_;
};

/// Optimal steps towards `goal`. With a graph, each step is tagged with the
/// node the path is heading for: the first node, strictly closer to the goal
/// than the one the step starts in, that a later state enters.
inline Walkthrough plan_walkthrough(const CubeState& start, const MaskedPattern& goal, const PatternDatabase& pdb,
                                    const SubgoalGraph* graph = nullptr) {
    const Solution sol = solve_optimal(start, goal, pdb);
    std::vector<WalkthroughStep> steps;
    CubeState s = start;
    for (std::size_t i = 0; i < sol.seq.moves.size(); ++i) {
        const Move m = sol.seq.moves[i];
        WalkthroughStep step{static_cast<int>(i), m, s, apply_move(s, m), explain_move(s, m), std::nullopt};
        s = step.post_state;
        steps.push_back(std::move(step));
    }
    if (graph) {
        for (std::size_t i = 0; i < steps.size(); ++i) {
            const int here = graph->first_match(steps[i].pre_state);
            for (std::size_t j = i; j < steps.size(); ++j) {
                const int next = graph->first_match(steps[j].post_state);
                if (next >= 0 && (here < 0 || next < here)) {
                    steps[i].subgoal_id = next;
                    break;
                }
            }
        }
    }
    return Walkthrough(start, std::move(steps));
}

struct Hint {
    bool goal_reached = false;
    std::optional<Move> move;
    std::string text;
};

inline Hint hint(const CubeState& state, const MaskedPattern& goal, const PatternDatabase& pdb) {
    if (matches(state, goal)) return {true, std::nullopt, "The goal is reached."};
    const Solution sol = solve_optimal(state, goal, pdb);
    const Move m = sol.seq.moves.front();
    return {false, m, explain_move(state, m)};
}

// ---------------------------------------------------------------------------
// Scenarios

struct Scenario {
    int id = 0;
    std::string title;
    CubeState start_state;
    MaskedPattern goal = white_cross_pattern();
    int max_moves = 0;
};

inline constexpr std::uint64_t kDefaultScenarioSeed = 9;

/// Nine white-cross exercises: three each at one, two and three moves from
/// the cross, with distinct starting states.
inline std::vector<Scenario> scenario_catalog(std::uint64_t seed, const PatternDatabase& pdb) {
    static const std::array<const char*, 3> level = {"One-move cross", "Two-move cross", "Three-move cross"};
    std::mt19937_64 rng(seed);
    std::vector<Scenario> out;
    std::set<CubeState> used;
    for (int id = 1; id <= 9; ++id) {
        const int depth = (id - 1) / 3 + 1;
        for (;;) {
            const CubeState s = scramble(rng(), depth, pdb.metric()).first;
            if (heuristic(s, pdb) != depth || used.count(s)) continue;
            used.insert(s);
            const std::string title = std::string(level[static_cast<std::size_t>(depth - 1)]) + " " +
                                      static_cast<char>('A' + (id - 1) % 3);
            out.push_back({id, title, s, white_cross_pattern(), depth});
            break;
        }
    }
    return out;
}

/// One record per line: id, title, state, goal, max_moves separated by tabs.
inline std::string scenarios_to_text(const std::vector<Scenario>& scenarios) {
    std::ostringstream out;
    for (const Scenario& s : scenarios)
        out << s.id << '\t' << s.title << '\t' << s.start_state.to_string() << '\t' << s.goal.to_string() << '\t'
            << s.max_moves << '\n';
    return out.str();
}

inline std::vector<Scenario> parse_scenarios(const std::string& text) {
    std::vector<Scenario> out;
    std::set<int> ids;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::istringstream rec(line);
        for (std::string f; std::getline(rec, f, '\t');) fields.push_back(f);
        if (fields.size() != 5) throw Error(ErrorKind::Validation, "scenario line " + std::to_string(lineno) + ": expected 5 fields");
        Scenario s;
        try {
            s.id = std::stoi(fields[0]);
            s.max_moves = std::stoi(fields[4]);
        } catch (const std::exception&) {
            throw Error(ErrorKind::Validation, "scenario line " + std::to_string(lineno) + ": bad number");
        }
        s.title = fields[1];
        s.start_state = CubeState::from_string(fields[2]);
        s.goal = MaskedPattern::from_string(fields[3]);
        if (!ids.insert(s.id).second) throw Error(ErrorKind::Validation, "duplicate scenario id " + fields[0]);
        out.push_back(std::move(s));
    }
    return out;
}

/// Throws unless every scenario reaches its goal within max_moves.
inline void check_scenarios(const std::vector<Scenario>& scenarios, const PatternDatabase& pdb) {
    for (const Scenario& s : scenarios) {
        const Solution sol = solve_optimal(s.start_state, s.goal, pdb);
        if (static_cast<int>(sol.seq.size()) > s.max_moves)
            throw Error(ErrorKind::Validation, "scenario " + std::to_string(s.id) + " needs more than max_moves");
    }
}

inline std::vector<Scenario> load_scenarios(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenarios(buf.str());
}

}  // namespace cubetutor
