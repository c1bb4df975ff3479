#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "cubetutor/solver.hpp"
#include "oracle/cubie_oracle.hpp"

using namespace cubetutor;

namespace {

// Goldens frozen from the first exhaustive BFS (and confirmed by the oracle BFS below).
constexpr int kQtmCrossDepth = 9;
constexpr int kHtmCrossDepth = 8;

const PatternDatabase& pdb_for(Metric metric) {
    static const PatternDatabase qtm = build_pdb(white_cross_pattern(), Metric::QTM);
    static const PatternDatabase htm = build_pdb(white_cross_pattern(), Metric::HTM);
    return metric == Metric::QTM ? qtm : htm;
}

const oracle::CrossBfs& oracle_for(Metric metric) {
    static const oracle::CrossBfs qtm(false);
    static const oracle::CrossBfs htm(true);
    return metric == Metric::QTM ? qtm : htm;
}

oracle::Cubie oracle_apply(oracle::Cubie c, const MoveSequence& seq) {
    for (Move m : seq.moves) c = oracle::apply(c, static_cast<int>(m.face), m.turns);
    return c;
}

}  // namespace

TEST(PatternDatabase, ClosureAndGoldens) {
    for (Metric metric : {Metric::QTM, Metric::HTM}) {
        const PatternDatabase& pdb = pdb_for(metric);
        EXPECT_EQ(pdb.size(), 190080u);
        EXPECT_EQ(heuristic(CubeState::solved(), pdb), 0);
        EXPECT_EQ(pdb.max_depth(), metric == Metric::QTM ? kQtmCrossDepth : kHtmCrossDepth);
        EXPECT_EQ(oracle_for(metric).distance.size(), 190080u);
        EXPECT_EQ(oracle_for(metric).max_depth, pdb.max_depth());
        std::size_t zeros = 0;
        for (std::uint8_t d : pdb.table()) zeros += d == 0;
        EXPECT_EQ(zeros, 1u);  // the cross fixes all four white edges
    }
}

TEST(PatternDatabase, HeuristicIsExactEverywhere) {
    for (Metric metric : {Metric::QTM, Metric::HTM}) {
        const auto& bfs = oracle_for(metric);
        for (const auto& [key, cubie] : bfs.witness) {
            const CubeState s = CubeState::from_string(oracle::to_facelets(cubie));
            ASSERT_EQ(heuristic(s, pdb_for(metric)), bfs.distance.at(key));
        }
    }
}

TEST(PatternDatabase, SingleFrontTurnCostsOne) {
    EXPECT_EQ(heuristic(apply_sequence(CubeState::solved(), "F"), pdb_for(Metric::QTM)), 1);
    EXPECT_EQ(heuristic(apply_sequence(CubeState::solved(), "D"), pdb_for(Metric::QTM)), 0);
}

TEST(PatternDatabase, RejectsGoalsOutsideTheAbstraction) {
    Facelets cells = white_cross_pattern().cells();
    cells[0] = Color::White;  // a corner facelet
    EXPECT_THROW(build_pdb(MaskedPattern(cells), Metric::QTM), Error);
    cells = white_cross_pattern().cells();
    cells[facelet_index(Face::Up, 7)] = Color::Grey;  // F1 green without its white mate
    EXPECT_THROW(build_pdb(MaskedPattern(cells), Metric::QTM), Error);
    try {
        build_pdb(MaskedPattern::exact(CubeState::solved()), Metric::QTM);
        FAIL();
    } catch (const Error& e) {
        EXPECT_STREQ(e.what(), "goal outside cross abstraction");
    }
}

TEST(PatternDatabase, FileRoundTrip) {
    const auto path = (std::filesystem::temp_directory_path() / "cubetutor_test.pdb").string();
    save_pdb(pdb_for(Metric::HTM), path);
    EXPECT_EQ(std::filesystem::file_size(path), 16u + 190080u);
    const PatternDatabase loaded = load_pdb(path);
    EXPECT_EQ(loaded.metric(), Metric::HTM);
    EXPECT_EQ(loaded.max_depth(), kHtmCrossDepth);
    EXPECT_EQ(loaded.table(), pdb_for(Metric::HTM).table());
    {
        std::ifstream in(path, std::ios::binary);
        char header[16];
        in.read(header, 16);
        EXPECT_EQ(std::string(header, 4), "XPDB");
        EXPECT_EQ(header[4], 1);
        EXPECT_EQ(header[8], 1);
        EXPECT_EQ(header[12], kHtmCrossDepth);
    }
    {
        std::fstream f(path, std::ios::binary | std::ios::in | std::ios::out);
        f.seekp(0);
        f.write("YPDB", 4);
    }
    EXPECT_THROW(load_pdb(path), Error);
    std::filesystem::remove(path);
}

TEST(SolveOptimal, TrivialCases) {
    const auto& pdb = pdb_for(Metric::QTM);
    const Solution none = solve_optimal(CubeState::solved(), white_cross_pattern(), pdb);
    EXPECT_TRUE(none.seq.empty());
    EXPECT_TRUE(none.optimal);
    const Solution one = solve_optimal(apply_sequence(CubeState::solved(), "F"), white_cross_pattern(), pdb);
    EXPECT_EQ(to_string(one.seq), "F'");
}

TEST(SolveOptimal, MatchesBreadthFirstOracle) {
    for (Metric metric : {Metric::QTM, Metric::HTM}) {
        const auto& bfs = oracle_for(metric);
        for (std::uint64_t seed = 0; seed < 1000; ++seed) {
            const auto [state, seq] = scramble(seed, 1 + static_cast<int>(seed % 20), metric);
            const oracle::Cubie c = oracle_apply({}, seq);
            const Solution sol = solve_optimal(state, white_cross_pattern(), pdb_for(metric));
            ASSERT_EQ(static_cast<int>(sol.seq.size()), bfs(c)) << seed;
            ASSERT_TRUE(matches(apply_sequence(state, sol.seq), white_cross_pattern()));
            // Tie-break: first optimal path in the fixed move order.
            ASSERT_EQ(to_string(sol.seq), oracle::notation(bfs.first_optimal_path(c, metric == Metric::HTM))) << seed;
        }
    }
}

TEST(SolveOptimal, Deterministic) {
    const CubeState s = scramble(77, 30, Metric::QTM).first;
    const Solution a = solve_optimal(s, white_cross_pattern(), pdb_for(Metric::QTM));
    const Solution b = solve_optimal(s, white_cross_pattern(), pdb_for(Metric::QTM));
    EXPECT_EQ(a.seq, b.seq);
    EXPECT_EQ(a.nodes_expanded, b.nodes_expanded);
}

TEST(SolveToNode, UniversalAndGoal) {
    const auto& pdb = pdb_for(Metric::QTM);
    const CubeState s = scramble(5, 12, Metric::QTM).first;
    EXPECT_TRUE(solve_to_node(s, MaskedPattern::universal(), pdb).seq.empty());
    EXPECT_EQ(solve_to_node(s, white_cross_pattern(), pdb).seq, solve_optimal(s, white_cross_pattern(), pdb).seq);
}

TEST(SolveToNode, RelaxingTheGoalNeverLengthensTheSolution) {
    const auto& pdb = pdb_for(Metric::QTM);
    DistanceCache cache;
    // Drop one white edge at a time (both of its facelets).
    std::vector<MaskedPattern> relaxed;
    for (int e : {1, 3, 5, 7}) {
        Facelets cells = white_cross_pattern().cells();
        cells[static_cast<std::size_t>(e)] = Color::Grey;
        for (const auto& slot : cubies::edge_facelets())
            if (slot[0] == e) cells[static_cast<std::size_t>(slot[1])] = Color::Grey;
        relaxed.push_back(MaskedPattern(cells));
    }
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 200; ++trial) {
        const CubeState s = scramble(rng(), 20, Metric::QTM).first;
        const std::size_t full = solve_optimal(s, white_cross_pattern(), pdb).seq.size();
        for (const auto& p : relaxed) {
            const Solution sol = solve_to_node(s, p, pdb, &cache);
            ASSERT_LE(sol.seq.size(), full);
            ASSERT_TRUE(matches(apply_sequence(s, sol.seq), p));
        }
    }
    EXPECT_EQ(cache.size(), relaxed.size());
}

TEST(SolveToNode, MatchesBruteForceIntoTheNode) {
    // Node: white-green and white-red edges solved, the rest free.
    Facelets cells{};
    cells.fill(Color::Grey);
    cells[static_cast<std::size_t>(facelet_index(Face::Up, 7))] = Color::White;
    cells[static_cast<std::size_t>(facelet_index(Face::Front, 1))] = Color::Green;
    cells[static_cast<std::size_t>(facelet_index(Face::Up, 5))] = Color::White;
    cells[static_cast<std::size_t>(facelet_index(Face::Right, 1))] = Color::Red;
    const MaskedPattern node(cells);
    const auto& pdb = pdb_for(Metric::QTM);
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 100; ++trial) {
        const CubeState s = scramble(rng(), 5, Metric::QTM).first;
        const Solution sol = solve_to_node(s, node, pdb);
        ASSERT_LE(sol.seq.size(), 5u);
        ASSERT_TRUE(matches(apply_sequence(s, sol.seq), node));
        // Iterative deepening brute force over full states.
        std::size_t best = 99;
        std::vector<CubeState> layer{s};
        for (std::size_t depth = 0; depth <= sol.seq.size() && best == 99; ++depth) {
            for (const auto& x : layer)
                if (matches(x, node)) best = depth;
            if (best != 99) break;
            std::vector<CubeState> next;
            for (const auto& x : layer)
                for (Move m : generators(Metric::QTM)) next.push_back(apply_move(x, m));
            layer = std::move(next);
        }
        ASSERT_EQ(best, sol.seq.size());
    }
}
