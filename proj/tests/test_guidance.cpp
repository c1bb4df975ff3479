#include <gtest/gtest.h>

#include <random>

#include "cubetutor/guidance.hpp"

using namespace cubetutor;

namespace {

const PatternDatabase& pdb() {
    static const PatternDatabase table = build_pdb(white_cross_pattern(), Metric::QTM);
    return table;
}

}  // namespace

TEST(Explain, NamesFaceDirectionAndEdge) {
    const CubeState s = apply_sequence(CubeState::solved(), "R'");
    EXPECT_EQ(explain_move(s, parse_move("R")), "Turn the Right face clockwise to place the white-red edge into the cross.");
    EXPECT_EQ(explain_move(CubeState::solved(), parse_move("F2")), "Turn the Front face twice to reposition the white-green edge.");
    const CubeState down = apply_sequence(CubeState::solved(), "F2");
    EXPECT_EQ(explain_move(down, parse_move("D")), "Turn the Down face clockwise to reposition the white-green edge.");
    EXPECT_EQ(explain_move(CubeState::solved(), parse_move("D'")),
              "Turn the Down face counterclockwise to set up the next move.");
    // F parks white-green in the front-right slot; R lifts it to the top layer.
    EXPECT_EQ(explain_move(apply_sequence(CubeState::solved(), "F"), parse_move("R")),
              "Turn the Right face clockwise to bring the white-green edge onto the top layer.");
}

TEST(Walkthrough, SolvedAndOneMove) {
    EXPECT_EQ(plan_walkthrough(CubeState::solved(), white_cross_pattern(), pdb()).size(), 0u);
    const CubeState s = apply_sequence(CubeState::solved(), "L");
    const Walkthrough w = plan_walkthrough(s, white_cross_pattern(), pdb());
    ASSERT_EQ(w.size(), 1u);
    EXPECT_EQ(w.steps()[0].move, solve_optimal(s, white_cross_pattern(), pdb()).seq.moves[0]);
    EXPECT_EQ(w.cursor(), 0u);
}

TEST(Walkthrough, SoundAndExplainedOverSeededStates) {
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const CubeState s = scramble(seed, 25, Metric::QTM).first;
        const Walkthrough w = plan_walkthrough(s, white_cross_pattern(), pdb());
        CubeState replay = w.start_state();
        for (const auto& step : w.steps()) {
            ASSERT_EQ(step.pre_state, replay);
            ASSERT_EQ(step.post_state, apply_move(step.pre_state, step.move));
            ASSERT_NE(step.explanation.find(face_name(step.move.face)), std::string::npos) << step.explanation;
            replay = step.post_state;
        }
        ASSERT_TRUE(matches(replay, white_cross_pattern()));
        const Walkthrough again = plan_walkthrough(s, white_cross_pattern(), pdb());
        for (std::size_t i = 0; i < w.size(); ++i) ASSERT_EQ(w.steps()[i].explanation, again.steps()[i].explanation);
    }
}

TEST(Walkthrough, CursorContract) {
    const Walkthrough w = plan_walkthrough(scramble(3, 20, Metric::QTM).first, white_cross_pattern(), pdb());
    ASSERT_GT(w.size(), 1u);
    EXPECT_EQ(w.step_forward().step_rewind().cursor(), 0u);
    Walkthrough end = w;
    for (std::size_t i = 0; i < w.size(); ++i) end = end.step_forward();
    EXPECT_EQ(end.cursor(), w.size());
    EXPECT_TRUE(matches(end.current_state(), white_cross_pattern()));
    try {
        w.step_rewind();
        FAIL();
    } catch (const Error& e) {
        EXPECT_STREQ(e.what(), "cursor at boundary");
    }
    EXPECT_THROW(end.step_forward(), Error);
    EXPECT_EQ(w.cursor(), 0u);
    EXPECT_EQ(end.step_rewind().current_state(), w.steps().back().pre_state);
}

TEST(Walkthrough, SubgoalAnnotations) {
    const SubgoalGraph g = build_graph(white_cross_pattern(), 7, 2000, pdb());
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const CubeState s = scramble(seed + 100, 20, Metric::QTM).first;
        if (g.first_match(s) < 0) continue;
        const Walkthrough w = plan_walkthrough(s, white_cross_pattern(), pdb(), &g);
        for (const auto& step : w.steps()) {
            ASSERT_TRUE(step.subgoal_id.has_value());
            const int here = g.first_match(step.pre_state);
            if (here >= 0) EXPECT_LT(*step.subgoal_id, here);
        }
        if (w.size()) EXPECT_EQ(w.steps().back().subgoal_id, g.goal_id);
    }
}

TEST(Hint, GoalReachedAndOneMove) {
    const Hint done = hint(CubeState::solved(), white_cross_pattern(), pdb());
    EXPECT_TRUE(done.goal_reached);
    EXPECT_FALSE(done.move.has_value());
    const Hint h = hint(apply_sequence(CubeState::solved(), "B'"), white_cross_pattern(), pdb());
    EXPECT_FALSE(h.goal_reached);
    EXPECT_EQ(to_string(*h.move), "B");
    EXPECT_NE(h.text.find("Back"), std::string::npos);
}

TEST(Hint, FollowingHintsIsOptimal) {
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        CubeState s = scramble(seed, 20, Metric::QTM).first;
        const std::size_t optimal = solve_optimal(s, white_cross_pattern(), pdb()).seq.size();
        std::size_t taken = 0;
        for (;;) {
            const Hint h = hint(s, white_cross_pattern(), pdb());
            if (h.goal_reached) break;
            const int before = heuristic(s, pdb());
            s = apply_move(s, *h.move);
            ASSERT_EQ(heuristic(s, pdb()), before - 1);
            ++taken;
        }
        ASSERT_EQ(taken, optimal);
    }
}

TEST(Scenarios, CatalogShape) {
    const auto catalog = scenario_catalog(kDefaultScenarioSeed, pdb());
    ASSERT_EQ(catalog.size(), 9u);
    std::set<CubeState> starts;
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        const Scenario& s = catalog[i];
        EXPECT_EQ(s.id, static_cast<int>(i) + 1);
        EXPECT_EQ(s.max_moves, static_cast<int>(i) / 3 + 1);
        EXPECT_EQ(static_cast<int>(solve_optimal(s.start_state, s.goal, pdb()).seq.size()), s.max_moves);
        starts.insert(s.start_state);
    }
    EXPECT_EQ(starts.size(), 9u);
    EXPECT_NO_THROW(check_scenarios(catalog, pdb()));
    EXPECT_EQ(scenarios_to_text(scenario_catalog(kDefaultScenarioSeed, pdb())), scenarios_to_text(catalog));
}

TEST(Scenarios, ShippedCatalogueMatchesGenerator) {
    const auto shipped = load_scenarios(CUBETUTOR_SOURCE_DIR "/data/scenarios.tsv");
    EXPECT_EQ(scenarios_to_text(shipped), scenarios_to_text(scenario_catalog(kDefaultScenarioSeed, pdb())));
    EXPECT_NO_THROW(check_scenarios(shipped, pdb()));
}

TEST(Scenarios, FileRoundTripAndValidation) {
    const auto catalog = scenario_catalog(4, pdb());
    const std::string text = scenarios_to_text(catalog);
    EXPECT_EQ(scenarios_to_text(parse_scenarios(text)), text);
    const std::string first_line = text.substr(0, text.find('\n') + 1);
    EXPECT_THROW(parse_scenarios(first_line + first_line), Error);
    EXPECT_THROW(parse_scenarios("1\tonly three\tfields\n"), Error);
    auto tampered = parse_scenarios(text);
    tampered[8].max_moves = 1;
    EXPECT_THROW(check_scenarios(tampered, pdb()), Error);
}
