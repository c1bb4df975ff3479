#include <gtest/gtest.h>

#include <random>

#include "cubetutor/telemetry.hpp"

using namespace cubetutor;

namespace {

// Appends well-formed events for one student with a running clock.
struct Script {
    std::string student;
    std::int64_t ts = 1000;
    std::optional<TaskKind> active;
    int active_id = 0;
    std::vector<SessionEvent>* out;

    void push(EventKind k, std::optional<TaskKind> tk = {}, std::optional<int> id = {}, std::optional<std::string> mv = {}) {
        SessionEvent e{ts, student, k, tk, id, mv, context_of(active)};
        if (k == EventKind::TaskStart || k == EventKind::TaskComplete) e.context = context_of(tk);
        out->push_back(e);
        ts += 10;
    }
    void start() { push(EventKind::SessionStart); }
    void end() { push(EventKind::SessionEnd); active.reset(); }
    void begin(TaskKind k, int id) {
        push(EventKind::TaskStart, k, id);
        active = k;
        active_id = id;
    }
    void complete() {
        push(EventKind::TaskComplete, active, active_id);
        active.reset();
    }
    void move(const std::string& m) { push(EventKind::CubeMove, {}, {}, m); }
    void reset() { push(EventKind::CubeReset); }
};

std::vector<SessionEvent> random_session(std::mt19937_64& rng, const std::string& student, std::int64_t t0) {
    std::vector<SessionEvent> out;
    Script s{student, t0, {}, 0, &out};
    s.start();
    std::uniform_int_distribution<int> action(0, 9);
    const int n = std::uniform_int_distribution<int>(0, 60)(rng);
    for (int i = 0; i < n; ++i) {
        const int a = action(rng);
        if (a < 5) s.move(to_string(Move::from_index(static_cast<int>(rng() % 18))));
        else if (a == 5) s.reset();
        else if (a == 6) s.push(EventKind::HintRequest);
        else if (a == 7 && !s.active) s.begin(rng() % 2 ? TaskKind::Practice : TaskKind::Challenge, int(rng() % 9) + 1);
        else if (a == 8 && s.active) s.complete();
        else s.push(EventKind::WalkthroughStep);
    }
    s.end();
    return out;
}

}  // namespace

TEST(Log, LineFormatIsFixed) {
    const SessionEvent e{1700000000123, "s07", EventKind::CubeMove, std::nullopt, std::nullopt, "R'", Context::Free};
    EXPECT_EQ(format_event(e), "1700000000123\ts07\tcube_move\t-\t-\tR'\tfree");
    const SessionEvent t{5, "s07", EventKind::TaskStart, TaskKind::Challenge, 2, std::nullopt, Context::Challenge};
    EXPECT_EQ(format_event(t), "5\ts07\ttask_start\tchallenge\t2\t-\tchallenge");
    EXPECT_EQ(parse_event(format_event(e)), e);
    EXPECT_EQ(parse_event(format_event(t)), t);
}

TEST(Log, RoundTripsRandomLogs) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
        const auto events = random_session(rng, "s" + std::to_string(i), 100 * i);
        const std::string text = format_log(events);
        EXPECT_EQ(parse_log(text), events);
        EXPECT_EQ(format_log(parse_log(text)), text);
    }
}

TEST(Log, MalformedLinesAreRejected) {
    EXPECT_THROW(parse_log("1\ts\tcube_move\t-\t-\tR\n"), Error);
    EXPECT_THROW(parse_log("x\ts\tcube_move\t-\t-\tR\tfree\n"), Error);
    EXPECT_THROW(parse_log("1\ts\tjump\t-\t-\t-\tfree\n"), Error);
    EXPECT_THROW(parse_log("1\ts\tcube_move\t-\t-\tR\tnowhere\n"), Error);
    EXPECT_THROW(parse_log("1\t-\tsession_start\t-\t-\t-\tfree\n"), Error);
    try {
        parse_log("1\ts\tsession_start\t-\t-\t-\tfree\n2\ts\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Validation);
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(Validate, WellFormedSessionIsClean) {
    std::vector<SessionEvent> ev;
    Script s{"a", 0, {}, 0, &ev};
    s.start();
    s.move("U");
    s.begin(TaskKind::Practice, 3);
    s.move("F2");
    s.complete();
    s.end();
    EXPECT_TRUE(validate_log(ev).empty());
}

TEST(Validate, FlagsEachKindOfFault) {
    std::vector<SessionEvent> ev;
    Script s{"a", 0, {}, 0, &ev};
    s.start();
    s.push(EventKind::TaskComplete, TaskKind::Practice, 1);
    EXPECT_EQ(validate_log(ev).size(), 1u);

    ev.clear();
    s.move("R");
    s.start();
    const auto v = validate_log(ev);
    ASSERT_EQ(v.size(), 1u);
    EXPECT_NE(v[0].message.find("before session_start"), std::string::npos);

    ev.clear();
    s.start();
    s.move("R");
    s.move("U");
    std::swap(ev[1].ts, ev[2].ts);
    ASSERT_EQ(validate_log(ev).size(), 1u);
    EXPECT_NE(validate_log(ev)[0].message.find("non-monotone"), std::string::npos);

    ev.clear();
    s.start();
    s.push(EventKind::CubeMove);
    s.push(EventKind::TaskStart, TaskKind::Challenge);
    s.move("Q");
    EXPECT_EQ(validate_log(ev).size(), 3u);

    ev.clear();
    s.start();
    s.move("R");
    ev.back().context = Context::Challenge;
    EXPECT_EQ(validate_log(ev).size(), 1u);
}

TEST(Validate, StudentsAreCheckedIndependently) {
    std::vector<SessionEvent> a, b;
    Script sa{"a", 0, {}, 0, &a}, sb{"b", 5, {}, 0, &b};
    sa.start();
    sb.start();
    sa.begin(TaskKind::Challenge, 1);
    sb.move("L");
    sa.move("D'");
    sb.end();
    sa.complete();
    sa.end();
    std::vector<SessionEvent> merged;
    std::merge(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(merged),
               [](const auto& x, const auto& y) { return x.ts < y.ts; });
    EXPECT_TRUE(validate_log(merged).empty());
}

TEST(Aggregate, EmptySessionIsAllZero) {
    std::vector<SessionEvent> ev;
    Script s{"a", 0, {}, 0, &ev};
    s.start();
    s.end();
    EXPECT_EQ(aggregate(ev, "a"), FeatureVector{});
}

TEST(Aggregate, MovePercentages) {
    std::vector<SessionEvent> ev;
    Script s{"a", 0, {}, 0, &ev};
    s.start();
    for (int i = 0; i < 5; ++i) s.move("U");
    s.begin(TaskKind::Challenge, 1);
    for (int i = 0; i < 3; ++i) s.move("R");
    s.complete();
    s.begin(TaskKind::Practice, 4);
    for (int i = 0; i < 2; ++i) s.move("F'");
    s.end();
    const FeatureVector f = aggregate(ev, "a");
    EXPECT_EQ(f.cube_moves, 10);
    EXPECT_DOUBLE_EQ(f.pct_non_ai_moves, 0.5);
    EXPECT_DOUBLE_EQ(f.pct_challenge_moves, 0.3);
    EXPECT_DOUBLE_EQ(f.pct_practice_moves, 0.2);
    EXPECT_EQ(f.challenge_started, 1);
    EXPECT_EQ(f.challenge_completed, 1);
    EXPECT_EQ(f.practice_tasks, 0);  // started, never completed
}

TEST(Aggregate, ResetScope) {
    std::vector<SessionEvent> ev;
    Script s{"a", 0, {}, 0, &ev};
    s.start();
    s.reset();
    s.begin(TaskKind::Challenge, 2);
    s.reset();
    s.reset();
    s.complete();
    s.begin(TaskKind::Practice, 1);
    s.reset();
    s.complete();
    s.end();
    const FeatureVector f = aggregate(ev, "a");
    EXPECT_EQ(f.cube_resets, 4);
    EXPECT_EQ(f.resets_by_context, (std::array<int, 3>{1, 2, 1}));
    EXPECT_EQ(aggregate(ev, "a", ResetScope::ChallengeOnly).cube_resets, 2);
    EXPECT_EQ(f.practice_tasks, 1);
}

TEST(Aggregate, InvalidLogThrows) {
    std::vector<SessionEvent> ev;
    Script s{"a", 0, {}, 0, &ev};
    s.move("R");
    try {
        aggregate(ev, "a");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Validation);
        EXPECT_STREQ(e.what(), "log failed validation");
    }
    EXPECT_THROW(aggregate_cohort(ev), Error);
}

TEST(Aggregate, CohortRowsSortedAndConsistent) {
    std::mt19937_64 rng(11);
    std::vector<SessionEvent> all;
    for (const char* id : {"zed", "amy", "kim"}) {
        const auto part = random_session(rng, id, 0);
        all.insert(all.end(), part.begin(), part.end());
    }
    std::stable_sort(all.begin(), all.end(), [](const auto& x, const auto& y) { return x.ts < y.ts; });
    const CohortFeatures c = aggregate_cohort(all);
    EXPECT_EQ(c.students, (std::vector<std::string>{"amy", "kim", "zed"}));
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(c.rows[i], aggregate(all, c.students[i]));

    const auto solo = random_session(rng, "only", 0);
    const CohortFeatures one = aggregate_cohort(solo);
    ASSERT_EQ(one.rows.size(), 1u);
    EXPECT_EQ(one.rows[0], aggregate(solo, "only"));

    const std::string csv = features_to_csv(c);
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "student_id,practice_tasks,challenge_started,challenge_completed,cube_resets,cube_moves,"
              "pct_non_ai_moves,pct_practice_moves,pct_challenge_moves");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}

TEST(Aggregate, PropertiesOverRandomLogs) {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 300; ++trial) {
        auto ev = random_session(rng, "p", 0);
        // Collapse timestamps into a few buckets so many events tie.
        for (auto& e : ev) e.ts /= 70;
        ASSERT_TRUE(validate_log(ev).empty());
        const FeatureVector f = aggregate(ev, "p");
        ASSERT_LE(f.challenge_completed, f.challenge_started);
        if (f.cube_moves > 0)
            ASSERT_NEAR(f.pct_non_ai_moves + f.pct_practice_moves + f.pct_challenge_moves, 1.0, 1e-9);
        ASSERT_EQ(aggregate(ev, "p"), f);
        // Reorder moves within equal-timestamp runs, keeping the surrounding structure.
        auto shuffled = ev;
        for (std::size_t i = 0; i < shuffled.size();) {
            std::size_t j = i;
            while (j < shuffled.size() && shuffled[j].ts == shuffled[i].ts && shuffled[j].kind == EventKind::CubeMove)
                ++j;
            std::shuffle(shuffled.begin() + static_cast<std::ptrdiff_t>(i), shuffled.begin() + static_cast<std::ptrdiff_t>(j), rng);
            i = std::max(j, i + 1);
        }
        ASSERT_EQ(aggregate(shuffled, "p"), f);
    }
}
