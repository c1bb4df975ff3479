#pragma once

// Interaction log records and their per-student aggregation.
//
// Line format (tab separated, `-` for an empty field):
//   ts  student_id  kind  task_kind  task_id  move  context

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cubetutor/cube.hpp"

namespace cubetutor {

enum class EventKind { SessionStart, TaskStart, TaskComplete, CubeMove, CubeReset, HintRequest, WalkthroughStep, SessionEnd };
enum class TaskKind { Practice, Challenge };
enum class Context { Practice, Challenge, Free };

struct SessionEvent {
    std::int64_t ts = 0;  // ms since epoch
    std::string student_id;
    EventKind kind = EventKind::SessionStart;
    std::optional<TaskKind> task_kind;
    std::optional<int> task_id;
    std::optional<std::string> move;
    Context context = Context::Free;

    friend bool operator==(const SessionEvent&, const SessionEvent&) = default;
};

inline std::string to_string(EventKind k) {
    constexpr std::array<const char*, 8> names = {"session_start", "task_start",       "task_complete",
                                                  "cube_move",     "cube_reset",       "hint_request",
                                                  "walkthrough_step", "session_end"};
    return names[static_cast<std::size_t>(k)];
}

inline std::string to_string(TaskKind k) { return k == TaskKind::Practice ? "practice" : "challenge"; }

inline std::string to_string(Context c) {
    switch (c) {
        case Context::Practice: return "practice";
        case Context::Challenge: return "challenge";
        case Context::Free: return "free";
    }
    return "?";
}

inline Context context_of(std::optional<TaskKind> active) {
    if (!active) return Context::Free;
    return *active == TaskKind::Practice ? Context::Practice : Context::Challenge;
}

inline EventKind parse_event_kind(std::string_view s) {
    for (int k = 0; k < 8; ++k)
        if (to_string(static_cast<EventKind>(k)) == s) return static_cast<EventKind>(k);
    throw Error(ErrorKind::Validation, "unknown event kind '" + std::string(s) + "'");
}

inline TaskKind parse_task_kind(std::string_view s) {
    if (s == "practice") return TaskKind::Practice;
    if (s == "challenge") return TaskKind::Challenge;
    throw Error(ErrorKind::Validation, "unknown task kind '" + std::string(s) + "'");
}

inline Context parse_context(std::string_view s) {
    if (s == "practice") return Context::Practice;
    if (s == "challenge") return Context::Challenge;
    if (s == "free") return Context::Free;
    throw Error(ErrorKind::Validation, "unknown context '" + std::string(s) + "'");
}

inline std::string format_event(const SessionEvent& e) {
    std::string out = std::to_string(e.ts);
    out += '\t' + e.student_id;
    out += '\t' + to_string(e.kind);
    out += '\t' + (e.task_kind ? to_string(*e.task_kind) : std::string("-"));
    out += '\t' + (e.task_id ? std::to_string(*e.task_id) : std::string("-"));
    out += '\t' + (e.move ? *e.move : std::string("-"));
    out += '\t' + to_string(e.context);
    return out;
}

inline SessionEvent parse_event(const std::string& line) {
    std::vector<std::string> f;
    std::istringstream in(line);
    for (std::string field; std::getline(in, field, '\t');) f.push_back(field);
    if (f.size() != 7) throw Error(ErrorKind::Validation, "expected 7 fields, got " + std::to_string(f.size()));
    SessionEvent e;
    try {
        std::size_t used = 0;
        e.ts = std::stoll(f[0], &used);
        if (used != f[0].size()) throw std::invalid_argument("ts");
        if (f[4] != "-") e.task_id = std::stoi(f[4]);
    } catch (const std::exception&) {
        throw Error(ErrorKind::Validation, "bad number in '" + line + "'");
    }
    if (f[1].empty() || f[1] == "-") throw Error(ErrorKind::Validation, "missing student_id");
    e.student_id = f[1];
    e.kind = parse_event_kind(f[2]);
    if (f[3] != "-") e.task_kind = parse_task_kind(f[3]);
    if (f[5] != "-") e.move = f[5];
    e.context = parse_context(f[6]);
    return e;
}

inline std::string format_log(const std::vector<SessionEvent>& events) {
    std::string out;
    for (const SessionEvent& e : events) out += format_event(e) + '\n';
    return out;
}

inline std::vector<SessionEvent> parse_log(const std::string& text) {
    std::vector<SessionEvent> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.push_back(parse_event(line));
        } catch (const Error& e) {
            throw Error(ErrorKind::Validation, "log line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<SessionEvent> read_log(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_log(buf.str());
}

// ---------------------------------------------------------------------------
// Validation

struct Violation {
    std::size_t index = 0;  // position in the event list
    std::string message;
};

/// Checks each student's events in order; an empty result means the log is valid.
inline std::vector<Violation> validate_log(const std::vector<SessionEvent>& events) {
    struct StudentState {
        bool started = false;
        std::int64_t last_ts = 0;
        bool any = false;
        std::optional<std::pair<TaskKind, int>> active;
    };
    std::map<std::string, StudentState> students;
    std::vector<Violation> out;
    auto report = [&](std::size_t i, const std::string& what) {
        out.push_back({i, events[i].student_id + ": " + what});
    };
    for (std::size_t i = 0; i < events.size(); ++i) {
        const SessionEvent& e = events[i];
        StudentState& st = students[e.student_id];
        if (st.any && e.ts < st.last_ts) report(i, "non-monotone timestamp");
        st.any = true;
        st.last_ts = std::max(st.last_ts, e.ts);

        if (e.kind == EventKind::SessionStart) {
            st.started = true;
            st.active.reset();
            continue;
        }
        if (!st.started) report(i, to_string(e.kind) + " before session_start");

        const bool task_event = e.kind == EventKind::TaskStart || e.kind == EventKind::TaskComplete;
        if (task_event && (!e.task_kind || !e.task_id)) {
            report(i, to_string(e.kind) + " without task_kind/task_id");
            continue;
        }
        if (e.kind == EventKind::CubeMove) {
            if (!e.move) {
                report(i, "cube_move without move");
            } else {
                try {
                    parse_move(*e.move);
                } catch (const Error&) {
                    report(i, "unparseable move '" + *e.move + "'");
                }
            }
        }
        // A task event is logged in the context it opens or closes.
        if (e.kind == EventKind::TaskStart) {
            st.active = std::pair(*e.task_kind, *e.task_id);
            if (e.context != context_of(*e.task_kind)) report(i, "context does not match task");
            continue;
        }
        if (e.kind == EventKind::TaskComplete) {
            if (!st.active || *st.active != std::pair(*e.task_kind, *e.task_id)) {
                report(i, "task_complete without matching task_start");
            } else if (e.context != context_of(*e.task_kind)) {
                report(i, "context does not match task");
            }
            st.active.reset();
            continue;
        }
        if (e.context != context_of(st.active ? std::optional(st.active->first) : std::nullopt))
            report(i, "context does not match active task");
        if (e.kind == EventKind::SessionEnd) {
            st.started = false;
            st.active.reset();
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Aggregation

inline constexpr std::array<const char*, 8> kFeatureNames = {
    "practice_tasks", "challenge_started",  "challenge_completed", "cube_resets",
    "cube_moves",     "pct_non_ai_moves",   "pct_practice_moves",  "pct_challenge_moves"};

enum class ResetScope { AnyContext, ChallengeOnly };

struct FeatureVector {
    int practice_tasks = 0;
    int challenge_started = 0;
    int challenge_completed = 0;
    int cube_resets = 0;
    int cube_moves = 0;
    double pct_non_ai_moves = 0;
    double pct_practice_moves = 0;
    double pct_challenge_moves = 0;
    std::array<int, 3> resets_by_context{};  // indexed by Context

    std::array<double, 8> values() const {
        return {double(practice_tasks), double(challenge_started), double(challenge_completed), double(cube_resets),
                double(cube_moves),     pct_non_ai_moves,          pct_practice_moves,          pct_challenge_moves};
    }

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

/// Folds one student's events. Practice tasks are counted on completion, moves
/// and resets in every context. `scope` narrows resets to challenge tasks; the
/// per-context split is kept either way.
inline FeatureVector aggregate(const std::vector<SessionEvent>& events, const std::string& student_id,
                               ResetScope scope = ResetScope::AnyContext) {
    std::vector<SessionEvent> mine;
    for (const SessionEvent& e : events)
        if (e.student_id == student_id) mine.push_back(e);
    if (!validate_log(mine).empty()) throw Error(ErrorKind::Validation, "log failed validation");

    FeatureVector f;
    std::array<int, 3> moves{};
    for (const SessionEvent& e : mine) {
        switch (e.kind) {
            case EventKind::TaskStart:
                if (*e.task_kind == TaskKind::Challenge) ++f.challenge_started;
                break;
            case EventKind::TaskComplete:
                if (*e.task_kind == TaskKind::Challenge) ++f.challenge_completed;
                else ++f.practice_tasks;
                break;
            case EventKind::CubeMove: ++moves[static_cast<std::size_t>(e.context)]; break;
            case EventKind::CubeReset: ++f.resets_by_context[static_cast<std::size_t>(e.context)]; break;
            default: break;
        }
    }
    f.cube_moves = moves[0] + moves[1] + moves[2];
    f.cube_resets = scope == ResetScope::AnyContext
                        ? f.resets_by_context[0] + f.resets_by_context[1] + f.resets_by_context[2]
                        : f.resets_by_context[static_cast<std::size_t>(Context::Challenge)];
    if (f.cube_moves > 0) {
        const double total = f.cube_moves;
        f.pct_practice_moves = moves[static_cast<std::size_t>(Context::Practice)] / total;
        f.pct_challenge_moves = moves[static_cast<std::size_t>(Context::Challenge)] / total;
        f.pct_non_ai_moves = moves[static_cast<std::size_t>(Context::Free)] / total;
    }
    return f;
}

struct CohortFeatures {
    std::vector<std::string> students;  // sorted
    std::vector<FeatureVector> rows;
};

inline CohortFeatures aggregate_cohort(const std::vector<SessionEvent>& events, ResetScope scope = ResetScope::AnyContext) {
    if (!validate_log(events).empty()) throw Error(ErrorKind::Validation, "log failed validation");
    CohortFeatures out;
    for (const SessionEvent& e : events) out.students.push_back(e.student_id);
    std::sort(out.students.begin(), out.students.end());
    out.students.erase(std::unique(out.students.begin(), out.students.end()), out.students.end());
    for (const std::string& id : out.students) out.rows.push_back(aggregate(events, id, scope));
    return out;
}

/// Comma-separated, header `student_id` plus the eight feature names.
inline std::string features_to_csv(const CohortFeatures& c) {
    std::ostringstream out;
    out << "student_id";
    for (const char* name : kFeatureNames) out << ',' << name;
    out << '\n';
    out.precision(17);
    for (std::size_t i = 0; i < c.rows.size(); ++i) {
        out << c.students[i];
        for (double v : c.rows[i].values()) out << ',' << v;
        out << '\n';
    }
    return out.str();
}

/// Inverse of features_to_csv. The per-context reset split is not stored and reads back as zeros.
inline CohortFeatures parse_features_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::string header = "student_id";
    for (const char* name : kFeatureNames) header += std::string(",") + name;
    if (!std::getline(in, line) || line != header) throw Error(ErrorKind::Validation, "unexpected features header");
    CohortFeatures out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream rec(line);
        for (std::string field; std::getline(rec, field, ',');) f.push_back(field);
        const std::string where = "features line " + std::to_string(lineno);
        if (f.size() != 9) throw Error(ErrorKind::Validation, where + ": expected 9 fields");
        std::array<double, 8> v{};
        try {
            for (std::size_t i = 0; i < 8; ++i) v[i] = std::stod(f[i + 1]);
        } catch (const std::exception&) {
            throw Error(ErrorKind::Validation, where + ": bad number");
        }
        FeatureVector fv;
        int* counts[] = {&fv.practice_tasks, &fv.challenge_started, &fv.challenge_completed, &fv.cube_resets, &fv.cube_moves};
        for (std::size_t i = 0; i < 5; ++i) {
            if (v[i] < 0 || v[i] != std::floor(v[i])) throw Error(ErrorKind::Validation, where + ": counts must be whole");
            *counts[i] = static_cast<int>(v[i]);
        }
        fv.pct_non_ai_moves = v[5];
        fv.pct_practice_moves = v[6];
        fv.pct_challenge_moves = v[7];
        if (!out.students.empty() && f[0] <= out.students.back())
            throw Error(ErrorKind::Validation, where + ": student ids must be sorted and unique");
        out.students.push_back(f[0]);
        out.rows.push_back(fv);
    }
    return out;
}

}  // namespace cubetutor
