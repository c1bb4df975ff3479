#pragma once

// Live tutoring sessions: a per-session state machine whose every mutation is
// one appended SessionEvent, and a manager that persists and replays the logs.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <vector>

#include "cubetutor/guidance.hpp"
#include "cubetutor/telemetry.hpp"

namespace cubetutor::app {

// ---------------------------------------------------------------------------
// Tasks

struct TaskSpec {
    TaskKind kind = TaskKind::Practice;
    int id = 0;
    std::string title;
    CubeState start;
    MaskedPattern goal = white_cross_pattern();
    int max_moves = 0;
};

inline constexpr std::uint64_t kDefaultChallengeSeed = 17;
inline constexpr std::array<int, 2> kChallengeDepths = {3, 8};

/// Practice tasks are the scenario catalogue; challenges are one near and one
/// far white-cross position.
class TaskCatalog {
public:
    TaskCatalog() = default;
    TaskCatalog(std::vector<TaskSpec> practice, std::vector<TaskSpec> challenges)
        : practice_(std::move(practice)), challenges_(std::move(challenges)) {}

    static TaskCatalog build(const PatternDatabase& pdb, std::uint64_t scenario_seed = kDefaultScenarioSeed,
                             std::uint64_t challenge_seed = kDefaultChallengeSeed) {
        std::vector<TaskSpec> practice;
        for (const Scenario& s : scenario_catalog(scenario_seed, pdb))
            practice.push_back({TaskKind::Practice, s.id, s.title, s.start_state, s.goal, s.max_moves});
        std::vector<TaskSpec> challenges;
        std::mt19937_64 rng(challenge_seed);
        const std::array<const char*, 2> titles = {"Simple scramble", "Complex scramble"};
        for (std::size_t i = 0; i < kChallengeDepths.size(); ++i) {
            const int depth = kChallengeDepths[i];
            for (;;) {
                const CubeState s = scramble(rng(), depth < 6 ? depth : 25, pdb.metric()).first;
                if (heuristic(s, pdb) != depth) continue;
                challenges.push_back({TaskKind::Challenge, static_cast<int>(i) + 1, titles[i], s, white_cross_pattern(), depth});
                break;
            }
        }
        return TaskCatalog(std::move(practice), std::move(challenges));
    }

    const std::vector<TaskSpec>& practice() const { return practice_; }
    const std::vector<TaskSpec>& challenges() const { return challenges_; }

    const TaskSpec& find(TaskKind kind, int id) const {
        for (const TaskSpec& t : kind == TaskKind::Practice ? practice_ : challenges_)
            if (t.id == id) return t;
        throw invalid_argument("unknown " + to_string(kind) + " task " + std::to_string(id));
    }

private:
    std::vector<TaskSpec> practice_;
    std::vector<TaskSpec> challenges_;
};

// ---------------------------------------------------------------------------
// Replay

struct SessionState {
    std::string student_id;
    CubeState current;
    CubeState initial;  // reset target
    std::optional<std::pair<TaskKind, int>> active;
    bool ended = false;
    std::int64_t last_ts = 0;
    std::size_t event_count = 0;
};

/// The cube-visible effect of one logged event.
inline void apply_event(SessionState& s, const SessionEvent& e, const TaskCatalog& tasks) {
    ++s.event_count;
    s.last_ts = std::max(s.last_ts, e.ts);
    switch (e.kind) {
        case EventKind::SessionStart:
            s = SessionState{e.student_id, CubeState::solved(), CubeState::solved(), std::nullopt, false, e.ts, s.event_count};
            break;
        case EventKind::TaskStart: {
            const TaskSpec& t = tasks.find(*e.task_kind, *e.task_id);
            s.active = std::pair(t.kind, t.id);
            s.current = s.initial = t.start;
            break;
        }
        case EventKind::TaskComplete:
            s.active.reset();
            s.initial = CubeState::solved();
            break;
        case EventKind::CubeMove: s.current = apply_move(s.current, parse_move(*e.move)); break;
        case EventKind::CubeReset: s.current = s.initial; break;
        case EventKind::SessionEnd: s.ended = true; break;
        case EventKind::HintRequest:
        case EventKind::WalkthroughStep: break;
    }
}

inline SessionState replay(const std::vector<SessionEvent>& events, const TaskCatalog& tasks) {
    SessionState s;
    for (const SessionEvent& e : events) apply_event(s, e, tasks);
    return s;
}

// ---------------------------------------------------------------------------
// Sessions

struct Action {
    enum class Kind { Move, Reset, StartTask, CompleteTask, Hint, WalkthroughForward, WalkthroughRewind, End };
    Kind kind = Kind::Move;
    std::string move;
    TaskKind task_kind = TaskKind::Practice;
    int task_id = 0;
};

struct Snapshot {
    std::string id;
    std::string student_id;
    CubeState state;
    CubeState initial_state;
    std::optional<TaskSpec> active_task;
    bool goal_reached = false;
    bool ended = false;
    std::size_t event_count = 0;
    std::optional<std::size_t> walkthrough_cursor;
};

struct ActionResult {
    Snapshot snapshot;
    SessionEvent event;
    std::optional<Hint> hint;
    std::optional<WalkthroughStep> step;
};

/// The three faces hidden in the default view, as facelet letters.
struct MirrorView {
    std::string down, back, left;

    std::size_t size() const { return down.size() + back.size() + left.size(); }
};

inline MirrorView mirror_view(const CubeState& s) {
    auto face = [&](Face f) {
        std::string out;
        for (int i = 0; i < 9; ++i) out += color_letter(s[facelet_index(f, i)]);
        return out;
    };
    return {face(Face::Down), face(Face::Back), face(Face::Left)};
}

using Clock = std::function<std::int64_t()>;

inline std::int64_t wall_clock_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

struct AppConfig {
    std::string data_dir;  // empty keeps logs in memory only
    std::uint64_t scenario_seed = kDefaultScenarioSeed;
    std::uint64_t challenge_seed = kDefaultChallengeSeed;
    Clock clock = wall_clock_ms;
};

inline bool valid_student_id(const std::string& id) {
    if (id.empty() || id == "-" || id.size() > 64) return false;
    for (char c : id)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.') return false;
    return true;
}

class SessionManager {
public:
    SessionManager(const PatternDatabase& pdb, AppConfig config, const SubgoalGraph* graph = nullptr)
        : pdb_(pdb), graph_(graph), config_(std::move(config)),
          tasks_(TaskCatalog::build(pdb, config_.scenario_seed, config_.challenge_seed)) {
        if (!config_.data_dir.empty()) restore();
    }

    const TaskCatalog& tasks() const { return tasks_; }
    const AppConfig& config() const { return config_; }

    std::string create_session(const std::string& student_id) {
        if (!valid_student_id(student_id)) throw invalid_argument("invalid student_id");
        auto s = std::make_shared<Session>();
        std::lock_guard guard(s->mutex);  // held until session_start is logged
        {
            std::unique_lock lock(map_mutex_);
            char buf[32];
            std::snprintf(buf, sizeof buf, "sess-%06d", ++counter_);
            s->id = buf;
            sessions_[s->id] = s;
        }
        s->state.student_id = student_id;
        append(*s, {0, student_id, EventKind::SessionStart, {}, {}, {}, Context::Free});
        return s->id;
    }

    Snapshot snapshot(const std::string& id) const {
        auto s = get(id);
        std::lock_guard guard(s->mutex);
        return snapshot_of(*s);
    }

    ActionResult act(const std::string& id, const Action& a) {
        auto s = get(id);
        std::lock_guard guard(s->mutex);
        if (s->state.ended) throw Error(ErrorKind::Conflict, "session ended");
        ActionResult r;
        SessionEvent e{0, s->state.student_id, EventKind::CubeMove, {}, {}, {}, context_of(active_kind(*s))};
        switch (a.kind) {
            case Action::Kind::Move: {
                const Move m = parse_move(a.move);
                e.move = to_string(m);
                s->walkthrough.reset();
                break;
            }
            case Action::Kind::Reset:
                e.kind = EventKind::CubeReset;
                s->walkthrough.reset();
                break;
            case Action::Kind::StartTask: {
                const TaskSpec& t = tasks_.find(a.task_kind, a.task_id);
                e = {0, s->state.student_id, EventKind::TaskStart, t.kind, t.id, {}, context_of(t.kind)};
                s->walkthrough.reset();
                break;
            }
            case Action::Kind::CompleteTask: {
                if (!s->state.active) throw Error(ErrorKind::Conflict, "no active task");
                const TaskSpec& t = tasks_.find(s->state.active->first, s->state.active->second);
                if (!matches(s->state.current, t.goal)) throw Error(ErrorKind::Conflict, "goal not reached");
                e = {0, s->state.student_id, EventKind::TaskComplete, t.kind, t.id, {}, context_of(t.kind)};
                s->walkthrough.reset();
                break;
            }
            case Action::Kind::Hint:
                r.hint = hint(s->state.current, goal_of(*s), pdb_);
                e.kind = EventKind::HintRequest;
                break;
            case Action::Kind::WalkthroughForward: {
                if (!s->walkthrough || s->walkthrough->start_state() != s->state.current)
                    s->walkthrough = plan_walkthrough(s->state.current, goal_of(*s), pdb_, graph_);
                const Walkthrough next = s->walkthrough->step_forward();
                r.step = next.steps()[next.cursor() - 1];
                s->walkthrough = next;
                e.kind = EventKind::WalkthroughStep;
                e.move = to_string(r.step->move);
                break;
            }
            case Action::Kind::WalkthroughRewind: {
                if (!s->walkthrough) throw Error(ErrorKind::Conflict, "cursor at boundary");
                const Walkthrough prev = s->walkthrough->step_rewind();
                r.step = s->walkthrough->steps()[prev.cursor()];
                s->walkthrough = prev;
                e.kind = EventKind::WalkthroughStep;
                break;
            }
            case Action::Kind::End: e.kind = EventKind::SessionEnd; break;
        }
        r.event = append(*s, e);
        r.snapshot = snapshot_of(*s);
        return r;
    }

    MirrorView mirror(const std::string& id) const {
        auto s = get(id);
        std::lock_guard guard(s->mutex);
        return mirror_view(s->state.current);
    }

    /// The walkthrough in progress, or a fresh plan from the current state;
    /// either way nothing is logged or stored.
    Walkthrough walkthrough(const std::string& id) const {
        auto s = get(id);
        std::lock_guard guard(s->mutex);
        if (s->walkthrough && s->walkthrough->start_state() == s->state.current) return *s->walkthrough;
        return plan_walkthrough(s->state.current, goal_of(*s), pdb_, graph_);
    }

    std::vector<SessionEvent> events(const std::string& id) const {
        auto s = get(id);
        std::lock_guard guard(s->mutex);
        return s->events;
    }

    /// All events of one student across sessions, in session order.
    std::vector<SessionEvent> student_log(const std::string& student_id) const {
        std::vector<SessionEvent> out;
        for (const auto& s : all_sessions()) {
            std::lock_guard guard(s->mutex);
            if (s->state.student_id != student_id) continue;
            out.insert(out.end(), s->events.begin(), s->events.end());
        }
        return out;
    }

    std::vector<SessionEvent> all_events() const {
        std::vector<SessionEvent> out;
        for (const auto& s : all_sessions()) {
            std::lock_guard guard(s->mutex);
            out.insert(out.end(), s->events.begin(), s->events.end());
        }
        return out;
    }

    std::vector<std::string> session_ids() const {
        std::shared_lock lock(map_mutex_);
        std::vector<std::string> ids;
        for (const auto& [id, _] : sessions_) ids.push_back(id);
        return ids;
    }

private:
    struct Session {
        std::string id;
        mutable std::mutex mutex;
        SessionState state;
        std::vector<SessionEvent> events;
        std::optional<Walkthrough> walkthrough;
    };

    std::shared_ptr<Session> get(const std::string& id) const {
        std::shared_lock lock(map_mutex_);
        const auto it = sessions_.find(id);
        if (it == sessions_.end()) throw Error(ErrorKind::NotFound, "unknown session " + id);
        return it->second;
    }

    std::vector<std::shared_ptr<Session>> all_sessions() const {
        std::shared_lock lock(map_mutex_);
        std::vector<std::shared_ptr<Session>> out;
        for (const auto& [_, s] : sessions_) out.push_back(s);
        return out;
    }

    static std::optional<TaskKind> active_kind(const Session& s) {
        return s.state.active ? std::optional(s.state.active->first) : std::nullopt;
    }

    MaskedPattern goal_of(const Session& s) const {
        if (!s.state.active) return white_cross_pattern();
        return tasks_.find(s.state.active->first, s.state.active->second).goal;
    }

    Snapshot snapshot_of(const Session& s) const {
        Snapshot snap;
        snap.id = s.id;
        snap.student_id = s.state.student_id;
        snap.state = s.state.current;
        snap.initial_state = s.state.initial;
        if (s.state.active) snap.active_task = tasks_.find(s.state.active->first, s.state.active->second);
        snap.goal_reached = matches(s.state.current, goal_of(s));
        snap.ended = s.state.ended;
        snap.event_count = s.events.size();
        if (s.walkthrough) snap.walkthrough_cursor = s.walkthrough->cursor();
        return snap;
    }

    std::filesystem::path log_path(const std::string& id) const {
        return std::filesystem::path(config_.data_dir) / "sessions" / (id + ".log");
    }

    /// Stamps, persists and folds one event. Timestamps never run backwards.
    SessionEvent append(Session& s, SessionEvent e) {
        e.ts = std::max(config_.clock(), s.state.last_ts);
        if (!config_.data_dir.empty()) {
            std::ofstream out(log_path(s.id), std::ios::app | std::ios::binary);
            if (!out) throw Error(ErrorKind::Io, "cannot append to log of " + s.id);
            out << format_event(e) << '\n';
            out.flush();
        }
        s.events.push_back(e);
        apply_event(s.state, e, tasks_);
        return e;
    }

    void restore() {
        const auto dir = std::filesystem::path(config_.data_dir) / "sessions";
        std::filesystem::create_directories(dir);
        std::vector<std::filesystem::path> files;
        for (const auto& entry : std::filesystem::directory_iterator(dir))
            if (entry.path().extension() == ".log") files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        for (const auto& path : files) {
            auto s = std::make_shared<Session>();
            s->id = path.stem().string();
            s->events = read_log(path.string());
            if (s->events.empty()) continue;
            if (const auto v = validate_log(s->events); !v.empty())
                throw Error(ErrorKind::Validation, "session log " + s->id + ": " + v.front().message);
            s->state = replay(s->events, tasks_);
            int n = 0;
            if (std::sscanf(s->id.c_str(), "sess-%d", &n) == 1) counter_ = std::max(counter_, n);
            sessions_[s->id] = s;
        }
    }

    const PatternDatabase& pdb_;
    const SubgoalGraph* graph_;
    AppConfig config_;
    TaskCatalog tasks_;
    mutable std::shared_mutex map_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
    int counter_ = 0;
};

}  // namespace cubetutor::app
