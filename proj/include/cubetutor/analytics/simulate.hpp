#pragma once

// Synthetic cohorts built around the published three-cluster profile: z-space
// feature rows, an event log that aggregates back to them, and survey scores.

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cubetutor/analytics/gain.hpp"
#include "cubetutor/analytics/stats.hpp"
#include "cubetutor/telemetry.hpp"

namespace cubetutor::analytics {

inline constexpr std::array<const char*, 3> kClusterNames = {"Challengers", "Explorers", "Emerging Strategists"};

// Cluster centers in z-space, one row per cluster, columns in feature order.
inline constexpr std::array<std::array<double, 8>, 3> kProfileCenters = {{
    {0.02, 1.10, 0.93, 0.12, 0.60, -1.74, -0.16, 1.84},
    {1.16, 0.63, 1.00, -0.60, -0.16, -0.01, 1.17, -0.22},
    {-0.55, -0.69, -0.80, 0.24, -0.14, 0.62, -0.49, -0.54},
}};

// Raw-scale cohort means and standard deviations of the features.
inline constexpr std::array<double, 8> kFeatureMeans = {1.45, 1.94, 1.06, 8.23, 119.65, 0.87, 0.02, 0.11};
inline constexpr std::array<double, 8> kFeatureSds = {2.31, 2.48, 1.18, 7.94, 72.50, 0.20, 0.04, 0.19};

inline constexpr std::array<const char*, 5> kConstructs = {"cube_ability", "algorithmic_thinking", "critical_thinking",
                                                          "complex_problem_solving", "challenging_learning"};
inline constexpr std::array<double, 5> kConstructMeans = {1.81, 14.62, 18.84, 3.48, 4.42};
inline constexpr std::array<double, 5> kConstructSds = {1.01, 4.80, 2.44, 0.77, 0.56};
// Explorers minus Challengers, Challengers minus Emerging Strategists.
inline constexpr std::array<std::array<double, 2>, 5> kConstructOffsets = {{
    {0.06, 0.06}, {0.29, -0.38}, {-0.04, -0.43}, {-0.5, -0.2}, {0.79, -0.70}}};

inline constexpr double kPreMean = 0.58;
inline constexpr double kPreSd = 0.30;
inline constexpr std::array<double, 3> kGainMeans = {0.5, 0.0, 0.0};
inline constexpr double kGainSd = 0.15;

struct ScoreRecord {
    std::string student_id;
    double pre = 0, post = 0;
    std::array<double, 5> constructs{};
};

struct SimulatedCohort {
    FeatureMatrix z;                   // generated rows, before integer rounding
    std::vector<int> labels;           // index into kClusterNames
    std::vector<std::string> students;  // sorted, aligned with rows
    std::vector<SessionEvent> events;
    CohortFeatures features;           // aggregate_cohort(events)
    std::vector<ScoreRecord> scores;
    std::vector<GainRecord> gains;
};

namespace simulate_detail {

struct Plan {
    int practice = 0, started = 0, completed = 0, resets = 0;
    int free_moves = 0, practice_moves = 0, challenge_moves = 0;
    bool open_practice = false;  // practice moves with no completed practice task
};

inline int nonneg_round(double x) { return std::max(0, static_cast<int>(std::lround(x))); }

/// Rounds a z-space row to counts a session can realize.
inline Plan plan_from_row(const Eigen::RowVectorXd& zrow) {
    std::array<double, 8> raw{};
    for (std::size_t c = 0; c < 8; ++c) raw[c] = kFeatureMeans[c] + kFeatureSds[c] * zrow(static_cast<Eigen::Index>(c));
    Plan p;
    p.practice = nonneg_round(raw[0]);
    p.started = nonneg_round(raw[1]);
    p.completed = std::min(nonneg_round(raw[2]), p.started);
    p.resets = nonneg_round(raw[3]);
    const int moves = nonneg_round(raw[4]);
    std::array<double, 3> share = {std::max(0.0, raw[5]), std::max(0.0, raw[6]), std::max(0.0, raw[7])};
    const double total = share[0] + share[1] + share[2];
    if (total <= 0) share = {1, 0, 0};
    else for (double& s : share) s /= total;
    // Largest remainder keeps the three counts summing to `moves`.
    std::array<int, 3> alloc{};
    std::array<double, 3> rem{};
    int used = 0;
    for (std::size_t i = 0; i < 3; ++i) {
        const double exact = share[i] * moves;
        alloc[i] = static_cast<int>(std::floor(exact));
        rem[i] = exact - alloc[i];
        used += alloc[i];
    }
    for (int left = moves - used; left > 0; --left) {
        const auto i = static_cast<std::size_t>(std::max_element(rem.begin(), rem.end()) - rem.begin());
        ++alloc[i];
        rem[i] = -1;
    }
    p.free_moves = alloc[0];
    p.practice_moves = alloc[1];
    p.challenge_moves = alloc[2];
    if (p.challenge_moves > 0 && p.started == 0) p.started = 1;
    p.open_practice = p.practice_moves > 0 && p.practice == 0;
    return p;
}

inline std::vector<int> split(int total, int parts) {
    std::vector<int> out(static_cast<std::size_t>(std::max(parts, 0)), 0);
    for (int i = 0; i < total && parts > 0; ++i) ++out[static_cast<std::size_t>(i % parts)];
    return out;
}

inline std::vector<SessionEvent> session_events(const Plan& p, const std::string& student, std::int64_t t0,
                                                std::mt19937_64& rng) {
    std::vector<SessionEvent> out;
    std::int64_t ts = t0;
    std::optional<TaskKind> active;
    int active_id = 0;
    std::uniform_int_distribution<int> gap(400, 4000), move_pick(0, 17), task_pick(1, 9);
    auto emit = [&](EventKind k, std::optional<TaskKind> tk = {}, std::optional<int> id = {},
                    std::optional<std::string> mv = {}) {
        Context ctx = context_of(active);
        if (k == EventKind::TaskStart || k == EventKind::TaskComplete) ctx = context_of(tk);
        out.push_back({ts, student, k, tk, id, std::move(mv), ctx});
        ts += gap(rng);
    };
    auto moves = [&](int n) {
        for (int i = 0; i < n; ++i) emit(EventKind::CubeMove, {}, {}, to_string(Move::from_index(move_pick(rng))));
    };
    auto begin = [&](TaskKind k, int id) {
        emit(EventKind::TaskStart, k, id);
        active = k;
        active_id = id;
    };
    auto complete = [&] {
        emit(EventKind::TaskComplete, active, active_id);
        active.reset();
    };

    // Segments: free play, completed practice, completed challenges, then
    // tasks left open until the next start or the end of the session.
    const int practice_tasks = p.practice + (p.open_practice ? 1 : 0);
    const int segments = 1 + practice_tasks + p.started;
    const std::vector<int> resets = split(p.resets, segments);
    const std::vector<int> pm = split(p.practice_moves, practice_tasks);
    const std::vector<int> cm = split(p.challenge_moves, p.started);
    int seg = 0;
    auto reset_burst = [&] {
        for (int i = 0; i < resets[static_cast<std::size_t>(seg)]; ++i) emit(EventKind::CubeReset);
        ++seg;
    };

    emit(EventKind::SessionStart);
    moves(p.free_moves);
    reset_burst();
    for (int i = 0; i < p.practice; ++i) {
        begin(TaskKind::Practice, task_pick(rng));
        emit(EventKind::HintRequest);
        moves(pm[static_cast<std::size_t>(i)]);
        reset_burst();
        complete();
    }
    for (int i = 0; i < p.completed; ++i) {
        begin(TaskKind::Challenge, 1 + i % 2);
        moves(cm[static_cast<std::size_t>(i)]);
        reset_burst();
        complete();
    }
    if (p.open_practice) {
        begin(TaskKind::Practice, task_pick(rng));
        emit(EventKind::WalkthroughStep);
        moves(pm.back());
        reset_burst();
    }
    for (int i = p.completed; i < p.started; ++i) {
        begin(TaskKind::Challenge, 1 + i % 2);
        moves(cm[static_cast<std::size_t>(i)]);
        reset_burst();
    }
    emit(EventKind::SessionEnd);
    return out;
}

}  // namespace simulate_detail

/// `n_per_cluster` students per profile, rows = center + N(0, noise_sd) in
/// z-space. Students are s001, s002, ... grouped by cluster.
inline SimulatedCohort simulate_cohort(int n_per_cluster, double noise_sd, std::uint64_t seed) {
    if (n_per_cluster < 2) throw invalid_argument("n_per_cluster must be at least 2");
    if (!(noise_sd >= 0)) throw invalid_argument("noise_sd must be non-negative");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const int n = 3 * n_per_cluster;
    SimulatedCohort out;
    out.z = FeatureMatrix(n, 8);
    char id[16];
    for (int i = 0; i < n; ++i) {
        const int label = i / n_per_cluster;
        out.labels.push_back(label);
        for (std::size_t c = 0; c < 8; ++c)
            out.z(i, static_cast<Eigen::Index>(c)) = kProfileCenters[static_cast<std::size_t>(label)][c] + noise_sd * normal(rng);
        std::snprintf(id, sizeof id, "s%03d", i + 1);
        out.students.emplace_back(id);
    }
    const std::int64_t t0 = 1'700'000'000'000;
    for (int i = 0; i < n; ++i) {
        const auto plan = simulate_detail::plan_from_row(out.z.row(i));
        const auto ev = simulate_detail::session_events(plan, out.students[static_cast<std::size_t>(i)],
                                                        t0 + 10'000'000LL * i, rng);
        out.events.insert(out.events.end(), ev.begin(), ev.end());
    }
    out.features = aggregate_cohort(out.events);

    for (int i = 0; i < n; ++i) {
        const auto label = static_cast<std::size_t>(out.labels[static_cast<std::size_t>(i)]);
        ScoreRecord s;
        s.student_id = out.students[static_cast<std::size_t>(i)];
        for (std::size_t c = 0; c < 5; ++c) {
            // Cluster means placed by the offsets, then centered on the cohort mean.
            const double expl = kConstructOffsets[c][0], emerg = -kConstructOffsets[c][1];
            const std::array<double, 3> shift = {0.0, expl, emerg};
            const double centering = (shift[0] + shift[1] + shift[2]) / 3;
            s.constructs[c] = kConstructMeans[c] + shift[label] - centering + kConstructSds[c] * normal(rng);
        }
        s.pre = std::clamp(kPreMean + kPreSd * normal(rng), 0.0, 1.0);
        const double g = std::clamp(kGainMeans[label] + kGainSd * normal(rng), -1.0, 1.0);
        s.post = std::clamp(g >= 0 ? s.pre + g * (1 - s.pre) : s.pre + g * s.pre, 0.0, 1.0);
        out.gains.push_back(normalized_gain(s.pre, s.post));
        out.scores.push_back(s);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Score files

inline std::string scores_to_csv(const std::vector<ScoreRecord>& scores) {
    std::ostringstream out;
    out << "student_id,pre,post";
    for (const char* c : kConstructs) out << ',' << c;
    out << '\n';
    out.precision(17);
    for (const ScoreRecord& s : scores) {
        out << s.student_id << ',' << s.pre << ',' << s.post;
        for (double v : s.constructs) out << ',' << v;
        out << '\n';
    }
    return out.str();
}

inline std::vector<ScoreRecord> parse_scores_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::Validation, "scores file is empty");
    std::string expected = "student_id,pre,post";
    for (const char* c : kConstructs) expected += std::string(",") + c;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected) throw Error(ErrorKind::Validation, "unexpected scores header");
    std::vector<ScoreRecord> out;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream rec(line);
        for (std::string field; std::getline(rec, field, ',');) f.push_back(field);
        if (f.size() != 8) throw Error(ErrorKind::Validation, "scores line " + std::to_string(lineno) + ": expected 8 fields");
        ScoreRecord s;
        s.student_id = f[0];
        try {
            s.pre = std::stod(f[1]);
            s.post = std::stod(f[2]);
            for (std::size_t c = 0; c < 5; ++c) s.constructs[c] = std::stod(f[c + 3]);
        } catch (const std::exception&) {
            throw Error(ErrorKind::Validation, "scores line " + std::to_string(lineno) + ": bad number");
        }
        out.push_back(s);
    }
    return out;
}

inline std::vector<ScoreRecord> read_scores(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scores_csv(buf.str());
}

}  // namespace cubetutor::analytics
