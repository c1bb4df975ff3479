#pragma once

// Exact solving to masked goals inside the cross abstraction: a retrograde
// breadth-first pattern database and IDA* over cross coordinates.

#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "cubetutor/cross.hpp"

namespace cubetutor {

/// Exact distance-to-goal for every cross coordinate.
class PatternDatabase {
public:
    static constexpr std::uint8_t kUnreached = 0xFF;

    PatternDatabase(MaskedPattern goal, Metric metric, std::vector<std::uint8_t> table)
        : goal_(std::move(goal)), metric_(metric), table_(std::move(table)) {
        if (table_.size() != kCrossSize) throw invalid_argument("pattern database must have 190080 entries");
        for (std::uint8_t d : table_) {
            if (d == kUnreached) throw invalid_argument("pattern database is not total");
            max_depth_ = std::max<int>(max_depth_, d);
        }
    }

    const MaskedPattern& goal() const { return goal_; }
    Metric metric() const { return metric_; }
    int max_depth() const { return max_depth_; }
    std::size_t size() const { return table_.size(); }
    const std::vector<std::uint8_t>& table() const { return table_; }

    int distance(CrossCoordinate c) const { return table_[c.value]; }

private:
    MaskedPattern goal_;
    Metric metric_;
    std::vector<std::uint8_t> table_;
    int max_depth_ = 0;
};

/// Level-synchronous BFS backward from every coordinate matching `goal`.
inline PatternDatabase build_pdb(const MaskedPattern& goal, Metric metric) {
    const CrossGoal compiled(goal);
    const auto& next = cross_move_table();
    std::vector<std::uint8_t> dist(kCrossSize, PatternDatabase::kUnreached);
    std::vector<std::uint32_t> frontier;
    for (std::uint32_t c = 0; c < kCrossSize; ++c)
        if (compiled.matches(CrossCoordinate{c})) {
            dist[c] = 0;
            frontier.push_back(c);
        }
    if (frontier.empty()) throw invalid_argument("goal has an empty match set");
    std::vector<int> inverse_moves;
    for (Move m : generators(metric)) inverse_moves.push_back(m.inverse().index());
    std::uint8_t depth = 0;
    while (!frontier.empty()) {
        std::vector<std::uint32_t> following;
        for (std::uint32_t c : frontier)
            for (int mi : inverse_moves) {
                const std::uint32_t n = next[static_cast<std::size_t>(c) * 18 + static_cast<std::size_t>(mi)];
                if (dist[n] != PatternDatabase::kUnreached) continue;
                dist[n] = static_cast<std::uint8_t>(depth + 1);
                following.push_back(n);
            }
        frontier = std::move(following);
        ++depth;
    }
    return PatternDatabase(goal, metric, std::move(dist));
}

inline int heuristic(const CubeState& state, const PatternDatabase& pdb) {
    return pdb.distance(cross_coordinate(state));
}

// ---------------------------------------------------------------------------
// File format: little-endian, 16-byte header then one byte per coordinate.
//   0..3   "XPDB"
//   4..7   version (1)
//   8..11  metric (0 = QTM, 1 = HTM)
//   12..15 max_depth

inline constexpr std::uint32_t kPdbVersion = 1;

inline void save_pdb(const PatternDatabase& pdb, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
    auto put32 = [&](std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out.put(static_cast<char>((v >> (8 * i)) & 0xFF));
    };
    out.write("XPDB", 4);
    put32(kPdbVersion);
    put32(pdb.metric() == Metric::QTM ? 0 : 1);
    put32(static_cast<std::uint32_t>(pdb.max_depth()));
    out.write(reinterpret_cast<const char*>(pdb.table().data()), static_cast<std::streamsize>(pdb.table().size()));
    if (!out) throw Error(ErrorKind::Io, "short write to " + path);
}

/// Loads a database; the goal is not stored in the file and defaults to the white cross.
inline PatternDatabase load_pdb(const std::string& path, const MaskedPattern& goal = white_cross_pattern()) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
    std::array<unsigned char, 16> header{};
    in.read(reinterpret_cast<char*>(header.data()), 16);
    if (!in || header[0] != 'X' || header[1] != 'P' || header[2] != 'D' || header[3] != 'B')
        throw Error(ErrorKind::Io, path + ": not a pattern database");
    auto get32 = [&](int offset) {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(header[static_cast<std::size_t>(offset + i)]) << (8 * i);
        return v;
    };
    if (get32(4) != kPdbVersion) throw Error(ErrorKind::Io, path + ": unsupported version");
    const std::uint32_t metric = get32(8);
    if (metric > 1) throw Error(ErrorKind::Io, path + ": bad metric field");
    std::vector<std::uint8_t> table(kCrossSize);
    in.read(reinterpret_cast<char*>(table.data()), static_cast<std::streamsize>(table.size()));
    if (!in) throw Error(ErrorKind::Io, path + ": truncated table");
    PatternDatabase pdb(goal, metric == 0 ? Metric::QTM : Metric::HTM, std::move(table));
    if (static_cast<std::uint32_t>(pdb.max_depth()) != get32(12)) throw Error(ErrorKind::Io, path + ": max_depth mismatch");
    return pdb;
}

// ---------------------------------------------------------------------------

struct Solution {
    MoveSequence seq;
    std::uint64_t nodes_expanded = 0;
    bool optimal = true;
};

namespace solver_detail {

class Ida {
public:
    Ida(const PatternDatabase& pdb) : pdb_(pdb), next_(cross_move_table()), moves_(generators(pdb.metric())) {}

    Solution run(CrossCoordinate start) {
        Solution out;
        out.seq.metric = pdb_.metric();
        int bound = pdb_.distance(start);
        for (;;) {
            path_.clear();
            const int t = search(start.value, 0, bound);
            if (t == kFound) break;
            bound = t;
        }
        out.seq.moves = path_;
        out.nodes_expanded = expanded_;
        return out;
    }

private:
    static constexpr int kFound = -1;

    int search(std::uint32_t c, int g, int bound) {
        ++expanded_;
        const int h = pdb_.distance(CrossCoordinate{c});
        if (g + h > bound) return g + h;
        if (h == 0) return kFound;
        int least = std::numeric_limits<int>::max();
        for (Move m : moves_) {
            if (!path_.empty()) {
                const Move last = path_.back();
                if (pdb_.metric() == Metric::HTM && last.face == m.face) continue;
                if (pdb_.metric() == Metric::QTM && last == m.inverse()) continue;
            }
            path_.push_back(m);
            const int t = search(next_[static_cast<std::size_t>(c) * 18 + static_cast<std::size_t>(m.index())], g + 1, bound);
            if (t == kFound) return kFound;
            least = std::min(least, t);
            path_.pop_back();
        }
        return least;
    }

    const PatternDatabase& pdb_;
    const std::vector<std::uint32_t>& next_;
    std::span<const Move> moves_;
    std::vector<Move> path_;
    std::uint64_t expanded_ = 0;
};

}  // namespace solver_detail

/// Thread-safe memo of per-pattern distance tables.
class DistanceCache {
public:
    std::shared_ptr<const PatternDatabase> get(const MaskedPattern& pattern, Metric metric) {
        const std::string key = pattern.to_string() + to_string(metric);
        {
            std::lock_guard lock(mutex_);
            if (auto it = tables_.find(key); it != tables_.end()) return it->second;
        }
        auto built = std::make_shared<const PatternDatabase>(build_pdb(pattern, metric));
        std::lock_guard lock(mutex_);
        return tables_.emplace(key, std::move(built)).first->second;
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return tables_.size();
    }

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::shared_ptr<const PatternDatabase>> tables_;
};

/// Minimal path into the match set of `node`. The search runs on an exact
/// distance table for `node` (built with `pdb`'s metric, memoised in `cache`
/// when given); `pdb` is reused directly when it was built for `node`.
inline Solution solve_to_node(const CubeState& state, const MaskedPattern& node, const PatternDatabase& pdb,
                              DistanceCache* cache = nullptr) {
    if (node.is_universal()) return Solution{MoveSequence{{}, pdb.metric()}, 0, true};
    if (node == pdb.goal()) return solver_detail::Ida(pdb).run(cross_coordinate(state));
    std::shared_ptr<const PatternDatabase> table;
    if (cache) {
        table = cache->get(node, pdb.metric());
    } else {
        table = std::make_shared<const PatternDatabase>(build_pdb(node, pdb.metric()));
    }
    return solver_detail::Ida(*table).run(cross_coordinate(state));
}

/// IDA* with the database heuristic; ties resolve to the first path in move
/// order U, D, F, B, L, R x turns 1, 2, 3.
inline Solution solve_optimal(const CubeState& state, const MaskedPattern& goal, const PatternDatabase& pdb) {
    if (!(goal == pdb.goal())) return solve_to_node(state, goal, pdb);
    return solver_detail::Ida(pdb).run(cross_coordinate(state));
}

inline Solution solve_optimal(const CubeState& state, const PatternDatabase& pdb) {
    return solver_detail::Ida(pdb).run(cross_coordinate(state));
}

}  // namespace cubetutor
