#pragma once

// k-means (k-means++ seeding, Lloyd iterations, restarts), the elbow rule and
// the adjusted Rand index.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "cubetutor/analytics/stats.hpp"

namespace cubetutor::analytics {

struct ClusteringResult {
    int k = 0;
    std::vector<int> assignments;
    Eigen::MatrixXd centers;  // k x cols
    double wss = 0;
    std::vector<double> wss_curve;  // wss_curve[i] is the best wss at k = i + 1
    std::uint64_t seed = 0;
};

inline constexpr int kDefaultRestarts = 25;
inline constexpr int kDefaultMaxK = 8;

namespace cluster_detail {

inline constexpr int kMaxIterations = 300;

inline double sq_dist(const Eigen::MatrixXd& m, Eigen::Index row, const Eigen::MatrixXd& c, Eigen::Index center) {
    return (m.row(row) - c.row(center)).squaredNorm();
}

inline double total_wss(const Eigen::MatrixXd& m, const Eigen::MatrixXd& c, const std::vector<int>& a) {
    double s = 0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) s += sq_dist(m, i, c, a[static_cast<std::size_t>(i)]);
    return s;
}

inline Eigen::MatrixXd plus_plus(const Eigen::MatrixXd& m, int k, std::mt19937_64& rng) {
    const Eigen::Index n = m.rows();
    Eigen::MatrixXd c(k, m.cols());
    c.row(0) = m.row(std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng));
    std::vector<double> d(static_cast<std::size_t>(n), std::numeric_limits<double>::infinity());
    for (int j = 1; j < k; ++j) {
        double total = 0;
        for (Eigen::Index i = 0; i < n; ++i) {
            d[static_cast<std::size_t>(i)] = std::min(d[static_cast<std::size_t>(i)], sq_dist(m, i, c, j - 1));
            total += d[static_cast<std::size_t>(i)];
        }
        Eigen::Index pick = 0;
        if (total > 0) {
            std::discrete_distribution<Eigen::Index> draw(d.begin(), d.end());
            pick = draw(rng);
        } else {
            pick = std::uniform_int_distribution<Eigen::Index>(0, n - 1)(rng);
        }
        c.row(j) = m.row(pick);
    }
    return c;
}

/// Lloyd iterations from the given centers. Throws std::logic_error if the
/// objective ever rises, which would mean a bug in the update steps.
inline ClusteringResult lloyd(const Eigen::MatrixXd& m, Eigen::MatrixXd c) {
    const Eigen::Index n = m.rows();
    const auto k = static_cast<int>(c.rows());
    std::vector<int> a(static_cast<std::size_t>(n), -1);
    double prev = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double bd = sq_dist(m, i, c, 0);
            for (int j = 1; j < k; ++j) {
                const double dj = sq_dist(m, i, c, j);
                if (dj < bd) {
                    bd = dj;
                    best = j;
                }
            }
            if (a[static_cast<std::size_t>(i)] != best) {
                a[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, m.cols());
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(a[static_cast<std::size_t>(i)]) += m.row(i);
            ++counts[static_cast<std::size_t>(a[static_cast<std::size_t>(i)])];
        }
        for (int j = 0; j < k; ++j) {
            if (counts[static_cast<std::size_t>(j)] > 0) {
                c.row(j) = sums.row(j) / counts[static_cast<std::size_t>(j)];
                continue;
            }
            // Empty: move the center onto the point farthest from its own center.
            Eigen::Index far = 0;
            double fd = -1;
            for (Eigen::Index i = 0; i < n; ++i) {
                const double di = sq_dist(m, i, c, a[static_cast<std::size_t>(i)]);
                if (di > fd) {
                    fd = di;
                    far = i;
                }
            }
            c.row(j) = m.row(far);
            a[static_cast<std::size_t>(far)] = j;
        }
        const double w = total_wss(m, c, a);
        if (w > prev * (1 + 1e-12) + 1e-12) throw std::logic_error("k-means objective increased");
        prev = w;
    }
    ClusteringResult r;
    r.k = k;
    r.assignments = std::move(a);
    r.centers = std::move(c);
    r.wss = total_wss(m, r.centers, r.assignments);
    return r;
}

}  // namespace cluster_detail

/// Best of `restarts` k-means++ starts; restart r draws from substream (seed, r).
inline ClusteringResult kmeans(const Eigen::MatrixXd& m, int k, std::uint64_t seed, int restarts = kDefaultRestarts) {
    if (k < 1) throw invalid_argument("k must be at least 1");
    if (k > m.rows()) throw invalid_argument("k exceeds the number of rows");
    if (restarts < 1) throw invalid_argument("restarts must be at least 1");
    std::optional<ClusteringResult> best;
    for (int r = 0; r < restarts; ++r) {
        std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(r)};
        std::mt19937_64 rng(sq);
        ClusteringResult cand = cluster_detail::lloyd(m, cluster_detail::plus_plus(m, k, rng));
        if (!best || cand.wss < best->wss) best = std::move(cand);
    }
    best->seed = seed;
    return *best;
}

/// Best wss for k = 1..kmax (capped at the row count). A k whose restarts all
/// land above k-1 is rerun from the k-1 centers plus the worst-fit point, so
/// the curve never rises.
inline std::vector<double> wss_curve(const Eigen::MatrixXd& m, int kmax, std::uint64_t seed,
                                     int restarts = kDefaultRestarts) {
    const int top = std::min<int>(kmax, static_cast<int>(m.rows()));
    std::vector<double> curve;
    std::optional<ClusteringResult> prev;
    for (int k = 1; k <= top; ++k) {
        ClusteringResult r = kmeans(m, k, seed, restarts);
        if (prev && r.wss > prev->wss) {
            Eigen::Index far = 0;
            double fd = -1;
            for (Eigen::Index i = 0; i < m.rows(); ++i) {
                const double di = cluster_detail::sq_dist(m, i, prev->centers, prev->assignments[static_cast<std::size_t>(i)]);
                if (di > fd) {
                    fd = di;
                    far = i;
                }
            }
            Eigen::MatrixXd c(k, m.cols());
            c.topRows(k - 1) = prev->centers;
            c.row(k - 1) = m.row(far);
            ClusteringResult warm = cluster_detail::lloyd(m, c);
            if (warm.wss < r.wss) r = std::move(warm);
        }
        curve.push_back(r.wss);
        prev = std::move(r);
    }
    return curve;
}

/// argmax over k in [2, kmax-1] of the discrete second difference of the curve;
/// `curve[i]` is wss at k = i + 1. Near-ties (relative 1e-12) go to the smaller k.
inline int select_k_elbow(const std::vector<double>& curve) {
    if (curve.size() < 3) throw invalid_argument("wss curve too short for the elbow rule");
    double scale = 0;
    for (std::size_t i = 0; i < curve.size(); ++i) {
        if (!(curve[i] >= 0) || !std::isfinite(curve[i])) throw invalid_argument("wss values must be finite and non-negative");
        if (i > 0 && curve[i] > curve[i - 1] * (1 + 1e-12)) throw invalid_argument("wss curve must be non-increasing");
        scale = std::max(scale, curve[i]);
    }
    const double tol = 1e-12 * scale;
    int best_k = 2;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i + 1 < curve.size(); ++i) {
        const double d2 = curve[i - 1] - 2 * curve[i] + curve[i + 1];
        if (d2 > best + tol) {
            best = d2;
            best_k = static_cast<int>(i) + 1;
        }
    }
    return best_k;
}

/// Hubert-Arabie adjusted Rand index between two labelings of the same rows.
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.size() != b.size()) throw invalid_argument("labelings differ in length");
    const double n = static_cast<double>(a.size());
    std::map<std::pair<int, int>, double> joint;
    std::map<int, double> ra, rb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++joint[{a[i], b[i]}];
        ++ra[a[i]];
        ++rb[b[i]];
    }
    auto c2 = [](double x) { return x * (x - 1) / 2; };
    double sum_ij = 0, sum_a = 0, sum_b = 0;
    for (const auto& [_, v] : joint) sum_ij += c2(v);
    for (const auto& [_, v] : ra) sum_a += c2(v);
    for (const auto& [_, v] : rb) sum_b += c2(v);
    const double expected = sum_a * sum_b / c2(n);
    const double max_index = (sum_a + sum_b) / 2;
    if (max_index == expected) return 1.0;  // both trivial partitions
    return (sum_ij - expected) / (max_index - expected);
}

}  // namespace cubetutor::analytics
