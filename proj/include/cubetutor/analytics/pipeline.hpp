#pragma once

// Log + scores -> features -> clusters -> contrasts and regressions -> report files.

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "cubetutor/analytics/bayes.hpp"
#include "cubetutor/analytics/cluster.hpp"
#include "cubetutor/analytics/simulate.hpp"

namespace cubetutor::analytics {

struct PipelineOptions {
    std::uint64_t seed = 1;
    int kmax = kDefaultMaxK;
    int restarts = kDefaultRestarts;
    int draws = kDefaultDraws;
};

struct ConstructContrasts {
    std::string construct;
    std::vector<ContrastResult> contrasts;
};

struct PipelineResult {
    CohortFeatures features;
    Standardized standardized;
    std::vector<double> wss_curve;
    int k = 0;
    ClusteringResult clustering;               // ids relabelled by first appearance
    std::vector<std::string> cluster_names;    // by cluster id
    std::vector<ScoreRecord> scores;           // aligned with features.students
    std::vector<GainRecord> gains;
    std::vector<ConstructContrasts> contrasts;
    RegressionPosterior post_model;            // post ~ clusters + pre
    RegressionPosterior gain_model;            // gain ~ clusters
    std::string reference;
    std::vector<std::string> warnings;

    std::string cluster_of(std::size_t row) const {
        return cluster_names[static_cast<std::size_t>(clustering.assignments[row])];
    }
};

namespace pipeline_detail {

inline FeatureMatrix to_matrix(const CohortFeatures& c) {
    FeatureMatrix m(static_cast<Eigen::Index>(c.rows.size()), 8);
    for (std::size_t i = 0; i < c.rows.size(); ++i) {
        const auto v = c.rows[i].values();
        for (std::size_t j = 0; j < 8; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[j];
    }
    return m;
}

inline void relabel_by_first_appearance(ClusteringResult& r) {
    std::vector<int> map(static_cast<std::size_t>(r.k), -1);
    int next = 0;
    for (int a : r.assignments)
        if (map[static_cast<std::size_t>(a)] < 0) map[static_cast<std::size_t>(a)] = next++;
    for (int& m : map)
        if (m < 0) m = next++;
    Eigen::MatrixXd centers(r.centers.rows(), r.centers.cols());
    for (int j = 0; j < r.k; ++j) centers.row(map[static_cast<std::size_t>(j)]) = r.centers.row(j);
    r.centers = centers;
    for (int& a : r.assignments) a = map[static_cast<std::size_t>(a)];
}

/// With three clusters, the profile assignment with the least total squared
/// center distance; otherwise generic names.
inline std::vector<std::string> name_clusters(const Eigen::MatrixXd& centers) {
    const auto k = static_cast<int>(centers.rows());
    std::vector<std::string> names;
    if (k != 3) {
        for (int j = 0; j < k; ++j) names.push_back("Cluster " + std::to_string(j + 1));
        return names;
    }
    std::array<int, 3> perm = {0, 1, 2}, best = perm;
    double best_cost = std::numeric_limits<double>::infinity();
    do {
        double cost = 0;
        for (std::size_t j = 0; j < 3; ++j)
            for (std::size_t c = 0; c < 8; ++c) {
                const double d = centers(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(c)) -
                                 kProfileCenters[static_cast<std::size_t>(perm[j])][c];
                cost += d * d;
            }
        if (cost < best_cost) {
            best_cost = cost;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (int p : best) names.emplace_back(kClusterNames[static_cast<std::size_t>(p)]);
    return names;
}

inline std::string fmt(double v, int digits = 3) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    std::string s = buf;
    if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);  // no "-0.000"
    return s;
}

}  // namespace pipeline_detail

inline PipelineResult run_pipeline(const std::vector<SessionEvent>& events, const std::vector<ScoreRecord>& scores,
                                   const PipelineOptions& opt = {}) {
    using namespace pipeline_detail;
    PipelineResult r;
    r.features = aggregate_cohort(events);
    const std::size_t n = r.features.students.size();

    std::map<std::string, ScoreRecord> by_id;
    for (const ScoreRecord& s : scores)
        if (!by_id.emplace(s.student_id, s).second)
            throw Error(ErrorKind::Validation, "duplicate scores for student " + s.student_id);
    for (const std::string& id : r.features.students) {
        const auto it = by_id.find(id);
        if (it == by_id.end()) throw Error(ErrorKind::Validation, "no scores for student " + id);
        r.scores.push_back(it->second);
        r.gains.push_back(normalized_gain(it->second.pre, it->second.post));
    }
    if (by_id.size() != n) r.warnings.push_back(std::to_string(by_id.size() - n) + " score rows have no log");

    std::vector<std::string> names(kFeatureNames.begin(), kFeatureNames.end());
    r.standardized = standardize(to_matrix(r.features), names);
    for (const auto& w : r.standardized.warnings) r.warnings.push_back(w);
    const FeatureMatrix& z = r.standardized.z;
    r.wss_curve = wss_curve(z, opt.kmax, opt.seed, opt.restarts);
    r.k = select_k_elbow(r.wss_curve);
    r.clustering = kmeans(z, r.k, opt.seed, opt.restarts);
    r.clustering.wss_curve = r.wss_curve;
    relabel_by_first_appearance(r.clustering);
    r.cluster_names = name_clusters(r.clustering.centers);

    // Contrast order puts the reference first, then the remaining profiles.
    std::vector<std::string> order;
    if (r.k == 3) order = {"Explorers", "Challengers", "Emerging Strategists"};
    else order = r.cluster_names;
    r.reference = order.front();

    std::vector<std::string> labels;
    std::map<std::string, int> sizes;
    for (std::size_t i = 0; i < n; ++i) {
        labels.push_back(r.cluster_of(i));
        ++sizes[labels.back()];
    }
    std::vector<std::string> contrast_order;
    for (const auto& g : order) {
        if (sizes[g] >= 2) contrast_order.push_back(g);
        else r.warnings.push_back("cluster " + g + " has fewer than 2 members; left out of contrasts");
    }
    for (std::size_t c = 0; c < kConstructs.size(); ++c) {
        std::vector<double> values;
        std::vector<std::string> kept;
        for (std::size_t i = 0; i < n; ++i) {
            if (sizes[labels[i]] < 2) continue;
            values.push_back(r.scores[i].constructs[c]);
            kept.push_back(labels[i]);
        }
        ConstructContrasts cc{kConstructs[c], {}};
        if (contrast_order.size() >= 2) cc.contrasts = posterior_contrast(values, kept, opt.draws, opt.seed, contrast_order);
        r.contrasts.push_back(std::move(cc));
    }

    std::vector<double> pre, post, gain;
    for (std::size_t i = 0; i < n; ++i) {
        pre.push_back(r.scores[i].pre);
        post.push_back(r.scores[i].post);
        gain.push_back(r.gains[i].gain);
    }
    const Design with_pre = dummy_design(labels, order, r.reference, &pre, "pre");
    r.post_model = regression_posterior(Eigen::Map<const Eigen::VectorXd>(post.data(), static_cast<Eigen::Index>(n)),
                                        with_pre, opt.draws, opt.seed);
    const Design plain = dummy_design(labels, order, r.reference);
    r.gain_model = regression_posterior(Eigen::Map<const Eigen::VectorXd>(gain.data(), static_cast<Eigen::Index>(n)),
                                        plain, opt.draws, opt.seed);
    return r;
}

/// Report files by name, each a tab-separated table with a header row.
inline std::map<std::string, std::string> render_reports(const PipelineResult& r) {
    using pipeline_detail::fmt;
    std::map<std::string, std::string> files;
    const std::size_t n = r.features.students.size();

    std::string t3 = "variable\tn\tmean\tsd\n";
    auto add_row = [&](const std::string& name, const std::vector<double>& v) {
        t3 += name + '\t' + std::to_string(v.size()) + '\t' + fmt(mean(v), 2) + '\t' + fmt(sample_sd(v), 2) + '\n';
    };
    for (std::size_t c = 0; c < 8; ++c) {
        std::vector<double> v;
        for (const auto& row : r.features.rows) v.push_back(row.values()[c]);
        add_row(kFeatureNames[c], v);
    }
    std::vector<double> pre, post, gain;
    for (std::size_t i = 0; i < n; ++i) {
        pre.push_back(r.scores[i].pre);
        post.push_back(r.scores[i].post);
        gain.push_back(r.gains[i].gain);
    }
    for (std::size_t c = 0; c < kConstructs.size(); ++c) {
        std::vector<double> v;
        for (const auto& s : r.scores) v.push_back(s.constructs[c]);
        add_row(kConstructs[c], v);
    }
    add_row("pre", pre);
    add_row("post", post);
    add_row("normalized_gain", gain);
    files["table3_descriptives.tsv"] = t3;

    std::string t4 = "cluster\tn";
    for (const char* f : kFeatureNames) t4 += std::string("\t") + f;
    t4 += '\n';
    for (int j = 0; j < r.k; ++j) {
        const auto size = std::count(r.clustering.assignments.begin(), r.clustering.assignments.end(), j);
        t4 += r.cluster_names[static_cast<std::size_t>(j)] + '\t' + std::to_string(size);
        for (Eigen::Index c = 0; c < 8; ++c) t4 += '\t' + fmt(r.clustering.centers(j, c), 2);
        t4 += '\n';
    }
    files["table4_clusters.tsv"] = t4;

    std::string t5 = "construct\tgroup_a\tgroup_b\tmean_diff\tlower\tupper\tprob_gt_zero\tverdict\n";
    for (const auto& cc : r.contrasts)
        for (const auto& c : cc.contrasts)
            t5 += cc.construct + '\t' + c.group_a + '\t' + c.group_b + '\t' + fmt(c.mean_diff, 2) + '\t' +
                  fmt(c.lower, 2) + '\t' + fmt(c.upper, 2) + '\t' + fmt(c.prob_gt_zero, 3) + '\t' +
                  to_string(c.verdict) + '\n';
    files["table5_contrasts.tsv"] = t5;

    std::string t6 = "model\tterm\testimate\tlower\tupper\n";
    auto add_model = [&](const std::string& model, const RegressionPosterior& p) {
        for (std::size_t i = 0; i < p.names.size(); ++i)
            t6 += model + '\t' + p.names[i] + '\t' + fmt(p.mean[i], 2) + '\t' + fmt(p.lower[i], 2) + '\t' +
                  fmt(p.upper[i], 2) + '\n';
    };
    add_model("post ~ cluster + pre", r.post_model);
    add_model("gain ~ cluster", r.gain_model);
    files["table6_regression.tsv"] = t6;

    std::string assign = "student_id\tcluster\n";
    for (std::size_t i = 0; i < n; ++i) assign += r.features.students[i] + '\t' + r.cluster_of(i) + '\n';
    files["clusters.tsv"] = assign;

    std::string summary = "students\t" + std::to_string(n) + "\nk\t" + std::to_string(r.k) + "\nreference\t" +
                          r.reference + "\nwss";
    for (double w : r.wss_curve) summary += '\t' + fmt(w, 4);
    summary += '\n';
    for (const auto& w : r.warnings) summary += "warning\t" + w + '\n';
    files["summary.tsv"] = summary;
    return files;
}

inline void write_reports(const PipelineResult& r, const std::string& dir) {
    std::filesystem::create_directories(dir);
    for (const auto& [name, text] : render_reports(r)) {
        std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
        if (!out) throw Error(ErrorKind::Io, "cannot write " + dir + "/" + name);
        out << text;
    }
}

}  // namespace cubetutor::analytics
