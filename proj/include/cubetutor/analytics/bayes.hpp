#pragma once

// Flat-prior Bayesian summaries with closed-form posteriors and seeded Monte
// Carlo draws: pairwise group-mean contrasts and linear regression.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "cubetutor/analytics/stats.hpp"

namespace cubetutor::analytics {

enum class Verdict { Likely, Suggestive, Inconclusive };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Likely: return "likely";
        case Verdict::Suggestive: return "suggestive";
        case Verdict::Inconclusive: return "inconclusive";
    }
    return "?";
}

inline Verdict verdict_for(double prob_gt_zero) {
    const double p = std::max(prob_gt_zero, 1 - prob_gt_zero);
    if (p >= 0.95) return Verdict::Likely;
    if (p >= 0.85) return Verdict::Suggestive;
    return Verdict::Inconclusive;
}

struct ContrastResult {
    std::string group_a, group_b;
    double mean_diff = 0;  // posterior mean of mu_a - mu_b
    double lower = 0, upper = 0;  // central 95% interval
    double prob_gt_zero = 0;
    Verdict verdict = Verdict::Inconclusive;
};

inline constexpr int kDefaultDraws = 10000;

namespace bayes_detail {

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::mt19937_64 substream(std::uint64_t seed, const std::string& label) {
    const std::uint64_t h = fnv1a(label);
    std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                     static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32)};
    return std::mt19937_64(sq);
}

}  // namespace bayes_detail

/// Every pair of groups, in `group_order` (default: order of first
/// appearance). Each group mean has a Student-t posterior on n-1 degrees of
/// freedom; a group's draws depend only on (seed, label), so swapping the
/// pair negates the same draws.
inline std::vector<ContrastResult> posterior_contrast(const std::vector<double>& values,
                                                      const std::vector<std::string>& labels, int draws,
                                                      std::uint64_t seed, std::vector<std::string> group_order = {}) {
    if (values.size() != labels.size()) throw invalid_argument("values and labels differ in length");
    if (draws < 1) throw invalid_argument("draws must be positive");
    std::map<std::string, std::vector<double>> groups;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!groups.count(labels[i]) && std::find(group_order.begin(), group_order.end(), labels[i]) == group_order.end())
            group_order.push_back(labels[i]);
        groups[labels[i]].push_back(values[i]);
    }
    std::erase_if(group_order, [&](const std::string& g) { return !groups.count(g); });
    if (group_order.size() < 2) throw invalid_argument("need at least two groups");
    for (const std::string& g : group_order)
        if (groups[g].size() < 2) throw invalid_argument("group '" + g + "' has fewer than 2 observations");

    std::map<std::string, std::vector<double>> mu;
    for (const std::string& g : group_order) {
        const auto& v = groups[g];
        const double n = static_cast<double>(v.size());
        const double m = mean(v);
        const double se = sample_sd(v) / std::sqrt(n);
        std::mt19937_64 rng = bayes_detail::substream(seed, g);
        std::student_t_distribution<double> t(n - 1);
        auto& out = mu[g];
        out.resize(static_cast<std::size_t>(draws));
        for (double& x : out) x = m + se * t(rng);
    }

    std::vector<ContrastResult> out;
    for (std::size_t i = 0; i < group_order.size(); ++i) {
        for (std::size_t j = i + 1; j < group_order.size(); ++j) {
            const auto& a = mu[group_order[i]];
            const auto& b = mu[group_order[j]];
            std::vector<double> d(a.size());
            int positive = 0;
            for (std::size_t s = 0; s < d.size(); ++s) {
                d[s] = a[s] - b[s];
                positive += d[s] > 0;
            }
            ContrastResult r;
            r.group_a = group_order[i];
            r.group_b = group_order[j];
            r.mean_diff = mean(d);
            std::sort(d.begin(), d.end());
            r.lower = quantile_sorted(d, 0.025);
            r.upper = quantile_sorted(d, 0.975);
            r.prob_gt_zero = static_cast<double>(positive) / draws;
            r.verdict = verdict_for(r.prob_gt_zero);
            out.push_back(r);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Regression

struct Design {
    Eigen::MatrixXd x;
    std::vector<std::string> names;
};

/// Intercept, one dummy per level other than `reference`, then an optional covariate.
inline Design dummy_design(const std::vector<std::string>& labels, const std::vector<std::string>& levels,
                           const std::string& reference, const std::vector<double>* covariate = nullptr,
                           const std::string& covariate_name = "covariate") {
    if (std::find(levels.begin(), levels.end(), reference) == levels.end())
        throw invalid_argument("reference level '" + reference + "' is not a level");
    if (covariate && covariate->size() != labels.size()) throw invalid_argument("covariate length differs");
    Design d;
    d.names.push_back("(Intercept)");
    for (const auto& l : levels)
        if (l != reference) d.names.push_back(l);
    if (covariate) d.names.push_back(covariate_name);
    const auto n = static_cast<Eigen::Index>(labels.size());
    d.x = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(d.names.size()));
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::string& l = labels[static_cast<std::size_t>(i)];
        if (std::find(levels.begin(), levels.end(), l) == levels.end())
            throw invalid_argument("label '" + l + "' is not a level");
        d.x(i, 0) = 1;
        for (std::size_t c = 1; c < d.names.size(); ++c)
            if (d.names[c] == l) d.x(i, static_cast<Eigen::Index>(c)) = 1;
        if (covariate) d.x(i, d.x.cols() - 1) = (*covariate)[static_cast<std::size_t>(i)];
    }
    return d;
}

struct RegressionPosterior {
    std::vector<std::string> names;
    std::vector<double> mean, sd, lower, upper;
    double sigma = 0;  // residual standard deviation at the least-squares fit
    int draws = 0;
    std::uint64_t seed = 0;
};

/// Flat prior on the coefficients, 1/sigma^2 on the noise. sigma^2 is drawn
/// from its scaled inverse chi-square posterior, then beta from the normal
/// around the least-squares fit; draws come in antithetic pairs.
inline RegressionPosterior regression_posterior(const Eigen::VectorXd& y, const Design& design, int draws,
                                                std::uint64_t seed) {
    const Eigen::MatrixXd& x = design.x;
    const Eigen::Index n = x.rows(), p = x.cols();
    if (y.size() != n) throw invalid_argument("outcome and design differ in length");
    if (static_cast<Eigen::Index>(design.names.size()) != p) throw invalid_argument("design names do not match columns");
    if (draws < 2) throw invalid_argument("draws must be at least 2");
    if (n < p + 2) throw invalid_argument("need at least columns + 2 rows");

    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < p) {
        std::string cols;
        for (Eigen::Index i = qr.rank(); i < p; ++i) {
            if (!cols.empty()) cols += ", ";
            cols += design.names[static_cast<std::size_t>(qr.colsPermutation().indices()(i))];
        }
        throw Error(ErrorKind::Validation, "rank-deficient design; collinear columns: " + cols);
    }
    const Eigen::VectorXd beta = qr.solve(y);
    const double rss = (y - x * beta).squaredNorm();
    const auto dof = static_cast<double>(n - p);
    const double s2 = rss / dof;
    const Eigen::MatrixXd cov = (x.transpose() * x).inverse();
    const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(cov).matrixL();

    std::mt19937_64 rng(seed);
    std::chi_squared_distribution<double> chi(dof);
    std::normal_distribution<double> normal;
    std::vector<std::vector<double>> samples(static_cast<std::size_t>(p), std::vector<double>(static_cast<std::size_t>(draws)));
    Eigen::VectorXd z(p);
    for (int d = 0; d < draws; d += 2) {
        const double sigma = std::sqrt(dof * s2 / chi(rng));
        for (Eigen::Index j = 0; j < p; ++j) z(j) = normal(rng);
        const Eigen::VectorXd step = sigma * (chol * z);
        for (Eigen::Index j = 0; j < p; ++j) {
            samples[static_cast<std::size_t>(j)][static_cast<std::size_t>(d)] = beta(j) + step(j);
            if (d + 1 < draws) samples[static_cast<std::size_t>(j)][static_cast<std::size_t>(d + 1)] = beta(j) - step(j);
        }
    }

    RegressionPosterior out;
    out.names = design.names;
    out.sigma = std::sqrt(s2);
    out.draws = draws;
    out.seed = seed;
    for (auto& col : samples) {
        const double m = mean(col);
        out.mean.push_back(m);
        out.sd.push_back(sample_sd(col));
        std::sort(col.begin(), col.end());
        // A zero-width posterior can put the summed mean an ulp outside its quantiles.
        out.lower.push_back(std::min(m, quantile_sorted(col, 0.025)));
        out.upper.push_back(std::max(m, quantile_sorted(col, 0.975)));
    }
    return out;
}

}  // namespace cubetutor::analytics
