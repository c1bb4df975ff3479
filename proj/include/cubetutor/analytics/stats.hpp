#pragma once

// Column standardization and small descriptive helpers over Eigen matrices.

#include <Eigen/Dense>
#include <cmath>
#include <string>
#include <vector>

#include "cubetutor/error.hpp"

namespace cubetutor::analytics {

/// Rows are students, columns the eight activity features in fixed order.
using FeatureMatrix = Eigen::MatrixXd;

struct Standardized {
    FeatureMatrix z;
    Eigen::RowVectorXd mean;
    Eigen::RowVectorXd sd;          // n-1 denominator
    std::vector<std::string> warnings;
};

inline Eigen::RowVectorXd column_sd(const FeatureMatrix& m) {
    const Eigen::RowVectorXd mean = m.colwise().mean();
    const Eigen::MatrixXd centered = m.rowwise() - mean;
    return (centered.colwise().squaredNorm() / static_cast<double>(m.rows() - 1)).cwiseSqrt();
}

/// z-scores each column. A column with zero variance becomes all zeros.
inline Standardized standardize(const FeatureMatrix& m, const std::vector<std::string>& names = {}) {
    if (m.rows() < 2) throw Error(ErrorKind::Validation, "insufficient rows");
    Standardized out;
    out.mean = m.colwise().mean();
    out.sd = column_sd(m);
    out.z = FeatureMatrix::Zero(m.rows(), m.cols());
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
        if (!(out.sd(c) > 0)) {
            const std::string name = c < static_cast<Eigen::Index>(names.size()) ? names[static_cast<std::size_t>(c)]
                                                                                  : "column " + std::to_string(c);
            out.warnings.push_back(name + " has zero variance; set to 0");
            continue;
        }
        out.z.col(c) = (m.col(c).array() - out.mean(c)) / out.sd(c);
    }
    return out;
}

inline double mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

inline double sample_sd(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double mu = mean(v);
    double ss = 0;
    for (double x : v) ss += (x - mu) * (x - mu);
    return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

/// Linear-interpolated quantile of an already sorted sample (type 7).
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw invalid_argument("quantile of empty sample");
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace cubetutor::analytics
