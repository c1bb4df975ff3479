#pragma once

#include <cmath>

#include "cubetutor/error.hpp"

namespace cubetutor::analytics {

struct GainRecord {
    double pre = 0;
    double post = 0;
    double gain = 0;

    friend bool operator==(const GainRecord&, const GainRecord&) = default;
};

/// Improvement as a share of the room left above `pre`; a decline as a share
/// of `pre`. Both scores are proportions correct. (0, 0) gives 0.
inline GainRecord normalized_gain(double pre, double post) {
    auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!in_unit(pre) || !in_unit(post)) throw invalid_argument("scores must lie in [0, 1]");
    double gain = 0;
    if (post > pre) gain = (post - pre) / (1 - pre);
    else if (pre > 0) gain = (post - pre) / pre;
    return {pre, post, gain};
}

}  // namespace cubetutor::analytics
