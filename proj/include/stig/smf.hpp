#pragma once

#include "stig/errors.hpp"

#include <string>

namespace stig {

/// Threshold pair for the s-shaped unbiasing function. `alpha` is the lower
/// saturation bound (output 0 at or below), `beta` the upper (output 1 at or
/// above). The codomain depends on the stage: [0,1] for marking and
/// dissimilarity, [0, I_max] for prototyping.
struct SmfParams {
    double alpha = 0.0;
    double beta = 1.0;

    void validate(const std::string& stage, double lo, double hi) const {
        if (!(lo <= alpha && alpha < beta && beta <= hi)) {
            throw ConfigError(stage + ": require " + std::to_string(lo) + " <= alpha < beta <= " +
                              std::to_string(hi) + ", got alpha=" + std::to_string(alpha) +
                              " beta=" + std::to_string(beta));
        }
    }
};

/// Standard piecewise-quadratic s-shaped squashing function. Total, continuous
/// and monotone non-decreasing with smf(alpha)=0, smf(beta)=1 and value 0.5 at
/// the midpoint (alpha+beta)/2. Inputs below alpha are suppressed, inputs
/// above beta saturate.
inline double smf(double x, const SmfParams& p) {
    if (x <= p.alpha) return 0.0;
    if (x >= p.beta) return 1.0;
    const double width = p.beta - p.alpha;
    const double mid = 0.5 * (p.alpha + p.beta);
    if (x <= mid) {
        const double r = (x - p.alpha) / width;
        return 2.0 * r * r;
    }
    const double r = (x - p.beta) / width;
    return 1.0 - 2.0 * r * r;
}

} // namespace stig
