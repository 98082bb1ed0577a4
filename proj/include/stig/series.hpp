#pragma once

#include "stig/errors.hpp"

#include <string>
#include <vector>

namespace stig {

/// Trend class emitted per step: the indicator decreases, is stable, or
/// increases over the comparison lag.
enum class Trend : int {
    decrease = -1,
    stable = 0,
    increase = 1,
};

inline int trend_to_int(Trend t) { return static_cast<int>(t); }

inline Trend trend_from_int(int v) {
    if (v < -1 || v > 1) throw DataError("trend class must be -1, 0 or +1, got " + std::to_string(v));
    return static_cast<Trend>(v);
}

inline int sign_of(double x) { return x > 0.0 ? 1 : (x < 0.0 ? -1 : 0); }

/// Which indicator a series measures. S/R/U are the patent-derived
/// specialization / related variety / unrelated variety measures; `synthetic`
/// marks generated data.
enum class Indicator { S, R, U, synthetic };

std::string indicator_to_string(Indicator ind);
Indicator indicator_from_string(const std::string& s);

struct Sample {
    long long step = 0;   // months
    double value = 0.0;   // normalized to [0,1]
};

/// Ordered monthly samples of one indicator for one region. Step indices are
/// strictly increasing with unit stride; values are normalized to [0,1].
struct TimeSeries {
    std::string region_id;
    Indicator indicator = Indicator::synthetic;
    std::vector<Sample> samples;

    void validate() const {
        for (std::size_t i = 0; i < samples.size(); ++i) {
            const auto& s = samples[i];
            if (s.value < 0.0 || s.value > 1.0) {
                throw DataError("series " + region_id + ": value " + std::to_string(s.value) +
                                " at step " + std::to_string(s.step) + " outside [0,1]");
            }
            if (i > 0 && samples[i].step != samples[i - 1].step + 1) {
                throw DataError("series " + region_id + ": step indices must increase with unit stride");
            }
        }
    }
};

inline std::string indicator_to_string(Indicator ind) {
    switch (ind) {
        case Indicator::S: return "S";
        case Indicator::R: return "R";
        case Indicator::U: return "U";
        case Indicator::synthetic: return "synthetic";
    }
    return "synthetic";
}

inline Indicator indicator_from_string(const std::string& s) {
    if (s == "S") return Indicator::S;
    if (s == "R") return Indicator::R;
    if (s == "U") return Indicator::U;
    if (s == "synthetic") return Indicator::synthetic;
    throw DataError("unknown indicator '" + s + "' (expected S, R, U or synthetic)");
}

} // namespace stig
