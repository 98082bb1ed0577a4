#pragma once

#include "stig/series.hpp"

#include <utility>
#include <vector>

namespace stig {

/// One series plus its per-step ground-truth trend classes. Label steps must
/// be a subset of the steps the pipeline can emit for the series.
struct LabeledSeries {
    TimeSeries series;
    std::vector<std::pair<long long, Trend>> labels; // (step, class), ascending steps
};

struct LabeledCorpus {
    std::vector<LabeledSeries> entries;

    std::size_t size() const { return entries.size(); }
    bool empty() const { return entries.empty(); }
};

} // namespace stig
