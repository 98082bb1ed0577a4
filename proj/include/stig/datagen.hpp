#pragma once

#include "stig/corpus.hpp"
#include "stig/rng.hpp"
#include "stig/series.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace stig {

/// Min-max normalization onto [0,1]. Throws DataError when the input has
/// fewer than two distinct values (zero range).
std::vector<double> normalize_minmax(const std::vector<double>& raw);

struct YearStats {
    double mu = 0.0;
    double sigma = 0.0; // >= 0
};

/// Annual mean/stddev pairs for one region group, one entry per year.
struct AnnualGroupStats {
    std::string group_id;
    std::vector<YearStats> years;

    void validate() const;
};

/// Twelve independent draws per year from Normal(mu/12, sigma^2/12), in
/// chronological order, before any normalization.
std::vector<double> monthly_raw(const AnnualGroupStats& stats, Rng& rng);

/// Granulates annual stats into a normalized monthly series (min-max over
/// the whole series, then clamped to [0,1]).
TimeSeries monthly_from_annual(const AnnualGroupStats& stats, Indicator indicator, Rng& rng);

/// One constant-slope stretch of a latent signal. Slope magnitude is in
/// normalized units per step; the sign comes from slope_class.
struct TrendSegment {
    long long start_step = 0;
    long long end_step = 0; // exclusive
    Trend slope_class = Trend::stable;
    double slope_magnitude = 0.0;
};

/// Explicit layout for one synthesized series. When `segments` is empty the
/// generator samples a random layout from the corpus-level knobs.
struct SeriesSpec {
    std::string region_id;
    std::vector<TrendSegment> segments;
};

/// Generator configuration for a synthetic labeled corpus.
struct CorpusSpec {
    int count = 50;                 // number of series
    int months = 180;               // series length in steps
    double noise = 0.02;            // stddev of additive Gaussian noise
    double stability_band = 0.05;   // |lag difference| below this labels 0
    int lag = 24;                   // label comparison offset
    // Random-layout knobs, used for series without explicit segments.
    int min_segments = 1;
    int max_segments = 3;
    int min_segment_months = 48;
    double min_slope = 0.006; // normalized units per step
    double max_slope = 0.015;
    std::vector<SeriesSpec> series; // optional explicit layouts

    void validate() const;
};

/// Ground-truth rule: the label at step t is the sign of
/// latent(t) - latent(t - lag) when its magnitude exceeds the stability
/// band, else 0. Labels start at the first step with a full lag window.
std::vector<std::pair<long long, Trend>> labels_from_latent(const std::vector<double>& latent,
                                                            int lag, double stability_band);

/// A generated corpus plus the noiseless latent signal behind each entry
/// (normalized, same order as corpus.entries).
struct SyntheticCorpus {
    LabeledCorpus corpus;
    std::vector<std::vector<double>> latents;
};

/// Builds a labeled corpus of piecewise-linear latent trends with additive
/// Gaussian noise. Labels depend only on the noiseless latent signal. Each
/// series draws from its own stream derived from `seed`, so the output is
/// byte-stable for a fixed (spec, seed) pair.
SyntheticCorpus synthesize_labeled(const CorpusSpec& spec, std::uint64_t seed);

} // namespace stig
