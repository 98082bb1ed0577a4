#include "stig/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace stig {

std::vector<double> normalize_minmax(const std::vector<double>& raw) {
    if (raw.size() < 2) throw DataError("normalize_minmax: need at least two values");
    const auto [lo_it, hi_it] = std::minmax_element(raw.begin(), raw.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    if (!(hi > lo)) throw DataError("normalize_minmax: zero range (constant series)");
    std::vector<double> out(raw.size());
    const double inv = 1.0 / (hi - lo);
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = (raw[i] - lo) * inv;
    return out;
}

void AnnualGroupStats::validate() const {
    for (const auto& y : years) {
        if (y.sigma < 0.0) {
            throw DataError("group " + group_id + ": sigma must be >= 0");
        }
    }
}

std::vector<double> monthly_raw(const AnnualGroupStats& stats, Rng& rng) {
    stats.validate();
    std::vector<double> out;
    out.reserve(stats.years.size() * 12);
    for (const auto& y : stats.years) {
        const double mean = y.mu / 12.0;
        const double stddev = std::sqrt(y.sigma * y.sigma / 12.0);
        for (int m = 0; m < 12; ++m) {
            out.push_back(stddev > 0.0 ? rng.normal(mean, stddev) : mean);
        }
    }
    return out;
}

TimeSeries monthly_from_annual(const AnnualGroupStats& stats, Indicator indicator, Rng& rng) {
    const std::vector<double> raw = monthly_raw(stats, rng);
    std::vector<double> normalized = normalize_minmax(raw);
    TimeSeries series;
    series.region_id = stats.group_id;
    series.indicator = indicator;
    series.samples.reserve(normalized.size());
    for (std::size_t i = 0; i < normalized.size(); ++i) {
        series.samples.push_back({static_cast<long long>(i), std::clamp(normalized[i], 0.0, 1.0)});
    }
    return series;
}

void CorpusSpec::validate() const {
    if (count < 1) throw ConfigError("count must be >= 1, got " + std::to_string(count));
    if (months < 2) throw ConfigError("months must be >= 2, got " + std::to_string(months));
    if (noise < 0.0) throw ConfigError("noise must be >= 0, got " + std::to_string(noise));
    if (stability_band < 0.0) {
        throw ConfigError("stability_band must be >= 0, got " + std::to_string(stability_band));
    }
    if (lag < 1) throw ConfigError("lag must be >= 1, got " + std::to_string(lag));
    if (lag >= months) {
        throw ConfigError("lag (" + std::to_string(lag) + ") must be smaller than months (" +
                          std::to_string(months) + ")");
    }
    if (min_segments < 1 || max_segments < min_segments) {
        throw ConfigError("need 1 <= min_segments <= max_segments");
    }
    if (min_segment_months < 1) throw ConfigError("min_segment_months must be >= 1");
    if (!(min_slope > 0.0) || max_slope < min_slope) {
        throw ConfigError("need 0 < min_slope <= max_slope");
    }
    for (const auto& s : series) {
        long long expected = 0;
        for (const auto& seg : s.segments) {
            if (seg.start_step != expected || seg.end_step <= seg.start_step) {
                throw ConfigError("series " + s.region_id +
                                  ": segments must be contiguous and non-empty");
            }
            if (seg.slope_magnitude < 0.0) {
                throw ConfigError("series " + s.region_id + ": slope_magnitude must be >= 0");
            }
            expected = seg.end_step;
        }
        if (!s.segments.empty() && expected != months) {
            throw ConfigError("series " + s.region_id + ": segments must cover exactly " +
                              std::to_string(months) + " steps");
        }
    }
}

std::vector<std::pair<long long, Trend>> labels_from_latent(const std::vector<double>& latent,
                                                            int lag, double stability_band) {
    std::vector<std::pair<long long, Trend>> labels;
    if (latent.size() <= static_cast<std::size_t>(lag)) return labels;
    labels.reserve(latent.size() - static_cast<std::size_t>(lag));
    for (std::size_t t = static_cast<std::size_t>(lag); t < latent.size(); ++t) {
        const double diff = latent[t] - latent[t - static_cast<std::size_t>(lag)];
        const Trend cls =
            std::abs(diff) > stability_band ? static_cast<Trend>(sign_of(diff)) : Trend::stable;
        labels.emplace_back(static_cast<long long>(t), cls);
    }
    return labels;
}

namespace {

// Random segment layout: class sequence avoids immediate repeats so every
// boundary is a real transition.
std::vector<TrendSegment> random_layout(const CorpusSpec& spec, Rng& rng) {
    const int max_fit = std::max(1, spec.months / spec.min_segment_months);
    const int hi = std::min(spec.max_segments, max_fit);
    const int lo = std::min(spec.min_segments, hi);
    const int n_seg = lo + static_cast<int>(rng.uniform_index(static_cast<std::size_t>(hi - lo + 1)));

    // Segment lengths: minimum length each, remainder split at random.
    std::vector<long long> lengths(static_cast<std::size_t>(n_seg), spec.min_segment_months);
    long long remainder = spec.months - static_cast<long long>(n_seg) * spec.min_segment_months;
    for (int i = 0; i < n_seg - 1 && remainder > 0; ++i) {
        const long long take = static_cast<long long>(rng.uniform_index(static_cast<std::size_t>(remainder) + 1));
        lengths[static_cast<std::size_t>(i)] += take;
        remainder -= take;
    }
    lengths[static_cast<std::size_t>(n_seg) - 1] += remainder;

    std::vector<TrendSegment> segments;
    segments.reserve(static_cast<std::size_t>(n_seg));
    long long cursor = 0;
    int prev_class = 2; // sentinel outside {-1,0,1}
    for (int i = 0; i < n_seg; ++i) {
        int cls;
        do {
            cls = static_cast<int>(rng.uniform_index(3)) - 1;
        } while (cls == prev_class);
        prev_class = cls;
        TrendSegment seg;
        seg.start_step = cursor;
        seg.end_step = cursor + lengths[static_cast<std::size_t>(i)];
        seg.slope_class = static_cast<Trend>(cls);
        seg.slope_magnitude = cls == 0 ? 0.0 : rng.uniform(spec.min_slope, spec.max_slope);
        segments.push_back(seg);
        cursor = seg.end_step;
    }
    return segments;
}

std::vector<double> latent_from_segments(const std::vector<TrendSegment>& segments, int months) {
    std::vector<double> latent(static_cast<std::size_t>(months), 0.0);
    double level = 0.0;
    for (const auto& seg : segments) {
        const double slope = seg.slope_magnitude * trend_to_int(seg.slope_class);
        for (long long t = seg.start_step; t < seg.end_step && t < months; ++t) {
            latent[static_cast<std::size_t>(t)] = level;
            level += slope;
        }
    }
    return latent;
}

std::vector<double> normalize_or_center(const std::vector<double>& latent) {
    const auto [lo_it, hi_it] = std::minmax_element(latent.begin(), latent.end());
    if (*hi_it > *lo_it) return normalize_minmax(latent);
    // All-flat latent: park it mid-domain.
    return std::vector<double>(latent.size(), 0.5);
}

} // namespace

SyntheticCorpus synthesize_labeled(const CorpusSpec& spec, std::uint64_t seed) {
    spec.validate();
    SyntheticCorpus out;
    out.corpus.entries.reserve(static_cast<std::size_t>(spec.count));
    out.latents.reserve(static_cast<std::size_t>(spec.count));

    for (int i = 0; i < spec.count; ++i) {
        Rng rng(Rng::derive(seed, {0x5e71e5ULL, static_cast<std::uint64_t>(i)}));

        std::vector<TrendSegment> segments;
        std::string region_id;
        if (static_cast<std::size_t>(i) < spec.series.size() &&
            !spec.series[static_cast<std::size_t>(i)].segments.empty()) {
            segments = spec.series[static_cast<std::size_t>(i)].segments;
            region_id = spec.series[static_cast<std::size_t>(i)].region_id;
        } else {
            segments = random_layout(spec, rng);
            if (static_cast<std::size_t>(i) < spec.series.size()) {
                region_id = spec.series[static_cast<std::size_t>(i)].region_id;
            }
        }
        if (region_id.empty()) {
            char buf[16];
            std::snprintf(buf, sizeof buf, "syn-%03d", i);
            region_id = buf;
        }

        const std::vector<double> latent = normalize_or_center(latent_from_segments(segments, spec.months));

        LabeledSeries entry;
        entry.series.region_id = region_id;
        entry.series.indicator = Indicator::synthetic;
        entry.series.samples.reserve(latent.size());
        for (std::size_t t = 0; t < latent.size(); ++t) {
            const double noisy = latent[t] + (spec.noise > 0.0 ? rng.normal(0.0, spec.noise) : 0.0);
            entry.series.samples.push_back(
                {static_cast<long long>(t), std::clamp(noisy, 0.0, 1.0)});
        }
        entry.labels = labels_from_latent(latent, spec.lag, spec.stability_band);

        out.corpus.entries.push_back(std::move(entry));
        out.latents.push_back(latent);
    }
    return out;
}

} // namespace stig
