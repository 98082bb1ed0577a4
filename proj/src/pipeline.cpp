#include "stig/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace stig {

double PipelineParams::saturation() const { return saturation_height(1.0, theta); }

void PipelineParams::validate() const {
    marking.validate("marking", 0.0, 1.0);
    if (!(epsilon > 0.0 && epsilon < 1.0)) {
        throw ConfigError("epsilon must be in (0,1), got " + std::to_string(epsilon));
    }
    if (!(theta > 0.0 && theta < 1.0)) {
        throw ConfigError("theta must be in (0,1), got " + std::to_string(theta));
    }
    prototyping.validate("prototyping", 0.0, saturation());
    dissimilarity.validate("dissimilarity", 0.0, 1.0);
    if (lag < 1) throw ConfigError("lag must be >= 1, got " + std::to_string(lag));
    if (bins < 100) throw ConfigError("bins must be >= 100, got " + std::to_string(bins));
    if (warmup < 0) throw ConfigError("warmup must be >= 0, got " + std::to_string(warmup));
}

PipelineParams expert_defaults() { return PipelineParams{}; }

double saturation_height(double intensity, double theta) {
    if (!(theta >= 0.0 && theta < 1.0)) {
        throw ConfigError("saturation_height: theta must be in [0,1), got " + std::to_string(theta));
    }
    return intensity / (1.0 - theta);
}

Mark release_mark(double value, const PipelineParams& params) {
    return Mark{value, params.epsilon, 1.0};
}

namespace {

inline double bin_center(int b, int bins) {
    return (static_cast<double>(b) + 0.5) / static_cast<double>(bins);
}

// Bin index range whose centers fall strictly inside (center - hb, center + hb),
// clipped to the domain.
inline std::pair<int, int> support_bins(double center, double half_base, int bins) {
    const double lo_x = (center - half_base) * bins - 0.5;
    const double hi_x = (center + half_base) * bins - 0.5;
    int lo = static_cast<int>(std::ceil(lo_x));
    int hi = static_cast<int>(std::floor(hi_x));
    lo = std::max(lo, 0);
    hi = std::min(hi, bins - 1);
    return {lo, hi};
}

} // namespace

std::vector<double> sample_triangle(double center, double half_base, double height, int bins) {
    std::vector<double> out(static_cast<std::size_t>(bins), 0.0);
    const auto [lo, hi] = support_bins(center, half_base, bins);
    for (int b = lo; b <= hi; ++b) {
        const double dist = std::abs(bin_center(b, bins) - center);
        const double v = height * (1.0 - dist / half_base);
        if (v > 0.0) out[static_cast<std::size_t>(b)] = v;
    }
    return out;
}

void deposit(Track& track, const Mark& mark, double theta) {
    const int bins = track.bins();
    double* t = track.intensities.data();
    for (int b = 0; b < bins; ++b) t[b] *= theta;
    const auto [lo, hi] = support_bins(mark.center, mark.half_base, bins);
    for (int b = lo; b <= hi; ++b) {
        const double dist = std::abs(bin_center(b, bins) - mark.center);
        const double v = mark.height * (1.0 - dist / mark.half_base);
        if (v > 0.0) t[b] += v;
    }
    track.step += 1;
}

Track trail_step(const Track& track, const Mark& mark, double theta) {
    Track out = track;
    deposit(out, mark, theta);
    return out;
}

void unbias_track(std::span<const double> track, const SmfParams& p, double i_max,
                  std::vector<double>& out) {
    out.resize(track.size());
    for (std::size_t b = 0; b < track.size(); ++b) {
        out[b] = i_max * smf(track[b], p);
    }
}

Track unbias_track(const Track& track, const SmfParams& p, double i_max) {
    Track out;
    out.step = track.step;
    unbias_track(track.intensities, p, i_max, out.intensities);
    return out;
}

double grid_jaccard(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ConfigError("grid_jaccard: size mismatch");
    double sum_min = 0.0;
    double sum_max = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum_min += std::min(a[i], b[i]);
        sum_max += std::max(a[i], b[i]);
    }
    return sum_max > 0.0 ? sum_min / sum_max : 0.0;
}

double jaccard_congruent(double center_dist, double half_base, double height) {
    if (!(half_base > 0.0) || !(height > 0.0)) {
        throw ConfigError("jaccard_congruent: half_base and height must be positive");
    }
    const double d = std::abs(center_dist);
    if (d <= 0.0) return 1.0;
    if (d >= 2.0 * half_base) return 0.0;
    const double side = 2.0 * half_base - d;
    const double area_int = height * side * side / (4.0 * half_base);
    const double area_union = 2.0 * half_base * height - area_int;
    return area_int / area_union;
}

double shape_similarity(const Prototype& a, const Prototype& b) {
    const double tol = 1e-9 * std::max({1.0, a.half_base, a.height});
    if (std::abs(a.half_base - b.half_base) > tol || std::abs(a.height - b.height) > tol) {
        throw ConfigError("shape_similarity: prototypes must be congruent");
    }
    return jaccard_congruent(a.center - b.center, a.half_base, a.height);
}

double delta_p(const Prototype& current, const Prototype& previous) {
    const double s = shape_similarity(current, previous);
    return (1.0 - s) * sign_of(current.center - previous.center);
}

Trend classify(double delta, const SmfParams& dissimilarity) {
    const double u = smf(std::abs(delta), dissimilarity);
    if (u >= 0.5) return static_cast<Trend>(sign_of(delta));
    return Trend::stable;
}

std::optional<Prototype> PrototypeFitter::fit(std::span<const double> unbiased, double eps,
                                              double i_max) {
    const int bins = static_cast<int>(unbiased.size());
    const double* track = unbiased.data();

    // Non-zero span of the track; candidates further than the triangle width
    // away score exactly zero and cannot win.
    int lo_t = 0;
    while (lo_t < bins && track[lo_t] <= 0.0) ++lo_t;
    if (lo_t == bins) return std::nullopt; // degenerate all-zero track
    int hi_t = bins - 1;
    while (track[hi_t] <= 0.0) --hi_t;

    double sum_t = 0.0;
    for (int b = lo_t; b <= hi_t; ++b) sum_t += track[b];

    // Triangle sampled by integer bin offset: offset j contributes
    // i_max * (1 - j / (eps * bins)) while positive. Filling both window
    // sides from one computed value keeps the window exactly palindromic.
    int max_off = static_cast<int>(std::ceil(eps * bins)) - 1;
    max_off = std::clamp(max_off, 0, bins - 1);
    const int width = 2 * max_off + 1;
    window_.assign(static_cast<std::size_t>(width), 0.0);
    shape_prefix_.assign(static_cast<std::size_t>(max_off) + 1, 0.0);
    const double inv_reach = 1.0 / (eps * bins);
    double acc = 0.0;
    for (int j = 0; j <= max_off; ++j) {
        const double v = std::max(0.0, i_max * (1.0 - j * inv_reach));
        window_[static_cast<std::size_t>(max_off + j)] = v;
        window_[static_cast<std::size_t>(max_off - j)] = v;
        acc += v;
        shape_prefix_[static_cast<std::size_t>(j)] = acc;
    }

    const int c_lo = std::max(0, lo_t - max_off);
    const int c_hi = std::min(bins - 1, hi_t + max_off);
    const double* win = window_.data();

    double best_score = 0.0;
    int best_center = -1;
    for (int c = c_lo; c <= c_hi; ++c) {
        const int lo = std::max(lo_t, c - max_off);
        const int hi = std::min(hi_t, c + max_off);
        const int woff = max_off - c;
        double sum_min = 0.0;
#pragma omp simd reduction(+ : sum_min)
        for (int b = lo; b <= hi; ++b) {
            sum_min += std::min(win[b + woff], track[b]);
        }
        // Triangle mass clipped at the domain boundary.
        const double sum_p = shape_prefix_[static_cast<std::size_t>(std::min(max_off, c))] +
                             shape_prefix_[static_cast<std::size_t>(std::min(max_off, bins - 1 - c))] -
                             shape_prefix_[0];
        const double denom = sum_p + sum_t - sum_min;
        const double score = denom > 0.0 ? sum_min / denom : 0.0;
        if (score > best_score) {
            best_score = score;
            best_center = c;
        }
    }

    if (best_center < 0) {
        // Positive track mass that no candidate overlaps cannot happen: the
        // candidate at lo_t always overlaps. Guard anyway.
        return std::nullopt;
    }
    return Prototype{bin_center(best_center, bins), eps, i_max};
}

std::optional<Prototype> fit_prototype(const Track& unbiased, const PipelineParams& params) {
    PrototypeFitter fitter;
    return fitter.fit(unbiased.intensities, params.epsilon, params.saturation());
}

std::vector<Classification> run_pipeline(const TimeSeries& series, const PipelineParams& params) {
    params.validate();
    series.validate();
    const int total = static_cast<int>(series.samples.size());
    if (total <= params.lag + params.warmup) {
        throw DataError("series " + series.region_id + ": " + std::to_string(total) +
                        " samples, need more than lag + warmup = " +
                        std::to_string(params.lag + params.warmup));
    }

    const double i_max = params.saturation();
    Track track;
    track.intensities.assign(static_cast<std::size_t>(params.bins), 0.0);

    const int ring_size = params.lag + 1;
    std::vector<std::optional<Prototype>> ring(static_cast<std::size_t>(ring_size));

    PrototypeFitter fitter;
    std::vector<double> unbiased;
    std::vector<Classification> out;
    out.reserve(static_cast<std::size_t>(total - params.lag - params.warmup));

    for (int t = 0; t < total; ++t) {
        const double unb = smf(series.samples[static_cast<std::size_t>(t)].value, params.marking);
        deposit(track, release_mark(unb, params), params.theta);
        unbias_track(track.intensities, params.prototyping, i_max, unbiased);
        ring[static_cast<std::size_t>(t % ring_size)] = fitter.fit(unbiased, params.epsilon, i_max);

        if (t >= params.warmup + params.lag) {
            const auto& current = ring[static_cast<std::size_t>(t % ring_size)];
            const auto& previous = ring[static_cast<std::size_t>((t - params.lag) % ring_size)];
            const long long step = series.samples[static_cast<std::size_t>(t)].step;
            if (current && previous) {
                const double d = delta_p(*current, *previous);
                out.push_back({step, classify(d, params.dissimilarity), d, false});
            } else {
                out.push_back({step, Trend::stable, 0.0, true});
            }
        }
    }
    return out;
}

} // namespace stig
