#pragma once

#include "stig/series.hpp"
#include "stig/smf.hpp"

#include <optional>
#include <span>
#include <vector>

namespace stig {

/// Triangular intensity deposit: isosceles triangle with apex
/// (center, height) and base [center - half_base, center + half_base].
struct Mark {
    double center = 0.0;     // in [0,1]
    double half_base = 0.2;  // mark extension epsilon, in (0,1)
    double height = 1.0;     // release intensity I
};

/// Aggregated intensity field over the [0,1] value domain, discretized into
/// uniform bins sampled at bin centers. `step` is the time of the last
/// deposit (-1 before any deposit).
struct Track {
    std::vector<double> intensities;
    long long step = -1;

    int bins() const { return static_cast<int>(intensities.size()); }
};

/// Triangular abstraction of a track: congruent with the marks that built it,
/// base width 2*half_base, height at the saturation intensity.
struct Prototype {
    double center = 0.0;
    double half_base = 0.2;
    double height = 1.0;
};

/// The eight tunable structural parameters plus fixed settings. Tunable
/// ranges follow the adapting subsystem's table: marking thresholds and mark
/// extension in (0,1), retain factor theta in (0,1), prototyping thresholds
/// in (0, I_max), dissimilarity thresholds in (0,1).
struct PipelineParams {
    SmfParams marking{0.2, 0.8};        // alpha_M, beta_M
    double epsilon = 0.2;               // mark extension
    double theta = 0.65;                // per-step retain factor
    SmfParams prototyping{0.15, 0.75};  // alpha_P, beta_P over (0, I_max)
    SmfParams dissimilarity{0.35, 0.65};// alpha_D, beta_D
    int lag = 24;                       // comparison offset in steps
    int bins = 1000;                    // track grid resolution
    int warmup = 0;                     // extra steps before first classification

    double saturation() const;
    void validate() const;
};

/// The human-chosen parameter set used as the non-adapted baseline.
PipelineParams expert_defaults();

/// Asymptotic track intensity under constant reinforcement: I / (1 - theta).
/// theta = 0 means no reinforcement (marks fully evaporate each step).
/// Throws ConfigError for theta outside [0, 1).
double saturation_height(double intensity, double theta);

/// Releases the mark for one unbiased sample value.
Mark release_mark(double value, const PipelineParams& params);

/// Samples a triangle at the centers of `bins` uniform bins over [0,1].
/// Bins outside the triangle's support get 0; the shape is clipped at the
/// domain boundary (no wraparound).
std::vector<double> sample_triangle(double center, double half_base, double height, int bins);

/// Evaporate-and-deposit, in place: track[b] = theta * track[b] + mark(b).
void deposit(Track& track, const Mark& mark, double theta);

/// Pure form of `deposit`; returns the updated track.
Track trail_step(const Track& track, const Mark& mark, double theta);

/// Pointwise unbiasing of a track, rescaled back to intensity units:
/// out[b] = i_max * smf(track[b], p).
void unbias_track(std::span<const double> track, const SmfParams& p, double i_max,
                  std::vector<double>& out);
Track unbias_track(const Track& track, const SmfParams& p, double i_max);

/// Pointwise Jaccard between two sampled shapes: sum(min) / sum(max).
/// Returns 0 when both are identically zero.
double grid_jaccard(std::span<const double> a, std::span<const double> b);

/// Jaccard similarity of two congruent isosceles triangles with center
/// distance d, half base eps and height h, in closed form. Zero when the
/// shapes are disjoint (d >= 2*eps).
double jaccard_congruent(double center_dist, double half_base, double height);

/// Closed-form Jaccard of two congruent prototypes. Preconditions: equal
/// half_base and height (the pipeline only compares congruent prototypes).
double shape_similarity(const Prototype& a, const Prototype& b);

/// Signed dissimilarity between the current prototype and the one from `lag`
/// steps earlier: (1 - S) * sgn(p_now - p_prev). Zero when centers coincide.
double delta_p(const Prototype& current, const Prototype& previous);

/// Discretizes a signed dissimilarity into a trend class. The magnitude is
/// unbiased with (alpha_D, beta_D); values reaching the 0.5 level keep their
/// sign, everything below is stable.
Trend classify(double delta, const SmfParams& dissimilarity);

/// Reusable buffers for prototype fitting; a single fitter is not
/// thread-safe, use one per concurrent pipeline run.
class PrototypeFitter {
public:
    /// Exhaustive best-fit search: the candidate centers are all bin centers,
    /// scored by pointwise Jaccard between the candidate triangle (half base
    /// eps, height i_max) and the unbiased track; ties go to the smallest
    /// center. Returns nullopt for an all-zero track.
    std::optional<Prototype> fit(std::span<const double> unbiased, double eps, double i_max);

private:
    std::vector<double> window_;        // triangle sampled by offset, length 2K+1
    std::vector<double> shape_prefix_;  // prefix sums of the one-sided shape
};

/// One-shot convenience wrapper around PrototypeFitter.
std::optional<Prototype> fit_prototype(const Track& unbiased, const PipelineParams& params);

/// One emitted classification: the trend class at `step`, the signed
/// dissimilarity it came from, and whether a degenerate (all-zero) unbiased
/// track forced a stable fallback.
struct Classification {
    long long step = 0;
    Trend trend = Trend::stable;
    double delta = 0.0;
    bool degenerate = false;
};

/// Runs the full mark -> track -> prototype -> dissimilarity pipeline over
/// one series. Emits one classification per step from warmup + lag onward.
/// Throws DataError when the series is too short to emit anything.
std::vector<Classification> run_pipeline(const TimeSeries& series, const PipelineParams& params);

} // namespace stig
