#pragma once

#include "stig/corpus.hpp"
#include "stig/pipeline.hpp"
#include "stig/rng.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace stig {

/// Number of tuned structural parameters.
inline constexpr std::size_t kParamCount = 8;

/// Genome layout: alpha_M, beta_M, epsilon, theta, alpha_P and beta_P as
/// fractions of I_max, alpha_D, beta_D. Encoding the prototyping thresholds
/// as fractions keeps every bound static while the actual (0, I_max) range
/// follows the candidate's own theta.
using ParamVector = std::array<double, kParamCount>;

/// Per-dimension closed search box. The tuned ranges are open intervals, so
/// the boxes are inset slightly from their nominal endpoints.
struct Bounds {
    std::array<std::pair<double, double>, kParamCount> ranges;

    void validate() const;
    double clamp(double x, std::size_t dim) const;

    /// All eight dimensions in (0,1), inset by `inset` on both ends.
    static Bounds unit(double inset = 1e-6);
};

/// Default search box for the eight structural parameters.
Bounds default_bounds();

/// Expands a genome into full pipeline parameters. Each threshold pair is
/// order-repaired (lower value becomes alpha) and the prototyping fractions
/// are scaled by the genome's own saturation height.
PipelineParams decode_genome(const ParamVector& genome, int lag, int bins, int warmup);

/// The expert parameter defaults translated into genome encoding.
ParamVector expert_genome();

/// One population member: an 8-vector plus its fitness once evaluated.
struct Candidate {
    ParamVector vector{};
    std::optional<double> fitness;
};

/// Differential Evolution run configuration (rand-to-best/1 mutation,
/// binomial crossover). `repair` is an optional problem-specific operator
/// applied to every sampled or recombined vector (after bound clamping).
struct DEConfig {
    int population_size = 20;
    double F = 0.6;
    double CR = 0.6;
    int generations = 30;
    std::uint64_t seed = 0;
    std::vector<ParamVector> injected;
    std::function<void(ParamVector&)> repair;

    void validate() const;
};

/// Standard repair for the pipeline genome: orders each threshold pair so the
/// population does not straddle the swap-symmetric copies of an optimum.
void canonicalize_genome(ParamVector& v);

/// Fixed (non-tuned) pipeline settings used during fitness evaluation.
/// score_skip drops the first emitted comparison points of each series from
/// the error sum, mirroring a scoring window that starts at the fourth point.
struct FixedSettings {
    int lag = 24;
    int bins = 1000;
    int warmup = 0;
    int score_skip = 3;
};

using FitnessFn = std::function<double(const ParamVector&)>;

/// rand-to-best/1 mutant: v = x_r1 + F * (x_best - x_r1) + F * (x_r2 - x_r3),
/// with out-of-bounds components clamped to the box.
ParamVector mutant_vector(const ParamVector& x_r1, const ParamVector& x_best,
                          const ParamVector& x_r2, const ParamVector& x_r3, double F,
                          const Bounds& bounds);

/// Samples r1, r2, r3 (distinct from each other and from target) and builds
/// the mutant. Requires population size >= 4.
ParamVector mutate(const std::vector<Candidate>& population, std::size_t target_idx,
                   std::size_t best_idx, double F, const Bounds& bounds, Rng& rng);

/// Binomial crossover: component j comes from the mutant with probability CR,
/// and component j_rand always does.
ParamVector crossover_binomial(const ParamVector& target, const ParamVector& mutant, double CR,
                               Rng& rng);

/// Greedy one-to-one selection; equal fitness keeps the trial.
const Candidate& select(const Candidate& target, const Candidate& trial);

struct OptimizeResult {
    Candidate best;
    std::vector<double> history; // best-ever fitness after init and each generation
    std::size_t evaluations = 0;
};

/// Runs DE against an arbitrary fitness function. Trial vectors for a
/// generation are generated sequentially (fixed RNG order), evaluated
/// possibly in parallel, then selected synchronously, so results do not
/// depend on `jobs`.
OptimizeResult optimize(const FitnessFn& fitness, const DEConfig& config, const Bounds& bounds,
                        int jobs = 1);

/// Mean squared error between corpus labels and the classes the pipeline
/// emits under the decoded genome. Residuals are squared class differences,
/// so each scored point contributes 0, 1 or 4.
double fitness_mse(const ParamVector& genome, const LabeledCorpus& corpus,
                   const FixedSettings& fixed);

/// Squared-error tally of pipeline output against one series' labels.
struct ScoreTally {
    double sum_sq = 0.0;
    std::size_t points = 0;
};

/// Scores emitted classifications against labels, skipping the first
/// `score_skip` emitted points. Points without a label are not scored.
ScoreTally score_series(const std::vector<Classification>& emitted,
                        const std::vector<std::pair<long long, Trend>>& labels, int score_skip);

} // namespace stig
