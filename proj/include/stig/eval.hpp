#pragma once

#include "stig/corpus.hpp"
#include "stig/optimizer.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace stig {

/// Random partition of a corpus by series (never by step). Disjoint and
/// exhaustive.
struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

SplitIndices split(const LabeledCorpus& corpus, double train_fraction, std::uint64_t seed);

/// 3x3 confusion counts; rows are true classes (-1, 0, +1), columns the
/// predicted ones.
struct Confusion {
    std::array<std::array<long long, 3>, 3> counts{};

    void add(Trend truth, Trend predicted) {
        counts[static_cast<std::size_t>(trend_to_int(truth) + 1)]
              [static_cast<std::size_t>(trend_to_int(predicted) + 1)] += 1;
    }
    void merge(const Confusion& other);
    long long total() const;
    /// MSE implied by the matrix: off-diagonal cells weighted by the squared
    /// class difference.
    double mse() const;
};

struct EvalStats {
    double mse = 0.0;
    std::size_t points = 0;
    Confusion confusion;
};

/// Runs the pipeline with `params` over the selected corpus entries and
/// scores against labels (same skip rule as the fitness).
EvalStats evaluate_params(const PipelineParams& params, const LabeledCorpus& corpus,
                          const std::vector<std::size_t>& indices, int score_skip);

/// One (trial, repetition) outcome.
struct RepetitionReport {
    int trial = 0;
    int repetition = 0;
    double train_mse = 0.0;
    double test_mse = 0.0;
    Confusion test_confusion;
    ParamVector genome{};
    double best_fitness = 0.0;
    std::vector<double> history; // DE best-ever fitness per generation (empty in fixed mode)
};

/// Per-trial mean/stddev over repetitions (the per-trial table layout).
struct TrialSummary {
    int trial = 0;
    double train_mean = 0.0;
    double train_std = 0.0;
    double test_mean = 0.0;
    double test_std = 0.0;
};

/// Mean, sample stddev and Student-t 95% half-width over n values.
struct Aggregate {
    double mean = 0.0;
    double stddev = 0.0;
    double ci95_half = 0.0;
    std::size_t n = 0;
};

Aggregate aggregate_of(const std::vector<double>& values);

/// Two-sided 95% Student-t critical value with df degrees of freedom.
double student_t95(std::size_t df);

struct TrialsReport {
    std::vector<RepetitionReport> repetitions;
    std::vector<TrialSummary> per_trial;
    Aggregate train_aggregate; // over per-trial means
    Aggregate test_aggregate;  // over per-trial means
};

/// Repeated-holdout protocol options. Trial i always draws the same split
/// for a given master seed, so different parameter sources can be compared
/// on identical splits.
struct ProtocolOptions {
    int n_trials = 5;
    int repetitions = 5;
    double train_fraction = 0.2;
    std::uint64_t seed = 42;
    int jobs = 1;
    FixedSettings fixed;
};

/// Per trial: fresh split, DE on the train side, evaluation on both sides.
/// Repetitions re-run DE with fresh optimizer seeds on the same split.
TrialsReport run_trials_de(const LabeledCorpus& corpus, const DEConfig& de,
                           const ProtocolOptions& options);

/// Same protocol without adaptation: a fixed parameter set evaluated on every
/// trial split (one repetition per trial; there is nothing random to repeat).
TrialsReport run_trials_fixed(const LabeledCorpus& corpus, const PipelineParams& params,
                              const ProtocolOptions& options);

struct GridCell {
    double F = 0.0;
    double CR = 0.0;
    Aggregate test;
    std::vector<double> trial_means;
};

struct GridReport {
    std::vector<double> f_values;
    std::vector<double> cr_values;
    std::vector<GridCell> cells; // row-major over (cr, f)
};

/// F x CR study on shared splits (paired across cells). Each cell runs
/// n_trials independent trials with the DE seeds derived per cell.
GridReport grid_study(const LabeledCorpus& corpus, const DEConfig& base,
                      const std::vector<double>& f_values, const std::vector<double>& cr_values,
                      const ProtocolOptions& options);

} // namespace stig
