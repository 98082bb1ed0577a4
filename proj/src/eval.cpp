#include "stig/eval.hpp"

#include "stig/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace stig {

SplitIndices split(const LabeledCorpus& corpus, double train_fraction, std::uint64_t seed) {
    const std::size_t n = corpus.size();
    if (n < 5) throw DataError("split: need at least 5 series, got " + std::to_string(n));
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("train_fraction must be in (0,1), got " + std::to_string(train_fraction));
    }
    std::size_t n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
    n_train = std::clamp<std::size_t>(n_train, 1, n - 1);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        std::swap(order[i], order[rng.uniform_index(i + 1)]);
    }

    SplitIndices out;
    out.train.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
    std::sort(out.train.begin(), out.train.end());
    std::sort(out.test.begin(), out.test.end());
    return out;
}

void Confusion::merge(const Confusion& other) {
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) counts[i][j] += other.counts[i][j];
    }
}

long long Confusion::total() const {
    long long t = 0;
    for (const auto& row : counts) {
        for (long long c : row) t += c;
    }
    return t;
}

double Confusion::mse() const {
    const long long n = total();
    if (n == 0) return 0.0;
    double sum = 0.0;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const double diff = i - j;
            sum += diff * diff * static_cast<double>(counts[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
        }
    }
    return sum / static_cast<double>(n);
}

EvalStats evaluate_params(const PipelineParams& params, const LabeledCorpus& corpus,
                          const std::vector<std::size_t>& indices, int score_skip) {
    EvalStats stats;
    double sum_sq = 0.0;
    for (std::size_t idx : indices) {
        const auto& entry = corpus.entries.at(idx);
        const auto emitted = run_pipeline(entry.series, params);
        std::size_t li = 0;
        for (std::size_t i = static_cast<std::size_t>(std::max(0, score_skip)); i < emitted.size(); ++i) {
            while (li < entry.labels.size() && entry.labels[li].first < emitted[i].step) ++li;
            if (li == entry.labels.size()) break;
            if (entry.labels[li].first != emitted[i].step) continue;
            const Trend truth = entry.labels[li].second;
            const Trend predicted = emitted[i].trend;
            const double diff = trend_to_int(truth) - trend_to_int(predicted);
            sum_sq += diff * diff;
            stats.points += 1;
            stats.confusion.add(truth, predicted);
        }
    }
    if (stats.points == 0) throw DataError("evaluate_params: no scored comparison points");
    stats.mse = sum_sq / static_cast<double>(stats.points);
    return stats;
}

double student_t95(std::size_t df) {
    // Two-sided 95% critical values; beyond the table the normal limit is
    // close enough for reporting purposes.
    static constexpr double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365,
                                       2.306,  2.262, 2.228, 2.201, 2.179, 2.160, 2.145,
                                       2.131,  2.120, 2.110, 2.101, 2.093, 2.086, 2.080,
                                       2.074,  2.069, 2.064, 2.060, 2.056, 2.052, 2.048,
                                       2.045,  2.042};
    if (df == 0) return 0.0;
    if (df <= 30) return table[df - 1];
    return 1.96;
}

Aggregate aggregate_of(const std::vector<double>& values) {
    Aggregate a;
    a.n = values.size();
    if (a.n == 0) return a;
    a.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(a.n);
    if (a.n > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - a.mean) * (v - a.mean);
        a.stddev = std::sqrt(ss / static_cast<double>(a.n - 1));
        a.ci95_half = student_t95(a.n - 1) * a.stddev / std::sqrt(static_cast<double>(a.n));
    }
    return a;
}

namespace {

std::uint64_t split_seed(const ProtocolOptions& options, int trial) {
    return Rng::derive(options.seed, {0x5317ULL, static_cast<std::uint64_t>(trial)});
}

std::uint64_t de_seed(const ProtocolOptions& options, int trial, int repetition) {
    return Rng::derive(options.seed,
                       {0xde00ULL, static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(repetition)});
}

TrialSummary summarize_trial(const std::vector<RepetitionReport>& reps, int trial) {
    std::vector<double> train, test;
    for (const auto& r : reps) {
        if (r.trial == trial) {
            train.push_back(r.train_mse);
            test.push_back(r.test_mse);
        }
    }
    const Aggregate tr = aggregate_of(train);
    const Aggregate te = aggregate_of(test);
    return TrialSummary{trial, tr.mean, tr.stddev, te.mean, te.stddev};
}

void finalize(TrialsReport& report, int n_trials) {
    std::vector<double> train_means, test_means;
    for (int t = 0; t < n_trials; ++t) {
        report.per_trial.push_back(summarize_trial(report.repetitions, t));
        train_means.push_back(report.per_trial.back().train_mean);
        test_means.push_back(report.per_trial.back().test_mean);
    }
    report.train_aggregate = aggregate_of(train_means);
    report.test_aggregate = aggregate_of(test_means);
}

void validate_protocol(const ProtocolOptions& options) {
    if (options.n_trials < 1) throw ConfigError("n_trials must be >= 1");
    if (options.repetitions < 1) throw ConfigError("repetitions must be >= 1");
}

} // namespace

TrialsReport run_trials_de(const LabeledCorpus& corpus, const DEConfig& de,
                           const ProtocolOptions& options) {
    validate_protocol(options);
    de.validate();

    struct Job {
        int trial;
        int repetition;
    };
    std::vector<Job> jobs_list;
    std::vector<SplitIndices> splits;
    splits.reserve(static_cast<std::size_t>(options.n_trials));
    for (int t = 0; t < options.n_trials; ++t) {
        splits.push_back(split(corpus, options.train_fraction, split_seed(options, t)));
        for (int r = 0; r < options.repetitions; ++r) jobs_list.push_back({t, r});
    }

    TrialsReport report;
    report.repetitions.resize(jobs_list.size());
    const Bounds bounds = default_bounds();

    // Trials/repetitions are independent; inner DE evaluations stay
    // sequential so the thread count never changes any result.
    parallel_for(jobs_list.size(), options.jobs, [&](std::size_t j) {
        const auto [trial, repetition] = jobs_list[j];
        const SplitIndices& sp = splits[static_cast<std::size_t>(trial)];

        LabeledCorpus train_corpus;
        train_corpus.entries.reserve(sp.train.size());
        for (std::size_t idx : sp.train) train_corpus.entries.push_back(corpus.entries[idx]);

        DEConfig cfg = de;
        cfg.seed = de_seed(options, trial, repetition);
        if (!cfg.repair) cfg.repair = canonicalize_genome;
        const FitnessFn fn = [&](const ParamVector& genome) {
            return fitness_mse(genome, train_corpus, options.fixed);
        };
        const OptimizeResult result = optimize(fn, cfg, bounds, 1);

        const PipelineParams best = decode_genome(result.best.vector, options.fixed.lag,
                                                  options.fixed.bins, options.fixed.warmup);
        RepetitionReport rep;
        rep.trial = trial;
        rep.repetition = repetition;
        rep.genome = result.best.vector;
        rep.best_fitness = *result.best.fitness;
        rep.history = result.history;
        rep.train_mse = evaluate_params(best, corpus, sp.train, options.fixed.score_skip).mse;
        const EvalStats test_stats = evaluate_params(best, corpus, sp.test, options.fixed.score_skip);
        rep.test_mse = test_stats.mse;
        rep.test_confusion = test_stats.confusion;
        report.repetitions[j] = std::move(rep);
    });

    finalize(report, options.n_trials);
    return report;
}

TrialsReport run_trials_fixed(const LabeledCorpus& corpus, const PipelineParams& params,
                              const ProtocolOptions& options) {
    validate_protocol(options);
    params.validate();

    TrialsReport report;
    report.repetitions.resize(static_cast<std::size_t>(options.n_trials));
    parallel_for(static_cast<std::size_t>(options.n_trials), options.jobs, [&](std::size_t t) {
        const SplitIndices sp = split(corpus, options.train_fraction, split_seed(options, static_cast<int>(t)));
        RepetitionReport rep;
        rep.trial = static_cast<int>(t);
        rep.repetition = 0;
        rep.train_mse = evaluate_params(params, corpus, sp.train, options.fixed.score_skip).mse;
        const EvalStats test_stats = evaluate_params(params, corpus, sp.test, options.fixed.score_skip);
        rep.test_mse = test_stats.mse;
        rep.test_confusion = test_stats.confusion;
        report.repetitions[t] = std::move(rep);
    });

    finalize(report, options.n_trials);
    return report;
}

GridReport grid_study(const LabeledCorpus& corpus, const DEConfig& base,
                      const std::vector<double>& f_values, const std::vector<double>& cr_values,
                      const ProtocolOptions& options) {
    if (f_values.empty() || cr_values.empty()) {
        throw ConfigError("grid_study: F and CR value lists must be non-empty");
    }
    GridReport report;
    report.f_values = f_values;
    report.cr_values = cr_values;
    for (std::size_t ci = 0; ci < cr_values.size(); ++ci) {
        for (std::size_t fi = 0; fi < f_values.size(); ++fi) {
            DEConfig cfg = base;
            cfg.F = f_values[fi];
            cfg.CR = cr_values[ci];
            // Splits and optimizer seed streams are shared across cells
            // (paired design), so cell differences come from F/CR alone.
            ProtocolOptions cell_options = options;
            cell_options.repetitions = 1;
            const TrialsReport trials = run_trials_de(corpus, cfg, cell_options);
            GridCell cell;
            cell.F = f_values[fi];
            cell.CR = cr_values[ci];
            for (const auto& s : trials.per_trial) cell.trial_means.push_back(s.test_mean);
            cell.test = trials.test_aggregate;
            report.cells.push_back(std::move(cell));
        }
    }
    return report;
}

} // namespace stig
