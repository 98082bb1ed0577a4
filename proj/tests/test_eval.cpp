#include "stig/datagen.hpp"
#include "stig/eval.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace stig;

namespace {

LabeledCorpus small_corpus(int count, int months, int lag, std::uint64_t seed) {
    CorpusSpec spec;
    spec.count = count;
    spec.months = months;
    spec.lag = lag;
    spec.min_segment_months = std::max(12, months / 3);
    return synthesize_labeled(spec, seed).corpus;
}

// Corpus whose labels equal the pipeline output except exactly one scored
// point per series flipped by one class: every possible split then scores an
// identical, known MSE.
LabeledCorpus stub_corpus(int count, const PipelineParams& params, int score_skip) {
    LabeledCorpus corpus = small_corpus(count, 115, params.lag, 99);
    for (auto& entry : corpus.entries) {
        entry.labels.clear();
        const auto rows = run_pipeline(entry.series, params);
        for (const auto& row : rows) entry.labels.emplace_back(row.step, row.trend);
        // Flip one scored label by one class.
        auto& flipped = entry.labels.at(static_cast<std::size_t>(score_skip) + 10);
        flipped.second = flipped.second == Trend::stable ? Trend::increase : Trend::stable;
    }
    return corpus;
}

} // namespace

TEST_CASE("split partitions by series, seeded and exhaustive") {
    const LabeledCorpus corpus = small_corpus(10, 60, 12, 3);
    const SplitIndices sp = split(corpus, 0.2, 77);
    CHECK(sp.train.size() == 2);
    CHECK(sp.test.size() == 8);

    std::set<std::size_t> all(sp.train.begin(), sp.train.end());
    all.insert(sp.test.begin(), sp.test.end());
    CHECK(all.size() == 10);

    const SplitIndices again = split(corpus, 0.2, 77);
    CHECK(again.train == sp.train);
    CHECK(again.test == sp.test);
    const SplitIndices other = split(corpus, 0.2, 78);
    CHECK(other.train != sp.train);

    CHECK_THROWS_AS(split(corpus, 1.0, 1), ConfigError);
    CHECK_THROWS_AS(split(corpus, 0.0, 1), ConfigError);
    const LabeledCorpus tiny = small_corpus(4, 60, 12, 3);
    CHECK_THROWS_AS(split(tiny, 0.2, 1), DataError);
}

TEST_CASE("student-t critical values and aggregates") {
    CHECK(student_t95(4) == doctest::Approx(2.776));
    CHECK(student_t95(1) == doctest::Approx(12.706));
    CHECK(student_t95(100) == doctest::Approx(1.96));

    const Aggregate a = aggregate_of({1.0, 2.0, 3.0});
    CHECK(a.mean == doctest::Approx(2.0));
    CHECK(a.stddev == doctest::Approx(1.0));
    CHECK(a.ci95_half == doctest::Approx(4.303 / std::sqrt(3.0)));
    CHECK(a.n == 3);

    const Aggregate single = aggregate_of({0.5});
    CHECK(single.mean == 0.5);
    CHECK(single.stddev == 0.0);
    CHECK(single.ci95_half == 0.0);
}

TEST_CASE("confusion matrix mse matches the residual definition") {
    Confusion c;
    c.add(Trend::increase, Trend::increase);
    c.add(Trend::increase, Trend::stable);   // residual 1
    c.add(Trend::decrease, Trend::increase); // residual 4
    c.add(Trend::stable, Trend::stable);
    CHECK(c.total() == 4);
    CHECK(c.mse() == doctest::Approx((0.0 + 1.0 + 4.0 + 0.0) / 4.0));
}

TEST_CASE("evaluate_params agrees with an independent fitness recomputation") {
    const LabeledCorpus corpus = small_corpus(6, 90, 12, 21);
    PipelineParams params;
    params.lag = 12;
    params.bins = 150;
    const int skip = 3;

    std::vector<std::size_t> indices{0, 2, 4};
    const EvalStats stats = evaluate_params(params, corpus, indices, skip);

    double sum_sq = 0.0;
    std::size_t points = 0;
    for (std::size_t idx : indices) {
        const auto rows = run_pipeline(corpus.entries[idx].series, params);
        const ScoreTally tally = score_series(rows, corpus.entries[idx].labels, skip);
        sum_sq += tally.sum_sq;
        points += tally.points;
    }
    REQUIRE(points == stats.points);
    CHECK(stats.mse == doctest::Approx(sum_sq / points).epsilon(1e-12));
    CHECK(stats.confusion.mse() == doctest::Approx(stats.mse).epsilon(1e-12));
    CHECK(stats.confusion.total() == static_cast<long long>(stats.points));
}

TEST_CASE("fixed-mode trials on a constant-error stub have zero CI width") {
    PipelineParams params;
    params.lag = 12;
    params.bins = 150;
    const LabeledCorpus corpus = stub_corpus(8, params, 3);

    ProtocolOptions options;
    options.n_trials = 4;
    options.repetitions = 1;
    options.train_fraction = 0.25;
    options.seed = 5;
    options.fixed.lag = 12;
    options.fixed.bins = 150;

    const TrialsReport report = run_trials_fixed(corpus, params, options);
    REQUIRE(report.per_trial.size() == 4);
    for (const auto& t : report.per_trial) {
        CHECK(t.test_mean == doctest::Approx(0.01).epsilon(1e-12));
        CHECK(t.train_mean == doctest::Approx(0.01).epsilon(1e-12));
    }
    CHECK(report.test_aggregate.mean == doctest::Approx(0.01).epsilon(1e-12));
    CHECK(report.test_aggregate.stddev == doctest::Approx(0.0));
    CHECK(report.test_aggregate.ci95_half == doctest::Approx(0.0));

    // Confusion-derived MSE equals the reported MSE on every repetition.
    for (const auto& rep : report.repetitions) {
        CHECK(rep.test_confusion.mse() == doctest::Approx(rep.test_mse).epsilon(1e-12));
    }
}

TEST_CASE("DE trials improve on the expert baseline splits deterministically") {
    // Small corpus and budget: this is a wiring test, not the protocol.
    const LabeledCorpus corpus = small_corpus(6, 70, 12, 31);
    DEConfig de;
    de.population_size = 8;
    de.generations = 4;
    de.injected.push_back(expert_genome());

    ProtocolOptions options;
    options.n_trials = 2;
    options.repetitions = 2;
    options.train_fraction = 0.34; // 2 of 6
    options.seed = 9;
    options.fixed.lag = 12;
    options.fixed.bins = 120;

    const TrialsReport a = run_trials_de(corpus, de, options);
    const TrialsReport b = run_trials_de(corpus, de, options);
    REQUIRE(a.repetitions.size() == 4);
    CHECK(a.test_aggregate.mean == b.test_aggregate.mean);
    for (std::size_t i = 0; i < a.repetitions.size(); ++i) {
        CHECK(a.repetitions[i].test_mse == b.repetitions[i].test_mse);
        CHECK(a.repetitions[i].genome == b.repetitions[i].genome);
        CHECK(a.repetitions[i].history.size() == 5);
        // Best-ever history is monotone.
        for (std::size_t g = 1; g < a.repetitions[i].history.size(); ++g) {
            CHECK(a.repetitions[i].history[g] <= a.repetitions[i].history[g - 1]);
        }
        CHECK(a.repetitions[i].test_mse >= 0.0);
        CHECK(a.repetitions[i].test_mse <= 4.0);
    }

    // jobs must not change results.
    ProtocolOptions threaded = options;
    threaded.jobs = 3;
    const TrialsReport c = run_trials_de(corpus, de, threaded);
    for (std::size_t i = 0; i < a.repetitions.size(); ++i) {
        CHECK(a.repetitions[i].test_mse == c.repetitions[i].test_mse);
        CHECK(a.repetitions[i].genome == c.repetitions[i].genome);
    }
}

TEST_CASE("single-cell grid reduces to run_trials") {
    const LabeledCorpus corpus = small_corpus(6, 70, 12, 31);
    DEConfig de;
    de.population_size = 8;
    de.generations = 3;
    de.injected.push_back(expert_genome());

    ProtocolOptions options;
    options.n_trials = 2;
    options.repetitions = 1;
    options.train_fraction = 0.34;
    options.seed = 9;
    options.fixed.lag = 12;
    options.fixed.bins = 120;

    const GridReport grid = grid_study(corpus, de, {0.6}, {0.6}, options);
    REQUIRE(grid.cells.size() == 1);

    const TrialsReport direct = run_trials_de(corpus, de, options);
    CHECK(grid.cells[0].test.mean == doctest::Approx(direct.test_aggregate.mean).epsilon(1e-15));
    CHECK(grid.cells[0].trial_means.size() == 2);

    CHECK_THROWS_AS(grid_study(corpus, de, {}, {0.6}, options), ConfigError);
}
