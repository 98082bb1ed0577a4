#include "stig/optimizer.hpp"

#include "stig/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace stig {

void Bounds::validate() const {
    for (std::size_t d = 0; d < kParamCount; ++d) {
        if (!(ranges[d].first < ranges[d].second)) {
            throw ConfigError("bounds: low < high violated in dimension " + std::to_string(d));
        }
    }
}

double Bounds::clamp(double x, std::size_t dim) const {
    return std::clamp(x, ranges[dim].first, ranges[dim].second);
}

Bounds Bounds::unit(double inset) {
    Bounds b;
    for (auto& r : b.ranges) r = {inset, 1.0 - inset};
    return b;
}

Bounds default_bounds() { return Bounds::unit(); }

namespace {

// Order-repair a threshold pair into a valid (alpha, beta) with a minimal
// separation inside (lo_limit, hi_limit).
SmfParams repair_pair(double a, double b, double hi_limit) {
    double lo = std::min(a, b);
    double hi = std::max(a, b);
    const double min_sep = 1e-9 * hi_limit;
    if (hi - lo < min_sep) {
        hi = lo + min_sep;
        if (hi > hi_limit) {
            hi = hi_limit;
            lo = hi - min_sep;
        }
    }
    return SmfParams{lo, hi};
}

} // namespace

PipelineParams decode_genome(const ParamVector& g, int lag, int bins, int warmup) {
    PipelineParams p;
    p.marking = repair_pair(g[0], g[1], 1.0);
    p.epsilon = g[2];
    p.theta = g[3];
    const double i_max = saturation_height(1.0, p.theta);
    p.prototyping = repair_pair(g[4] * i_max, g[5] * i_max, i_max);
    p.dissimilarity = repair_pair(g[6], g[7], 1.0);
    p.lag = lag;
    p.bins = bins;
    p.warmup = warmup;
    return p;
}

ParamVector expert_genome() {
    const PipelineParams p = expert_defaults();
    const double i_max = p.saturation();
    return ParamVector{p.marking.alpha,         p.marking.beta,
                       p.epsilon,               p.theta,
                       p.prototyping.alpha / i_max, p.prototyping.beta / i_max,
                       p.dissimilarity.alpha,   p.dissimilarity.beta};
}

void DEConfig::validate() const {
    if (population_size < 4) {
        throw ConfigError("population_size must be >= 4, got " + std::to_string(population_size));
    }
    if (!(F >= 0.0 && F <= 2.0)) {
        throw ConfigError("F must be in [0,2], got " + std::to_string(F));
    }
    if (!(CR >= 0.0 && CR <= 1.0)) {
        throw ConfigError("CR must be in [0,1], got " + std::to_string(CR));
    }
    if (generations < 0) {
        throw ConfigError("generations must be >= 0, got " + std::to_string(generations));
    }
    if (injected.size() > static_cast<std::size_t>(population_size)) {
        throw ConfigError("more injected candidates (" + std::to_string(injected.size()) +
                          ") than population slots (" + std::to_string(population_size) + ")");
    }
}

ParamVector mutant_vector(const ParamVector& x_r1, const ParamVector& x_best,
                          const ParamVector& x_r2, const ParamVector& x_r3, double F,
                          const Bounds& bounds) {
    ParamVector v;
    for (std::size_t d = 0; d < kParamCount; ++d) {
        v[d] = bounds.clamp(x_r1[d] + F * (x_best[d] - x_r1[d]) + F * (x_r2[d] - x_r3[d]), d);
    }
    return v;
}

ParamVector mutate(const std::vector<Candidate>& population, std::size_t target_idx,
                   std::size_t best_idx, double F, const Bounds& bounds, Rng& rng) {
    const std::size_t n = population.size();
    if (n < 4) throw ConfigError("mutation needs a population of at least 4");
    std::size_t r1, r2, r3;
    do {
        r1 = rng.uniform_index(n);
    } while (r1 == target_idx);
    do {
        r2 = rng.uniform_index(n);
    } while (r2 == target_idx || r2 == r1);
    do {
        r3 = rng.uniform_index(n);
    } while (r3 == target_idx || r3 == r1 || r3 == r2);
    return mutant_vector(population[r1].vector, population[best_idx].vector, population[r2].vector,
                         population[r3].vector, F, bounds);
}

ParamVector crossover_binomial(const ParamVector& target, const ParamVector& mutant, double CR,
                               Rng& rng) {
    const std::size_t j_rand = rng.uniform_index(kParamCount);
    ParamVector trial;
    for (std::size_t j = 0; j < kParamCount; ++j) {
        trial[j] = (rng.uniform() < CR || j == j_rand) ? mutant[j] : target[j];
    }
    return trial;
}

void canonicalize_genome(ParamVector& v) {
    // Threshold pairs are unordered in genome space; keeping the population in
    // the alpha <= beta half-space stops difference vectors from straddling
    // mirrored basins.
    if (v[0] > v[1]) std::swap(v[0], v[1]);
    if (v[4] > v[5]) std::swap(v[4], v[5]);
    if (v[6] > v[7]) std::swap(v[6], v[7]);
}

const Candidate& select(const Candidate& target, const Candidate& trial) {
    if (!target.fitness || !trial.fitness) {
        throw ConfigError("select: both candidates must be evaluated");
    }
    return *trial.fitness <= *target.fitness ? trial : target;
}

OptimizeResult optimize(const FitnessFn& fitness, const DEConfig& config, const Bounds& bounds,
                        int jobs) {
    config.validate();
    bounds.validate();
    Rng rng(config.seed);

    const std::size_t n = static_cast<std::size_t>(config.population_size);
    std::vector<Candidate> population(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i < config.injected.size()) {
            for (std::size_t d = 0; d < kParamCount; ++d) {
                population[i].vector[d] = bounds.clamp(config.injected[i][d], d);
            }
        } else {
            for (std::size_t d = 0; d < kParamCount; ++d) {
                population[i].vector[d] = rng.uniform(bounds.ranges[d].first, bounds.ranges[d].second);
            }
        }
        if (config.repair) config.repair(population[i].vector);
    }

    OptimizeResult result;
    parallel_for(n, jobs, [&](std::size_t i) { population[i].fitness = fitness(population[i].vector); });
    result.evaluations = n;

    auto best_index = [&population]() {
        std::size_t best = 0;
        for (std::size_t i = 1; i < population.size(); ++i) {
            if (*population[i].fitness < *population[best].fitness) best = i;
        }
        return best;
    };

    std::size_t best = best_index();
    result.best = population[best];
    result.history.push_back(*result.best.fitness);

    std::vector<Candidate> trials(n);
    for (int gen = 0; gen < config.generations; ++gen) {
        // Trial construction is sequential so the RNG stream is independent
        // of evaluation concurrency.
        for (std::size_t i = 0; i < n; ++i) {
            const ParamVector mutant = mutate(population, i, best, config.F, bounds, rng);
            trials[i].vector = crossover_binomial(population[i].vector, mutant, config.CR, rng);
            if (config.repair) config.repair(trials[i].vector);
            trials[i].fitness.reset();
        }
        parallel_for(n, jobs, [&](std::size_t i) { trials[i].fitness = fitness(trials[i].vector); });
        result.evaluations += n;
        for (std::size_t i = 0; i < n; ++i) {
            population[i] = select(population[i], trials[i]);
        }
        best = best_index();
        if (*population[best].fitness < *result.best.fitness) {
            result.best = population[best];
        }
        result.history.push_back(*result.best.fitness);
    }
    return result;
}

ScoreTally score_series(const std::vector<Classification>& emitted,
                        const std::vector<std::pair<long long, Trend>>& labels, int score_skip) {
    ScoreTally tally;
    std::size_t li = 0;
    for (std::size_t i = static_cast<std::size_t>(std::max(0, score_skip)); i < emitted.size(); ++i) {
        const long long step = emitted[i].step;
        while (li < labels.size() && labels[li].first < step) ++li;
        if (li == labels.size()) break;
        if (labels[li].first != step) continue;
        const double diff = trend_to_int(labels[li].second) - trend_to_int(emitted[i].trend);
        tally.sum_sq += diff * diff;
        tally.points += 1;
    }
    return tally;
}

double fitness_mse(const ParamVector& genome, const LabeledCorpus& corpus,
                   const FixedSettings& fixed) {
    if (corpus.empty()) throw DataError("fitness_mse: empty corpus");
    const PipelineParams params = decode_genome(genome, fixed.lag, fixed.bins, fixed.warmup);
    double sum_sq = 0.0;
    std::size_t points = 0;
    for (const auto& entry : corpus.entries) {
        const auto emitted = run_pipeline(entry.series, params);
        const ScoreTally tally = score_series(emitted, entry.labels, fixed.score_skip);
        sum_sq += tally.sum_sq;
        points += tally.points;
    }
    if (points == 0) throw DataError("fitness_mse: no scored comparison points");
    return sum_sq / static_cast<double>(points);
}

} // namespace stig
