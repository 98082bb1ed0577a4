// stigtrend: command-line front end for the trend-detection pipeline.
//
//   gen    synthesize a labeled corpus from a spec
//   train  adapt the 8 structural parameters by differential evolution
//   run    classify series with a given parameter set
//   eval   repeated-holdout protocol, expert baseline, F x CR grid study
//
// All randomness derives from --seed; outputs other than the run manifest
// are byte-reproducible for a fixed seed.

#include "stig/io.hpp"
#include "stig/parallel.hpp"
#include "stig/version.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace stig;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitRuntime = 4;

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct CommonOpts {
    std::uint64_t seed = 42;
    int jobs = default_jobs();
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--seed", opts.seed, "Master seed; all randomness derives from it");
    cmd->add_option("--jobs", opts.jobs, "Worker threads (results do not depend on this)")
        ->check(CLI::PositiveNumber);
}

void write_manifest(const fs::path& dir, RunManifest manifest, const Stopwatch& watch) {
    manifest.wall_seconds = watch.seconds();
    write_json_file(dir / "manifest.json", manifest_to_json(manifest));
}

PipelineParams load_params_file(const fs::path& path) {
    const json j = read_json_file(path);
    // Accept both a bare parameter document and a train report wrapping one.
    if (j.is_object() && j.contains("params")) return params_from_json(j.at("params"));
    return params_from_json(j);
}

int cmd_gen(const fs::path& spec_path, const fs::path& out_dir, const CommonOpts& opts) {
    Stopwatch watch;
    const CorpusSpec spec = corpus_spec_from_json(read_json_file(spec_path));
    const SyntheticCorpus generated = synthesize_labeled(spec, opts.seed);
    save_corpus(out_dir, generated.corpus, spec, opts.seed);

    RunManifest manifest;
    manifest.command = "gen";
    manifest.seed = opts.seed;
    manifest.inputs = {{"spec", spec_path.string()}};
    manifest.outputs = {{"corpus", (out_dir / "corpus.csv").string()},
                        {"labels", (out_dir / "labels.csv").string()},
                        {"meta", (out_dir / "corpus_meta.json").string()}};
    write_manifest(out_dir, manifest, watch);
    std::cout << "wrote " << generated.corpus.size() << " series to " << out_dir.string() << "\n";
    return 0;
}

FixedSettings resolve_fixed(const fs::path& corpus_dir, std::optional<int> lag,
                            std::optional<int> bins) {
    FixedSettings fixed;
    const CorpusMeta meta = load_corpus_meta(corpus_dir);
    if (meta.present) fixed.lag = meta.spec.lag;
    if (lag) fixed.lag = *lag;
    if (bins) fixed.bins = *bins;
    return fixed;
}

int cmd_train(const fs::path& corpus_dir, const fs::path& de_path, const fs::path& out_path,
              std::optional<fs::path> history_path, std::optional<int> lag,
              std::optional<int> bins, bool no_expert_injection, const CommonOpts& opts) {
    Stopwatch watch;
    const LabeledCorpus corpus = load_corpus(corpus_dir);
    DEConfig de = de_from_json(read_json_file(de_path));
    de.seed = Rng::derive(opts.seed, {0xde00ULL});
    de.repair = canonicalize_genome;
    if (!no_expert_injection && de.injected.empty()) de.injected.push_back(expert_genome());

    const FixedSettings fixed = resolve_fixed(corpus_dir, lag, bins);
    const FitnessFn fn = [&](const ParamVector& genome) {
        return fitness_mse(genome, corpus, fixed);
    };
    const OptimizeResult result = optimize(fn, de, default_bounds(), opts.jobs);

    json out;
    out["fitness"] = *result.best.fitness;
    out["genome"] = result.best.vector;
    out["params"] =
        params_to_json(decode_genome(result.best.vector, fixed.lag, fixed.bins, fixed.warmup));
    out["generations"] = de.generations;
    out["evaluations"] = result.evaluations;
    write_json_file(out_path, out);

    const fs::path hist = history_path.value_or(out_path.parent_path() / "history.csv");
    write_text_file(hist, history_csv(result.history));

    RunManifest manifest;
    manifest.command = "train";
    manifest.seed = opts.seed;
    manifest.inputs = {{"corpus", corpus_dir.string()}, {"de", de_path.string()}};
    manifest.outputs = {{"params", out_path.string()}, {"history", hist.string()}};
    write_manifest(out_path.parent_path().empty() ? fs::path(".") : out_path.parent_path(),
                   manifest, watch);
    std::cout << "best fitness " << format_double(*result.best.fitness) << " after "
              << result.evaluations << " evaluations\n";
    return 0;
}

int cmd_run(const fs::path& series_path, const fs::path& params_path, const fs::path& out_path,
            std::optional<int> lag, std::optional<int> bins) {
    Stopwatch watch;
    PipelineParams params = load_params_file(params_path);
    if (lag) params.lag = *lag;
    if (bins) params.bins = *bins;
    params.validate();

    std::ifstream f(series_path);
    if (!f) throw DataError("cannot open " + series_path.string());
    const std::vector<TimeSeries> series = read_series_csv(f);
    if (series.empty()) throw DataError("no series in " + series_path.string());

    std::ostringstream os;
    write_classes_header(os);
    for (const auto& s : series) {
        write_classes_rows(os, s, run_pipeline(s, params));
    }
    write_text_file(out_path, os.str());

    RunManifest manifest;
    manifest.command = "run";
    manifest.inputs = {{"series", series_path.string()}, {"params", params_path.string()}};
    manifest.outputs = {{"classes", out_path.string()}};
    write_manifest(out_path.parent_path().empty() ? fs::path(".") : out_path.parent_path(),
                   manifest, watch);
    std::cout << "classified " << series.size() << " series\n";
    return 0;
}

int cmd_eval(const fs::path& corpus_dir, std::optional<fs::path> de_path,
             std::optional<fs::path> params_path, const fs::path& report_path, bool expert,
             bool grid, int n_trials, int repetitions, double train_fraction,
             std::optional<int> lag, std::optional<int> bins, const CommonOpts& opts) {
    Stopwatch watch;
    const LabeledCorpus corpus = load_corpus(corpus_dir);

    ProtocolOptions protocol;
    protocol.n_trials = n_trials;
    protocol.repetitions = repetitions;
    protocol.train_fraction = train_fraction;
    protocol.seed = opts.seed;
    protocol.jobs = opts.jobs;
    protocol.fixed = resolve_fixed(corpus_dir, lag, bins);

    json report;
    report["protocol"] = {{"n_trials", protocol.n_trials},
                          {"repetitions", protocol.repetitions},
                          {"train_fraction", protocol.train_fraction},
                          {"seed", protocol.seed},
                          {"lag", protocol.fixed.lag},
                          {"bins", protocol.fixed.bins},
                          {"warmup", protocol.fixed.warmup},
                          {"score_skip", protocol.fixed.score_skip}};

    RunManifest manifest;
    manifest.command = "eval";
    manifest.seed = opts.seed;
    manifest.inputs = {{"corpus", corpus_dir.string()}};
    const fs::path out_dir =
        report_path.parent_path().empty() ? fs::path(".") : report_path.parent_path();

    if (expert || params_path) {
        const PipelineParams params =
            params_path ? load_params_file(*params_path) : expert_defaults();
        report["mode"] = expert ? "expert" : "fixed";
        report["params"] = params_to_json(params);
        const TrialsReport trials = run_trials_fixed(corpus, params, protocol);
        report["trials"] = trials_report_to_json(trials);
        write_text_file(out_dir / "table3.csv", per_trial_table_csv(trials));
        manifest.outputs.emplace_back("table3", (out_dir / "table3.csv").string());
        if (params_path) manifest.inputs.emplace_back("params", params_path->string());
    } else {
        if (!de_path) throw ConfigError("eval: need --de, --params or --expert");
        DEConfig de = de_from_json(read_json_file(*de_path));
        if (de.injected.empty()) de.injected.push_back(expert_genome());
        manifest.inputs.emplace_back("de", de_path->string());
        report["mode"] = grid ? "grid" : "de";
        report["de"] = de_to_json(de);

        if (grid) {
            const std::vector<double> f_values{0.4, 0.6, 0.8};
            const std::vector<double> cr_values{0.3, 0.6, 0.9};
            const GridReport grid_report = grid_study(corpus, de, f_values, cr_values, protocol);
            report["grid"] = grid_report_to_json(grid_report);
            write_text_file(out_dir / "table2.csv", grid_table_csv(grid_report));
            manifest.outputs.emplace_back("table2", (out_dir / "table2.csv").string());
        } else {
            const TrialsReport trials = run_trials_de(corpus, de, protocol);
            report["trials"] = trials_report_to_json(trials);
            write_text_file(out_dir / "table3.csv", per_trial_table_csv(trials));
            manifest.outputs.emplace_back("table3", (out_dir / "table3.csv").string());

            // Non-adapted baseline on the same splits, for the adaptation-gain
            // comparison.
            const TrialsReport expert_trials =
                run_trials_fixed(corpus, expert_defaults(), protocol);
            report["expert"] = trials_report_to_json(expert_trials);
        }
    }

    write_json_file(report_path, report);
    manifest.outputs.emplace_back("report", report_path.string());
    write_manifest(out_dir, manifest, watch);
    std::cout << "report written to " << report_path.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{std::string(kToolName) + " " + kVersion +
                 " - trend detection in indicator time series"};
    app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);
    app.require_subcommand(1);

    CommonOpts gen_opts, train_opts, eval_opts;

    // gen
    auto* gen = app.add_subcommand("gen", "Synthesize a labeled corpus");
    fs::path gen_spec, gen_out;
    gen->add_option("--spec", gen_spec, "Corpus spec JSON")->required();
    gen->add_option("--out", gen_out, "Output directory")->required();
    add_common(gen, gen_opts);

    // train
    auto* train = app.add_subcommand("train", "Tune parameters by differential evolution");
    fs::path train_corpus, train_de, train_out;
    std::optional<fs::path> train_history;
    std::optional<int> train_lag, train_bins;
    bool train_no_expert = false;
    train->add_option("--corpus", train_corpus, "Corpus directory (corpus.csv + labels.csv)")
        ->required();
    train->add_option("--de", train_de, "DE config JSON")->required();
    train->add_option("--out", train_out, "Output params JSON")->required();
    train->add_option("--history", train_history, "Fitness history CSV path");
    train->add_option("--lag", train_lag, "Comparison lag override");
    train->add_option("--bins", train_bins, "Track resolution override");
    train->add_flag("--no-expert-injection", train_no_expert,
                    "Start from a fully random population");
    add_common(train, train_opts);

    // run
    auto* run = app.add_subcommand("run", "Classify series with fixed parameters");
    fs::path run_series, run_params, run_out;
    std::optional<int> run_lag, run_bins;
    run->add_option("--series", run_series, "Input series CSV")->required();
    run->add_option("--params", run_params, "Pipeline params JSON")->required();
    run->add_option("--out", run_out, "Output classes CSV")->required();
    run->add_option("--lag", run_lag, "Comparison lag override");
    run->add_option("--bins", run_bins, "Track resolution override");

    // eval
    auto* eval = app.add_subcommand("eval", "Repeated-holdout evaluation protocol");
    fs::path eval_corpus, eval_report;
    std::optional<fs::path> eval_de, eval_params;
    std::optional<int> eval_lag, eval_bins;
    bool eval_expert = false, eval_grid = false;
    int eval_trials = 5, eval_reps = 5;
    double eval_fraction = 0.2;
    eval->add_option("--corpus", eval_corpus, "Corpus directory")->required();
    auto* de_opt = eval->add_option("--de", eval_de, "DE config JSON (adaptation mode)");
    auto* params_opt =
        eval->add_option("--params", eval_params, "Fixed params JSON (no adaptation)");
    eval->add_option("--report", eval_report, "Output report JSON")->required();
    auto* expert_flag =
        eval->add_flag("--expert", eval_expert, "Evaluate the expert defaults without adaptation");
    auto* grid_flag = eval->add_flag("--grid", eval_grid, "Run the F x CR grid study");
    params_opt->excludes(de_opt)->excludes(expert_flag)->excludes(grid_flag);
    expert_flag->excludes(de_opt)->excludes(grid_flag);
    eval->add_option("--trials", eval_trials, "Number of trials")->check(CLI::PositiveNumber);
    eval->add_option("--reps", eval_reps, "Repetitions per trial")->check(CLI::PositiveNumber);
    eval->add_option("--train-fraction", eval_fraction, "Train share of the corpus");
    eval->add_option("--lag", eval_lag, "Comparison lag override");
    eval->add_option("--bins", eval_bins, "Track resolution override");
    add_common(eval, eval_opts);

    try {
        app.parse(argc, argv);
        if (gen->parsed()) return cmd_gen(gen_spec, gen_out, gen_opts);
        if (train->parsed()) {
            return cmd_train(train_corpus, train_de, train_out, train_history, train_lag,
                             train_bins, train_no_expert, train_opts);
        }
        if (run->parsed()) return cmd_run(run_series, run_params, run_out, run_lag, run_bins);
        if (eval->parsed()) {
            return cmd_eval(eval_corpus, eval_de, eval_params, eval_report, eval_expert, eval_grid,
                            eval_trials, eval_reps, eval_fraction, eval_lag, eval_bins, eval_opts);
        }
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}
