#pragma once

#include "stig/corpus.hpp"
#include "stig/datagen.hpp"
#include "stig/eval.hpp"
#include "stig/optimizer.hpp"
#include "stig/pipeline.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace stig {

using json = nlohmann::ordered_json;

/// Shortest round-trip decimal representation; used for every double that
/// lands in a CSV cell so outputs are byte-stable.
std::string format_double(double v);

// --- CSV ---------------------------------------------------------------

/// `region_id,indicator,step,value` rows, one block per series.
void write_series_csv(std::ostream& os, const std::vector<TimeSeries>& series);
std::vector<TimeSeries> read_series_csv(std::istream& is);

/// `region_id,indicator,step,label` rows, aligned with the series file.
void write_labels_csv(std::ostream& os, const LabeledCorpus& corpus);

/// `region_id,indicator,step,class,delta,flag` classification rows.
void write_classes_header(std::ostream& os);
void write_classes_rows(std::ostream& os, const TimeSeries& series,
                        const std::vector<Classification>& rows);

/// Joins corpus.csv and labels.csv from a directory. Every series must have
/// at least one label row.
LabeledCorpus load_corpus(const std::filesystem::path& dir);

/// Writes corpus.csv, labels.csv and corpus_meta.json into `dir`.
void save_corpus(const std::filesystem::path& dir, const LabeledCorpus& corpus,
                 const CorpusSpec& spec, std::uint64_t seed);

/// Reads the generation metadata left by save_corpus, if present.
struct CorpusMeta {
    CorpusSpec spec;
    std::uint64_t seed = 0;
    bool present = false;
};
CorpusMeta load_corpus_meta(const std::filesystem::path& dir);

// --- JSON configs ------------------------------------------------------

json params_to_json(const PipelineParams& params);
PipelineParams params_from_json(const json& j);

json de_to_json(const DEConfig& config);
DEConfig de_from_json(const json& j);

json corpus_spec_to_json(const CorpusSpec& spec);
CorpusSpec corpus_spec_from_json(const json& j);

// --- Reports -----------------------------------------------------------

json trials_report_to_json(const TrialsReport& report);
json grid_report_to_json(const GridReport& report);

/// `trial,train_mse_mean,train_mse_std,test_mse_mean,test_mse_std` rows.
std::string per_trial_table_csv(const TrialsReport& report);

/// Pivot table with CR rows and F columns, cells "mean +- ci95".
std::string grid_table_csv(const GridReport& report);

/// `generation,best_fitness` rows.
std::string history_csv(const std::vector<double>& history);

// --- Run manifest ------------------------------------------------------

/// Every CLI run writes one of these alongside its outputs. The manifest is
/// the only output carrying volatile data (timestamp, wall time); everything
/// else is reproducible byte-for-byte from the seed.
struct RunManifest {
    std::string command;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, std::string>> inputs;
    std::vector<std::pair<std::string, std::string>> outputs;
    double wall_seconds = 0.0;
};

json manifest_to_json(const RunManifest& manifest);

// --- Files -------------------------------------------------------------

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& content);
json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

} // namespace stig
