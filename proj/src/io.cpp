#include "stig/io.hpp"

#include "stig/version.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <ctime>
#include <fstream>
#include <map>
#include <sstream>

namespace stig {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return fields;
}

double parse_double(const std::string& s, const std::string& ctx) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError(ctx + ": bad number '" + s + "'");
    }
}

long long parse_int(const std::string& s, const std::string& ctx) {
    try {
        std::size_t used = 0;
        const long long v = std::stoll(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw DataError(ctx + ": bad integer '" + s + "'");
    }
}

} // namespace

void write_series_csv(std::ostream& os, const std::vector<TimeSeries>& series) {
    os << "region_id,indicator,step,value\n";
    for (const auto& s : series) {
        const std::string ind = indicator_to_string(s.indicator);
        for (const auto& sample : s.samples) {
            os << s.region_id << ',' << ind << ',' << sample.step << ','
               << format_double(sample.value) << '\n';
        }
    }
}

std::vector<TimeSeries> read_series_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw DataError("series csv: empty file");
    if (split_csv_line(line) != std::vector<std::string>{"region_id", "indicator", "step", "value"}) {
        throw DataError("series csv: expected header region_id,indicator,step,value");
    }
    std::vector<TimeSeries> out;
    std::map<std::pair<std::string, std::string>, std::size_t> index;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        const std::string ctx = "series csv line " + std::to_string(line_no);
        if (fields.size() != 4) throw DataError(ctx + ": expected 4 fields");
        const auto key = std::make_pair(fields[0], fields[1]);
        auto it = index.find(key);
        if (it == index.end()) {
            TimeSeries s;
            s.region_id = fields[0];
            s.indicator = indicator_from_string(fields[1]);
            out.push_back(std::move(s));
            it = index.emplace(key, out.size() - 1).first;
        }
        out[it->second].samples.push_back(
            {parse_int(fields[2], ctx), parse_double(fields[3], ctx)});
    }
    for (const auto& s : out) s.validate();
    return out;
}

void write_labels_csv(std::ostream& os, const LabeledCorpus& corpus) {
    os << "region_id,indicator,step,label\n";
    for (const auto& entry : corpus.entries) {
        const std::string ind = indicator_to_string(entry.series.indicator);
        for (const auto& [step, cls] : entry.labels) {
            os << entry.series.region_id << ',' << ind << ',' << step << ',' << trend_to_int(cls)
               << '\n';
        }
    }
}

void write_classes_header(std::ostream& os) { os << "region_id,indicator,step,class,delta,flag\n"; }

void write_classes_rows(std::ostream& os, const TimeSeries& series,
                        const std::vector<Classification>& rows) {
    const std::string ind = indicator_to_string(series.indicator);
    for (const auto& row : rows) {
        os << series.region_id << ',' << ind << ',' << row.step << ',' << trend_to_int(row.trend)
           << ',' << format_double(row.delta) << ',' << (row.degenerate ? "degenerate" : "")
           << '\n';
    }
}

LabeledCorpus load_corpus(const std::filesystem::path& dir) {
    const auto series_path = dir / "corpus.csv";
    const auto labels_path = dir / "labels.csv";
    std::ifstream series_file(series_path);
    if (!series_file) throw DataError("cannot open " + series_path.string());
    std::ifstream labels_file(labels_path);
    if (!labels_file) throw DataError("cannot open " + labels_path.string());

    std::vector<TimeSeries> series = read_series_csv(series_file);

    std::map<std::pair<std::string, std::string>, std::vector<std::pair<long long, Trend>>> labels;
    std::string line;
    if (!std::getline(labels_file, line)) throw DataError("labels csv: empty file");
    if (split_csv_line(line) != std::vector<std::string>{"region_id", "indicator", "step", "label"}) {
        throw DataError("labels csv: expected header region_id,indicator,step,label");
    }
    std::size_t line_no = 1;
    while (std::getline(labels_file, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        const std::string ctx = "labels csv line " + std::to_string(line_no);
        if (fields.size() != 4) throw DataError(ctx + ": expected 4 fields");
        labels[{fields[0], fields[1]}].emplace_back(
            parse_int(fields[2], ctx), trend_from_int(static_cast<int>(parse_int(fields[3], ctx))));
    }

    LabeledCorpus corpus;
    corpus.entries.reserve(series.size());
    for (auto& s : series) {
        const auto key = std::make_pair(s.region_id, indicator_to_string(s.indicator));
        const auto it = labels.find(key);
        if (it == labels.end() || it->second.empty()) {
            throw DataError("no labels for series " + s.region_id + "/" + key.second);
        }
        LabeledSeries entry;
        entry.labels = it->second;
        std::sort(entry.labels.begin(), entry.labels.end());
        entry.series = std::move(s);
        corpus.entries.push_back(std::move(entry));
    }
    return corpus;
}

void save_corpus(const std::filesystem::path& dir, const LabeledCorpus& corpus,
                 const CorpusSpec& spec, std::uint64_t seed) {
    std::filesystem::create_directories(dir);
    {
        std::ostringstream os;
        std::vector<TimeSeries> series;
        series.reserve(corpus.entries.size());
        for (const auto& e : corpus.entries) series.push_back(e.series);
        write_series_csv(os, series);
        write_text_file(dir / "corpus.csv", os.str());
    }
    {
        std::ostringstream os;
        write_labels_csv(os, corpus);
        write_text_file(dir / "labels.csv", os.str());
    }
    json meta;
    meta["seed"] = seed;
    meta["spec"] = corpus_spec_to_json(spec);
    write_json_file(dir / "corpus_meta.json", meta);
}

CorpusMeta load_corpus_meta(const std::filesystem::path& dir) {
    CorpusMeta meta;
    const auto path = dir / "corpus_meta.json";
    if (!std::filesystem::exists(path)) return meta;
    const json j = read_json_file(path);
    meta.spec = corpus_spec_from_json(j.at("spec"));
    meta.seed = j.value("seed", 0ULL);
    meta.present = true;
    return meta;
}

// --- JSON helpers --------------------------------------------------------

namespace {

void check_keys(const json& j, const std::string& ctx, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ConfigError(ctx + ": expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end()) {
            throw ConfigError(ctx + ": unknown field '" + key + "'");
        }
    }
}

double get_number(const json& j, const std::string& ctx, const char* key) {
    if (!j.contains(key)) throw ConfigError(ctx + ": missing field '" + std::string(key) + "'");
    const auto& v = j.at(key);
    if (!v.is_number()) throw ConfigError(ctx + ": field '" + std::string(key) + "' must be a number");
    return v.get<double>();
}

double get_number_or(const json& j, const std::string& ctx, const char* key, double dflt) {
    if (!j.contains(key)) return dflt;
    return get_number(j, ctx, key);
}

long long get_int(const json& j, const std::string& ctx, const char* key) {
    if (!j.contains(key)) throw ConfigError(ctx + ": missing field '" + std::string(key) + "'");
    const auto& v = j.at(key);
    if (!v.is_number_integer()) {
        throw ConfigError(ctx + ": field '" + std::string(key) + "' must be an integer");
    }
    return v.get<long long>();
}

long long get_int_or(const json& j, const std::string& ctx, const char* key, long long dflt) {
    if (!j.contains(key)) return dflt;
    return get_int(j, ctx, key);
}

} // namespace

json params_to_json(const PipelineParams& p) {
    json j;
    j["marking"] = {{"alpha", p.marking.alpha}, {"beta", p.marking.beta}};
    j["epsilon"] = p.epsilon;
    j["theta"] = p.theta;
    j["prototyping"] = {{"alpha", p.prototyping.alpha}, {"beta", p.prototyping.beta}};
    j["dissimilarity"] = {{"alpha", p.dissimilarity.alpha}, {"beta", p.dissimilarity.beta}};
    j["lag"] = p.lag;
    j["bins"] = p.bins;
    j["warmup"] = p.warmup;
    return j;
}

namespace {

SmfParams smf_from_json(const json& j, const std::string& ctx) {
    check_keys(j, ctx, {"alpha", "beta"});
    return SmfParams{get_number(j, ctx, "alpha"), get_number(j, ctx, "beta")};
}

} // namespace

PipelineParams params_from_json(const json& j) {
    const std::string ctx = "params";
    check_keys(j, ctx,
               {"marking", "epsilon", "theta", "prototyping", "dissimilarity", "lag", "bins",
                "warmup"});
    PipelineParams p;
    if (j.contains("marking")) p.marking = smf_from_json(j.at("marking"), "params.marking");
    p.epsilon = get_number_or(j, ctx, "epsilon", p.epsilon);
    p.theta = get_number_or(j, ctx, "theta", p.theta);
    if (j.contains("prototyping")) {
        p.prototyping = smf_from_json(j.at("prototyping"), "params.prototyping");
    }
    if (j.contains("dissimilarity")) {
        p.dissimilarity = smf_from_json(j.at("dissimilarity"), "params.dissimilarity");
    }
    p.lag = static_cast<int>(get_int_or(j, ctx, "lag", p.lag));
    p.bins = static_cast<int>(get_int_or(j, ctx, "bins", p.bins));
    p.warmup = static_cast<int>(get_int_or(j, ctx, "warmup", p.warmup));
    p.validate();
    return p;
}

json de_to_json(const DEConfig& c) {
    json j;
    j["population_size"] = c.population_size;
    j["F"] = c.F;
    j["CR"] = c.CR;
    j["generations"] = c.generations;
    j["seed"] = c.seed;
    if (!c.injected.empty()) {
        json arr = json::array();
        for (const auto& v : c.injected) arr.push_back(v);
        j["injected"] = arr;
    }
    return j;
}

DEConfig de_from_json(const json& j) {
    const std::string ctx = "de config";
    check_keys(j, ctx,
               {"population_size", "F", "CR", "generations", "seed", "injected", "inject_expert"});
    DEConfig c;
    c.population_size = static_cast<int>(get_int_or(j, ctx, "population_size", c.population_size));
    c.F = get_number_or(j, ctx, "F", c.F);
    c.CR = get_number_or(j, ctx, "CR", c.CR);
    c.generations = static_cast<int>(get_int_or(j, ctx, "generations", c.generations));
    if (j.contains("seed")) {
        const auto& v = j.at("seed");
        if (!v.is_number_unsigned() && !v.is_number_integer()) {
            throw ConfigError(ctx + ": field 'seed' must be an integer");
        }
        c.seed = v.get<std::uint64_t>();
    }
    if (j.value("inject_expert", false)) c.injected.push_back(expert_genome());
    if (j.contains("injected")) {
        const auto& arr = j.at("injected");
        if (!arr.is_array()) throw ConfigError(ctx + ": field 'injected' must be an array");
        for (const auto& item : arr) {
            if (!item.is_array() || item.size() != kParamCount) {
                throw ConfigError(ctx + ": each injected vector must have " +
                                  std::to_string(kParamCount) + " numbers");
            }
            ParamVector v{};
            for (std::size_t d = 0; d < kParamCount; ++d) v[d] = item.at(d).get<double>();
            c.injected.push_back(v);
        }
    }
    c.validate();
    return c;
}

json corpus_spec_to_json(const CorpusSpec& s) {
    json j;
    j["count"] = s.count;
    j["months"] = s.months;
    j["noise"] = s.noise;
    j["stability_band"] = s.stability_band;
    j["lag"] = s.lag;
    j["min_segments"] = s.min_segments;
    j["max_segments"] = s.max_segments;
    j["min_segment_months"] = s.min_segment_months;
    j["min_slope"] = s.min_slope;
    j["max_slope"] = s.max_slope;
    if (!s.series.empty()) {
        json arr = json::array();
        for (const auto& sp : s.series) {
            json js;
            js["region_id"] = sp.region_id;
            json segs = json::array();
            for (const auto& seg : sp.segments) {
                segs.push_back({{"start", seg.start_step},
                                {"end", seg.end_step},
                                {"class", trend_to_int(seg.slope_class)},
                                {"magnitude", seg.slope_magnitude}});
            }
            js["segments"] = segs;
            arr.push_back(js);
        }
        j["series"] = arr;
    }
    return j;
}

CorpusSpec corpus_spec_from_json(const json& j) {
    const std::string ctx = "corpus spec";
    check_keys(j, ctx,
               {"count", "months", "noise", "stability_band", "lag", "min_segments", "max_segments",
                "min_segment_months", "min_slope", "max_slope", "series"});
    CorpusSpec s;
    s.count = static_cast<int>(get_int_or(j, ctx, "count", s.count));
    s.months = static_cast<int>(get_int_or(j, ctx, "months", s.months));
    s.noise = get_number_or(j, ctx, "noise", s.noise);
    s.stability_band = get_number_or(j, ctx, "stability_band", s.stability_band);
    s.lag = static_cast<int>(get_int_or(j, ctx, "lag", s.lag));
    s.min_segments = static_cast<int>(get_int_or(j, ctx, "min_segments", s.min_segments));
    s.max_segments = static_cast<int>(get_int_or(j, ctx, "max_segments", s.max_segments));
    s.min_segment_months =
        static_cast<int>(get_int_or(j, ctx, "min_segment_months", s.min_segment_months));
    s.min_slope = get_number_or(j, ctx, "min_slope", s.min_slope);
    s.max_slope = get_number_or(j, ctx, "max_slope", s.max_slope);
    if (j.contains("series")) {
        const auto& arr = j.at("series");
        if (!arr.is_array()) throw ConfigError(ctx + ": field 'series' must be an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto& js = arr.at(i);
            const std::string sctx = ctx + ".series[" + std::to_string(i) + "]";
            check_keys(js, sctx, {"region_id", "segments"});
            SeriesSpec sp;
            if (js.contains("region_id")) sp.region_id = js.at("region_id").get<std::string>();
            if (js.contains("segments")) {
                for (const auto& seg : js.at("segments")) {
                    const std::string gctx = sctx + ".segments";
                    check_keys(seg, gctx, {"start", "end", "class", "magnitude"});
                    TrendSegment ts;
                    ts.start_step = get_int(seg, gctx, "start");
                    ts.end_step = get_int(seg, gctx, "end");
                    ts.slope_class = trend_from_int(static_cast<int>(get_int(seg, gctx, "class")));
                    ts.slope_magnitude = get_number_or(seg, gctx, "magnitude", 0.0);
                    sp.segments.push_back(ts);
                }
            }
            s.series.push_back(std::move(sp));
        }
    }
    s.validate();
    return s;
}

// --- Reports --------------------------------------------------------------

namespace {

json confusion_to_json(const Confusion& c) {
    json rows = json::array();
    for (const auto& row : c.counts) {
        rows.push_back(row);
    }
    return rows;
}

json aggregate_to_json(const Aggregate& a) {
    return json{{"mean", a.mean}, {"stddev", a.stddev}, {"ci95_half", a.ci95_half}, {"n", a.n}};
}

} // namespace

json trials_report_to_json(const TrialsReport& report) {
    json j;
    json reps = json::array();
    for (const auto& r : report.repetitions) {
        json rj;
        rj["trial"] = r.trial;
        rj["repetition"] = r.repetition;
        rj["train_mse"] = r.train_mse;
        rj["test_mse"] = r.test_mse;
        rj["confusion"] = confusion_to_json(r.test_confusion);
        if (!r.history.empty()) {
            rj["genome"] = r.genome;
            rj["best_fitness"] = r.best_fitness;
            rj["history"] = r.history;
        }
        reps.push_back(std::move(rj));
    }
    j["repetitions"] = std::move(reps);
    json per_trial = json::array();
    for (const auto& s : report.per_trial) {
        per_trial.push_back({{"trial", s.trial},
                             {"train_mean", s.train_mean},
                             {"train_std", s.train_std},
                             {"test_mean", s.test_mean},
                             {"test_std", s.test_std}});
    }
    j["per_trial"] = std::move(per_trial);
    j["aggregate"] = {{"train", aggregate_to_json(report.train_aggregate)},
                      {"test", aggregate_to_json(report.test_aggregate)}};
    return j;
}

json grid_report_to_json(const GridReport& report) {
    json j;
    j["f_values"] = report.f_values;
    j["cr_values"] = report.cr_values;
    json cells = json::array();
    for (const auto& c : report.cells) {
        cells.push_back({{"F", c.F},
                         {"CR", c.CR},
                         {"test", aggregate_to_json(c.test)},
                         {"trial_means", c.trial_means}});
    }
    j["cells"] = std::move(cells);
    return j;
}

std::string per_trial_table_csv(const TrialsReport& report) {
    std::ostringstream os;
    os << "trial,train_mse_mean,train_mse_std,test_mse_mean,test_mse_std\n";
    for (const auto& s : report.per_trial) {
        os << (s.trial + 1) << ',' << format_double(s.train_mean) << ','
           << format_double(s.train_std) << ',' << format_double(s.test_mean) << ','
           << format_double(s.test_std) << '\n';
    }
    return os.str();
}

std::string grid_table_csv(const GridReport& report) {
    std::ostringstream os;
    os << "CR\\F";
    for (double f : report.f_values) os << ',' << format_double(f);
    os << '\n';
    std::size_t idx = 0;
    for (double cr : report.cr_values) {
        os << format_double(cr);
        for (std::size_t fi = 0; fi < report.f_values.size(); ++fi, ++idx) {
            const auto& cell = report.cells.at(idx);
            os << ',' << format_double(cell.test.mean) << " +- " << format_double(cell.test.ci95_half);
        }
        os << '\n';
    }
    return os.str();
}

std::string history_csv(const std::vector<double>& history) {
    std::ostringstream os;
    os << "generation,best_fitness\n";
    for (std::size_t g = 0; g < history.size(); ++g) {
        os << g << ',' << format_double(history[g]) << '\n';
    }
    return os.str();
}

json manifest_to_json(const RunManifest& m) {
    json j;
    j["tool"] = kToolName;
    j["version"] = kVersion;
    j["command"] = m.command;
    j["seed"] = m.seed;
    json inputs = json::object();
    for (const auto& [k, v] : m.inputs) inputs[k] = v;
    j["inputs"] = inputs;
    json outputs = json::object();
    for (const auto& [k, v] : m.outputs) outputs[k] = v;
    j["outputs"] = outputs;
    j["wall_seconds"] = m.wall_seconds;
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
    j["timestamp"] = buf;
    return j;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot open " + path.string());
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write " + path.string());
    f << content;
}

json read_json_file(const std::filesystem::path& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
    write_text_file(path, j.dump(2) + "\n");
}

} // namespace stig
