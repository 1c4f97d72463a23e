// Command-line driver for the QCBM pipeline.
//
// Every subcommand reads an optional JSON config (--config), applies flag
// overrides on top, and writes its artifacts into --out-dir. Existing files
// are never overwritten.
//
// Exit codes: 0 success, 2 config error, 3 data error, 4 numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcbm/all.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace qcbm;

namespace {

enum ExitCode { kOk = 0, kConfigError = 2, kDataError = 3, kNumericalError = 4 };

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Options shared by every subcommand.
struct Common {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
};

json load_config(const Common& c) {
    json cfg = json::object();
    if (!c.config_path.empty()) {
        std::ifstream is(c.config_path);
        if (!is) throw ConfigError("cannot open config file '" + c.config_path + "'");
        try {
            cfg = json::parse(is);
        } catch (const json::parse_error& e) {
            throw ConfigError("config is not valid JSON: " + std::string(e.what()));
        }
        if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
    }
    if (c.seed) cfg["seed"] = *c.seed;
    if (!c.out_dir.empty()) cfg["out_dir"] = c.out_dir;
    return cfg;
}

json& section(json& cfg, const char* name) {
    if (!cfg.contains(name)) cfg[name] = json::object();
    if (!cfg[name].is_object()) throw ConfigError(std::string("config section '") + name + "' must be an object");
    return cfg[name];
}

template <class T>
void set_if(json& cfg, const char* sec, const char* key, const std::optional<T>& v) {
    if (v) section(cfg, sec)[key] = *v;
}

std::uint64_t base_seed(const json& cfg) { return cfg.value("seed", std::uint64_t{0}); }

// Output directory with write-once files.
class OutDir {
public:
    explicit OutDir(const json& cfg) : dir_(cfg.value("out_dir", std::string("."))) {}

    // Reserves every output up front so a collision fails before any work.
    void reserve(const std::vector<std::string>& names) {
        for (const auto& n : names) {
            if (fs::exists(dir_ / n)) throw ConfigError("output file '" + (dir_ / n).string() + "' already exists");
        }
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw DataError("cannot create output directory '" + dir_.string() + "': " + ec.message());
    }

    template <class Fn>
    void write(const std::string& name, Fn&& fn) const {
        const fs::path p = dir_ / name;
        if (fs::exists(p)) throw ConfigError("output file '" + p.string() + "' already exists");
        std::ofstream os(p);
        if (!os) throw DataError("cannot write '" + p.string() + "'");
        fn(os);
        if (!os) throw DataError("write failed for '" + p.string() + "'");
        std::cout << "wrote " << p.string() << '\n';
    }

private:
    fs::path dir_;
};

BinaryDataset load_data(const std::string& path, const char* what) {
    if (path.empty()) throw ConfigError(std::string("missing ") + what + " dataset path");
    return load_dataset(path);
}

Circuit load_circuit(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw DataError("cannot open circuit file '" + path + "'");
    return read_circuit(is);
}

// Runs a library validate() and reports failures as config errors.
template <class Fn>
void validate_config(Fn&& fn) {
    try {
        fn();
    } catch (const ValidationError& e) {
        throw ConfigError(e.what());
    }
}

KernelConfig kernel_from(json& cfg) {
    KernelConfig k;
    k.bandwidths = section(cfg, "kernel").value("bandwidths", std::vector<double>{1.0});
    validate_config([&] { k.validate(); });
    return k;
}

MpsTrainConfig mps_from(json& cfg) {
    const json& m = section(cfg, "mps");
    MpsTrainConfig c;
    c.iterations = m.value("iterations", c.iterations);
    c.learning_rate = m.value("learning_rate", c.learning_rate);
    c.cutoff = m.value("cutoff", c.cutoff);
    c.max_bond = m.value("max_bond", c.max_bond);
    c.init_bond = m.value("init_bond", c.init_bond);
    c.init_std = m.value("init_std", c.init_std);
    c.steps_per_bond = m.value("steps_per_bond", c.steps_per_bond);
    c.seed = m.value("seed", base_seed(cfg));
    validate_config([&] { c.validate(); });
    return c;
}

Date date_from(const json& j, const char* key) {
    const auto s = j.at(key).get<std::string>();
    const auto d = parse_date(s);
    if (!d) throw ConfigError(std::string("invalid date for '") + key + "': " + s);
    return *d;
}

// --- subcommands ---

int cmd_bas_gen(json cfg) {
    const json& b = section(cfg, "bas");
    const int rows = b.value("rows", 3), cols = b.value("cols", 3);
    const std::string order = b.value("order", std::string("row-major"));
    const double ratio = b.value("split_ratio", 0.0);
    if (rows < 1 || cols < 1 || rows * cols > 24) throw ConfigError("bas rows x cols must be in [1, 24]");
    if (order != "row-major" && order != "snake") throw ConfigError("bas order must be row-major or snake");
    if (!(ratio >= 0.0 && ratio < 1.0)) throw ConfigError("split_ratio must be in [0, 1)");

    BinaryDataset data = generate_bas(rows, cols);
    if (order == "snake") data = permute_features(data, snake_order(rows, cols));
    OutDir out(cfg);
    std::vector<std::string> names{"dataset.txt"};
    if (ratio > 0.0) names.insert(names.end(), {"train.txt", "test.txt"});
    out.reserve(names);
    out.write("dataset.txt", [&](std::ostream& os) { write_dataset(os, data); });
    if (ratio > 0.0) {
        const auto s = split(data, ratio, b.value("split_seed", base_seed(cfg)));
        if (s.train.empty() || s.test.empty()) throw ConfigError("split_ratio leaves an empty part");
        out.write("train.txt", [&](std::ostream& os) { write_dataset(os, s.train); });
        out.write("test.txt", [&](std::ostream& os) { write_dataset(os, s.test); });
    }
    std::cout << "bas " << rows << "x" << cols << ": " << data.size() << " images\n";
    return kOk;
}

int cmd_synth_rates(json cfg) {
    const json& s = section(cfg, "synth");
    SyntheticRatesConfig c;
    c.seed = s.value("seed", c.seed);
    if (s.contains("from")) c.start = date_from(s, "from");
    if (s.contains("to")) c.end = date_from(s, "to");
    if (!(c.start < c.end)) throw ConfigError("synth date range is empty");
    const auto rates = generate_synthetic_rates(c);
    OutDir out(cfg);
    out.reserve({"rates.csv"});
    out.write("rates.csv", [&](std::ostream& os) { write_rates_csv(os, rates); });
    std::cout << rates.dates.size() << " business days\n";
    return kOk;
}

int cmd_ingest(json cfg) {
    const json& c = section(cfg, "csv");
    const std::string path = c.value("path", std::string());
    if (path.empty()) throw ConfigError("missing csv path");
    CsvLoadOptions opts;
    opts.series = c.value("series", std::vector<std::string>{});
    if (c.contains("from")) opts.from = date_from(c, "from");
    if (c.contains("to")) opts.to = date_from(c, "to");
    if (opts.from && opts.to && *opts.to < *opts.from) throw ConfigError("date range is empty (from > to)");
    const int n_bits = c.value("n_bits", 4);
    const double ratio = c.value("split_ratio", 0.8);
    const bool diff = c.value("difference", true);
    if (n_bits < 1 || n_bits > 16) throw ConfigError("n_bits must be in [1, 16]");
    if (!(ratio > 0.0 && ratio < 1.0)) throw ConfigError("split_ratio must be in (0, 1)");

    OutDir out(cfg);
    out.reserve({"train.txt", "test.txt", "ingest.json"});
    const auto loaded = load_timeseries_csv(path, opts);
    if (loaded.series.length() < 3) throw DataError("fewer than three usable rows in the selected date range");
    if (static_cast<int>(loaded.series.values.size()) * n_bits > 24) throw ConfigError("series x n_bits exceeds 24 qubits");
    const TimeSeries series = diff ? difference(loaded.series) : loaded.series;
    QuantizedSplit q;
    try {
        q = quantize_split(series, n_bits, ratio);
    } catch (const ValidationError& e) {
        throw DataError(e.what());
    }
    out.write("train.txt", [&](std::ostream& os) { write_dataset(os, q.train); });
    out.write("test.txt", [&](std::ostream& os) { write_dataset(os, q.test); });
    const json summary = {{"rows_loaded", loaded.series.length()},
                          {"dropped_missing", loaded.dropped_missing},
                          {"dropped_out_of_range", loaded.dropped_out_of_range},
                          {"series", series.names},
                          {"n_bits", n_bits},
                          {"differenced", diff},
                          {"train_size", q.train.size()},
                          {"test_size", q.test.size()},
                          {"clamped_test_values", q.clamped_test}};
    out.write("ingest.json", [&](std::ostream& os) { os << summary.dump(2) << '\n'; });
    std::cout << "train " << q.train.size() << ", test " << q.test.size() << ", features " << q.train.n_features << '\n';
    return kOk;
}

int cmd_metrics(json cfg, const std::string& data_path) {
    const json& m = section(cfg, "metrics");
    const std::string metric = m.value("metric", std::string("hamming"));
    const int points = m.value("points", 100);
    if (metric != "hamming" && metric != "vi") throw ConfigError("metric must be hamming or vi");
    if (points < 2) throw ConfigError("metrics points must be >= 2");
    const auto data = load_data(data_path, "input");
    OutDir out(cfg);
    out.reserve({"matrix.csv", "curve.csv"});
    const auto d = metric == "vi" ? vi_matrix(data) : hamming_matrix(data);
    const auto curve = connections_vs_threshold(d, threshold_grid(0.0, 1.0, points));
    out.write("matrix.csv", [&](std::ostream& os) { write_distance_csv(os, d); });
    out.write("curve.csv", [&](std::ostream& os) { write_threshold_curve_csv(os, curve); });
    return kOk;
}

int cmd_pretrain(json cfg, const std::string& data_path) {
    const auto mcfg = mps_from(cfg);
    const auto data = load_data(data_path, "training");
    if (data.n_features < 2) throw DataError("pretraining needs at least two features");
    OutDir out(cfg);
    out.reserve({"mps.txt", "nll.csv"});
    const auto r = train_mps(data, mcfg);
    out.write("mps.txt", [&](std::ostream& os) { write_mps(os, r.mps); });
    out.write("nll.csv", [&](std::ostream& os) {
        os << "iteration,nll\n";
        for (std::size_t i = 0; i < r.nll.size(); ++i) os << i << ',' << format_roundtrip(r.nll[i]) << '\n';
    });
    std::cout << "final nll " << format_sig(r.nll.back(), 6) << ", max bond " << r.mps.max_bond() << '\n';
    return kOk;
}

int cmd_extend(json cfg, const std::string& mps_path, const std::string& circuit_path, const std::string& data_path) {
    if (mps_path.empty() == circuit_path.empty()) throw ConfigError("extend needs exactly one of --mps or --circuit");
    const json& e = section(cfg, "extension");
    const bool has_metric = e.contains("metric"), has_preset = e.contains("preset");
    if (has_metric == has_preset) throw ConfigError("extension needs exactly one of 'metric' or 'preset'");
    const int layers = section(cfg, "mps").value("layers", 1);
    if (layers < 1) throw ConfigError("mps layers must be >= 1");
    const double init_std = e.value("init_std", 0.01);
    if (!(init_std >= 0.0)) throw ConfigError("init_std must be >= 0");

    OutDir out(cfg);
    std::vector<std::string> names{"circuit.txt", "graph.txt"};
    if (!mps_path.empty()) names.push_back("fidelity.csv");
    out.reserve(names);

    Circuit base(1);
    std::vector<double> fidelity;
    if (!mps_path.empty()) {
        const auto mps = load_mps<double>(mps_path);
        const auto dec = mps_to_circuit(mps, layers);
        base = dec.circuit;
        fidelity = dec.fidelity;
    } else {
        base = load_circuit(circuit_path);
    }
    const int n = base.n_qubits();
    std::optional<BinaryDataset> data;
    if (!data_path.empty()) {
        data = load_dataset(data_path);
        if (data->n_features != n) throw DataError("dataset width differs from circuit qubit count");
    }

    const auto baseline = linear_graph(n);
    SimilarityGraph graph;
    if (has_metric) {
        const std::string metric = e.at("metric").get<std::string>();
        const double threshold = e.value("threshold", 0.5);
        if (metric != "hamming" && metric != "vi") throw ConfigError("metric must be hamming or vi");
        if (!(threshold >= 0.0 && threshold <= 1.0)) throw ConfigError("threshold must be in [0, 1]");
        if (!data) throw ConfigError("metric extension needs --data");
        graph = threshold_graph(metric == "vi" ? vi_matrix(*data) : hamming_matrix(*data), threshold, baseline);
    } else {
        const std::string preset = e.at("preset").get<std::string>();
        if (preset == "linear") {
            graph = baseline;
        } else if (preset == "all") {
            graph = all_to_all_graph(baseline);
        } else if (preset == "nn") {
            const int rows = e.value("rows", 0), cols = e.value("cols", 0);
            if (rows * cols != n) throw ConfigError("nn preset needs rows x cols equal to the qubit count");
            std::vector<int> order(static_cast<std::size_t>(n));
            std::iota(order.begin(), order.end(), 0);
            if (data) order = data->feature_order;
            graph = grid_nn_graph(rows, cols, order, baseline);
        } else if (preset == "random") {
            const int count = e.value("count", 10);
            if (count < 0 || count > n * (n - 1) / 2 - (n - 1)) throw ConfigError("random count exceeds free edges");
            graph = random_extension_graph(static_cast<std::size_t>(count), e.value("graph_seed", base_seed(cfg)), baseline);
        } else {
            throw ConfigError("preset must be linear, nn, all or random");
        }
    }
    const auto circuit = extend_circuit(base, graph, init_std, e.value("init_seed", base_seed(cfg)));
    out.write("circuit.txt", [&](std::ostream& os) { write_circuit(os, circuit); });
    out.write("graph.txt", [&](std::ostream& os) { write_graph(os, graph); });
    if (!fidelity.empty()) {
        out.write("fidelity.csv", [&](std::ostream& os) {
            os << "layers,fidelity\n";
            for (std::size_t i = 0; i < fidelity.size(); ++i) os << i + 1 << ',' << format_roundtrip(fidelity[i]) << '\n';
        });
    }
    std::cout << graph.extension_edges().size() << " extension gates, " << circuit.param_count() << " parameters\n";
    return kOk;
}

int cmd_train(json cfg, const std::string& circuit_path, const std::string& train_path, const std::string& test_path) {
    const json& t = section(cfg, "train");
    TrainConfig tc;
    tc.iterations = t.value("iterations", tc.iterations);
    tc.shots = t.value("shots", tc.shots);
    tc.adam.learning_rate = t.value("learning_rate", tc.adam.learning_rate);
    tc.minibatch_size = t.value("minibatch_size", tc.minibatch_size);
    tc.record_wall_time = t.value("timing", true);
    const std::string eval = t.value("eval", std::string("shots"));
    if (eval != "shots" && eval != "exact") throw ConfigError("train eval must be shots or exact");
    tc.eval_mode = eval == "exact" ? EvalMode::Exact : EvalMode::Shots;
    const std::size_t window = t.value("window", std::size_t{50});
    if (window < 1) throw ConfigError("window must be >= 1");
    const auto kernel = kernel_from(cfg);

    std::vector<std::uint64_t> seeds;
    if (cfg.contains("seeds")) {
        seeds = cfg.at("seeds").get<std::vector<std::uint64_t>>();
    } else {
        const int runs = t.value("runs", 5);
        if (runs < 1) throw ConfigError("runs must be >= 1");
        for (int r = 0; r < runs; ++r) seeds.push_back(base_seed(cfg) + static_cast<std::uint64_t>(r));
    }
    if (seeds.empty()) throw ConfigError("seeds must be nonempty");
    if (std::set<std::uint64_t>(seeds.begin(), seeds.end()).size() != seeds.size()) throw ConfigError("seeds must be distinct");

    const auto circuit = load_circuit(circuit_path);
    const auto train = load_data(train_path, "training");
    const auto test = load_data(test_path, "test");
    validate_config([&] { tc.validate(train.size()); });
    if (train.n_features != circuit.n_qubits() || test.n_features != circuit.n_qubits()) {
        throw DataError("dataset width differs from circuit qubit count");
    }

    OutDir out(cfg);
    std::vector<std::string> names{"aggregate.csv", "summary.json"};
    for (auto s : seeds) {
        names.push_back("seed_" + std::to_string(s) + ".csv");
        names.push_back("circuit_seed_" + std::to_string(s) + ".txt");
    }
    out.reserve(names);

    std::vector<TrainLog> logs;
    json finals = json::array();
    for (auto s : seeds) {
        TrainConfig run = tc;
        run.seed = s;
        logs.push_back(train_qcbm(circuit, train, test, kernel, run));
        const auto& log = logs.back();
        const std::string tag = std::to_string(s);
        out.write("seed_" + tag + ".csv", [&](std::ostream& os) { write_train_log_csv(os, log); });
        const auto trained = Circuit::from_parts(circuit.n_qubits(), circuit.gates(), log.params);
        out.write("circuit_seed_" + tag + ".txt", [&](std::ostream& os) { write_circuit(os, trained); });
        const double f = final_train_mmd(log, window);
        finals.push_back({{"seed", s}, {"final_train_mmd", f}});
        std::cout << "seed " << s << ": final train mmd " << format_sig(f, 6) << '\n';
    }
    const auto rows = aggregate_logs(logs, window);
    out.write("aggregate.csv", [&](std::ostream& os) { write_aggregate_csv(os, rows); });
    double mean = 0.0;
    for (const auto& f : finals) mean += f["final_train_mmd"].get<double>();
    mean /= static_cast<double>(finals.size());
    const json summary = {{"runs", finals}, {"mean_final_train_mmd", mean}, {"window", window}};
    out.write("summary.json", [&](std::ostream& os) { os << summary.dump(2) << '\n'; });
    return kOk;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config_path, "JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--seed", c.seed, "base seed");
    sub->add_option("--out-dir", c.out_dir, "output directory");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quantum circuit Born machine pipeline"};
    app.require_subcommand(1);
    Common common;

    std::optional<int> rows, cols;
    std::optional<std::string> order;
    std::optional<double> split_ratio;
    auto* bas = app.add_subcommand("bas-gen", "generate the bars-and-stripes dataset");
    add_common(bas, common);
    bas->add_option("--rows", rows);
    bas->add_option("--cols", cols);
    bas->add_option("--order", order, "row-major or snake");
    bas->add_option("--split-ratio", split_ratio, "also write a seeded train/test split");

    std::optional<std::string> from, to;
    auto* synth = app.add_subcommand("synth-rates", "write a synthetic daily yield CSV");
    add_common(synth, common);
    synth->add_option("--from", from);
    synth->add_option("--to", to);

    std::optional<std::string> csv_path;
    std::optional<std::vector<std::string>> series;
    std::optional<int> n_bits;
    bool no_difference = false;
    auto* ingest = app.add_subcommand("ingest", "difference, split and quantize a yield CSV");
    add_common(ingest, common);
    ingest->add_option("--csv", csv_path);
    ingest->add_option("--series", series)->delimiter(',');
    ingest->add_option("--from", from);
    ingest->add_option("--to", to);
    ingest->add_option("--n-bits", n_bits);
    ingest->add_option("--split-ratio", split_ratio);
    ingest->add_flag("--no-difference", no_difference, "quantize levels instead of daily changes");

    std::string data_path;
    std::optional<std::string> metric;
    std::optional<int> points;
    auto* metrics = app.add_subcommand("metrics", "feature distance matrix and threshold curve");
    add_common(metrics, common);
    metrics->add_option("--data", data_path)->required();
    metrics->add_option("--metric", metric, "hamming or vi");
    metrics->add_option("--points", points);

    std::optional<int> mps_iters;
    std::optional<double> mps_lr, cutoff;
    auto* pretrain = app.add_subcommand("pretrain", "train an MPS on a binary dataset");
    add_common(pretrain, common);
    pretrain->add_option("--data", data_path)->required();
    pretrain->add_option("--iterations", mps_iters);
    pretrain->add_option("--learning-rate", mps_lr);
    pretrain->add_option("--cutoff", cutoff);

    std::string mps_path, circuit_path;
    std::optional<double> threshold;
    std::optional<std::string> preset;
    std::optional<int> count, layers;
    auto* extend = app.add_subcommand("extend", "decompose or load a circuit and add extension gates");
    add_common(extend, common);
    extend->add_option("--mps", mps_path);
    extend->add_option("--circuit", circuit_path);
    extend->add_option("--data", data_path);
    extend->add_option("--metric", metric, "hamming or vi");
    extend->add_option("--threshold", threshold);
    extend->add_option("--preset", preset, "linear, nn, all or random");
    extend->add_option("--count", count, "edges for the random preset");
    extend->add_option("--rows", rows);
    extend->add_option("--cols", cols);
    extend->add_option("--layers", layers);

    std::string train_path, test_path;
    std::optional<int> iterations;
    std::optional<std::size_t> shots, minibatch;
    std::optional<double> lr;
    std::optional<std::vector<std::uint64_t>> seeds;
    std::optional<std::vector<double>> bandwidths;
    std::optional<std::string> eval;
    bool no_timing = false;
    auto* train = app.add_subcommand("train", "MMD training over several seeds");
    add_common(train, common);
    train->add_option("--circuit", circuit_path)->required();
    train->add_option("--train", train_path)->required();
    train->add_option("--test", test_path)->required();
    train->add_option("--iterations", iterations);
    train->add_option("--shots", shots);
    train->add_option("--learning-rate", lr);
    train->add_option("--minibatch", minibatch);
    train->add_option("--seeds", seeds)->delimiter(',');
    train->add_option("--bandwidths", bandwidths)->delimiter(',');
    train->add_option("--eval", eval, "shots or exact");
    train->add_flag("--no-timing", no_timing, "log wall_ms as 0 so reruns are byte-identical");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        json cfg = load_config(common);
        if (bas->parsed()) {
            set_if(cfg, "bas", "rows", rows);
            set_if(cfg, "bas", "cols", cols);
            set_if(cfg, "bas", "order", order);
            set_if(cfg, "bas", "split_ratio", split_ratio);
            return cmd_bas_gen(cfg);
        }
        if (synth->parsed()) {
            set_if(cfg, "synth", "from", from);
            set_if(cfg, "synth", "to", to);
            return cmd_synth_rates(cfg);
        }
        if (ingest->parsed()) {
            set_if(cfg, "csv", "path", csv_path);
            set_if(cfg, "csv", "series", series);
            set_if(cfg, "csv", "from", from);
            set_if(cfg, "csv", "to", to);
            set_if(cfg, "csv", "n_bits", n_bits);
            set_if(cfg, "csv", "split_ratio", split_ratio);
            if (no_difference) section(cfg, "csv")["difference"] = false;
            return cmd_ingest(cfg);
        }
        if (metrics->parsed()) {
            set_if(cfg, "metrics", "metric", metric);
            set_if(cfg, "metrics", "points", points);
            return cmd_metrics(cfg, data_path);
        }
        if (pretrain->parsed()) {
            set_if(cfg, "mps", "iterations", mps_iters);
            set_if(cfg, "mps", "learning_rate", mps_lr);
            set_if(cfg, "mps", "cutoff", cutoff);
            return cmd_pretrain(cfg, data_path);
        }
        if (extend->parsed()) {
            json& e = section(cfg, "extension");
            if (metric || preset) {
                e.erase("metric");
                e.erase("preset");
            }
            set_if(cfg, "extension", "metric", metric);
            set_if(cfg, "extension", "threshold", threshold);
            set_if(cfg, "extension", "preset", preset);
            set_if(cfg, "extension", "count", count);
            set_if(cfg, "extension", "rows", rows);
            set_if(cfg, "extension", "cols", cols);
            set_if(cfg, "mps", "layers", layers);
            return cmd_extend(cfg, mps_path, circuit_path, data_path);
        }
        if (train->parsed()) {
            set_if(cfg, "train", "iterations", iterations);
            set_if(cfg, "train", "shots", shots);
            set_if(cfg, "train", "learning_rate", lr);
            set_if(cfg, "train", "minibatch_size", minibatch);
            set_if(cfg, "train", "eval", eval);
            set_if(cfg, "kernel", "bandwidths", bandwidths);
            if (seeds) cfg["seeds"] = *seeds;
            if (no_timing) section(cfg, "train")["timing"] = false;
            return cmd_train(cfg, circuit_path, train_path, test_path);
        }
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const qcbm::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    } catch (const std::exception& e) {
        // Format, validation and I/O failures all trace back to input data.
        std::cerr << "data error: " << e.what() << '\n';
        return kDataError;
    }
    return kConfigError;
}
