#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "deepgraph/descriptor.hpp"
#include "deepgraph/errors.hpp"
#include "deepgraph/features.hpp"
#include "deepgraph/generators.hpp"
#include "deepgraph/graph.hpp"
#include "deepgraph/instances.hpp"
#include "deepgraph/io.hpp"
#include "deepgraph/nn.hpp"
#include "deepgraph/ridge.hpp"
#include "deepgraph/train.hpp"

namespace deepgraph::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// ---- run configuration -----------------------------------------------------

struct GeneratorConfig {
    std::string kind = "ba";  // ba | er | ws
    std::size_t nodes = 9000;
    std::size_t edges_per_node = 2;  // ba
    double p = 0.01;                 // er
    std::size_t ws_k = 6;            // ws
    double ws_beta = 0.1;            // ws
};

struct HksConfig {
    double z1 = 0.1;
    double z_n = 25.0;
    std::size_t steps = 64;
    std::size_t bins = 64;
    std::size_t top_k = 0;  // 0 = full spectrum
};

struct ModelSection {
    std::vector<std::size_t> filter_sizes = {2, 4, 6};
    std::size_t filters1 = 32;
    std::size_t filters2 = 16;
    std::size_t dense_size = 256;
    double dropout = 0.5;
    bool paper_init = false;
};

struct TrainSection {
    double learning_rate = 0.005;
    double l2 = 1e-5;
    std::size_t batch_size = 64;
    std::size_t max_epochs = 500;
    std::size_t patience = 20;
    std::vector<double> ridge_l2_grid = {1e0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
};

struct InstanceSection {
    unsigned k_hop = 1;
    std::string target = "ego-degree";
    double downsample_zero = 0.5;
};

struct SplitSection {
    std::array<double, 3> fractions{0.8, 0.05, 0.15};
    std::array<double, 3> graph_times{5000, 5500, 6000};
    std::array<double, 3> growth_times{6500, 7000, 7500};
};

struct RunConfig {
    std::uint64_t seed = 42;
    fs::path out = "run";
    GeneratorConfig generator;
    InstanceSection instances;
    SplitSection split;
    HksConfig hks;
    ModelSection model;
    TrainSection train;
};

namespace detail {

inline void check_keys(const json& obj, std::initializer_list<const char*> allowed,
                       const std::string& where) {
    if (!obj.is_object()) throw ConfigError("config: '" + where + "' must be an object");
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok |= (key == a);
        if (!ok) throw ConfigError("config: unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void maybe(const json& obj, const char* key, T& target) {
    if (obj.contains(key)) target = obj.at(key).get<T>();
}

template <typename T, std::size_t N>
void maybe_array(const json& obj, const char* key, std::array<T, N>& target) {
    if (!obj.contains(key)) return;
    const auto v = obj.at(key).get<std::vector<T>>();
    if (v.size() != N)
        throw ConfigError("config: '" + std::string(key) + "' must have exactly " + std::to_string(N) +
                          " entries");
    std::copy(v.begin(), v.end(), target.begin());
}

}  // namespace detail

inline RunConfig parse_config(const json& root) {
    RunConfig cfg;
    detail::check_keys(root, {"seed", "out", "generator", "instances", "split", "hks", "model", "train"},
                       "top level");
    detail::maybe(root, "seed", cfg.seed);
    if (root.contains("out")) cfg.out = root.at("out").get<std::string>();
    if (root.contains("generator")) {
        const auto& g = root.at("generator");
        detail::check_keys(g, {"kind", "nodes", "edges_per_node", "p", "ws_k", "ws_beta"}, "generator");
        detail::maybe(g, "kind", cfg.generator.kind);
        detail::maybe(g, "nodes", cfg.generator.nodes);
        detail::maybe(g, "edges_per_node", cfg.generator.edges_per_node);
        detail::maybe(g, "p", cfg.generator.p);
        detail::maybe(g, "ws_k", cfg.generator.ws_k);
        detail::maybe(g, "ws_beta", cfg.generator.ws_beta);
    }
    if (root.contains("instances")) {
        const auto& s = root.at("instances");
        detail::check_keys(s, {"k_hop", "target", "downsample_zero"}, "instances");
        detail::maybe(s, "k_hop", cfg.instances.k_hop);
        detail::maybe(s, "target", cfg.instances.target);
        detail::maybe(s, "downsample_zero", cfg.instances.downsample_zero);
        growth_target_from_name(cfg.instances.target);  // validate early
    }
    if (root.contains("split")) {
        const auto& s = root.at("split");
        detail::check_keys(s, {"fractions", "graph_times", "growth_times"}, "split");
        detail::maybe_array(s, "fractions", cfg.split.fractions);
        detail::maybe_array(s, "graph_times", cfg.split.graph_times);
        detail::maybe_array(s, "growth_times", cfg.split.growth_times);
    }
    if (root.contains("hks")) {
        const auto& h = root.at("hks");
        detail::check_keys(h, {"z1", "zN", "steps", "bins", "top_k"}, "hks");
        detail::maybe(h, "z1", cfg.hks.z1);
        detail::maybe(h, "zN", cfg.hks.z_n);
        detail::maybe(h, "steps", cfg.hks.steps);
        detail::maybe(h, "bins", cfg.hks.bins);
        detail::maybe(h, "top_k", cfg.hks.top_k);
    }
    if (root.contains("model")) {
        const auto& m = root.at("model");
        detail::check_keys(m, {"filter_sizes", "filters1", "filters2", "dense_size", "dropout", "paper_init"},
                           "model");
        if (m.contains("filter_sizes")) cfg.model.filter_sizes = m.at("filter_sizes").get<std::vector<std::size_t>>();
        detail::maybe(m, "filters1", cfg.model.filters1);
        detail::maybe(m, "filters2", cfg.model.filters2);
        detail::maybe(m, "dense_size", cfg.model.dense_size);
        detail::maybe(m, "dropout", cfg.model.dropout);
        detail::maybe(m, "paper_init", cfg.model.paper_init);
    }
    if (root.contains("train")) {
        const auto& t = root.at("train");
        detail::check_keys(t, {"learning_rate", "l2", "batch_size", "max_epochs", "patience", "ridge_l2_grid"},
                           "train");
        detail::maybe(t, "learning_rate", cfg.train.learning_rate);
        detail::maybe(t, "l2", cfg.train.l2);
        detail::maybe(t, "batch_size", cfg.train.batch_size);
        detail::maybe(t, "max_epochs", cfg.train.max_epochs);
        detail::maybe(t, "patience", cfg.train.patience);
        if (t.contains("ridge_l2_grid")) cfg.train.ridge_l2_grid = t.at("ridge_l2_grid").get<std::vector<double>>();
    }
    return cfg;
}

inline RunConfig load_config(const fs::path& path) {
    auto in = io::open_in(path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config: " + path.string() + ": " + e.what());
    }
    return parse_config(root);
}

// ---- file names ------------------------------------------------------------

inline fs::path edges_path(const RunConfig& c) { return c.out / "edges.tsv"; }
inline fs::path manifest_path(const RunConfig& c) { return c.out / "manifest.json"; }
inline fs::path labels_path(const RunConfig& c, int s) {
    return c.out / ("labels_" + std::string(split_name(s)) + ".csv");
}
inline fs::path descriptors_path(const RunConfig& c, int s) {
    return c.out / ("descriptors_" + std::string(split_name(s)) + ".bin");
}
inline fs::path features_path(const RunConfig& c, int s) {
    return c.out / ("features_" + std::string(split_name(s)) + ".csv");
}
inline fs::path descriptor_stats_path(const RunConfig& c) { return c.out / "descriptor_stats.csv"; }
inline fs::path pixel_stats_path(const RunConfig& c) { return c.out / "pixel_stats.csv"; }
inline fs::path checkpoint_path(const RunConfig& c, const std::string& model) {
    return c.out / ("model_" + model + ".ckpt");
}
inline fs::path history_path(const RunConfig& c, const std::string& model) {
    return c.out / ("history_" + model + ".csv");
}
inline fs::path predictions_path(const RunConfig& c, const std::string& model) {
    return c.out / ("predictions_" + model + ".csv");
}
inline fs::path report_path(const RunConfig& c) { return c.out / "report.csv"; }
inline fs::path paired_path(const RunConfig& c) { return c.out / "paired_sqerr.csv"; }
inline fs::path summary_path(const RunConfig& c) { return c.out / "summary.txt"; }

inline const std::vector<std::string>& known_models() {
    static const std::vector<std::string> names = {"deepgraph", "gd-mlp", "gd-cnn", "gd-linear",
                                                   "features-linear"};
    return names;
}

// ---- generate ----------------------------------------------------------------

inline TemporalEdgeList generate_edge_list(const RunConfig& cfg, std::uint64_t seed) {
    const auto& g = cfg.generator;
    if (g.kind == "ba") return generate_preferential_attachment(g.nodes, g.edges_per_node, seed);
    if (g.kind == "er") return generate_er(g.nodes, g.p, seed);
    if (g.kind == "ws") return generate_ws(g.nodes, g.ws_k, g.ws_beta, seed);
    throw ConfigError("generator: unknown kind '" + g.kind + "'");
}

inline void write_labels_csv(const fs::path& path, const std::vector<LabeledInstance>& instances) {
    auto out = io::open_out(path);
    out << "origin_id,graph_time,growth_time,raw_growth\n";
    for (const auto& inst : instances)
        out << inst.origin << ',' << io::fmt_time(inst.graph_time) << ',' << io::fmt_time(inst.growth_time)
            << ',' << io::fmt_time(inst.raw_growth) << '\n';
}

struct LabelRow {
    std::uint64_t origin = 0;
    double graph_time = 0.0;
    double growth_time = 0.0;
    double raw_growth = 0.0;
};

inline std::vector<LabelRow> read_labels_csv(const fs::path& path) {
    auto in = io::open_in(path);
    std::vector<LabelRow> rows;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            if (line.rfind("origin_id,", 0) != 0)
                throw DataError(path.string() + ": missing label header row");
            header = false;
            continue;
        }
        if (line.empty()) continue;
        LabelRow row;
        char* cursor = line.data();
        char* end = nullptr;
        row.origin = std::strtoull(cursor, &end, 10);
        for (double* field : {&row.graph_time, &row.growth_time, &row.raw_growth}) {
            if (*end != ',') throw DataError(path.string() + ": malformed label row");
            cursor = end + 1;
            *field = std::strtod(cursor, &end);
        }
        rows.push_back(row);
    }
    return rows;
}

// Generates the synthetic benchmark: edge list, per-split label files and a
// manifest sufficient to regenerate everything bit-identically.
inline void cmd_generate(const RunConfig& cfg, bool force = false) {
    if (fs::exists(manifest_path(cfg)) && !force)
        throw ConfigError("output directory already holds a benchmark (use --force to overwrite): " +
                          cfg.out.string());
    fs::create_directories(cfg.out);

    const std::uint64_t gen_seed = derive_seed(cfg.seed, "generate");
    const std::uint64_t split_seed = derive_seed(cfg.seed, "split");
    const TemporalEdgeList el = generate_edge_list(cfg, gen_seed);

    SplitSpec spec;
    spec.fractions = cfg.split.fractions;
    spec.graph_times = cfg.split.graph_times;
    spec.growth_times = cfg.split.growth_times;
    spec.seed = split_seed;

    InstanceParams params;
    params.k_hop = cfg.instances.k_hop;
    params.target = growth_target_from_name(cfg.instances.target);

    SplitBenchmark bench = temporal_split(el, spec, params);
    std::array<std::uint64_t, 3> ds_seeds{};
    for (int s = 0; s < 3; ++s) {
        ds_seeds[s] = derive_seed(cfg.seed, "downsample", static_cast<std::uint64_t>(s));
        bench.split(s) = downsample_zero_growth(std::move(bench.split(s)), cfg.instances.downsample_zero,
                                                ds_seeds[s]);
    }
    verify_split(bench);

    io::write_edge_list(edges_path(cfg), el.edges);
    for (int s = 0; s < 3; ++s) write_labels_csv(labels_path(cfg, s), bench.split(s));

    ordered_json manifest;
    manifest["format"] = "deepgraph-benchmark";
    manifest["version"] = 1;
    manifest["root_seed"] = cfg.seed;
    manifest["stage_seeds"] = {{"generate", gen_seed},
                               {"split", split_seed},
                               {"downsample_train", ds_seeds[0]},
                               {"downsample_val", ds_seeds[1]},
                               {"downsample_test", ds_seeds[2]}};
    manifest["generator"] = {{"kind", cfg.generator.kind},
                             {"nodes", cfg.generator.nodes},
                             {"edges_per_node", cfg.generator.edges_per_node},
                             {"p", cfg.generator.p},
                             {"ws_k", cfg.generator.ws_k},
                             {"ws_beta", cfg.generator.ws_beta}};
    manifest["instances"] = {{"k_hop", cfg.instances.k_hop},
                             {"target", cfg.instances.target},
                             {"downsample_zero", cfg.instances.downsample_zero}};
    manifest["split"] = {{"fractions", cfg.split.fractions},
                         {"graph_times", cfg.split.graph_times},
                         {"growth_times", cfg.split.growth_times}};
    manifest["counts"] = {{"train", bench.train.size()}, {"val", bench.val.size()}, {"test", bench.test.size()}};
    manifest["files"] = {{"edges", "edges.tsv"},
                         {"labels_train", "labels_train.csv"},
                         {"labels_val", "labels_val.csv"},
                         {"labels_test", "labels_test.csv"}};
    auto out = io::open_out(manifest_path(cfg));
    out << manifest.dump(2) << '\n';
}

// ---- describe ----------------------------------------------------------------

struct BenchmarkData {
    TemporalEdgeList el;
    std::array<std::vector<LabelRow>, 3> labels;
    InstanceParams params;
};

inline BenchmarkData load_benchmark(const RunConfig& cfg) {
    if (!fs::exists(manifest_path(cfg)))
        throw ConfigError("no benchmark found at " + cfg.out.string() + " (run `generate` first)");
    auto in = io::open_in(manifest_path(cfg));
    json manifest = json::parse(in);
    BenchmarkData data;
    data.el.edges = io::read_edge_list(edges_path(cfg));
    for (int s = 0; s < 3; ++s) data.labels[s] = read_labels_csv(labels_path(cfg, s));
    data.params.k_hop = manifest.at("instances").at("k_hop").get<unsigned>();
    data.params.target = growth_target_from_name(manifest.at("instances").at("target").get<std::string>());
    return data;
}

// Rebuilds the ego-net of every labeled origin of one split; order follows
// the label file.
inline std::vector<Graph> rebuild_ego_nets(const BenchmarkData& data, int split) {
    const auto& rows = data.labels[split];
    std::vector<Graph> graphs;
    if (rows.empty()) return graphs;
    const Graph snapshot = from_edge_list(data.el.edges, rows.front().graph_time);
    std::map<std::uint64_t, NodeId> index;
    for (NodeId v = 0; v < snapshot.num_nodes(); ++v) index[snapshot.label(v)] = v;
    graphs.reserve(rows.size());
    for (const auto& row : rows) {
        const auto it = index.find(row.origin);
        if (it == index.end())
            throw DataError("labels reference origin " + std::to_string(row.origin) +
                            " absent from the snapshot");
        graphs.push_back(k_hop_ego_net(snapshot, it->second, data.params.k_hop));
    }
    return graphs;
}

inline void write_features_csv(const fs::path& path, const std::vector<LabelRow>& rows,
                               const std::vector<FeatureVector>& feats) {
    auto out = io::open_out(path);
    out << "origin_id,scaled_label";
    for (const char* name : FeatureVector::names()) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < rows.size(); ++i) {
        out << rows[i].origin << ',' << io::fmt(scale_label(rows[i].raw_growth), 9);
        for (double v : feats[i].as_array()) out << ',' << io::fmt(v, 9);
        out << '\n';
    }
}

// Computes HKS descriptors and structural features for every split. All
// statistics (histogram bin ranges, pixel normalization) are fitted on the
// training split only and written with that provenance recorded.
inline void cmd_describe(const RunConfig& cfg, const std::optional<fs::path>& dump_dir = {},
                         std::size_t dump_limit = 8) {
    const BenchmarkData data = load_benchmark(cfg);
    const DiffusionSteps steps = diffusion_steps(cfg.hks.z1, cfg.hks.z_n, cfg.hks.steps);

    std::array<std::vector<Graph>, 3> graphs;
    std::array<std::vector<Matrix>, 3> hks;
    for (int s = 0; s < 3; ++s) {
        graphs[s] = rebuild_ego_nets(data, s);
        hks[s].reserve(graphs[s].size());
        for (const auto& g : graphs[s]) hks[s].push_back(graph_hks(g, steps, cfg.hks.top_k));
    }
    if (hks[0].empty()) throw DataError("describe: empty training split");

    const DescriptorStats stats = fit_stats(hks[0]);
    std::array<std::vector<GraphDescriptor>, 3> descriptors;
    for (int s = 0; s < 3; ++s) {
        descriptors[s].reserve(hks[s].size());
        for (const auto& h : hks[s]) descriptors[s].push_back(histogram_descriptor(h, stats, cfg.hks.bins));
    }
    const PixelStats pixel = fit_pixel_stats(descriptors[0]);

    Matrix mean_row(1, stats.count()), sd_row(1, stats.count());
    std::copy(stats.means.begin(), stats.means.end(), mean_row.data.begin());
    std::copy(stats.sds.begin(), stats.sds.end(), sd_row.data.begin());
    io::write_stats_csv(descriptor_stats_path(cfg), "train", {{"mean", &mean_row}, {"sd", &sd_row}});
    io::write_stats_csv(pixel_stats_path(cfg), "train", {{"mean", &pixel.means}, {"sd", &pixel.sds}});

    for (int s = 0; s < 3; ++s) {
        io::DescriptorSet set;
        for (std::size_t i = 0; i < data.labels[s].size(); ++i) {
            set.origins.push_back(data.labels[s][i].origin);
            set.raw_growth.push_back(data.labels[s][i].raw_growth);
            set.labels.push_back(scale_label(data.labels[s][i].raw_growth));
            set.descriptors.push_back(descriptors[s][i].bins);
        }
        io::write_descriptor_set(descriptors_path(cfg, s), set);

        std::vector<FeatureVector> feats;
        feats.reserve(graphs[s].size());
        for (const auto& g : graphs[s]) feats.push_back(extract_features(g));
        write_features_csv(features_path(cfg, s), data.labels[s], feats);
    }

    if (dump_dir) {
        fs::create_directories(*dump_dir);
        const auto limit = std::min(dump_limit, descriptors[0].size());
        for (std::size_t i = 0; i < limit; ++i) {
            const auto base = "descriptor_" + std::to_string(data.labels[0][i].origin);
            io::write_descriptor_csv(*dump_dir / (base + ".csv"), descriptors[0][i].bins);
            io::write_pgm(*dump_dir / (base + ".pgm"), descriptors[0][i].bins);
        }
    }
}

// ---- train -------------------------------------------------------------------

inline PixelStats load_pixel_stats(const RunConfig& cfg) {
    const io::StatsFile file = io::read_stats_csv(pixel_stats_path(cfg));
    if (file.fitted_on != "train")
        throw DataError("pixel stats were fitted on '" + file.fitted_on + "', refusing to proceed");
    PixelStats stats;
    stats.means = file.block("mean");
    stats.sds = file.block("sd");
    return stats;
}

inline std::vector<Matrix> normalized_descriptors(const io::DescriptorSet& set, const PixelStats& stats) {
    std::vector<Matrix> out;
    out.reserve(set.size());
    for (const auto& d : set.descriptors) {
        GraphDescriptor wrap;
        wrap.bins = d;
        out.push_back(pixel_normalize(wrap, stats));
    }
    return out;
}

inline Matrix flatten_rows(const std::vector<Matrix>& mats) {
    if (mats.empty()) throw ConfigError("flatten_rows: empty set");
    const std::size_t width = mats.front().data.size();
    Matrix out(mats.size(), width);
    for (std::size_t i = 0; i < mats.size(); ++i)
        std::copy(mats[i].data.begin(), mats[i].data.end(), out.row_ptr(i));
    return out;
}

struct FeatureTable {
    std::vector<std::uint64_t> origins;
    std::vector<double> labels;
    Matrix x;
};

inline FeatureTable read_features_csv(const fs::path& path) {
    auto in = io::open_in(path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("origin_id,scaled_label,", 0) != 0)
        throw DataError(path.string() + ": missing feature header");
    FeatureTable table;
    std::vector<double> values;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        char* cursor = line.data();
        char* end = nullptr;
        table.origins.push_back(std::strtoull(cursor, &end, 10));
        if (*end != ',') throw DataError(path.string() + ": malformed feature row");
        cursor = end + 1;
        table.labels.push_back(std::strtod(cursor, &end));
        for (std::size_t j = 0; j < FeatureVector::kCount; ++j) {
            if (*end != ',') throw DataError(path.string() + ": malformed feature row");
            cursor = end + 1;
            values.push_back(std::strtod(cursor, &end));
        }
    }
    table.x = Matrix(table.origins.size(), FeatureVector::kCount);
    table.x.data = std::move(values);
    return table;
}

inline void write_history_csv(const fs::path& path, const std::vector<nn::EpochStats>& history) {
    auto out = io::open_out(path);
    out << "epoch,train_mse,val_mse\n";
    for (const auto& row : history)
        out << row.epoch << ',' << io::fmt(row.train_mse) << ',' << io::fmt(row.val_mse) << '\n';
}

// Grid-searched closed-form ridge; history rows record (grid index, train
// MSE, val MSE) per l2 value.
inline std::pair<RidgeModel, std::vector<nn::EpochStats>> fit_ridge_grid(
    const Matrix& train_x, const std::vector<double>& train_y, const Matrix& val_x,
    const std::vector<double>& val_y, const std::vector<double>& grid) {
    if (grid.empty()) throw ConfigError("ridge grid must not be empty");
    RidgeModel best;
    std::vector<nn::EpochStats> history;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        RidgeModel model = ridge_fit(train_x, train_y, grid[i]);
        nn::EpochStats row;
        row.epoch = i;
        row.train_mse = mse(ridge_predict(model, train_x), train_y);
        row.val_mse = mse(ridge_predict(model, val_x), val_y);
        history.push_back(row);
        if (row.val_mse < best_val) {
            best_val = row.val_mse;
            best = std::move(model);
        }
    }
    return {std::move(best), std::move(history)};
}

inline bool is_nn_model(const std::string& name) {
    return name == "deepgraph" || name == "gd-mlp" || name == "gd-cnn";
}

inline nn::ModelKind nn_kind_of(const std::string& name) {
    if (name == "deepgraph") return nn::ModelKind::kDeepGraph;
    if (name == "gd-mlp") return nn::ModelKind::kMlp;
    if (name == "gd-cnn") return nn::ModelKind::kCnn;
    throw ConfigError("not a neural model: " + name);
}

// Trains one model variant on the prepared representations and writes its
// checkpoint plus loss history.
inline void cmd_train(const RunConfig& cfg, const std::string& model_name) {
    bool known = false;
    for (const auto& m : known_models()) known |= (m == model_name);
    if (!known) throw ConfigError("unknown model '" + model_name + "'");

    if (model_name == "features-linear") {
        const FeatureTable train_t = read_features_csv(features_path(cfg, 0));
        const FeatureTable val_t = read_features_csv(features_path(cfg, 1));
        auto [model, history] =
            fit_ridge_grid(train_t.x, train_t.labels, val_t.x, val_t.labels, cfg.train.ridge_l2_grid);
        io::write_ridge_checkpoint(checkpoint_path(cfg, model_name), model, io::RidgeInput::kFeatures);
        write_history_csv(history_path(cfg, model_name), history);
        return;
    }

    const PixelStats pixel = load_pixel_stats(cfg);
    const io::DescriptorSet train_set = io::read_descriptor_set(descriptors_path(cfg, 0));
    const io::DescriptorSet val_set = io::read_descriptor_set(descriptors_path(cfg, 1));
    const std::vector<Matrix> train_x = normalized_descriptors(train_set, pixel);
    const std::vector<Matrix> val_x = normalized_descriptors(val_set, pixel);

    if (model_name == "gd-linear") {
        auto [model, history] = fit_ridge_grid(flatten_rows(train_x), train_set.labels,
                                               flatten_rows(val_x), val_set.labels, cfg.train.ridge_l2_grid);
        io::write_ridge_checkpoint(checkpoint_path(cfg, model_name), model, io::RidgeInput::kDescriptor);
        write_history_csv(history_path(cfg, model_name), history);
        return;
    }

    nn::ModelConfig mcfg;
    mcfg.kind = nn_kind_of(model_name);
    mcfg.bins = cfg.hks.bins;
    mcfg.steps = cfg.hks.steps;
    mcfg.filter_sizes = cfg.model.filter_sizes;
    mcfg.filters1 = cfg.model.filters1;
    mcfg.filters2 = cfg.model.filters2;
    mcfg.dense_size = cfg.model.dense_size;
    mcfg.dropout1 = cfg.model.dropout;
    mcfg.dropout2 = cfg.model.dropout;
    mcfg.paper_init = cfg.model.paper_init;

    nn::TrainConfig tcfg;
    tcfg.learning_rate = cfg.train.learning_rate;
    tcfg.l2 = cfg.train.l2;
    tcfg.batch_size = cfg.train.batch_size;
    tcfg.max_epochs = cfg.train.max_epochs;
    tcfg.patience = cfg.train.patience;
    tcfg.seed = derive_seed(cfg.seed, "train-" + model_name);

    const nn::TrainResult result = nn::train(train_x, train_set.labels, val_x, val_set.labels, mcfg, tcfg);
    io::write_nn_checkpoint(checkpoint_path(cfg, model_name), result.model);
    write_history_csv(history_path(cfg, model_name), result.history);
}

// ---- evaluate / compare --------------------------------------------------------

struct EvalRow {
    std::string model;
    std::size_t n = 0;
    double mse = 0.0;
    std::vector<double> sq_errors;  // per instance, test order
};

inline std::vector<double> predict_model(const RunConfig& cfg, const std::string& model_name,
                                         const io::DescriptorSet& test_set,
                                         const std::vector<Matrix>& test_x) {
    const fs::path ckpt = checkpoint_path(cfg, model_name);
    if (!fs::exists(ckpt))
        throw ConfigError("no checkpoint for model '" + model_name + "' (run `train` first)");
    if (is_nn_model(model_name)) {
        const nn::Model model = io::read_nn_checkpoint(ckpt);
        return nn::predict(model, test_x);
    }
    io::RidgeInput input;
    const RidgeModel model = io::read_ridge_checkpoint(ckpt, &input);
    if (input == io::RidgeInput::kDescriptor) return ridge_predict(model, flatten_rows(test_x));
    const FeatureTable table = read_features_csv(features_path(cfg, 2));
    if (table.origins != test_set.origins)
        throw DataError("feature table and descriptor set disagree on test origins");
    return ridge_predict(model, table.x);
}

inline std::vector<EvalRow> evaluate_models(const RunConfig& cfg, const std::vector<std::string>& models) {
    const PixelStats pixel = load_pixel_stats(cfg);
    const io::DescriptorSet test_set = io::read_descriptor_set(descriptors_path(cfg, 2));
    const std::vector<Matrix> test_x = normalized_descriptors(test_set, pixel);

    std::vector<EvalRow> rows;
    for (const auto& name : models) {
        const auto yhat = predict_model(cfg, name, test_set, test_x);
        EvalRow row;
        row.model = name;
        row.n = yhat.size();
        row.sq_errors.resize(yhat.size());
        for (std::size_t i = 0; i < yhat.size(); ++i) {
            const double d = yhat[i] - test_set.labels[i];
            row.sq_errors[i] = d * d;
        }
        row.mse = mse(yhat, test_set.labels);
        rows.push_back(std::move(row));

        auto out = io::open_out(predictions_path(cfg, name));
        out << "origin_id,y,yhat,sq_err\n";
        for (std::size_t i = 0; i < yhat.size(); ++i)
            out << test_set.origins[i] << ',' << io::fmt(test_set.labels[i]) << ',' << io::fmt(yhat[i])
                << ',' << io::fmt(rows.back().sq_errors[i]) << '\n';
    }

    {
        auto out = io::open_out(report_path(cfg));
        out << "model,split,n_instances,mse\n";
        for (const auto& row : rows) out << row.model << ",test," << row.n << ',' << io::fmt(row.mse) << '\n';
    }
    {
        auto out = io::open_out(paired_path(cfg));
        out << "origin_id";
        for (const auto& row : rows) out << ',' << row.model;
        for (std::size_t a = 0; a < rows.size(); ++a)
            for (std::size_t b = a + 1; b < rows.size(); ++b)
                out << ',' << rows[a].model << "_minus_" << rows[b].model;
        out << '\n';
        for (std::size_t i = 0; i < test_set.size(); ++i) {
            out << test_set.origins[i];
            for (const auto& row : rows) out << ',' << io::fmt(row.sq_errors[i]);
            for (std::size_t a = 0; a < rows.size(); ++a)
                for (std::size_t b = a + 1; b < rows.size(); ++b)
                    out << ',' << io::fmt(rows[a].sq_errors[i] - rows[b].sq_errors[i]);
            out << '\n';
        }
    }
    return rows;
}

inline std::vector<EvalRow> cmd_evaluate(const RunConfig& cfg, std::vector<std::string> models = {}) {
    if (models.empty()) {
        for (const auto& name : known_models())
            if (fs::exists(checkpoint_path(cfg, name))) models.push_back(name);
        if (models.empty()) throw ConfigError("no trained checkpoints found in " + cfg.out.string());
    }
    return evaluate_models(cfg, models);
}

// Evaluates all requested models and writes a ranked human-readable summary
// with pairwise per-instance squared-error gaps (paired comparisons).
inline std::vector<EvalRow> cmd_compare(const RunConfig& cfg, std::vector<std::string> models = {}) {
    auto rows = cmd_evaluate(cfg, std::move(models));
    std::vector<std::size_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&rows](std::size_t a, std::size_t b) { return rows[a].mse < rows[b].mse; });
    auto out = io::open_out(summary_path(cfg));
    out << "test MSE (lower is better)\n";
    for (const std::size_t i : order)
        out << "  " << rows[i].model << ": " << io::fmt(rows[i].mse, 9) << '\n';
    out << "\npairwise mean squared-error differences (row minus column < 0 means row wins)\n";
    for (std::size_t a = 0; a < rows.size(); ++a)
        for (std::size_t b = a + 1; b < rows.size(); ++b) {
            double mean_diff = 0.0;
            for (std::size_t i = 0; i < rows[a].sq_errors.size(); ++i)
                mean_diff += rows[a].sq_errors[i] - rows[b].sq_errors[i];
            mean_diff /= static_cast<double>(rows[a].sq_errors.size());
            out << "  " << rows[a].model << " vs " << rows[b].model << ": " << io::fmt(mean_diff, 9)
                << '\n';
        }
    return rows;
}

}  // namespace deepgraph::pipeline
