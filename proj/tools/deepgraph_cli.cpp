#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "deepgraph/pipeline.hpp"

namespace dgp = deepgraph::pipeline;

namespace {

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<bool> paper_init;
};

dgp::RunConfig resolve_config(const CommonFlags& flags) {
    dgp::RunConfig cfg;
    if (!flags.config_path.empty()) cfg = dgp::load_config(flags.config_path);
    if (flags.seed) cfg.seed = *flags.seed;
    if (flags.out) cfg.out = *flags.out;
    if (flags.paper_init) cfg.model.paper_init = *flags.paper_init;
    return cfg;
}

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_option("--config", flags.config_path, "JSON run configuration")->check(CLI::ExistingFile);
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&flags](std::uint64_t v) { flags.seed = v; }, "override the root seed");
    cmd->add_option_function<std::string>(
        "--out", [&flags](const std::string& v) { flags.out = v; }, "benchmark/run directory");
    cmd->add_flag_function(
        "--paper-init", [&flags](std::int64_t) { flags.paper_init = true; },
        "initialize network parameters with unit-sd Gaussians");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"DeepGraph: heat-kernel graph descriptors and growth-prediction models"};
    app.require_subcommand(1);

    CommonFlags flags;
    bool force = false;
    std::string model = "deepgraph";
    std::vector<std::string> eval_models;
    std::string dump_dir;
    std::size_t dump_limit = 8;

    auto* generate = app.add_subcommand("generate", "generate a synthetic temporal-graph benchmark");
    add_common(generate, flags);
    generate->add_flag("--force", force, "overwrite an existing benchmark");

    auto* describe = app.add_subcommand("describe", "compute descriptors and structural features");
    add_common(describe, flags);
    describe->add_option("--dump", dump_dir, "also dump per-graph descriptor CSV/PGM files here");
    describe->add_option("--dump-limit", dump_limit, "max per-graph dumps (default 8)");

    auto* train = app.add_subcommand("train", "train a growth-prediction model");
    add_common(train, flags);
    train->add_option("--model", model, "deepgraph|gd-mlp|gd-cnn|gd-linear|features-linear");

    auto* evaluate = app.add_subcommand("evaluate", "evaluate trained models on the test split");
    add_common(evaluate, flags);
    evaluate->add_option("--model", eval_models, "models to evaluate (default: all trained)");

    auto* compare = app.add_subcommand("compare", "evaluate models and write a ranked summary");
    add_common(compare, flags);
    compare->add_option("--model", eval_models, "models to compare (default: all trained)");

    CLI11_PARSE(app, argc, argv);

    try {
        const dgp::RunConfig cfg = resolve_config(flags);
        if (generate->parsed()) {
            dgp::cmd_generate(cfg, force);
            std::cout << "benchmark written to " << cfg.out.string() << '\n';
        } else if (describe->parsed()) {
            std::optional<std::filesystem::path> dump;
            if (!dump_dir.empty()) dump = dump_dir;
            dgp::cmd_describe(cfg, dump, dump_limit);
            std::cout << "descriptors written to " << cfg.out.string() << '\n';
        } else if (train->parsed()) {
            dgp::cmd_train(cfg, model);
            std::cout << "checkpoint: " << dgp::checkpoint_path(cfg, model).string() << '\n';
        } else if (evaluate->parsed()) {
            for (const auto& row : dgp::cmd_evaluate(cfg, eval_models))
                std::cout << row.model << " test mse " << deepgraph::io::fmt(row.mse, 9) << " (n=" << row.n
                          << ")\n";
        } else if (compare->parsed()) {
            dgp::cmd_compare(cfg, eval_models);
            std::cout << "summary: " << dgp::summary_path(cfg).string() << '\n';
        }
    } catch (const deepgraph::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const deepgraph::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 2;
    } catch (const deepgraph::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
