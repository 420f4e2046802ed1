#include "deepc/experiments.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

namespace {

struct GlobalFlags
{
    std::string config = "experiment.json";
    std::string out;
    std::string variant;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

deepc::experiments::ExperimentConfig load_with_overrides(const GlobalFlags& flags)
{
    auto cfg = deepc::experiments::ExperimentConfig::load(flags.config);
    if (flags.seed_set) cfg.seed = flags.seed;
    if (!flags.out.empty()) cfg.out_dir = flags.out;
    if (!flags.variant.empty()) cfg.variant = flags.variant;
    return cfg;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"data-driven predictive control: collection, reduction, closed-loop runs"};
    app.require_subcommand(1);

    GlobalFlags flags;
    app.add_option("--config", flags.config, "experiment config file")->capture_default_str();
    app.add_option("--seed", flags.seed, "override the config seed")
        ->each([&](const std::string&) { flags.seed_set = true; });
    app.add_option("--out", flags.out, "override the output directory");
    app.add_option("--variant", flags.variant, "override the controller variant")
        ->check(CLI::IsMember({"full", "reduced", "both"}));

    std::string init_dir = ".";
    auto* init = app.add_subcommand("init", "write a config template and the demo plant");
    init->add_option("dir", init_dir, "target directory")->capture_default_str();

    auto* collect = app.add_subcommand("collect", "record an excitation trajectory");
    auto* reduce = app.add_subcommand("reduce", "SVD-reduce the data library");
    auto* run = app.add_subcommand("run", "closed-loop runs and the comparison table");
    auto* check = app.add_subcommand("check", "randomized verification suites");
    auto* bench = app.add_subcommand("bench", "timing: full vs reduced, scaling family");

    CLI11_PARSE(app, argc, argv);

    try {
        using namespace deepc::experiments;
        if (init->parsed()) return cmd_init(init_dir);
        const ExperimentConfig cfg = load_with_overrides(flags);
        if (collect->parsed()) return cmd_collect(cfg);
        if (reduce->parsed()) return cmd_reduce(cfg);
        if (run->parsed()) return cmd_run(cfg);
        if (check->parsed()) return cmd_check(cfg);
        if (bench->parsed()) return cmd_bench(cfg);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
