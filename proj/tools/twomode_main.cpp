#include <cstdio>
#include <functional>
#include <string>

#include "CLI11.hpp"
#include "twomode/commands.hpp"
#include "twomode/errors.hpp"

namespace {

struct Cli {
    std::string config_path;
    std::string out_dir;
    std::string map_path;
    std::string mode;
    long long seed = -1;
};

twomode::RunConfig build_config(const Cli& cli) {
    twomode::RunConfig cfg;
    if (!cli.config_path.empty()) {
        cfg = twomode::load_config(cli.config_path);
    } else {
        cfg.config_hash = twomode::fnv1a_hex("{}");
    }
    if (cli.seed >= 0) cfg.seed = std::uint64_t(cli.seed);
    if (!cli.out_dir.empty()) cfg.out_dir = cli.out_dir;
    if (!cli.map_path.empty()) {
        cfg.map_source = "file";
        cfg.map_path = cli.map_path;
    }
    if (!cli.mode.empty()) {
        if (cli.mode == "sigma") cfg.mode = twomode::RamseyMode::Sigma;
        else if (cli.mode == "delta") cfg.mode = twomode::RamseyMode::Delta;
        else if (cli.mode == "cross-kerr") cfg.mode = twomode::RamseyMode::CrossKerr;
        else throw twomode::InvalidParameterError("--mode expects sigma, delta or cross-kerr");
    }
    return cfg;
}

void add_common(CLI::App* sub, Cli& cli) {
    sub->add_option("--config", cli.config_path, "JSON run configuration");
    sub->add_option("--seed", cli.seed, "random seed (overrides config)");
    sub->add_option("--out", cli.out_dir, "output directory (overrides config)");
    sub->add_option("--map", cli.map_path, "sensitivity map file (overrides config)");
    sub->add_option("--mode", cli.mode, "ramsey mode: sigma, delta or cross-kerr");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-mode transmon charge-sensitivity laboratory"};
    app.require_subcommand(1);
    Cli cli;

    using Runner = std::function<twomode::ResultBundle(const twomode::RunConfig&)>;
    const std::pair<const char*, Runner> verbs[] = {
        {"spectrum", twomode::cmd_spectrum},
        {"dispersion-sweep", twomode::cmd_dispersion_sweep},
        {"ramsey", twomode::cmd_ramsey},
        {"track", twomode::cmd_track},
        {"localize", twomode::cmd_localize},
        {"end2end", twomode::cmd_end2end},
    };
    for (const auto& [name, runner] : verbs) {
        CLI::App* sub = app.add_subcommand(name);
        add_common(sub, cli);
        sub->callback([&cli, name = std::string(name), runner] {
            const twomode::RunConfig cfg = build_config(cli);
            const twomode::ResultBundle bundle = runner(cfg);
            bundle.write(cfg.out_dir);
            std::printf("%s: wrote %zu tables to %s\n", name.c_str(),
                        bundle.tables.size(), cfg.out_dir.c_str());
            for (const auto& [key, value] : bundle.metrics) {
                std::printf("  %s = %.9g\n", key.c_str(), value);
            }
        });
    }

    try {
        CLI11_PARSE(app, argc, argv);
    } catch (const twomode::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
