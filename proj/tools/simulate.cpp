#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "ftlsim/config.hpp"
#include "ftlsim/sim.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Trace-driven SSD FTL simulator and write-amplification toolkit"};

    std::string config_path, preset_name, out_dir = "out";
    std::int64_t seed = -1;
    app.add_option("--config", config_path, "run configuration file (key=value)");
    app.add_option("--preset", preset_name,
                   "named experiment: equilibrium, swap2, swap5x5, greedy_vs_lru, "
                   "grid_study, trace_replay");
    app.add_option("--seed", seed, "override the RNG seed");
    app.add_option("--out", out_dir, "output directory for CSVs and the summary");

    CLI11_PARSE(app, argc, argv);

    try {
        if (config_path.empty() == preset_name.empty()) {
            std::fprintf(stderr, "exactly one of --config or --preset is required\n");
            return 2;
        }
        ftlsim::RunConfig config =
            config_path.empty() ? ftlsim::preset(preset_name)
                                : ftlsim::parse_config_file(config_path);
        if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
        return ftlsim::run_experiment(config, out_dir);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
