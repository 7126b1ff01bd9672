#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ftlsim/alloc.hpp"
#include "ftlsim/device.hpp"
#include "ftlsim/ftl.hpp"
#include "ftlsim/manager.hpp"
#include "ftlsim/workload.hpp"

// Run configuration: plain-text key=value files with [section] headers, every
// tunable addressable by dotted key (e.g. `wolf.q=2`), plus the named
// experiment presets.

namespace ftlsim {

enum class RunMode {
    Simulate,         // one run (optionally paired with a no-swap twin)
    Grid,             // analytic allocation-quality sweep
    SwapPairs,        // all pair swaps, Wolf vs FDP
    CleaningCompare,  // greedy vs LRU cleaning under Wolf
    TraceCompare,     // trace replay, Wolf vs FDP
};

struct RunConfig {
    // Desk-scale geometry by default: every effect under study is driven by
    // the LBA/PBA ratio, not device size, and this runs in seconds. Bigger
    // devices remain reachable through the device.* keys.
    FlashGeometry geometry{1, 2, 256, 32, 16 * 1024};
    double ratio = 0.7;  // LBA / PBA

    std::string manager = "baseline";  // baseline | fdp | wolf
    RunMode mode = RunMode::Simulate;

    std::string workload = "uniform";  // uniform | kmodal | trace
    std::string trace_path;
    // (size fraction of LBA, update probability) per group, in order.
    std::vector<std::pair<double, double>> kmodal;
    std::vector<SwapEvent> swaps;  // indices into the generated write stream

    std::uint64_t seed = 42;
    std::int64_t warm_up_writes = -1;   // -1: 4 * LBA
    std::int64_t measured_writes = -1;  // -1: 4 * LBA
    std::int64_t window_width = -1;     // -1: LBA / 10
    bool compare_no_swap = false;
    std::int64_t audit_every = 0;  // 0: off

    ManagerTunables tunables;
    std::string detector = "bloom";  // bloom | oracle

    GridParams grid{10, {2, 3, 4, 5}, {0.7}, 71680, 32};

    Lpa lba() const {
        return static_cast<Lpa>(std::llround(ratio * static_cast<double>(geometry.total_pages())));
    }
    std::int64_t resolved_warm_up() const { return warm_up_writes >= 0 ? warm_up_writes : 4 * lba(); }
    std::int64_t resolved_measured() const { return measured_writes >= 0 ? measured_writes : 4 * lba(); }
    std::int64_t resolved_window() const {
        return window_width > 0 ? window_width : std::max<std::int64_t>(1, lba() / 10);
    }

    void validate() const;  // throws std::invalid_argument naming the field
    KModalSpec kmodal_spec() const;
};

// Applies one dotted key; throws std::invalid_argument for unknown keys or
// unparsable values.
void apply_config_key(RunConfig& config, const std::string& key, const std::string& value);

RunConfig parse_config_file(const std::string& path);

// Named experiments at desk scale: equilibrium, swap2, swap5x5,
// greedy_vs_lru, grid_study, trace_replay.
RunConfig preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace ftlsim
