#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "ftlsim/config.hpp"
#include "ftlsim/manager.hpp"
#include "ftlsim/model.hpp"
#include "ftlsim/workload.hpp"

// Experiment orchestration: the single-run simulator, windowed metrics, CSV
// emission, and the multi-run experiment modes behind the CLI presets.

namespace ftlsim {

struct MetricsWindow {
    std::int64_t window = 0;
    std::int64_t logical_writes = 0;
    std::int64_t migrations = 0;
    std::int64_t erases = 0;
    double wa = 1.0;  // (logical + migrations) / logical
    int group_count = 0;
    std::string sizes;       // per group, SGV order, pipe-separated
    std::string probs;
    std::string op_targets;
};

struct RunResult {
    Lpa lba = 0;
    std::int64_t pba = 0;
    std::vector<MetricsWindow> windows;
    DeviceCounters totals;  // whole run, including fill and warm-up
    std::int64_t measured_logical = 0;
    std::int64_t measured_migrations = 0;
    std::int64_t measured_erases = 0;
    double steady_wa = 1.0;  // mean WA over the last 20% of windows
    std::vector<GroupSnapshot> final_groups;
};

class Simulator {
public:
    explicit Simulator(const RunConfig& config);

    // Warm fill (every logical page written once, in order), warm-up, then
    // the measured phase emitting one row per window.
    RunResult run();

    GroupedManager& manager() { return *manager_; }
    FlashDevice& device() { return device_; }
    WorkloadSource& source() { return *source_; }

private:
    RunConfig config_;
    FlashDevice device_;
    std::unique_ptr<WorkloadSource> source_;
    std::unique_ptr<OracleClassifier> oracle_;
    std::unique_ptr<GroupedManager> manager_;
};

RunResult run_single(const RunConfig& config);

void emit_metrics_csv(const std::vector<MetricsWindow>& rows, std::ostream& out);

// Extra migrations caused by the swap, relative to an identically seeded
// no-swap run and normalized by PBA (the frequency-swap experiment metric).
double extra_migrations_per_pba(const RunConfig& config, RunResult* with_swap = nullptr,
                                RunResult* without_swap = nullptr);

struct SwapPairOutcome {
    int group_a = 0, group_b = 0;
    std::int64_t wolf_migrations = 0, fdp_migrations = 0;
    double wolf_extra_per_pba = 0.0, fdp_extra_per_pba = 0.0;
};
std::vector<SwapPairOutcome> run_swap_pairs(const RunConfig& base);

struct CleaningOutcome {
    std::int64_t greedy_after_second_swap = 0;
    std::int64_t lru_after_second_swap = 0;
    std::int64_t greedy_total = 0;
    std::int64_t lru_total = 0;
};
CleaningOutcome run_cleaning_compare(const RunConfig& base);

struct TraceOutcome {
    double wolf_steady_wa = 0.0;
    double fdp_steady_wa = 0.0;
    std::string trace_path;
};
// Replays config.trace_path with Wolf and FDP; when the path is empty, a
// synthetic trace is generated from the config's k-modal spec first.
TraceOutcome run_trace_compare(const RunConfig& base, const std::string& work_dir);

void write_synthetic_trace(const RunConfig& config, const std::string& path);

// CLI entry: dispatches on config.mode, writes CSVs and summary.txt under
// out_dir, prints the summary. Returns a process exit code.
int run_experiment(const RunConfig& config, const std::string& out_dir);

}  // namespace ftlsim
