#include "ftlsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>

#include "ftlsim/fdp.hpp"
#include "ftlsim/wolf.hpp"

namespace ftlsim {

namespace {

std::unique_ptr<GroupedManager> make_manager(const RunConfig& cfg, FlashDevice& dev,
                                             const OracleClassifier* oracle) {
    ManagerTunables tun = cfg.tunables;
    tun.use_oracle = cfg.detector == "oracle";
    Lpa lba = cfg.lba();
    if (cfg.manager == "baseline")
        return std::make_unique<BaselineManager>(dev, lba, tun);
    if (cfg.manager == "wolf")
        return std::make_unique<WolfManager>(dev, lba, tun, oracle);
    if (cfg.manager == "fdp")
        return std::make_unique<FdpManager>(dev, lba, tun, oracle);
    throw std::invalid_argument("unknown manager '" + cfg.manager + "'");
}

std::string join_int(const std::vector<GroupSnapshot>& snaps,
                     std::int64_t GroupSnapshot::*field) {
    std::string out;
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        if (i) out += '|';
        out += std::to_string(snaps[i].*field);
    }
    return out;
}

std::string join_double(const std::vector<GroupSnapshot>& snaps,
                        double GroupSnapshot::*field, const char* fmt) {
    std::string out;
    char buf[48];
    for (std::size_t i = 0; i < snaps.size(); ++i) {
        if (i) out += '|';
        std::snprintf(buf, sizeof buf, fmt, snaps[i].*field);
        out += buf;
    }
    return out;
}

}  // namespace

Simulator::Simulator(const RunConfig& config) : config_(config), device_(config.geometry) {
    config_.validate();
    Lpa lba = config_.lba();
    if (config_.workload == "uniform") {
        source_ = std::make_unique<UniformSource>(lba, config_.seed);
    } else if (config_.workload == "kmodal") {
        source_ = std::make_unique<KModalSource>(config_.kmodal_spec(), lba, config_.seed);
    } else {
        source_ = std::make_unique<TraceSource>(config_.trace_path, lba);
    }
    if (config_.detector == "oracle") {
        auto* kmodal = dynamic_cast<KModalSource*>(source_.get());
        oracle_ = std::make_unique<OracleClassifier>(kmodal);
    }
    manager_ = make_manager(config_, device_, oracle_.get());
}

RunResult Simulator::run() {
    Lpa lba = config_.lba();
    RunResult result;
    result.lba = lba;
    result.pba = device_.geometry().total_pages();

    // Warm fill: the equilibrium analysis presumes a fully written logical
    // space.
    for (Lpa lpa = 0; lpa < lba; ++lpa)
        manager_->handle_write(lpa, WriteKind::Application);

    std::int64_t warm_up = config_.resolved_warm_up();
    for (std::int64_t i = 0; i < warm_up; ++i)
        manager_->handle_write(source_->next().lpa, WriteKind::Application);

    std::int64_t measured = config_.resolved_measured();
    std::int64_t width = config_.resolved_window();
    DeviceCounters at_start = device_.counters();
    DeviceCounters prev = at_start;
    std::int64_t windows = measured / width;
    std::int64_t audit_countdown = config_.audit_every;

    for (std::int64_t w = 0; w < windows; ++w) {
        for (std::int64_t i = 0; i < width; ++i) {
            manager_->handle_write(source_->next().lpa, WriteKind::Application);
            if (config_.audit_every > 0 && --audit_countdown <= 0) {
                manager_->audit();
                audit_countdown = config_.audit_every;
            }
        }
        DeviceCounters now = device_.counters();
        MetricsWindow row;
        row.window = w;
        row.logical_writes = now.logical_writes - prev.logical_writes;
        row.migrations = now.migrations - prev.migrations;
        row.erases = now.erases - prev.erases;
        row.wa = row.logical_writes > 0
                     ? static_cast<double>(row.logical_writes + row.migrations) /
                           static_cast<double>(row.logical_writes)
                     : 1.0;
        auto snaps = manager_->snapshot();
        row.group_count = static_cast<int>(snaps.size());
        row.sizes = join_int(snaps, &GroupSnapshot::size);
        row.probs = join_double(snaps, &GroupSnapshot::freq, "%.4f");
        row.op_targets = join_double(snaps, &GroupSnapshot::target_op, "%.1f");
        result.windows.push_back(std::move(row));
        prev = now;
    }

    manager_->audit();

    result.totals = device_.counters();
    result.measured_logical = result.totals.logical_writes - at_start.logical_writes;
    result.measured_migrations = result.totals.migrations - at_start.migrations;
    result.measured_erases = result.totals.erases - at_start.erases;
    std::size_t n = result.windows.size();
    std::size_t tail = std::max<std::size_t>(1, n / 5);
    double acc = 0.0;
    for (std::size_t i = n - tail; i < n; ++i) acc += result.windows[i].wa;
    result.steady_wa = n > 0 ? acc / static_cast<double>(tail) : 1.0;
    result.final_groups = manager_->snapshot();
    return result;
}

RunResult run_single(const RunConfig& config) {
    Simulator sim(config);
    return sim.run();
}

void emit_metrics_csv(const std::vector<MetricsWindow>& rows, std::ostream& out) {
    out << "window,logical_writes,migrations,erases,wa,group_count,sizes,probs,op_targets\n";
    char buf[96];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%lld,%lld,%lld,%lld,%.6f,%d,",
                      static_cast<long long>(r.window),
                      static_cast<long long>(r.logical_writes),
                      static_cast<long long>(r.migrations),
                      static_cast<long long>(r.erases), r.wa, r.group_count);
        out << buf << r.sizes << ',' << r.probs << ',' << r.op_targets << '\n';
    }
}

double extra_migrations_per_pba(const RunConfig& config, RunResult* with_swap,
                                RunResult* without_swap) {
    if (config.swaps.empty())
        throw std::invalid_argument("swap comparison needs at least one swap event");
    RunResult swapped = run_single(config);
    RunConfig plain = config;
    plain.swaps.clear();
    plain.compare_no_swap = false;
    RunResult baseline = run_single(plain);
    double extra = static_cast<double>(swapped.measured_migrations -
                                       baseline.measured_migrations);
    if (with_swap) *with_swap = std::move(swapped);
    if (without_swap) *without_swap = std::move(baseline);
    return extra / static_cast<double>(config.geometry.total_pages());
}

std::vector<SwapPairOutcome> run_swap_pairs(const RunConfig& base) {
    if (base.workload != "kmodal")
        throw std::invalid_argument("swap_pairs mode needs a k-modal workload");
    int n = static_cast<int>(base.kmodal.size());
    std::int64_t swap_at = base.swaps.empty()
                               ? base.resolved_warm_up() + 2 * base.lba()
                               : base.swaps.front().write_index;

    auto measured_migrations = [&](const std::string& manager,
                                   std::vector<SwapEvent> swaps) {
        RunConfig cfg = base;
        cfg.manager = manager;
        cfg.swaps = std::move(swaps);
        return run_single(cfg).measured_migrations;
    };

    std::int64_t wolf_plain = measured_migrations("wolf", {});
    std::int64_t fdp_plain = measured_migrations("fdp", {});
    double pba = static_cast<double>(base.geometry.total_pages());

    std::vector<SwapPairOutcome> out;
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            SwapPairOutcome row;
            row.group_a = a;
            row.group_b = b;
            row.wolf_migrations = measured_migrations("wolf", {SwapEvent{swap_at, a, b}});
            row.fdp_migrations = measured_migrations("fdp", {SwapEvent{swap_at, a, b}});
            row.wolf_extra_per_pba =
                static_cast<double>(row.wolf_migrations - wolf_plain) / pba;
            row.fdp_extra_per_pba =
                static_cast<double>(row.fdp_migrations - fdp_plain) / pba;
            out.push_back(row);
        }
    }
    return out;
}

CleaningOutcome run_cleaning_compare(const RunConfig& base) {
    if (base.swaps.size() < 2)
        throw std::invalid_argument("cleaning comparison needs the double-swap schedule");
    std::int64_t second_swap_measured_index =
        base.swaps[1].write_index - base.resolved_warm_up();
    std::int64_t width = base.resolved_window();
    std::int64_t from_window = std::max<std::int64_t>(0, second_swap_measured_index / width);

    // Migrations from the second swap over a horizon that comfortably covers
    // reconvergence (write-amplification settles within one logical-space
    // overwrite here); a fixed horizon keeps the two runs comparable.
    std::int64_t to_window = from_window + (2 * base.lba()) / width;
    auto tally = [&](CleaningPolicy policy, std::int64_t* after, std::int64_t* total) {
        RunConfig cfg = base;
        cfg.manager = "wolf";
        cfg.tunables.cleaning = policy;
        RunResult r = run_single(cfg);
        *total = r.measured_migrations;
        std::int64_t acc = 0;
        for (const auto& w : r.windows)
            if (w.window >= from_window && w.window < to_window) acc += w.migrations;
        *after = acc;
    };

    CleaningOutcome out;
    tally(CleaningPolicy::Greedy, &out.greedy_after_second_swap, &out.greedy_total);
    tally(CleaningPolicy::Lru, &out.lru_after_second_swap, &out.lru_total);
    return out;
}

void write_synthetic_trace(const RunConfig& config, const std::string& path) {
    KModalSource source(config.kmodal_spec(), config.lba(), config.seed);
    std::int64_t count = config.resolved_warm_up() + config.resolved_measured();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write trace file: " + path);
    out << "# synthetic skewed workload, one logical page address per line\n";
    out << "# events: " << count << ", logical pages: " << config.lba() << "\n";
    for (std::int64_t i = 0; i < count; ++i) out << source.next().lpa << '\n';
}

TraceOutcome run_trace_compare(const RunConfig& base, const std::string& work_dir) {
    TraceOutcome out;
    out.trace_path = base.trace_path;
    if (out.trace_path.empty()) {
        std::filesystem::create_directories(work_dir);
        out.trace_path = (std::filesystem::path(work_dir) / "synthetic_trace.txt").string();
        write_synthetic_trace(base, out.trace_path);
    }
    RunConfig cfg = base;
    cfg.mode = RunMode::Simulate;
    cfg.workload = "trace";
    cfg.trace_path = out.trace_path;
    cfg.detector = "bloom";
    cfg.swaps.clear();
    cfg.kmodal.clear();

    cfg.manager = "wolf";
    out.wolf_steady_wa = run_single(cfg).steady_wa;
    cfg.manager = "fdp";
    out.fdp_steady_wa = run_single(cfg).steady_wa;
    return out;
}

namespace {

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << contents;
}

std::string describe_config(const RunConfig& cfg) {
    std::ostringstream s;
    const auto& g = cfg.geometry;
    s << "manager: " << cfg.manager << "\n"
      << "geometry: " << g.channels << "x" << g.luns_per_channel << "x" << g.blocks_per_lun
      << "x" << g.pages_per_block << " (PBA " << g.total_pages() << " pages)\n"
      << "lba: " << cfg.lba() << " (ratio "
      << static_cast<double>(cfg.lba()) / static_cast<double>(g.total_pages()) << ")\n"
      << "workload: " << cfg.workload << "\n"
      << "rng: mt19937_64, seed " << cfg.seed << "\n";
    return s.str();
}

}  // namespace

int run_experiment(const RunConfig& config, const std::string& out_dir) {
    std::filesystem::create_directories(out_dir);
    auto path = [&](const char* name) {
        return (std::filesystem::path(out_dir) / name).string();
    };
    std::ostringstream summary;
    summary << describe_config(config);

    switch (config.mode) {
        case RunMode::Simulate: {
            RunResult swapped;
            if (config.compare_no_swap && !config.swaps.empty()) {
                RunResult plain;
                double extra = extra_migrations_per_pba(config, &swapped, &plain);
                std::ostringstream csv;
                emit_metrics_csv(plain.windows, csv);
                write_file(path("metrics_noswap.csv"), csv.str());
                summary << "extra_migrations_vs_noswap_per_pba: " << extra << "\n";
            } else {
                swapped = run_single(config);
            }
            std::ostringstream csv;
            emit_metrics_csv(swapped.windows, csv);
            write_file(path("metrics.csv"), csv.str());
            summary << "logical_writes: " << swapped.totals.logical_writes << "\n"
                    << "migrations: " << swapped.totals.migrations << "\n"
                    << "physical_writes: " << swapped.totals.physical_writes << "\n"
                    << "erases: " << swapped.totals.erases << "\n"
                    << "steady_state_wa: " << swapped.steady_wa << "\n"
                    << "group_count: " << swapped.final_groups.size() << "\n";
            if (config.workload == "uniform") {
                double r = static_cast<double>(swapped.lba) / static_cast<double>(swapped.pba);
                summary << "model_wa_prediction: " << equilibrium_point(r).wa << "\n";
            }
            break;
        }
        case RunMode::Grid: {
            auto rows = grid_study(config.grid);
            std::ostringstream csv;
            write_grid_csv(rows, csv);
            write_file(path("grid.csv"), csv.str());
            double mean = 0.0, worst = 0.0;
            for (const auto& r : rows) {
                mean += r.pct_off;
                worst = std::max(worst, r.pct_off);
            }
            if (!rows.empty()) mean /= static_cast<double>(rows.size());
            summary << "configurations: " << rows.size() << "\n"
                    << "mean_pct_off_optimal: " << mean << "\n"
                    << "max_pct_off_optimal: " << worst << "\n";
            break;
        }
        case RunMode::SwapPairs: {
            auto rows = run_swap_pairs(config);
            std::ostringstream csv;
            csv << "group_a,group_b,wolf_migrations,fdp_migrations,"
                   "wolf_extra_per_pba,fdp_extra_per_pba\n";
            char buf[160];
            int wolf_wins = 0;
            for (const auto& r : rows) {
                std::snprintf(buf, sizeof buf, "%d,%d,%lld,%lld,%.6f,%.6f\n", r.group_a,
                              r.group_b, static_cast<long long>(r.wolf_migrations),
                              static_cast<long long>(r.fdp_migrations),
                              r.wolf_extra_per_pba, r.fdp_extra_per_pba);
                csv << buf;
                if (r.wolf_migrations <= r.fdp_migrations) ++wolf_wins;
            }
            write_file(path("pairs.csv"), csv.str());
            summary << "pairs: " << rows.size() << "\n"
                    << "wolf_wins: " << wolf_wins << "\n";
            break;
        }
        case RunMode::CleaningCompare: {
            CleaningOutcome r = run_cleaning_compare(config);
            std::ostringstream csv;
            csv << "policy,migrations_after_second_swap,total_migrations\n"
                << "greedy," << r.greedy_after_second_swap << ',' << r.greedy_total << "\n"
                << "lru," << r.lru_after_second_swap << ',' << r.lru_total << "\n";
            write_file(path("cleaning.csv"), csv.str());
            summary << "greedy_migrations_after_second_swap: " << r.greedy_after_second_swap
                    << "\n"
                    << "lru_migrations_after_second_swap: " << r.lru_after_second_swap << "\n"
                    << "lru_over_greedy: "
                    << (r.greedy_after_second_swap > 0
                            ? static_cast<double>(r.lru_after_second_swap) /
                                  static_cast<double>(r.greedy_after_second_swap)
                            : 0.0)
                    << "\n";
            break;
        }
        case RunMode::TraceCompare: {
            TraceOutcome r = run_trace_compare(config, out_dir);
            summary << "trace: " << r.trace_path << "\n"
                    << "wolf_steady_wa: " << r.wolf_steady_wa << "\n"
                    << "fdp_steady_wa: " << r.fdp_steady_wa << "\n"
                    << "fdp_over_wolf: " << r.fdp_steady_wa / r.wolf_steady_wa << "\n";
            break;
        }
    }

    write_file(path("summary.txt"), summary.str());
    std::cout << summary.str();
    return 0;
}

}  // namespace ftlsim
