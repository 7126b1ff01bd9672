// Acceptance suite: one line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

#include "ftlsim/alloc.hpp"
#include "ftlsim/config.hpp"
#include "ftlsim/model.hpp"
#include "ftlsim/sim.hpp"

using namespace ftlsim;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool pass, const std::string& detail,
            double seconds) {
    std::printf("%s  criterion %d: %-28s  %s  [%.1fs]\n", pass ? "PASS" : "FAIL",
                number, name.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++failures;
}

template <typename Fn>
void criterion(int number, const std::string& name, Fn&& fn) {
    auto start = std::chrono::steady_clock::now();
    bool pass = false;
    std::string detail;
    try {
        pass = fn(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(number, name, pass, detail, seconds);
}

std::string fmt(const char* f, ...) {
    char buf[256];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

}  // namespace

int main() {
    // 1. Appendix equivalence of the bisection and Lambert-W forms.
    criterion(1, "model equivalence", [](std::string& detail) {
        double worst = 0.0;
        for (int i = 1; i <= 99; ++i) {
            double r = i / 100.0;
            worst = std::max(worst, std::abs(delta_at_equilibrium(r) -
                                             delta_at_equilibrium_lambert(r)));
        }
        detail = fmt("max |bisection - lambert| = %.2e over r=0.01..0.99", worst);
        return worst <= 1e-9;
    });

    // 2. Simulated equilibrium against the closed form at four ratios.
    criterion(2, "equilibrium reproduction", [](std::string& detail) {
        bool ok = true;
        std::ostringstream s;
        for (double ratio : {0.6, 0.7, 0.8, 0.9}) {
            RunConfig c = preset("equilibrium");
            c.ratio = ratio;
            Lpa lba = c.lba();
            c.warm_up_writes = 6 * lba;
            c.measured_writes = 3 * lba;
            c.window_width = lba / 20;
            RunResult r = run_single(c);
            double predicted = equilibrium_point(static_cast<double>(r.lba) /
                                                 static_cast<double>(r.pba)).wa;
            double off = std::abs(r.steady_wa - predicted) / predicted;
            s << fmt("r=%.1f: %.3f vs %.3f (%.1f%%) ", ratio, r.steady_wa, predicted,
                     100 * off);
            ok = ok && off <= 0.05;
        }
        detail = s.str();
        return ok;
    });

    // 3. Closed-form allocation quality across the workload grid.
    criterion(3, "allocation quality", [](std::string& detail) {
        GridParams p{10, {2, 3, 4, 5}, {0.7}, 71680, 32};
        auto rows = grid_study(p);
        double mean = 0.0, worst = 0.0;
        for (const auto& r : rows) {
            mean += r.pct_off;
            worst = std::max(worst, r.pct_off);
        }
        mean /= static_cast<double>(rows.size());
        detail = fmt("%zu configs, mean %.3f%%, max %.3f%% off optimal", rows.size(),
                     mean, worst);
        return mean < 1.0 && worst < 5.0;
    });

    // 4. The division-line objective is unimodal and the averaged closed
    //    form sits on its plateau.
    criterion(4, "convexity and plateau", [](std::string& detail) {
        const std::int64_t lba = 70000;
        const std::int64_t pba = 100000;
        const double op = static_cast<double>(pba - lba);
        struct Config {
            double s1, p1;
        };
        bool ok = true;
        std::ostringstream s;
        for (Config cfg : {Config{0.5, 0.9}, Config{0.3, 0.7}, Config{0.2, 0.6}}) {
            std::vector<GroupStat> stats{
                {static_cast<std::int64_t>(cfg.s1 * lba), cfg.p1},
                {lba - static_cast<std::int64_t>(cfg.s1 * lba), 1.0 - cfg.p1}};
            std::vector<double> curve;
            for (int i = 0; i <= 100; ++i) {
                double x = op * i / 100.0;
                curve.push_back(total_wa(stats, {x, op - x}));
            }
            auto min_it = std::min_element(curve.begin(), curve.end());
            bool unimodal = true;
            for (auto it = curve.begin(); it + 1 < min_it; ++it)
                unimodal = unimodal && *it >= *(it + 1) - 1e-12;
            for (auto it = min_it; it + 1 < curve.end(); ++it)
                unimodal = unimodal && *it <= *(it + 1) + 1e-12;

            Allocation mixed =
                alloc_mixed(stats, lba, pba, 1, ColdRule{false, 0.0, 0.0});
            double at_mixed = total_wa(stats, mixed);
            double off = at_mixed / *min_it - 1.0;
            s << fmt("(s1=%.1f,p1=%.1f): %s, midpoint %.2f%% off min ", cfg.s1, cfg.p1,
                     unimodal ? "unimodal" : "NOT unimodal", 100 * off);
            ok = ok && unimodal && off <= 0.02;
        }
        detail = s.str();
        return ok;
    });

    // 5. Frequency swap: extra migrations normalized by PBA.
    criterion(5, "frequency swap", [](std::string& detail) {
        RunConfig wolf = preset("swap2");
        double wolf_extra = extra_migrations_per_pba(wolf);
        RunConfig fdp = wolf;
        fdp.manager = "fdp";
        double fdp_extra = extra_migrations_per_pba(fdp);
        // Wolf's extra can sit at the noise floor (even slightly negative);
        // the separation is judged against a 1%-of-PBA floor.
        double ratio = fdp_extra / std::max(wolf_extra, 0.01);
        detail = fmt("wolf %.1f%%, fdp %.1f%% of PBA, ratio %.1fx", 100 * wolf_extra,
                     100 * fdp_extra, ratio);
        return wolf_extra <= 0.15 && fdp_extra >= 0.50 && ratio >= 10.0;
    });

    // 6. All pairwise swaps of the five exponential groups.
    criterion(6, "pairwise swaps", [](std::string& detail) {
        auto rows = run_swap_pairs(preset("swap5x5"));
        int wins = 0;
        for (const auto& r : rows)
            if (r.wolf_migrations <= r.fdp_migrations) ++wins;
        detail = fmt("wolf total migrations <= fdp in %d of %zu pairs", wins,
                     rows.size());
        return wins == static_cast<int>(rows.size());
    });

    // 7. Greedy versus LRU cleaning in the double-swap micro-experiment.
    criterion(7, "greedy vs lru", [](std::string& detail) {
        CleaningOutcome r = run_cleaning_compare(preset("greedy_vs_lru"));
        double over = static_cast<double>(r.lru_after_second_swap) /
                      static_cast<double>(r.greedy_after_second_swap);
        detail = fmt("lru %lld vs greedy %lld migrations until reconvergence (+%.1f%%)",
                     static_cast<long long>(r.lru_after_second_swap),
                     static_cast<long long>(r.greedy_after_second_swap),
                     100 * (over - 1.0));
        return over >= 1.10;
    });

    // 8. Property suites: conservation, consistency, ordering, determinism.
    criterion(8, "property suites", [](std::string& detail) {
        bool ok = true;
        std::ostringstream s;
        for (const char* manager : {"baseline", "fdp", "wolf"}) {
            RunConfig c;
            c.manager = manager;
            c.workload = "kmodal";
            c.kmodal = {{0.5, 0.1}, {0.5, 0.9}};
            c.detector = "bloom";
            c.tunables.h_mult = 0.02;
            c.warm_up_writes = 2 * c.lba();
            c.measured_writes = c.lba();
            c.audit_every = 1024;  // page states, mapping, BGM, tallies, targets
            RunResult r = run_single(c);
            bool balance =
                r.totals.physical_writes == r.totals.logical_writes + r.totals.migrations;
            bool erased_first = r.totals.erases * c.geometry.pages_per_block >=
                                r.totals.physical_writes - c.geometry.total_pages();
            bool wa_floor = true;
            for (const auto& w : r.windows) wa_floor = wa_floor && w.wa >= 1.0;
            ok = ok && balance && erased_first && wa_floor;
            if (!(balance && erased_first && wa_floor)) s << manager << " violated ";
        }
        // Determinism: identical seed gives byte-identical CSV.
        RunConfig c = preset("swap2");
        c.compare_no_swap = false;
        std::ostringstream a, b;
        emit_metrics_csv(run_single(c).windows, a);
        emit_metrics_csv(run_single(c).windows, b);
        bool deterministic = a.str() == b.str();
        ok = ok && deterministic;
        s << (deterministic ? "audits green, CSV deterministic"
                            : "CSV NOT deterministic");
        detail = s.str();
        return ok;
    });

    // 9. Measured-frequency allocation against the fixed doubling assumption
    //    on a synthetic skewed trace (the realistic-workload stand-in).
    criterion(9, "skewed trace replay", [](std::string& detail) {
        std::string dir = "acceptance_out";
        TraceOutcome r = run_trace_compare(preset("trace_replay"), dir);
        double gain = r.fdp_steady_wa / r.wolf_steady_wa - 1.0;
        detail = fmt("wolf %.3f vs fdp %.3f steady WA (%.0f%% better)",
                     r.wolf_steady_wa, r.fdp_steady_wa, 100 * gain);
        std::filesystem::remove_all(dir);
        return gain >= 0.10;
    });

    if (failures == 0)
        std::printf("all acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria FAILED\n", failures);
    return failures;
}
