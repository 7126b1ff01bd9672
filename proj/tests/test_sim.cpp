#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "ftlsim/config.hpp"
#include "ftlsim/sim.hpp"

using namespace ftlsim;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& contents) {
        path = std::string("/tmp/ftlsim_cfg_") + std::to_string(::getpid()) + "_" +
               std::to_string(counter++) + ".conf";
        std::ofstream out(path);
        out << contents;
    }
    ~TempFile() { std::remove(path.c_str()); }
    static int counter;
};
int TempFile::counter = 0;

RunConfig quick() {
    RunConfig c;
    c.warm_up_writes = c.lba();
    c.measured_writes = c.lba();
    return c;
}

}  // namespace

TEST_CASE("all presets produce valid configurations") {
    for (const std::string& name : preset_names()) {
        CAPTURE(name);
        RunConfig c = preset(name);
        CHECK_NOTHROW(c.validate());
    }
    CHECK_THROWS_AS(preset("nope"), std::invalid_argument);
}

TEST_CASE("config files parse sections and dotted keys") {
    TempFile f(
        "# comment\n"
        "run.manager = wolf\n"
        "wolf.q=2\n"
        "[device]\n"
        "channels = 2\n"
        "pages_per_block = 16\n"
        "[workload]\n"
        "kind = kmodal\n"
        "kmodal = 0.5:0.1, 0.5:0.9\n"
        "swaps = 1000:0:1\n"
        "[run]\n"
        "ratio = 0.8\n"
        "seed = 9\n"
        "cleaning = lru\n");
    RunConfig c = parse_config_file(f.path);
    CHECK(c.manager == "wolf");
    CHECK(c.tunables.hot_ratio_q == 2.0);
    CHECK(c.geometry.channels == 2);
    CHECK(c.geometry.pages_per_block == 16);
    CHECK(c.workload == "kmodal");
    REQUIRE(c.kmodal.size() == 2);
    CHECK(c.kmodal[1].second == doctest::Approx(0.9));
    REQUIRE(c.swaps.size() == 1);
    CHECK(c.swaps[0].write_index == 1000);
    CHECK(c.ratio == doctest::Approx(0.8));
    CHECK(c.seed == 9);
    CHECK(c.tunables.cleaning == CleaningPolicy::Lru);
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("config errors name the offending field and line") {
    RunConfig c;
    CHECK_THROWS_WITH_AS(apply_config_key(c, "run.ratio", "fast"),
                         doctest::Contains("run.ratio"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(apply_config_key(c, "bogus.key", "1"),
                         doctest::Contains("bogus.key"), std::invalid_argument);

    TempFile f("run.ratio = 0.7\nrun.window_width = soon\n");
    try {
        parse_config_file(f.path);
        FAIL("expected a parse error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }

    RunConfig bad;
    bad.ratio = 1.5;
    CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("run.ratio"),
                         std::invalid_argument);
}

TEST_CASE("metrics csv shape and determinism") {
    RunConfig c = quick();
    c.manager = "baseline";
    RunResult a = run_single(c);
    RunResult b = run_single(c);

    CHECK(a.windows.size() ==
          static_cast<std::size_t>(c.resolved_measured() / c.resolved_window()));
    for (const auto& w : a.windows) {
        CHECK(w.wa >= 1.0);
        CHECK(w.logical_writes == c.resolved_window());
    }

    std::ostringstream csv_a, csv_b;
    emit_metrics_csv(a.windows, csv_a);
    emit_metrics_csv(b.windows, csv_b);
    CHECK(csv_a.str() == csv_b.str());  // same seed, identical bytes
    CHECK(csv_a.str().rfind(
              "window,logical_writes,migrations,erases,wa,group_count,sizes,probs,"
              "op_targets\n",
              0) == 0);

    std::ostringstream empty;
    emit_metrics_csv({}, empty);
    CHECK(empty.str() ==
          "window,logical_writes,migrations,erases,wa,group_count,sizes,probs,"
          "op_targets\n");

    RunConfig other = c;
    other.seed = c.seed + 1;
    RunResult d = run_single(other);
    std::ostringstream csv_d;
    emit_metrics_csv(d.windows, csv_d);
    CHECK(csv_a.str() != csv_d.str());
}

TEST_CASE("end to end conservation in the summary counters") {
    RunConfig c = quick();
    c.manager = "wolf";
    c.workload = "kmodal";
    c.kmodal = {{0.5, 0.2}, {0.5, 0.8}};
    RunResult r = run_single(c);
    CHECK(r.totals.physical_writes == r.totals.logical_writes + r.totals.migrations);
    CHECK(r.totals.erases * c.geometry.pages_per_block >=
          r.totals.physical_writes - c.geometry.total_pages());
}

TEST_CASE("synthetic trace generation and replay") {
    RunConfig c = preset("trace_replay");
    c.warm_up_writes = 2000;
    c.measured_writes = 2000;
    c.window_width = 500;  // divides measured_writes; no truncated tail
    TempFile trace("");
    write_synthetic_trace(c, trace.path);

    auto events = load_trace(trace.path, c.lba());
    CHECK(events.size() == 4000);

    RunConfig replay = c;
    replay.mode = RunMode::Simulate;
    replay.workload = "trace";
    replay.trace_path = trace.path;
    replay.detector = "bloom";
    replay.kmodal.clear();
    replay.manager = "wolf";
    RunResult r = run_single(replay);
    CHECK(r.totals.logical_writes == c.lba() + 4000);  // fill plus the trace

    // Regenerating with the same seed yields byte-identical traces.
    TempFile again("");
    write_synthetic_trace(c, again.path);
    std::ifstream f1(trace.path), f2(again.path);
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());
}

TEST_CASE("oracle detector is rejected for trace workloads") {
    RunConfig c;
    c.workload = "trace";
    c.trace_path = "whatever.txt";
    c.detector = "oracle";
    CHECK_THROWS_WITH_AS(c.validate(), doctest::Contains("oracle"),
                         std::invalid_argument);
}

TEST_CASE("swap comparison requires swap events") {
    RunConfig c = quick();
    CHECK_THROWS_AS(extra_migrations_per_pba(c), std::invalid_argument);
}
