#include "ftlsim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ftlsim {

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
    throw std::invalid_argument("config field '" + field + "': " + why);
}

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

std::int64_t to_int(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        std::int64_t x = std::stoll(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        bad(key, "expected an integer, got '" + v + "'");
    }
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        bad(key, "expected a number, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad(key, "expected a boolean, got '" + v + "'");
}

}  // namespace

void RunConfig::validate() const {
    geometry.validate();
    if (!(ratio > 0.0 && ratio < 1.0)) bad("run.ratio", "must lie in (0,1)");
    if (manager != "baseline" && manager != "fdp" && manager != "wolf")
        bad("run.manager", "must be baseline, fdp or wolf");
    if (workload != "uniform" && workload != "kmodal" && workload != "trace")
        bad("workload.kind", "must be uniform, kmodal or trace");
    if (workload == "kmodal" && kmodal.empty())
        bad("workload.kmodal", "no groups given");
    if (workload == "trace" && trace_path.empty() && mode != RunMode::TraceCompare)
        bad("workload.trace", "no trace path given");
    if (detector != "bloom" && detector != "oracle")
        bad("wolf.detector", "must be bloom or oracle");
    if (detector == "oracle" && workload == "trace")
        bad("wolf.detector", "the oracle needs a generated workload with known frequencies");
    if (resolved_window() <= 0) bad("run.window_width", "must be positive");
    if (lba() <= 0 || lba() >= geometry.total_pages())
        bad("run.ratio", "leaves no logical or no over-provisioned space");
    if (workload == "kmodal") kmodal_spec();  // validates ranges and swaps
}

KModalSpec RunConfig::kmodal_spec() const {
    KModalSpec spec;
    Lpa logical = lba();
    double frac_sum = 0.0;
    for (const auto& [frac, p] : kmodal) frac_sum += frac;
    if (frac_sum <= 0.0) bad("workload.kmodal", "size fractions sum to zero");
    Lpa cursor = 0;
    for (std::size_t i = 0; i < kmodal.size(); ++i) {
        auto [frac, p] = kmodal[i];
        Lpa span = (i + 1 == kmodal.size())
                       ? logical - cursor
                       : static_cast<Lpa>(std::llround(frac / frac_sum * logical));
        if (span <= 0) bad("workload.kmodal", "group " + std::to_string(i) + " is empty");
        spec.groups.push_back(KModalGroup{cursor, cursor + span, p});
        cursor += span;
    }
    spec.swaps = swaps;
    spec.validate(logical);
    return spec;
}

void apply_config_key(RunConfig& c, const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "device.channels") c.geometry.channels = static_cast<int>(to_int(key, v));
    else if (key == "device.luns_per_channel") c.geometry.luns_per_channel = static_cast<int>(to_int(key, v));
    else if (key == "device.blocks_per_lun") c.geometry.blocks_per_lun = static_cast<int>(to_int(key, v));
    else if (key == "device.pages_per_block") c.geometry.pages_per_block = static_cast<int>(to_int(key, v));
    else if (key == "device.page_size") c.geometry.page_size = to_int(key, v);
    else if (key == "run.ratio") c.ratio = to_double(key, v);
    else if (key == "run.manager") c.manager = v;
    else if (key == "run.mode") {
        if (v == "simulate") c.mode = RunMode::Simulate;
        else if (v == "grid") c.mode = RunMode::Grid;
        else if (v == "swap_pairs") c.mode = RunMode::SwapPairs;
        else if (v == "cleaning_compare") c.mode = RunMode::CleaningCompare;
        else if (v == "trace_compare") c.mode = RunMode::TraceCompare;
        else bad(key, "unknown mode '" + v + "'");
    } else if (key == "run.cleaning") {
        if (v == "greedy") c.tunables.cleaning = CleaningPolicy::Greedy;
        else if (v == "lru") c.tunables.cleaning = CleaningPolicy::Lru;
        else bad(key, "must be greedy or lru");
    } else if (key == "run.seed") c.seed = static_cast<std::uint64_t>(to_int(key, v));
    else if (key == "run.warm_up_writes") c.warm_up_writes = to_int(key, v);
    else if (key == "run.measured_writes") c.measured_writes = to_int(key, v);
    else if (key == "run.window_width") c.window_width = to_int(key, v);
    else if (key == "run.compare_no_swap") c.compare_no_swap = to_bool(key, v);
    else if (key == "run.audit_every") c.audit_every = to_int(key, v);
    else if (key == "workload.kind") c.workload = v;
    else if (key == "workload.trace") c.trace_path = v;
    else if (key == "workload.kmodal") {
        c.kmodal.clear();
        for (const std::string& part : split(v, ',')) {
            auto bits = split(part, ':');
            if (bits.size() != 2) bad(key, "expected sizefrac:prob pairs");
            c.kmodal.emplace_back(to_double(key, bits[0]), to_double(key, bits[1]));
        }
    } else if (key == "workload.swaps") {
        c.swaps.clear();
        for (const std::string& part : split(v, ',')) {
            auto bits = split(part, ':');
            if (bits.size() != 3) bad(key, "expected index:groupA:groupB triples");
            c.swaps.push_back(SwapEvent{to_int(key, bits[0]),
                                        static_cast<int>(to_int(key, bits[1])),
                                        static_cast<int>(to_int(key, bits[2]))});
        }
    } else if (key == "wolf.h_mult") c.tunables.h_mult = to_double(key, v);
    else if (key == "wolf.ewma_a") c.tunables.ewma_a = to_double(key, v);
    else if (key == "wolf.q") c.tunables.hot_ratio_q = to_double(key, v);
    else if (key == "wolf.w") c.tunables.stabilize_w = static_cast<int>(to_int(key, v));
    else if (key == "wolf.dynamic_groups") c.tunables.dynamic_groups = to_bool(key, v);
    else if (key == "wolf.cold_hit_frac") c.tunables.cold_rule.hit_rate_fraction = to_double(key, v);
    else if (key == "wolf.cold_op_frac") c.tunables.cold_rule.op_fraction = to_double(key, v);
    else if (key == "wolf.cold_rule") c.tunables.cold_rule.enabled = to_bool(key, v);
    else if (key == "wolf.bloom_fpr") c.tunables.bloom_fpr = to_double(key, v);
    else if (key == "wolf.detector") c.detector = v;
    else if (key == "wolf.initial_groups") c.tunables.initial_groups = static_cast<int>(to_int(key, v));
    else if (key == "wolf.f_pages") c.tunables.f_pages = to_int(key, v);
    else if (key == "fdp.initial_groups") c.tunables.initial_groups = static_cast<int>(to_int(key, v));
    else if (key == "grid.q") c.grid.q = static_cast<int>(to_int(key, v));
    else if (key == "grid.lba") c.grid.lba = to_int(key, v);
    else if (key == "grid.block_pages") c.grid.block_pages = to_int(key, v);
    else if (key == "grid.groups") {
        c.grid.group_counts.clear();
        for (const std::string& part : split(v, ','))
            c.grid.group_counts.push_back(static_cast<int>(to_int(key, part)));
    } else if (key == "grid.ratios") {
        c.grid.ratios.clear();
        for (const std::string& part : split(v, ','))
            c.grid.ratios.push_back(to_double(key, part));
    } else {
        bad(key, "unknown key");
    }
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    RunConfig config;
    std::string line, section;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']') {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": expected key=value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.find('.') == std::string::npos && !section.empty())
            key = section + "." + key;
        try {
            apply_config_key(config, key, value);
        } catch (const std::invalid_argument& e) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return config;
}

std::vector<std::string> preset_names() {
    return {"equilibrium", "swap2", "swap5x5", "greedy_vs_lru", "grid_study", "trace_replay"};
}

RunConfig preset(const std::string& name) {
    RunConfig c;
    Lpa lba = c.lba();  // desk default geometry, r = 0.7

    if (name == "equilibrium") {
        // Baseline manager against the uniform-workload model. LRU cleaning
        // is the regime the equilibrium derivation describes: every block is
        // cleaned once per K cleaning operations. A little more device than
        // the other presets keeps the write frontier and GC headroom small
        // next to the over-provisioned space, which the model ignores.
        c.manager = "baseline";
        c.workload = "uniform";
        c.geometry.blocks_per_lun = 1024;
        lba = c.lba();
        c.tunables.cleaning = CleaningPolicy::Lru;
        c.warm_up_writes = 6 * lba;
        c.measured_writes = 3 * lba;
        c.window_width = lba / 20;
    } else if (name == "swap2") {
        c.manager = "wolf";
        c.mode = RunMode::Simulate;
        c.compare_no_swap = true;
        c.workload = "kmodal";
        c.kmodal = {{0.5, 0.10}, {0.5, 0.90}};
        c.tunables.h_mult = 0.02;  // desk-scale interval: keeps per-interval sampling noise small
        c.detector = "oracle";
        c.tunables.use_oracle = true;
        c.tunables.dynamic_groups = false;
        c.tunables.initial_groups = 2;
        c.warm_up_writes = 4 * lba;
        c.measured_writes = 10 * lba;
        c.window_width = lba / 10;
        c.swaps = {SwapEvent{c.warm_up_writes + 2 * lba, 0, 1}};
    } else if (name == "swap5x5") {
        c.manager = "wolf";  // SwapPairs mode runs wolf and fdp itself
        c.mode = RunMode::SwapPairs;
        c.workload = "kmodal";
        c.kmodal = {{0.2, 1.0 / 31}, {0.2, 2.0 / 31}, {0.2, 4.0 / 31},
                    {0.2, 8.0 / 31}, {0.2, 16.0 / 31}};
        c.tunables.h_mult = 0.02;  // desk-scale interval: keeps per-interval sampling noise small
        c.detector = "oracle";
        c.tunables.use_oracle = true;
        c.tunables.dynamic_groups = false;
        c.tunables.initial_groups = 5;
        c.warm_up_writes = 4 * lba;
        c.measured_writes = 10 * lba;
        c.window_width = lba / 10;
        c.swaps = {SwapEvent{c.warm_up_writes + 2 * lba, 0, 1}};  // pair rewritten per run
    } else if (name == "greedy_vs_lru") {
        // Double swap with p = (100%, 0%): movement operations first compact
        // group 1 and hand its blocks over, then the second swap forces
        // cleaning in a group full of equal-live-count blocks. Small blocks
        // keep the live-count spread that greedy exploits visible at this
        // device size.
        c.manager = "wolf";
        c.mode = RunMode::CleaningCompare;
        c.geometry.blocks_per_lun = 512;
        c.geometry.pages_per_block = 16;
        c.ratio = 0.8;
        lba = c.lba();
        c.workload = "kmodal";
        c.kmodal = {{0.5, 1.0}, {0.5, 0.0}};
        c.tunables.h_mult = 0.02;  // desk-scale interval: keeps per-interval sampling noise small
        c.detector = "oracle";
        c.tunables.use_oracle = true;
        c.tunables.dynamic_groups = false;
        c.tunables.initial_groups = 2;
        c.warm_up_writes = 4 * lba;
        c.measured_writes = 10 * lba;
        c.window_width = lba / 10;
        c.swaps = {SwapEvent{c.warm_up_writes + 2 * lba, 0, 1},
                   SwapEvent{c.warm_up_writes + 6 * lba, 0, 1}};
    } else if (name == "grid_study") {
        c.mode = RunMode::Grid;
        c.grid = GridParams{10, {2, 3, 4, 5}, {0.7}, 71680, 32};
    } else if (name == "trace_replay") {
        // Synthetic stand-in for the realistic-workload trace: a never-updated
        // cold mass plus two update clusters with an 8x per-page rate gap.
        c.mode = RunMode::TraceCompare;
        c.manager = "wolf";
        c.workload = "trace";
        c.kmodal = {{0.54, 0.0}, {0.23, 1.0 / 9}, {0.23, 8.0 / 9}};
        c.tunables.h_mult = 0.02;  // desk-scale interval: keeps per-interval sampling noise small
        c.detector = "bloom";
        c.tunables.initial_groups = 2;
        c.warm_up_writes = 4 * lba;
        c.measured_writes = 8 * lba;
        c.window_width = lba / 10;
    } else {
        throw std::invalid_argument("unknown preset '" + name + "'");
    }
    return c;
}

}  // namespace ftlsim
