#include "ftlsim/alloc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "ftlsim/model.hpp"

namespace ftlsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_lengths(const std::vector<GroupStat>& stats, const Allocation& alloc) {
    if (stats.size() != alloc.size())
        throw std::invalid_argument("total_wa: stats and allocation lengths differ");
}

double overprov_factor(std::int64_t lba, std::int64_t pba) {
    if (lba <= 0 || pba <= lba)
        throw std::invalid_argument("allocation requires 0 < LBA < PBA");
    return static_cast<double>(pba) / static_cast<double>(lba) - 1.0;  // V
}

// Weighted per-group objective term; p == 0 contributes nothing even with
// zero OP.
double weighted_wa(double p, double size, double op) {
    if (p <= 0.0) return 0.0;
    return p * group_wa(size, op);
}

}  // namespace

double group_delta(double size, double op) {
    if (size < 0.0 || op < 0.0) throw std::domain_error("group_delta: negative input");
    if (size == 0.0) return 0.0;
    if (op == 0.0) return 1.0;  // sentinel: infinite WA
    return delta_at_equilibrium(size / (size + op));
}

double group_wa(double size, double op) {
    double d = group_delta(size, op);
    if (d >= 1.0) return kInf;
    return 1.0 / (1.0 - d);
}

double total_wa(const std::vector<GroupStat>& stats, const Allocation& alloc) {
    check_lengths(stats, alloc);
    double sum = 0.0;
    for (std::size_t i = 0; i < stats.size(); ++i) {
        double term = weighted_wa(stats[i].freq, static_cast<double>(stats[i].size), alloc[i]);
        if (term == kInf) return kInf;
        sum += term;
    }
    return sum;
}

Allocation alloc_by_size(const std::vector<GroupStat>& stats,
                         std::int64_t lba, std::int64_t pba) {
    double v = overprov_factor(lba, pba);
    Allocation out(stats.size());
    for (std::size_t i = 0; i < stats.size(); ++i)
        out[i] = static_cast<double>(stats[i].size) * v;
    return out;
}

Allocation alloc_by_frequency(const std::vector<GroupStat>& stats,
                              std::int64_t lba, std::int64_t pba) {
    overprov_factor(lba, pba);
    double op = static_cast<double>(pba - lba);
    Allocation out(stats.size());
    for (std::size_t i = 0; i < stats.size(); ++i)
        out[i] = stats[i].freq * op;
    return out;
}

std::vector<std::int64_t> quantize_to_blocks(const Allocation& pages,
                                             std::int64_t block_pages) {
    if (block_pages < 1) throw std::invalid_argument("block_pages must be >= 1");
    double total_pages = std::accumulate(pages.begin(), pages.end(), 0.0);
    std::int64_t total_blocks =
        static_cast<std::int64_t>(std::llround(total_pages / static_cast<double>(block_pages)));

    std::vector<std::int64_t> out(pages.size(), 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < pages.size(); ++i) {
        double b = pages[i] / static_cast<double>(block_pages);
        out[i] = static_cast<std::int64_t>(std::floor(b + 1e-9));
        assigned += out[i];
        remainders.emplace_back(b - static_cast<double>(out[i]), i);
    }
    std::int64_t leftover = total_blocks - assigned;
    std::sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    for (std::size_t k = 0; leftover > 0 && k < remainders.size(); ++k, --leftover)
        out[remainders[k].second] += 1;
    return out;
}

Allocation alloc_mixed(const std::vector<GroupStat>& stats,
                       std::int64_t lba, std::int64_t pba,
                       std::int64_t block_pages, const ColdRule& cold) {
    if (stats.empty()) throw std::domain_error("alloc_mixed: need at least one group");
    double op_total = static_cast<double>(pba - lba);
    overprov_factor(lba, pba);

    auto mixed_over = [&](const std::vector<GroupStat>& sub, std::int64_t sub_lba,
                          std::int64_t sub_pba) {
        Allocation by_size = alloc_by_size(sub, sub_lba, sub_pba);
        Allocation by_freq = alloc_by_frequency(sub, sub_lba, sub_pba);
        Allocation out(sub.size());
        for (std::size_t i = 0; i < sub.size(); ++i)
            out[i] = 0.5 * (by_size[i] + by_freq[i]);
        return out;
    };

    // Hit rate p/s; groups without pages are treated as infinitely hot so
    // the cold rule never targets them.
    auto hit_rate = [&](std::size_t i) {
        if (stats[i].size <= 0) return kInf;
        return stats[i].freq / static_cast<double>(stats[i].size);
    };

    std::size_t coldest = 0, second = 0;
    bool fire = false;
    if (cold.enabled && stats.size() >= 2) {
        std::vector<std::size_t> order(stats.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return hit_rate(a) < hit_rate(b); });
        coldest = order[0];
        second = order[1];
        double hc = hit_rate(coldest), hs = hit_rate(second);
        if (hc != kInf && hs > 0.0 && hs != kInf && hc < cold.hit_rate_fraction * hs)
            fire = true;
    }

    Allocation result(stats.size(), 0.0);
    if (fire) {
        std::int64_t min_size = std::numeric_limits<std::int64_t>::max();
        for (const auto& g : stats)
            if (g.size > 0) min_size = std::min(min_size, g.size);
        double cold_op = std::min(cold.op_fraction * static_cast<double>(min_size), op_total);

        std::vector<GroupStat> rest;
        std::vector<std::size_t> rest_idx;
        std::int64_t rest_lba = 0;
        double rest_p = 0.0;
        for (std::size_t i = 0; i < stats.size(); ++i) {
            if (i == coldest) continue;
            rest.push_back(stats[i]);
            rest_idx.push_back(i);
            rest_lba += stats[i].size;
            rest_p += stats[i].freq;
        }
        for (auto& g : rest) g.freq = rest_p > 0.0 ? g.freq / rest_p : 1.0 / rest.size();
        std::int64_t rest_pba = rest_lba + static_cast<std::int64_t>(std::llround(op_total - cold_op));
        Allocation rest_alloc = mixed_over(rest, rest_lba, rest_pba);
        result[coldest] = cold_op;
        for (std::size_t k = 0; k < rest_idx.size(); ++k) result[rest_idx[k]] = rest_alloc[k];
    } else {
        result = mixed_over(stats, lba, pba);
    }

    double sum = std::accumulate(result.begin(), result.end(), 0.0);
    if (sum > 0.0) {
        double scale = op_total / sum;
        for (double& x : result) x *= scale;
    }
    if (block_pages > 1) {
        std::vector<std::int64_t> blocks = quantize_to_blocks(result, block_pages);
        for (std::size_t i = 0; i < result.size(); ++i)
            result[i] = static_cast<double>(blocks[i] * block_pages);
    }
    return result;
}

namespace {

// Steepest one-block descent on the weighted WA objective. `wa_at(i, b)`
// returns the objective term of group i holding b blocks of OP.
std::vector<std::int64_t> hill_climb(const std::vector<GroupStat>& stats,
                                     std::vector<std::int64_t> blocks,
                                     const std::function<double(std::size_t, std::int64_t)>& wa_at) {
    const std::size_t n = stats.size();
    std::int64_t total = std::accumulate(blocks.begin(), blocks.end(), std::int64_t{0});
    const std::int64_t max_moves = total * static_cast<std::int64_t>(n) * 8 + 1024;

    for (std::int64_t move = 0; move < max_moves; ++move) {
        // Removal cost and addition gain per group, plus the two best of each.
        std::size_t donor1 = n, donor2 = n, rec1 = n, rec2 = n;
        double cost1 = kInf, cost2 = kInf, gain1 = -kInf, gain2 = -kInf;
        for (std::size_t i = 0; i < n; ++i) {
            if (blocks[i] >= 1) {
                double c = wa_at(i, blocks[i] - 1) - wa_at(i, blocks[i]);
                if (c < cost1) { cost2 = cost1; donor2 = donor1; cost1 = c; donor1 = i; }
                else if (c < cost2) { cost2 = c; donor2 = i; }
            }
            double g = wa_at(i, blocks[i]) - wa_at(i, blocks[i] + 1);
            if (g > gain1) { gain2 = gain1; rec2 = rec1; gain1 = g; rec1 = i; }
            else if (g > gain2) { gain2 = g; rec2 = i; }
        }
        if (donor1 == n) break;

        std::size_t best_from = n, best_to = n;
        double best_improve = 0.0;
        auto consider = [&](std::size_t from, double cost, std::size_t to, double gain) {
            if (from == n || to == n || from == to) return;
            double improve = gain - cost;
            if (improve > best_improve) {
                best_improve = improve;
                best_from = from;
                best_to = to;
            }
        };
        consider(donor1, cost1, rec1, gain1);
        consider(donor1, cost1, rec2, gain2);
        consider(donor2, cost2, rec1, gain1);
        if (best_from == n) break;
        blocks[best_from] -= 1;
        blocks[best_to] += 1;
    }
    return blocks;
}

}  // namespace

Allocation alloc_optimal(const std::vector<GroupStat>& stats,
                         std::int64_t lba, std::int64_t pba,
                         std::int64_t block_pages) {
    if (stats.empty()) throw std::domain_error("alloc_optimal: need at least one group");
    return alloc_optimal_from(stats, lba, pba, block_pages,
                              quantize_to_blocks(alloc_by_size(stats, lba, pba), block_pages));
}

Allocation alloc_optimal_from(const std::vector<GroupStat>& stats,
                              std::int64_t lba, std::int64_t pba,
                              std::int64_t block_pages,
                              std::vector<std::int64_t> start_blocks) {
    if (stats.empty()) throw std::domain_error("alloc_optimal: need at least one group");
    if (block_pages < 1) throw std::invalid_argument("block_pages must be >= 1");
    if (start_blocks.size() != stats.size())
        throw std::invalid_argument("alloc_optimal: start size mismatch");
    overprov_factor(lba, pba);
    std::int64_t op_blocks = static_cast<std::int64_t>(
        std::llround(static_cast<double>(pba - lba) / static_cast<double>(block_pages)));
    if (op_blocks < static_cast<std::int64_t>(stats.size()))
        throw std::domain_error("alloc_optimal: OP smaller than one block per group");

    std::vector<std::int64_t> blocks = std::move(start_blocks);
    {
        // The convex walk keeps every group above zero; make the start obey that.
        for (auto& b : blocks) b = std::max<std::int64_t>(b, 0);
        std::int64_t assigned = std::accumulate(blocks.begin(), blocks.end(), std::int64_t{0});
        while (assigned > op_blocks) {  // guard against rounding drift
            auto it = std::max_element(blocks.begin(), blocks.end());
            --*it;
            --assigned;
        }
        while (assigned < op_blocks) {
            auto it = std::min_element(blocks.begin(), blocks.end());
            ++*it;
            ++assigned;
        }
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            while (blocks[i] == 0) {
                auto it = std::max_element(blocks.begin(), blocks.end());
                if (*it <= 1) throw std::domain_error("alloc_optimal: infeasible start");
                --*it;
                ++blocks[i];
            }
        }
    }

    // Memoized objective terms; the walk revisits block counts constantly.
    std::vector<std::vector<double>> memo(stats.size(),
                                          std::vector<double>(op_blocks + 2,
                                                              std::numeric_limits<double>::quiet_NaN()));
    auto wa_at = [&](std::size_t i, std::int64_t b) {
        if (b < 0) return kInf;
        double& slot = memo[i][static_cast<std::size_t>(b)];
        if (std::isnan(slot))
            slot = weighted_wa(stats[i].freq, static_cast<double>(stats[i].size),
                               static_cast<double>(b * block_pages));
        return slot;
    };

    blocks = hill_climb(stats, std::move(blocks), wa_at);
    Allocation out(stats.size());
    for (std::size_t i = 0; i < stats.size(); ++i)
        out[i] = static_cast<double>(blocks[i] * block_pages);
    return out;
}

namespace {

// Enumerates canonical (sorted, duplicate-free) pairings of size and
// frequency compositions: n pairs (s_chunks, p_chunks), each >= 1, summing
// to q on both axes, non-decreasing lexicographically.
void enumerate_configs(int q, int n, std::vector<std::pair<int, int>>& acc,
                       int rem_s, int rem_p,
                       const std::function<void(const std::vector<std::pair<int, int>>&)>& fn) {
    int depth = static_cast<int>(acc.size());
    int left = n - depth;
    if (left == 0) {
        if (rem_s == 0 && rem_p == 0) fn(acc);
        return;
    }
    std::pair<int, int> prev = depth == 0 ? std::make_pair(1, 1) : acc.back();
    for (int a = 1; a <= rem_s - (left - 1); ++a) {
        for (int b = 1; b <= rem_p - (left - 1); ++b) {
            if (depth > 0 && std::make_pair(a, b) < prev) continue;
            acc.emplace_back(a, b);
            enumerate_configs(q, n, acc, rem_s - a, rem_p - b, fn);
            acc.pop_back();
        }
    }
}

}  // namespace

std::vector<GridRow> grid_study(const GridParams& params) {
    if (params.q < 2) throw std::domain_error("grid_study: q must be >= 2");
    if (params.lba % params.q != 0)
        throw std::domain_error("grid_study: lba must be divisible by q");
    for (int n : params.group_counts)
        if (n < 1 || n > params.q)
            throw std::domain_error("grid_study: group count out of range");

    std::vector<GridRow> rows;
    const std::int64_t chunk = params.lba / params.q;
    const ColdRule no_cold{false, 0.0, 0.0};

    for (double ratio : params.ratios) {
        std::int64_t pba_blocks = static_cast<std::int64_t>(
            std::llround(static_cast<double>(params.lba) / ratio /
                         static_cast<double>(params.block_pages)));
        std::int64_t pba = pba_blocks * params.block_pages;
        std::int64_t op_blocks = (pba - params.lba) / params.block_pages;

        // One objective table per ratio: group size is always a multiple of
        // the chunk, so (chunks, blocks) keys every term the sweep can need.
        std::vector<std::vector<double>> table(
            params.q, std::vector<double>(op_blocks + 2, 0.0));
        for (int k = 1; k < params.q; ++k)
            for (std::int64_t b = 0; b <= op_blocks + 1; ++b)
                table[k][b] = group_wa(static_cast<double>(k * chunk),
                                       static_cast<double>(b * params.block_pages));

        for (int n : params.group_counts) {
            int config_id = 0;
            std::vector<std::pair<int, int>> acc;
            enumerate_configs(params.q, n, acc, params.q, params.q,
                              [&](const std::vector<std::pair<int, int>>& cfg) {
                std::vector<GroupStat> stats(cfg.size());
                for (std::size_t i = 0; i < cfg.size(); ++i) {
                    stats[i].size = cfg[i].first * chunk;
                    stats[i].freq = static_cast<double>(cfg[i].second) /
                                    static_cast<double>(params.q);
                }

                Allocation mixed = alloc_mixed(stats, params.lba, pba,
                                               params.block_pages, no_cold);
                auto wa_at = [&](std::size_t i, std::int64_t b) {
                    if (b < 0) return kInf;
                    if (stats[i].freq <= 0.0) return 0.0;
                    return stats[i].freq * table[cfg[i].first][static_cast<std::size_t>(b)];
                };
                std::vector<std::int64_t> start = quantize_to_blocks(
                    alloc_by_size(stats, params.lba, pba), params.block_pages);
                for (std::size_t i = 0; i < start.size(); ++i) {
                    while (start[i] == 0) {
                        auto it = std::max_element(start.begin(), start.end());
                        --*it;
                        ++start[i];
                    }
                }
                std::vector<std::int64_t> opt = hill_climb(stats, std::move(start), wa_at);

                Allocation opt_pages(opt.size());
                for (std::size_t i = 0; i < opt.size(); ++i)
                    opt_pages[i] = static_cast<double>(opt[i] * params.block_pages);

                GridRow row;
                row.groups = n;
                row.ratio = static_cast<double>(params.lba) / static_cast<double>(pba);
                row.q = params.q;
                row.config_id = config_id++;
                row.wa_mixed = total_wa(stats, mixed);
                row.wa_optimal = total_wa(stats, opt_pages);
                row.pct_off = 100.0 * (row.wa_mixed / row.wa_optimal - 1.0);
                rows.push_back(row);
            });
        }
    }
    return rows;
}

void write_grid_csv(const std::vector<GridRow>& rows, std::ostream& out) {
    out << "groups,ratio,Q,config_id,wa_mixed,wa_optimal,pct_off\n";
    char buf[160];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, "%d,%.6f,%d,%d,%.9g,%.9g,%.6f\n",
                      r.groups, r.ratio, r.q, r.config_id, r.wa_mixed, r.wa_optimal,
                      r.pct_off);
        out << buf;
    }
}

}  // namespace ftlsim
