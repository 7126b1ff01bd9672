#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

// Per-group write-amplification and the over-provisioning allocation
// policies: size-proportional, frequency-proportional, their closed-form
// average, and the one-block hill-climbing optimum used as the oracle.

namespace ftlsim {

struct GroupStat {
    std::int64_t size = 0;  // s_x, logical pages held by the group
    double freq = 0.0;      // p_x, probability an update targets the group
};

// OP_x per group, in pages. Values are integral after block quantization.
using Allocation = std::vector<double>;

struct ColdRule {
    bool enabled = true;
    // Fires when the coldest group's hit rate (p/s) is below this fraction
    // of the second coldest group's hit rate.
    double hit_rate_fraction = 0.05;
    // OP granted to the fired group, as a fraction of the smallest group's
    // logical size.
    double op_fraction = 0.05;
};

// delta_x for a group of s live pages holding op pages of over-provisioned
// space; solves s/(s+op) = (d-1)/ln d. op == 0 yields the sentinel 1
// (infinite WA); s == 0 yields 0.
double group_delta(double size, double op);

// 1 / (1 - group_delta); +infinity when op == 0 and size > 0.
double group_wa(double size, double op);

// Frequency-weighted total write-amplification over all groups. Returns
// +infinity if any group with freq > 0 has zero OP.
double total_wa(const std::vector<GroupStat>& stats, const Allocation& alloc);

// OP_x = s_x * (PBA/LBA - 1). Depends on sizes only.
Allocation alloc_by_size(const std::vector<GroupStat>& stats,
                         std::int64_t lba, std::int64_t pba);

// OP_x = p_x * (PBA - LBA). Depends on frequencies only.
Allocation alloc_by_frequency(const std::vector<GroupStat>& stats,
                              std::int64_t lba, std::int64_t pba);

// Average of the two policies above, optionally with special treatment of an
// extremely cold group, normalized so the total is exactly PBA - LBA, then
// quantized to whole blocks of `block_pages` by largest remainder.
Allocation alloc_mixed(const std::vector<GroupStat>& stats,
                       std::int64_t lba, std::int64_t pba,
                       std::int64_t block_pages = 1,
                       const ColdRule& cold = ColdRule{});

// Discrete optimum of the weighted WA objective at one-block granularity.
// Starts from alloc_by_size and repeatedly moves one block from the group
// whose loss costs least to the group whose gain helps most; the objective
// is convex, so the walk ends at the global optimum. Ties break toward the
// lowest group index.
Allocation alloc_optimal(const std::vector<GroupStat>& stats,
                         std::int64_t lba, std::int64_t pba,
                         std::int64_t block_pages);

// Same optimum, but the walk starts from `start_blocks` (rebalanced to the
// right total). The objective is convex, so the start point only affects
// the number of steps; callers that re-solve slowly drifting instances pass
// the previous answer.
Allocation alloc_optimal_from(const std::vector<GroupStat>& stats,
                              std::int64_t lba, std::int64_t pba,
                              std::int64_t block_pages,
                              std::vector<std::int64_t> start_blocks);

// Quantize a page-valued allocation to whole blocks, preserving the total:
// floor everything, then hand leftover blocks to the largest remainders.
std::vector<std::int64_t> quantize_to_blocks(const Allocation& pages,
                                             std::int64_t block_pages);

struct GridRow {
    int groups = 0;
    double ratio = 0.0;
    int q = 0;
    int config_id = 0;
    double wa_mixed = 0.0;
    double wa_optimal = 0.0;
    double pct_off = 0.0;  // 100 * (wa_mixed / wa_optimal - 1)
};

struct GridParams {
    int q = 10;                      // skew granularity
    std::vector<int> group_counts;   // e.g. {2,3,4,5}
    std::vector<double> ratios;      // e.g. {0.7}
    std::int64_t lba = 71680;        // divisible by q
    std::int64_t block_pages = 32;
};

// Brute-force sweep of all size/frequency compositions into q chunks, each
// group receiving at least one chunk of each; reports how far the mixed
// closed form lands from the hill-climbing optimum. The cold rule is left
// out here: the closed form under study is the plain average.
std::vector<GridRow> grid_study(const GridParams& params);

// CSV with header `groups,ratio,Q,config_id,wa_mixed,wa_optimal,pct_off`.
void write_grid_csv(const std::vector<GridRow>& rows, std::ostream& out);

}  // namespace ftlsim
