#pragma once

#include "ftlsim/manager.hpp"

// Frequency-based data placement: fixed group order, assumed doubling update
// frequencies, LRU cleaning, adjacent-only block donation, and no merging.

namespace ftlsim {

// Assumed update frequencies for n fixed-order groups: group i is taken to
// be twice as hot as group i-1, normalized to sum to one.
std::vector<double> fdp_assumed_frequencies(int n);

// The optimal allocation computed from measured sizes but assumed doubling
// frequencies over the fixed group order (coldest first).
Allocation fdp_allocate_op(const std::vector<std::int64_t>& sizes,
                           std::int64_t pba, std::int64_t block_pages);

class FdpManager final : public GroupedManager {
public:
    FdpManager(FlashDevice& dev, Lpa logical_pages, ManagerTunables tunables,
               const OracleClassifier* oracle = nullptr);

    const char* name() const override { return "fdp"; }

protected:
    int classify_target(Lpa lpa, int curr_id, WriteKind kind) override;
    void recompute_targets() override;
    // Fixed order; FDP never re-sorts and never merges.
    void restructure() override {}
    // Blocks may only be donated to the previous owner or its immediate
    // neighbors in the fixed order.
    void assign_erased_block(BlockId block, int prev_owner) override;

private:
    void create_hottest_group();

    std::int64_t promotions_from_hottest_ = 0;
    std::vector<std::int64_t> warm_blocks_;
};

}  // namespace ftlsim
