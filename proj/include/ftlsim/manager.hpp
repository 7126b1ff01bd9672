#pragma once

#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ftlsim/alloc.hpp"
#include "ftlsim/bloom.hpp"
#include "ftlsim/device.hpp"
#include "ftlsim/ftl.hpp"
#include "ftlsim/workload.hpp"

// Block managers. GroupedManager owns the machinery every manager shares:
// groups holding per-LUN subgroups of blocks, the write path, garbage
// collection, erased-block reassignment, and interval statistics. Baseline,
// FDP and Wolf specialize the policy points.

namespace ftlsim {

// The device cannot place a write anywhere. Fatal.
class CapacityExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Garbage collection cannot make progress without overwriting data it still
// needs. Surfaced, never absorbed.
class DeadlockError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ManagerTunables {
    CleaningPolicy cleaning = CleaningPolicy::Greedy;
    double h_mult = 0.001;          // interval length = h_mult * LBA app writes
    double ewma_a = 1.0 / 3.0;      // weight of the newest interval
    double hot_ratio_q = 2.0;       // hit-rate ratio gating group creation
    int stabilize_w = 50;           // intervals a new group keeps its slot
    bool dynamic_groups = true;     // Wolf group creation/merging
    ColdRule cold_rule{};           // coldest-group special treatment
    double bloom_fpr = 0.3;
    bool use_oracle = false;
    int initial_groups = 2;
    // Minimum viable group size in pages; 0 means one block on every LUN.
    std::int64_t f_pages = 0;
};

struct Subgroup {
    std::vector<BlockId> free_blocks;   // wholly erased, FIFO
    std::deque<BlockId> open_blocks;    // partially programmed; front fills first
    std::vector<BlockId> full_blocks;   // write pointer at B; GC candidates
    std::int64_t free_pages = 0;        // unprogrammed pages across the lists
    std::int64_t live_pages = 0;

    std::int64_t block_count() const {
        return static_cast<std::int64_t>(free_blocks.size() + open_blocks.size() +
                                         full_blocks.size());
    }
    std::int64_t actual_op(int pages_per_block) const {
        return block_count() * pages_per_block - live_pages;
    }
};

struct Group {
    int id = 0;
    std::int64_t size = 0;             // live logical pages owned
    double freq = 0.0;                 // measured p_x (EWMA)
    std::int64_t interval_writes = 0;  // application writes this interval
    double target_op = 0.0;            // allocator-dictated OP in pages
    std::int64_t blocks_held = 0;
    std::vector<Subgroup> subs;        // one per LUN
    int lun_cursor = 0;                // round-robin placement cursor
    std::int64_t freeze_until = -1;    // interval index; SGV slot pinned until then
    int frozen_slot = -1;
    std::int64_t gcs = 0;              // lifetime collections in this group
    std::int64_t gc_migrations = 0;
    double true_rate_sum = 0.0;        // oracle mode: sum of members' true rates
    std::unique_ptr<TemperatureDetector> detector;

    std::int64_t free_pages() const {
        std::int64_t n = 0;
        for (const auto& s : subs) n += s.free_pages;
        return n;
    }
    std::int64_t actual_op(int pages_per_block) const {
        return blocks_held * pages_per_block - size;
    }
};

struct GroupSnapshot {
    int id = 0;
    std::int64_t size = 0;
    double freq = 0.0;
    double target_op = 0.0;
    std::int64_t actual_op = 0;
    std::int64_t blocks_held = 0;
};

struct ManagerStats {
    std::int64_t mandatory_gcs = 0;
    std::int64_t mandatory_migrations = 0;
    std::int64_t movement_gcs = 0;
    std::int64_t movement_migrations = 0;
    std::int64_t free_block_donations = 0;
    std::int64_t free_block_pulls = 0;
    std::int64_t group_misses = 0;  // writes that landed outside their target group
    std::int64_t groups_created = 0;
    std::int64_t groups_merged = 0;
    std::int64_t nonadjacent_donations = 0;  // FDP invariant probe; must stay 0
};

class GroupedManager {
public:
    GroupedManager(FlashDevice& dev, Lpa logical_pages, ManagerTunables tunables,
                   const OracleClassifier* oracle);
    virtual ~GroupedManager() = default;

    GroupedManager(const GroupedManager&) = delete;
    GroupedManager& operator=(const GroupedManager&) = delete;

    virtual const char* name() const = 0;

    // Entry point for application writes and, re-entrantly, GC migrations.
    void handle_write(Lpa lpa, WriteKind kind);

    Lpa logical_pages() const { return mapping_.logical_pages(); }
    const MappingTable& mapping() const { return mapping_; }
    const BlockGroupMap& bgm() const { return bgm_; }
    std::int64_t interval_length() const { return interval_len_; }
    std::int64_t interval_index() const { return interval_index_; }
    int group_count() const { return static_cast<int>(groups_.size()); }
    const std::vector<int>& sgv() const { return sgv_; }

    const Group& group(int id) const;
    double hit_rate(const Group& g) const;

    // Snapshots in SGV order, coldest first.
    std::vector<GroupSnapshot> snapshot() const;
    const ManagerStats& stats() const { return stats_; }

    // Cross-checks every internal tally; throws ConstraintViolation on any
    // inconsistency. Used by the property suites.
    void audit() const;

protected:
    // --- policy points -----------------------------------------------------
    // Target group for a write; `curr_id` is -1 on a first-ever write.
    virtual int classify_target(Lpa lpa, int curr_id, WriteKind kind) = 0;
    // Recompute per-group target OP from current statistics.
    virtual void recompute_targets() = 0;
    // Re-sort the group order and apply creation/merge rules (Wolf).
    virtual void restructure() {}
    // Reallocation of over-provisioned space via compaction GC (Wolf).
    virtual void consider_movement_operations() {}
    // Which group receives a freshly erased block. Default: largest OP
    // deficit over all groups, ties to hottest hit rate then lowest id.
    virtual void assign_erased_block(BlockId block, int prev_owner);
    // Wear levelling would reassign blocks here; intentionally a no-op.
    virtual void wear_levelling_hook(BlockId) {}

    // --- shared machinery --------------------------------------------------
    Group& group_ref(int id);
    int rank_of(int id) const;  // position in SGV
    int ladder_target(int curr_rank, Lpa lpa, WriteKind kind) const;

    // Collects one victim: migrates its live pages back through
    // handle_write, erases it, and reassigns it. Returns the number of
    // migrations, or nullopt if `voluntary` and the group lacks headroom.
    std::optional<int> collect_block(Group& owner, BlockId victim, bool voluntary);

    // Moves a wholly free block from a donor group to `to` on some LUN.
    // Desperate mode also takes a donor's last spare block; the sweep only
    // ever takes from donors with genuine surplus.
    bool pull_free_block(Group& to, LunId lun, bool desperate = true);

    // Donates `block` (already erased/free) from `from` through the normal
    // erased-block assignment path.
    void donate_free_block(Group& from, LunId lun, std::size_t slot);

    void assign_block_to(Group& g, LunId lun, BlockId block);
    void detach_block(Group& g, LunId lun, BlockId block);

    void update_interval_stats();
    void resort_sgv();
    double lun_deficit(const Group& g, LunId lun) const;
    void refresh_oracle_sums();
    bool frozen(const Group& g) const { return interval_index_ < g.freeze_until; }

    std::vector<GroupStat> current_stats() const;
    std::int64_t mapped_total() const;

    FlashDevice& dev_;
    MappingTable mapping_;
    BlockGroupMap bgm_;
    ManagerTunables tun_;
    const OracleClassifier* oracle_ = nullptr;

    std::vector<Group> groups_;
    std::vector<int> sgv_;  // group ids, coldest first
    int next_group_id_ = 0;

    std::int64_t interval_len_ = 1;
    std::int64_t interval_index_ = 0;
    std::int64_t writes_this_interval_ = 0;
    double target_total_ = 0.0;  // what the targets were normalized to

    int gc_depth_ = 0;
    bool in_movement_ = false;
    ManagerStats stats_;
    std::size_t oracle_version_ = static_cast<std::size_t>(-1);

private:
    Group* choose_group_with_room(int target_id, LunId* lun_out);
    void sweep_group(Group& g);
};

// Single group over the whole device, cleaned per LUN.
class BaselineManager final : public GroupedManager {
public:
    BaselineManager(FlashDevice& dev, Lpa logical_pages, ManagerTunables tunables);
    const char* name() const override { return "baseline"; }

protected:
    int classify_target(Lpa, int, WriteKind) override { return groups_.front().id; }
    void recompute_targets() override;
};

}  // namespace ftlsim
