#include "ftlsim/fdp.hpp"

#include <algorithm>
#include <cmath>

namespace ftlsim {

std::vector<double> fdp_assumed_frequencies(int n) {
    if (n < 1) throw std::invalid_argument("need at least one group");
    std::vector<double> p(static_cast<std::size_t>(n));
    double denom = std::pow(2.0, n) - 1.0;
    for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = std::pow(2.0, i) / denom;
    return p;
}

Allocation fdp_allocate_op(const std::vector<std::int64_t>& sizes,
                           std::int64_t pba, std::int64_t block_pages) {
    std::vector<double> p = fdp_assumed_frequencies(static_cast<int>(sizes.size()));
    std::vector<GroupStat> stats(sizes.size());
    std::int64_t lba = 0;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        stats[i] = GroupStat{sizes[i], p[i]};
        lba += sizes[i];
    }
    return alloc_optimal(stats, lba, pba, block_pages);
}

FdpManager::FdpManager(FlashDevice& dev, Lpa logical_pages, ManagerTunables tunables,
                       const OracleClassifier* oracle)
    : GroupedManager(dev, logical_pages,
                     [&] {
                         if (tunables.initial_groups < 2) tunables.initial_groups = 2;
                         tunables.cleaning = CleaningPolicy::Lru;
                         tunables.dynamic_groups = false;
                         return tunables;
                     }(),
                     oracle) {}

int FdpManager::classify_target(Lpa lpa, int curr_id, WriteKind kind) {
    if (curr_id < 0) return sgv_.front();
    int rank = rank_of(curr_id);
    int target = ladder_target(rank, lpa, kind);

    // A promotion signal out of the hottest group cannot act until enough of
    // them accumulate to justify a new group (mirrors the F rule).
    int m = static_cast<int>(sgv_.size());
    if (kind == WriteKind::Application && rank == m - 1 && !tun_.use_oracle) {
        const Group& g = group(curr_id);
        if (g.detector && g.detector->classify(lpa, kind) == Temperature::Promote) {
            std::int64_t f_pages =
                tun_.f_pages > 0
                    ? tun_.f_pages
                    : static_cast<std::int64_t>(dev_.geometry().num_luns()) *
                          dev_.geometry().pages_per_block;
            if (++promotions_from_hottest_ > f_pages) {
                promotions_from_hottest_ = 0;
                create_hottest_group();
                return sgv_.back();
            }
        }
    }
    return sgv_[static_cast<std::size_t>(target)];
}

void FdpManager::create_hottest_group() {
    Group g;
    g.id = next_group_id_++;
    g.freq = 0.0;
    g.subs.resize(static_cast<std::size_t>(dev_.geometry().num_luns()));
    if (!tun_.use_oracle)
        g.detector = std::make_unique<TemperatureDetector>(1, tun_.bloom_fpr);
    int id = g.id;
    groups_.push_back(std::move(g));
    sgv_.push_back(id);
    warm_blocks_.clear();
    stats_.groups_created += 1;
}

void FdpManager::recompute_targets() {
    std::int64_t pba = dev_.geometry().total_pages();
    std::int64_t block_pages = dev_.geometry().pages_per_block;
    std::int64_t lba_eff = mapped_total();
    std::size_t m = sgv_.size();
    if (lba_eff == 0) {
        for (auto& g : groups_) g.target_op = static_cast<double>(pba) / groups_.size();
        target_total_ = static_cast<double>(pba);
        return;
    }

    std::vector<double> assumed = fdp_assumed_frequencies(static_cast<int>(m));
    std::vector<GroupStat> stats(m);
    for (std::size_t i = 0; i < m; ++i)
        stats[i] = GroupStat{group(sgv_[i]).size, assumed[i]};

    Allocation alloc;
    if (warm_blocks_.size() == m)
        alloc = alloc_optimal_from(stats, lba_eff, pba, block_pages, warm_blocks_);
    else
        alloc = alloc_optimal(stats, lba_eff, pba, block_pages);

    warm_blocks_.assign(m, 0);
    double total = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        warm_blocks_[i] = static_cast<std::int64_t>(
            std::llround(alloc[i] / static_cast<double>(block_pages)));
        group_ref(sgv_[i]).target_op = alloc[i];
        total += alloc[i];
    }
    target_total_ = total;
}

void FdpManager::assign_erased_block(BlockId block, int prev_owner) {
    int owner_rank = rank_of(prev_owner);
    int m = static_cast<int>(sgv_.size());

    Group* best = nullptr;
    double best_deficit = 0.0;
    for (int r = std::max(0, owner_rank - 1); r <= std::min(m - 1, owner_rank + 1); ++r) {
        Group& g = group_ref(sgv_[static_cast<std::size_t>(r)]);
        double deficit = lun_deficit(g, static_cast<LunId>(dev_.lun_of_block(block)));
        if (best == nullptr || deficit > best_deficit ||
            (deficit == best_deficit && hit_rate(g) > hit_rate(*best))) {
            best = &g;
            best_deficit = deficit;
        }
    }
    if (best == nullptr || best_deficit <= 0.0) best = &group_ref(prev_owner);
    if (std::abs(rank_of(best->id) - owner_rank) > 1) stats_.nonadjacent_donations += 1;
    assign_block_to(*best, dev_.lun_of_block(block), block);
}

}  // namespace ftlsim
