#include "ftlsim/wolf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ftlsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

WolfManager::WolfManager(FlashDevice& dev, Lpa logical_pages, ManagerTunables tunables,
                         const OracleClassifier* oracle)
    : GroupedManager(dev, logical_pages,
                     [&] {
                         if (tunables.initial_groups < 2) tunables.initial_groups = 2;
                         return tunables;
                     }(),
                     oracle) {}

int WolfManager::classify_target(Lpa lpa, int curr_id, WriteKind kind) {
    if (curr_id < 0) return sgv_.front();  // first write: coldest group
    int rank = rank_of(curr_id);
    return sgv_[static_cast<std::size_t>(ladder_target(rank, lpa, kind))];
}

void WolfManager::recompute_targets() {
    std::vector<GroupStat> stats = current_stats();
    std::int64_t lba_eff = mapped_total();
    std::int64_t pba = dev_.geometry().total_pages();
    if (lba_eff == 0) {
        for (auto& g : groups_) g.target_op = static_cast<double>(pba) / groups_.size();
        target_total_ = static_cast<double>(pba);
        return;
    }
    Allocation alloc = alloc_mixed(stats, lba_eff, pba, 1, tun_.cold_rule);
    for (std::size_t i = 0; i < groups_.size(); ++i) groups_[i].target_op = alloc[i];
    target_total_ = static_cast<double>(pba - lba_eff);
}

void WolfManager::restructure() {
    resort_sgv();
    if (tun_.dynamic_groups) merge_or_create_groups();
}

void WolfManager::merge_or_create_groups() {
    const int B = dev_.geometry().pages_per_block;
    const std::int64_t f_pages =
        tun_.f_pages > 0 ? tun_.f_pages
                         : static_cast<std::int64_t>(dev_.geometry().num_luns()) * B;
    const double q = tun_.hot_ratio_q;
    const int m = static_cast<int>(sgv_.size());

    auto hit = [&](int id) { return hit_rate(group(id)); };
    auto frozen_id = [&](int id) { return frozen(group(id)); };

    // New hottest group: the hottest has grown past F pages and is at least
    // Q times hotter per page than the runner-up.
    if (interval_index_ >= creation_ban_until_ && m >= 2) {
        int hot = sgv_[static_cast<std::size_t>(m - 1)];
        int second = sgv_[static_cast<std::size_t>(m - 2)];
        if (!frozen_id(hot) && !frozen_id(second) && group(hot).size >= f_pages &&
            hit(second) > 0.0 && hit(hot) >= q * hit(second)) {
            create_group(m);
            creation_ban_until_ = interval_index_ + tun_.stabilize_w;
            return;
        }
    }

    // Split: adjacent pair whose hit rates diverged past Q*2 gets an empty
    // group between them.
    for (int i = 0; i + 1 < m; ++i) {
        int c = sgv_[static_cast<std::size_t>(i)], h = sgv_[static_cast<std::size_t>(i + 1)];
        if (frozen_id(c) || frozen_id(h)) continue;
        if (hit(c) > 0.0 && hit(h) != kInf && hit(h) > 2.0 * q * hit(c)) {
            create_group(i + 1);
            return;
        }
    }

    // Convergence streaks for adjacent pairs.
    std::map<std::pair<int, int>, int> next;
    for (int i = 0; i + 1 < m; ++i) {
        int c = sgv_[static_cast<std::size_t>(i)], h = sgv_[static_cast<std::size_t>(i + 1)];
        double hc = hit(c), hh = hit(h);
        bool converged = hc > 0.0 && hh != kInf && hh <= q * hc;
        if (!converged) continue;
        auto key = std::make_pair(c, h);
        auto it = convergence_.find(key);
        next[key] = (it == convergence_.end() ? 0 : it->second) + 1;
    }
    convergence_ = std::move(next);

    if (m > 2) {
        for (int i = 0; i + 1 < m; ++i) {
            int c = sgv_[static_cast<std::size_t>(i)], h = sgv_[static_cast<std::size_t>(i + 1)];
            if (frozen_id(c) || frozen_id(h)) continue;
            // The ban also protects the hottest group from being merged away
            // while a newcomer stabilizes.
            if (interval_index_ < creation_ban_until_ && i + 2 == m) continue;
            auto it = convergence_.find(std::make_pair(c, h));
            if (it != convergence_.end() && it->second > tun_.stabilize_w) {
                merge_groups(std::min(c, h), std::max(c, h));
                return;
            }
        }

        // Undersized groups fold into the nearer-by-hit-rate SGV neighbor.
        for (int i = 0; i < m; ++i) {
            int id = sgv_[static_cast<std::size_t>(i)];
            if (frozen_id(id) || group(id).size >= f_pages) continue;
            int neighbor = -1;
            if (i == 0) neighbor = sgv_[1];
            else if (i == m - 1) neighbor = sgv_[static_cast<std::size_t>(m - 2)];
            else {
                int colder = sgv_[static_cast<std::size_t>(i - 1)];
                int hotter = sgv_[static_cast<std::size_t>(i + 1)];
                double hc = hit(colder), hm = hit(id), hh = hit(hotter);
                neighbor = (hm - hc <= hh - hm) ? colder : hotter;
            }
            if (neighbor < 0 || frozen_id(neighbor)) continue;
            merge_groups(std::min(id, neighbor), std::max(id, neighbor));
            return;
        }
    }
}

void WolfManager::create_group(int slot) {
    Group g;
    g.id = next_group_id_++;
    g.freq = 0.0;
    g.subs.resize(static_cast<std::size_t>(dev_.geometry().num_luns()));
    g.freeze_until = interval_index_ + tun_.stabilize_w;
    g.frozen_slot = slot;
    if (!tun_.use_oracle)
        g.detector = std::make_unique<TemperatureDetector>(1, tun_.bloom_fpr);
    int id = g.id;
    groups_.push_back(std::move(g));
    sgv_.insert(sgv_.begin() + std::clamp<int>(slot, 0, static_cast<int>(sgv_.size())), id);
    stats_.groups_created += 1;
}

void WolfManager::merge_groups(int keep_id, int absorb_id) {
    Group& keep = group_ref(keep_id);
    Group& gone = group_ref(absorb_id);

    // A merge is metadata only: blocks are relabelled, nothing moves.
    for (std::size_t lun = 0; lun < gone.subs.size(); ++lun) {
        Subgroup& from = gone.subs[lun];
        Subgroup& to = keep.subs[lun];
        for (BlockId b : from.free_blocks) bgm_.assign(b, keep.id);
        for (BlockId b : from.open_blocks) bgm_.assign(b, keep.id);
        for (BlockId b : from.full_blocks) bgm_.assign(b, keep.id);
        to.free_blocks.insert(to.free_blocks.end(), from.free_blocks.begin(),
                              from.free_blocks.end());
        to.open_blocks.insert(to.open_blocks.end(), from.open_blocks.begin(),
                              from.open_blocks.end());
        to.full_blocks.insert(to.full_blocks.end(), from.full_blocks.begin(),
                              from.full_blocks.end());
        to.free_pages += from.free_pages;
        to.live_pages += from.live_pages;
    }
    keep.size += gone.size;
    keep.freq += gone.freq;
    keep.true_rate_sum += gone.true_rate_sum;
    keep.interval_writes += gone.interval_writes;
    keep.target_op += gone.target_op;
    keep.blocks_held += gone.blocks_held;
    if (keep.detector) keep.detector->reset(std::max<std::int64_t>(keep.size, 1));

    sgv_.erase(std::remove(sgv_.begin(), sgv_.end(), absorb_id), sgv_.end());
    for (auto it = groups_.begin(); it != groups_.end(); ++it) {
        if (it->id == absorb_id) {
            groups_.erase(it);
            break;
        }
    }
    for (auto it = convergence_.begin(); it != convergence_.end();) {
        if (it->first.first == absorb_id || it->first.second == absorb_id)
            it = convergence_.erase(it);
        else
            ++it;
    }
    stats_.groups_merged += 1;
}

namespace {
struct FlagGuard {
    bool& flag;
    explicit FlagGuard(bool& f) : flag(f) { flag = true; }
    ~FlagGuard() { flag = false; }
};
}  // namespace

void WolfManager::consider_movement_operations() {
    if (in_movement_) return;
    FlagGuard guard(in_movement_);
    const int B = dev_.geometry().pages_per_block;
    const int num_luns = dev_.geometry().num_luns();
    const std::int64_t bound = dev_.geometry().total_blocks() * 4;

    for (std::int64_t iter = 0; iter < bound; ++iter) {
        // Donor and recipient must sit on the same LUN, both at least one
        // block away from their per-LUN targets, so a donated block never
        // boomerangs back through the erase handler.
        auto lun_ok = [&](LunId l) {
            for (auto& g : groups_)
                if (lun_deficit(g, l) >= static_cast<double>(B)) return true;
            return false;
        };

        Group* donor = nullptr;
        LunId donor_lun = -1;
        bool donor_has_free = false;
        double best_surplus = 0.0;
        for (LunId l = 0; l < num_luns; ++l) {
            if (!lun_ok(l)) continue;
            for (auto& g : groups_) {
                double surplus = -lun_deficit(g, l);
                if (surplus < static_cast<double>(B)) continue;
                const Subgroup& sub = g.subs[static_cast<std::size_t>(l)];
                bool has_free = !sub.free_blocks.empty();
                bool has_victim = !sub.full_blocks.empty();
                if (!has_free && !has_victim) continue;
                // Free-block donations are free of migrations; prefer them.
                if (donor == nullptr || (has_free && !donor_has_free) ||
                    (has_free == donor_has_free && surplus > best_surplus)) {
                    donor = &g;
                    donor_lun = l;
                    donor_has_free = has_free;
                    best_surplus = surplus;
                }
            }
        }
        if (!donor) break;

        if (donor_has_free) {
            donate_free_block(*donor, donor_lun, 0);
            continue;
        }
        auto victim = pick_victim(
            tun_.cleaning, donor->subs[static_cast<std::size_t>(donor_lun)].full_blocks,
            dev_);
        if (!victim) break;
        auto migrated = collect_block(*donor, *victim, true);
        if (!migrated) break;
    }
}

}  // namespace ftlsim
