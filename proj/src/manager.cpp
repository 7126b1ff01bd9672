#include "ftlsim/manager.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace ftlsim {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

GroupedManager::GroupedManager(FlashDevice& dev, Lpa logical_pages,
                               ManagerTunables tunables, const OracleClassifier* oracle)
    : dev_(dev),
      mapping_(logical_pages, dev.geometry().total_pages()),
      bgm_(dev.geometry().total_blocks()),
      tun_(tunables),
      oracle_(tunables.use_oracle ? oracle : nullptr) {
    if (logical_pages <= 0 || logical_pages >= dev.geometry().total_pages())
        throw std::invalid_argument("logical space must be positive and smaller than PBA");
    if (tun_.use_oracle && (oracle == nullptr || !oracle->available()))
        throw std::invalid_argument("oracle detector requested but not available");

    interval_len_ = std::max<std::int64_t>(
        1, std::llround(static_cast<double>(logical_pages) * tun_.h_mult));

    int m = std::max(1, tun_.initial_groups);
    int num_luns = dev_.geometry().num_luns();
    groups_.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        Group g;
        g.id = next_group_id_++;
        g.freq = 1.0 / m;
        g.subs.resize(static_cast<std::size_t>(num_luns));
        if (!tun_.use_oracle)
            g.detector = std::make_unique<TemperatureDetector>(1, tun_.bloom_fpr);
        groups_.push_back(std::move(g));
        sgv_.push_back(groups_.back().id);
    }

    // Blocks start split evenly among the initial groups within every LUN.
    int bpl = dev_.geometry().blocks_per_lun;
    for (LunId lun = 0; lun < num_luns; ++lun) {
        for (int i = 0; i < bpl; ++i) {
            BlockId b = static_cast<BlockId>(lun) * bpl + i;
            assign_block_to(groups_[static_cast<std::size_t>(i % m)], lun, b);
        }
    }

    double pba = static_cast<double>(dev_.geometry().total_pages());
    for (auto& g : groups_) g.target_op = pba / m;
    target_total_ = pba;
}

const Group& GroupedManager::group(int id) const {
    for (const auto& g : groups_)
        if (g.id == id) return g;
    throw std::logic_error("unknown group id " + std::to_string(id));
}

Group& GroupedManager::group_ref(int id) {
    return const_cast<Group&>(group(id));
}

int GroupedManager::rank_of(int id) const {
    for (std::size_t i = 0; i < sgv_.size(); ++i)
        if (sgv_[i] == id) return static_cast<int>(i);
    throw std::logic_error("group missing from SGV: " + std::to_string(id));
}

double GroupedManager::hit_rate(const Group& g) const {
    if (g.size > 0) return g.freq / static_cast<double>(g.size);
    return g.freq > 0.0 ? kInf : 0.0;
}

int GroupedManager::ladder_target(int curr_rank, Lpa lpa, WriteKind kind) const {
    int m = static_cast<int>(sgv_.size());
    if (oracle_) {
        // The oracle plays the role of an ideal detector. A group naturally
        // spans a q-wide band of per-page rates, so a page belongs as long
        // as its true rate stays within sqrt(q) of its group's content
        // average. A page whose whole group changed temperature stays put;
        // the SGV re-sort and the movement of blocks absorb that change.
        const Group& g = group(sgv_[static_cast<std::size_t>(curr_rank)]);
        double page = oracle_->page_rate(lpa);
        double avg = g.size > 0 ? g.true_rate_sum / static_cast<double>(g.size) : 0.0;
        double band = std::sqrt(tun_.hot_ratio_q);
        if (kind == WriteKind::Application && curr_rank + 1 < m && page > band * avg)
            return curr_rank + 1;
        if (kind == WriteKind::Migration && curr_rank > 0 && page * band < avg)
            return curr_rank - 1;
        return curr_rank;
    }
    const Group& g = group(sgv_[static_cast<std::size_t>(curr_rank)]);
    if (!g.detector) return curr_rank;
    Temperature temp = g.detector->classify(lpa, kind);
    if (temp == Temperature::Promote && curr_rank + 1 < m) return curr_rank + 1;
    if (temp == Temperature::Demote && curr_rank > 0) return curr_rank - 1;
    return curr_rank;
}

void GroupedManager::assign_block_to(Group& g, LunId lun, BlockId block) {
    bgm_.assign(block, g.id);
    Subgroup& sub = g.subs.at(static_cast<std::size_t>(lun));
    sub.free_blocks.push_back(block);
    sub.free_pages += dev_.geometry().pages_per_block;
    g.blocks_held += 1;
}

void GroupedManager::detach_block(Group& g, LunId lun, BlockId block) {
    Subgroup& sub = g.subs.at(static_cast<std::size_t>(lun));
    auto in_free = std::find(sub.free_blocks.begin(), sub.free_blocks.end(), block);
    if (in_free != sub.free_blocks.end()) {
        sub.free_blocks.erase(in_free);
        sub.free_pages -= dev_.geometry().pages_per_block;
    } else {
        auto in_full = std::find(sub.full_blocks.begin(), sub.full_blocks.end(), block);
        if (in_full == sub.full_blocks.end())
            throw std::logic_error("detach of block not held: " + std::to_string(block));
        sub.full_blocks.erase(in_full);
    }
    g.blocks_held -= 1;
}

bool GroupedManager::pull_free_block(Group& to, LunId lun, bool desperate) {
    // Shared erased-block pool semantics: a group that needs room may take a
    // wholly free block from another group on the same LUN. Prefer donors
    // with the largest OP surplus; a donor parting with its last free block
    // on the LUN must be in surplus.
    int B = dev_.geometry().pages_per_block;
    auto pick = [&](bool relaxed) -> Group* {
        Group* best = nullptr;
        double best_surplus = -kInf;
        for (auto& g : groups_) {
            if (g.id == to.id) continue;
            const Subgroup& sub = g.subs[static_cast<std::size_t>(lun)];
            if (sub.free_blocks.empty()) continue;
            double surplus = -lun_deficit(g, lun);
            if (!relaxed && sub.free_blocks.size() < 2 && surplus < B) continue;
            if (best == nullptr || surplus > best_surplus ||
                (surplus == best_surplus && g.id < best->id)) {
                best = &g;
                best_surplus = surplus;
            }
        }
        return best;
    };
    Group* donor = pick(false);
    if (!donor && desperate) donor = pick(true);
    if (!donor) return false;
    BlockId block = donor->subs[static_cast<std::size_t>(lun)].free_blocks.front();
    detach_block(*donor, lun, block);
    assign_block_to(to, lun, block);
    stats_.free_block_pulls += 1;
    return true;
}

void GroupedManager::donate_free_block(Group& from, LunId lun, std::size_t slot) {
    Subgroup& sub = from.subs[static_cast<std::size_t>(lun)];
    BlockId block = sub.free_blocks.at(slot);
    detach_block(from, lun, block);
    stats_.free_block_donations += 1;
    assign_erased_block(block, from.id);
}

void GroupedManager::assign_erased_block(BlockId block, int prev_owner) {
    // Deficits are tracked per LUN so every group keeps a proportional
    // footprint (and free space) on every LUN.
    LunId lun = dev_.lun_of_block(block);
    Group* best = nullptr;
    double best_deficit = 0.0;
    for (auto& g : groups_) {
        double deficit = lun_deficit(g, lun);
        if (best == nullptr || deficit > best_deficit ||
            (deficit == best_deficit &&
             (hit_rate(g) > hit_rate(*best) ||
              (hit_rate(g) == hit_rate(*best) && g.id < best->id)))) {
            best = &g;
            best_deficit = deficit;
        }
    }
    if (best == nullptr || best_deficit <= 0.0) best = &group_ref(prev_owner);
    assign_block_to(*best, lun, block);
}

double GroupedManager::lun_deficit(const Group& g, LunId lun) const {
    int B = dev_.geometry().pages_per_block;
    double per_lun_target = g.target_op / static_cast<double>(g.subs.size());
    return per_lun_target -
           static_cast<double>(g.subs[static_cast<std::size_t>(lun)].actual_op(B));
}

Group* GroupedManager::choose_group_with_room(int target_id, LunId* lun_out) {
    int num_luns = dev_.geometry().num_luns();
    int m = static_cast<int>(sgv_.size());
    int target_rank = rank_of(target_id);

    // Candidate groups by rank distance from the target, colder side first.
    std::vector<int> ranks;
    ranks.reserve(static_cast<std::size_t>(m));
    ranks.push_back(target_rank);
    for (int d = 1; d < m; ++d) {
        if (target_rank - d >= 0) ranks.push_back(target_rank - d);
        if (target_rank + d < m) ranks.push_back(target_rank + d);
    }

    for (int rank : ranks) {
        Group& g = group_ref(sgv_[static_cast<std::size_t>(rank)]);
        LunId lun = select_lun(num_luns,
                               [&](LunId l) { return g.subs[static_cast<std::size_t>(l)].free_pages >= 1; },
                               g.lun_cursor);
        if (lun < 0) {
            // No room anywhere in the group: take a free block from the pool.
            for (int k = 0; k < num_luns; ++k) {
                LunId l = static_cast<LunId>((g.lun_cursor + k) % num_luns);
                if (pull_free_block(g, l)) {
                    lun = l;
                    g.lun_cursor = (l + 1) % num_luns;
                    break;
                }
            }
        }
        if (lun >= 0) {
            *lun_out = lun;
            return &g;
        }
    }
    return nullptr;
}

void GroupedManager::handle_write(Lpa lpa, WriteKind kind) {
    if (oracle_ && oracle_->version() != oracle_version_) refresh_oracle_sums();
    auto old = mapping_.translate(lpa);
    int curr_id = old ? bgm_.group_of(dev_.block_of(*old)) : -1;
    int target_id = classify_target(lpa, curr_id, kind);

    LunId lun = -1;
    Group* dest = choose_group_with_room(target_id, &lun);
    if (dest == nullptr) {
        std::string what = "no free page for lpa " + std::to_string(lpa);
        if (kind == WriteKind::Application) throw CapacityExhausted(what);
        throw DeadlockError(what + " (GC migration)");
    }

    Subgroup& sub = dest->subs[static_cast<std::size_t>(lun)];
    if (sub.open_blocks.empty()) {
        BlockId b = sub.free_blocks.front();
        sub.free_blocks.erase(sub.free_blocks.begin());
        sub.open_blocks.push_back(b);
    }
    BlockId block = sub.open_blocks.front();
    Ppa ppa = dev_.first_page(block) + dev_.write_pointer(block);
    dev_.write_page(ppa, kind);
    sub.free_pages -= 1;
    if (dev_.block_full(block)) {
        sub.open_blocks.pop_front();
        sub.full_blocks.push_back(block);
    }

    if (dest->id != target_id) stats_.group_misses += 1;
    if (old) {
        dev_.invalidate_page(*old);
        Group& prev = group_ref(curr_id);
        prev.size -= 1;
        prev.subs[static_cast<std::size_t>(dev_.lun_of_block(dev_.block_of(*old)))].live_pages -= 1;
        if (oracle_) prev.true_rate_sum -= oracle_->page_rate(lpa);
    }
    mapping_.remap(lpa, ppa);
    dest->size += 1;
    sub.live_pages += 1;
    if (oracle_) dest->true_rate_sum += oracle_->page_rate(lpa);
    if (dest->detector)
        dest->detector->record(lpa, kind, std::max<std::int64_t>(dest->size, 1));

    if (kind == WriteKind::Application) {
        dest->interval_writes += 1;
        if (++writes_this_interval_ >= interval_len_) {
            writes_this_interval_ = 0;
            update_interval_stats();
            recompute_targets();
            restructure();  // may create or merge groups; dest dies here
            consider_movement_operations();
        }
    }

    sweep_group(group_ref(bgm_.group_of(block)));
}

void GroupedManager::sweep_group(Group& g) {
    // Only the top-level write drives GC; migrations place their pages and
    // leave reclamation to the sweep, so at most one victim is ever in
    // flight and its migrations always have somewhere to go.
    if (gc_depth_ > 0) return;
    const int B = dev_.geometry().pages_per_block;
    // Blocks filled after the sweep began are not revisited; one pass over
    // the pre-existing blocks bounds the work and keeps the LRU ring honest.
    const std::int64_t entry_stamp = dev_.erase_stamp();
    bool progress = true;
    while (progress) {
        progress = false;
        for (std::size_t lun = 0; lun < g.subs.size(); ++lun) {
            while (g.subs[lun].free_pages < B) {
                // A spare block from the shared pool beats any cleaning.
                if (pull_free_block(g, static_cast<LunId>(lun), false)) {
                    progress = true;
                    continue;
                }
                std::int64_t dead = 0;
                for (BlockId b : g.subs[lun].open_blocks)
                    dead += dev_.write_pointer(b) - dev_.live_count(b);
                for (BlockId b : g.subs[lun].full_blocks)
                    dead += B - dev_.live_count(b);
                if (dead == 0) break;  // nothing reclaimable here yet
                std::vector<BlockId> candidates;
                for (BlockId b : g.subs[lun].full_blocks)
                    if (dev_.erase_seq(b) <= entry_stamp) candidates.push_back(b);
                auto victim = pick_victim(tun_.cleaning, candidates, dev_);
                if (!victim) break;
                collect_block(g, *victim, false);
                progress = true;
            }
        }
    }
}

std::optional<int> GroupedManager::collect_block(Group& owner, BlockId victim,
                                                 bool voluntary) {
    if (gc_depth_ > 1024)
        throw DeadlockError("garbage collection recursed past any plausible bound");
    int B = dev_.geometry().pages_per_block;
    LunId lun = dev_.lun_of_block(victim);

    std::vector<Lpa> live;
    Ppa base = dev_.first_page(victim);
    for (int i = 0; i < B; ++i)
        if (dev_.page_state(base + i) == PageState::Live)
            live.push_back(mapping_.reverse(base + i));

    // The group must be able to absorb the victim's live pages; top up from
    // the free pool first.
    int num_luns = dev_.geometry().num_luns();
    while (owner.free_pages() < static_cast<std::int64_t>(live.size())) {
        bool pulled = false;
        for (int l = 0; l < num_luns && !pulled; ++l)
            pulled = pull_free_block(owner, static_cast<LunId>(l));
        if (!pulled) {
            if (voluntary) return std::nullopt;
            if (dev_.total_free() < static_cast<std::int64_t>(live.size()))
                throw DeadlockError("group " + std::to_string(owner.id) +
                                    " cannot absorb " + std::to_string(live.size()) +
                                    " live pages of victim " + std::to_string(victim));
            break;  // migrations will spill into other groups
        }
    }

    owner.gcs += 1;
    owner.gc_migrations += static_cast<std::int64_t>(live.size());
    if (voluntary) {
        stats_.movement_gcs += 1;
        stats_.movement_migrations += static_cast<std::int64_t>(live.size());
    } else {
        stats_.mandatory_gcs += 1;
        stats_.mandatory_migrations += static_cast<std::int64_t>(live.size());
    }
    ++gc_depth_;
    detach_block(owner, lun, victim);
    for (Lpa lpa : live) handle_write(lpa, WriteKind::Migration);
    dev_.erase_block(victim);
    wear_levelling_hook(victim);
    assign_erased_block(victim, owner.id);
    --gc_depth_;
    consider_movement_operations();
    return static_cast<int>(live.size());
}

void GroupedManager::refresh_oracle_sums() {
    for (auto& g : groups_) g.true_rate_sum = 0.0;
    for (Lpa lpa = 0; lpa < mapping_.logical_pages(); ++lpa) {
        auto ppa = mapping_.translate(lpa);
        if (!ppa) continue;
        group_ref(bgm_.group_of(dev_.block_of(*ppa))).true_rate_sum +=
            oracle_->page_rate(lpa);
    }
    oracle_version_ = oracle_->version();
}

void GroupedManager::update_interval_stats() {
    double h = static_cast<double>(interval_len_);
    double a = tun_.ewma_a;
    double sum = 0.0;
    for (auto& g : groups_) {
        double u = static_cast<double>(g.interval_writes) / h;
        g.freq = g.freq * (1.0 - a) + a * u;
        g.interval_writes = 0;
        sum += g.freq;
    }
    if (sum > 0.0)
        for (auto& g : groups_) g.freq /= sum;
    interval_index_ += 1;
}

void GroupedManager::resort_sgv() {
    std::vector<std::pair<int, int>> pinned;  // (slot, id)
    std::vector<int> loose;
    for (const auto& g : groups_) {
        if (frozen(g))
            pinned.emplace_back(g.frozen_slot, g.id);
        else
            loose.push_back(g.id);
    }
    std::sort(pinned.begin(), pinned.end());
    std::stable_sort(loose.begin(), loose.end(), [&](int a, int b) {
        double ha = hit_rate(group(a)), hb = hit_rate(group(b));
        if (ha != hb) return ha < hb;
        return a < b;
    });

    std::size_t m = groups_.size();
    std::vector<int> result(m, -1);
    for (auto [slot, id] : pinned) {
        std::size_t s = static_cast<std::size_t>(std::clamp<int>(slot, 0, static_cast<int>(m) - 1));
        while (result[s] != -1) s = (s + 1) % m;
        result[s] = id;
    }
    std::size_t li = 0;
    for (std::size_t s = 0; s < m; ++s)
        if (result[s] == -1) result[s] = loose[li++];
    sgv_ = std::move(result);
}

std::vector<GroupStat> GroupedManager::current_stats() const {
    std::vector<GroupStat> stats;
    stats.reserve(groups_.size());
    for (const auto& g : groups_) stats.push_back(GroupStat{g.size, g.freq});
    return stats;
}

std::int64_t GroupedManager::mapped_total() const {
    std::int64_t n = 0;
    for (const auto& g : groups_) n += g.size;
    return n;
}

std::vector<GroupSnapshot> GroupedManager::snapshot() const {
    std::vector<GroupSnapshot> out;
    int B = dev_.geometry().pages_per_block;
    for (int id : sgv_) {
        const Group& g = group(id);
        out.push_back(GroupSnapshot{g.id, g.size, g.freq, g.target_op,
                                    g.actual_op(B), g.blocks_held});
    }
    return out;
}

void GroupedManager::audit() const {
    dev_.audit();
    const auto& geom = dev_.geometry();
    int B = geom.pages_per_block;

    std::vector<char> seen(static_cast<std::size_t>(geom.total_blocks()), 0);
    std::int64_t held = 0;
    for (const auto& g : groups_) {
        std::int64_t blocks = 0, free_recount = 0;
        for (std::size_t lun = 0; lun < g.subs.size(); ++lun) {
            const Subgroup& sub = g.subs[lun];
            auto visit = [&](BlockId b, const char* list) {
                if (bgm_.group_of(b) != g.id)
                    throw ConstraintViolation("BGM disagrees with " + std::string(list) +
                                              " list for block " + std::to_string(b));
                if (dev_.lun_of_block(b) != static_cast<LunId>(lun))
                    throw ConstraintViolation("block filed under the wrong LUN");
                if (seen[static_cast<std::size_t>(b)]++)
                    throw ConstraintViolation("block appears in two lists: " + std::to_string(b));
                ++blocks;
            };
            for (BlockId b : sub.free_blocks) {
                visit(b, "free");
                if (dev_.write_pointer(b) != 0)
                    throw ConstraintViolation("free-listed block has programmed pages");
                free_recount += B;
            }
            for (BlockId b : sub.open_blocks) {
                visit(b, "open");
                if (dev_.write_pointer(b) >= B)
                    throw ConstraintViolation("open block is full");
                free_recount += B - dev_.write_pointer(b);
            }
            for (BlockId b : sub.full_blocks) {
                visit(b, "full");
                if (dev_.write_pointer(b) != B)
                    throw ConstraintViolation("full-listed block is not full");
            }
            if (free_recount < 0 || sub.free_pages < 0)
                throw ConstraintViolation("negative free page tally");
            std::int64_t live_recount = 0;
            for (BlockId b : sub.open_blocks) live_recount += dev_.live_count(b);
            for (BlockId b : sub.full_blocks) live_recount += dev_.live_count(b);
            if (live_recount != sub.live_pages)
                throw ConstraintViolation("subgroup live tally mismatch in group " +
                                          std::to_string(g.id));
        }
        std::int64_t sub_free = 0;
        for (const auto& s : g.subs) sub_free += s.free_pages;
        if (sub_free != free_recount)
            throw ConstraintViolation("free page tally mismatch in group " +
                                      std::to_string(g.id));
        if (blocks != g.blocks_held)
            throw ConstraintViolation("blocks_held mismatch in group " + std::to_string(g.id));
        held += blocks;
    }
    if (held != geom.total_blocks())
        throw ConstraintViolation("groups do not partition the block space");

    // Live pages per group, recomputed from the mapping.
    std::vector<std::pair<int, std::int64_t>> live_by_group;
    for (const auto& g : groups_) live_by_group.emplace_back(g.id, 0);
    std::int64_t mapped = 0;
    for (Lpa lpa = 0; lpa < mapping_.logical_pages(); ++lpa) {
        auto ppa = mapping_.translate(lpa);
        if (!ppa) continue;
        ++mapped;
        if (dev_.page_state(*ppa) != PageState::Live)
            throw ConstraintViolation("mapping points at a non-live page");
        if (mapping_.reverse(*ppa) != lpa)
            throw ConstraintViolation("reverse map broken at lpa " + std::to_string(lpa));
        int gid = bgm_.group_of(dev_.block_of(*ppa));
        for (auto& [id, count] : live_by_group)
            if (id == gid) ++count;
    }
    if (mapped != dev_.total_live())
        throw ConstraintViolation("mapped count != live pages");
    for (const auto& [id, count] : live_by_group)
        if (count != group(id).size)
            throw ConstraintViolation("size mismatch in group " + std::to_string(id));

    double target_sum = 0.0;
    for (const auto& g : groups_) target_sum += g.target_op;
    if (std::abs(target_sum - target_total_) > 1e-6 * std::max(1.0, target_total_))
        throw ConstraintViolation("targets do not sum to the over-provisioned space");

    if (sgv_.size() != groups_.size())
        throw ConstraintViolation("SGV size mismatch");
}

BaselineManager::BaselineManager(FlashDevice& dev, Lpa logical_pages,
                                 ManagerTunables tunables)
    : GroupedManager(dev, logical_pages,
                     [&] {
                         tunables.initial_groups = 1;
                         tunables.dynamic_groups = false;
                         tunables.use_oracle = false;
                         return tunables;
                     }(),
                     nullptr) {
    groups_.front().detector.reset();
}

void BaselineManager::recompute_targets() {
    Group& g = groups_.front();
    g.target_op = static_cast<double>(dev_.geometry().total_pages() - g.size);
    target_total_ = g.target_op;
}

}  // namespace ftlsim
