#pragma once

#include <optional>
#include <span>
#include <vector>

#include "ftlsim/device.hpp"

// Page-level mapping, the block-to-group map, and the two victim-selection
// policies. The GC driver itself lives in the block managers, which own the
// write path migrations are fed back through.

namespace ftlsim {

enum class CleaningPolicy : unsigned char { Greedy, Lru };

class MappingTable {
public:
    MappingTable(std::int64_t logical_pages, std::int64_t physical_pages)
        : forward_(static_cast<std::size_t>(logical_pages), kNoPage),
          reverse_(static_cast<std::size_t>(physical_pages), kNoLpa) {}

    std::int64_t logical_pages() const { return static_cast<std::int64_t>(forward_.size()); }

    // Physical location of a logical page, or empty if never written.
    std::optional<Ppa> translate(Lpa lpa) const {
        check_lpa(lpa);
        Ppa p = forward_[static_cast<std::size_t>(lpa)];
        if (p == kNoPage) return std::nullopt;
        return p;
    }

    Lpa reverse(Ppa ppa) const { return reverse_.at(static_cast<std::size_t>(ppa)); }

    // Points lpa at ppa; the caller has already invalidated the old page.
    void remap(Lpa lpa, Ppa ppa) {
        check_lpa(lpa);
        Ppa old = forward_[static_cast<std::size_t>(lpa)];
        if (old != kNoPage) reverse_[static_cast<std::size_t>(old)] = kNoLpa;
        forward_[static_cast<std::size_t>(lpa)] = ppa;
        reverse_[static_cast<std::size_t>(ppa)] = lpa;
    }

    std::int64_t mapped_count() const {
        std::int64_t n = 0;
        for (Ppa p : forward_)
            if (p != kNoPage) ++n;
        return n;
    }

private:
    void check_lpa(Lpa lpa) const {
        if (lpa < 0 || lpa >= static_cast<Lpa>(forward_.size()))
            throw std::domain_error("logical address out of range: " + std::to_string(lpa));
    }

    std::vector<Ppa> forward_;
    std::vector<Lpa> reverse_;
};

// Block-to-group map. Every physical block always belongs to exactly one
// group.
class BlockGroupMap {
public:
    explicit BlockGroupMap(std::int64_t total_blocks)
        : group_of_(static_cast<std::size_t>(total_blocks), 0) {}

    int group_of(BlockId b) const { return group_of_.at(static_cast<std::size_t>(b)); }
    void assign(BlockId b, int group) { group_of_.at(static_cast<std::size_t>(b)) = group; }

private:
    std::vector<int> group_of_;
};

// Victim among fully written blocks with the smallest erase sequence number
// (least recently erased); ties to the lowest block id. Returns empty when
// no candidate exists.
std::optional<BlockId> pick_victim_lru(std::span<const BlockId> full_blocks,
                                       const FlashDevice& dev);

// Victim among fully written blocks with the fewest live pages; ties broken
// by oldest erase sequence, then lowest block id.
std::optional<BlockId> pick_victim_greedy(std::span<const BlockId> full_blocks,
                                          const FlashDevice& dev);

inline std::optional<BlockId> pick_victim(CleaningPolicy policy,
                                          std::span<const BlockId> full_blocks,
                                          const FlashDevice& dev) {
    return policy == CleaningPolicy::Greedy ? pick_victim_greedy(full_blocks, dev)
                                            : pick_victim_lru(full_blocks, dev);
}

}  // namespace ftlsim
