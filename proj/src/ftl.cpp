#include "ftlsim/ftl.hpp"

namespace ftlsim {

std::optional<BlockId> pick_victim_lru(std::span<const BlockId> full_blocks,
                                       const FlashDevice& dev) {
    std::optional<BlockId> best;
    for (BlockId b : full_blocks) {
        if (!best) {
            best = b;
            continue;
        }
        auto seq = dev.erase_seq(b), best_seq = dev.erase_seq(*best);
        if (seq < best_seq || (seq == best_seq && b < *best)) best = b;
    }
    return best;
}

std::optional<BlockId> pick_victim_greedy(std::span<const BlockId> full_blocks,
                                          const FlashDevice& dev) {
    std::optional<BlockId> best;
    for (BlockId b : full_blocks) {
        if (!best) {
            best = b;
            continue;
        }
        int lc = dev.live_count(b), best_lc = dev.live_count(*best);
        if (lc != best_lc) {
            if (lc < best_lc) best = b;
            continue;
        }
        auto seq = dev.erase_seq(b), best_seq = dev.erase_seq(*best);
        if (seq < best_seq || (seq == best_seq && b < *best)) best = b;
    }
    return best;
}

}  // namespace ftlsim
