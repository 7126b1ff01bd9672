#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

// Constraint-enforcing model of the physical medium: channels, LUNs, erase
// blocks, pages, and the operation counters every experiment reads off.

namespace ftlsim {

using Lpa = std::int64_t;      // logical page address
using Ppa = std::int64_t;      // physical page address
using BlockId = std::int32_t;
using LunId = std::int32_t;

constexpr Ppa kNoPage = -1;
constexpr Lpa kNoLpa = -1;

// Raised when a caller violates a flash ordering or state rule. These are
// programming errors in a block manager, not runtime conditions.
class ConstraintViolation : public std::logic_error {
public:
    explicit ConstraintViolation(const std::string& what) : std::logic_error(what) {}
};

struct FlashGeometry {
    int channels = 4;
    int luns_per_channel = 2;
    int blocks_per_lun = 1024;
    int pages_per_block = 128;  // B
    std::int64_t page_size = 16 * 1024;

    int num_luns() const { return channels * luns_per_channel; }
    std::int64_t total_blocks() const {
        return static_cast<std::int64_t>(num_luns()) * blocks_per_lun;
    }
    std::int64_t total_pages() const { return total_blocks() * pages_per_block; }  // PBA
    void validate() const;
};

enum class PageState : unsigned char { Free, Live, Dead };

enum class WriteKind : unsigned char { Application, Migration };

struct DeviceCounters {
    std::int64_t physical_writes = 0;
    std::int64_t logical_writes = 0;
    std::int64_t migrations = 0;
    std::int64_t erases = 0;
};

class FlashDevice {
public:
    explicit FlashDevice(FlashGeometry geometry);

    const FlashGeometry& geometry() const { return geom_; }
    const DeviceCounters& counters() const { return counters_; }

    // Programs the page. It must be FREE and match its block's write
    // pointer (pages within a block are programmed in order).
    void write_page(Ppa addr, WriteKind kind);

    // LIVE -> DEAD.
    void invalidate_page(Ppa addr);

    // All pages of the block must be FREE or DEAD. Resets them to FREE,
    // rewinds the write pointer, and stamps a fresh erase sequence number.
    void erase_block(BlockId block);

    PageState page_state(Ppa addr) const { return pages_.at(static_cast<std::size_t>(addr)); }
    int write_pointer(BlockId block) const { return write_ptr_.at(block); }
    int live_count(BlockId block) const { return live_count_.at(block); }
    std::int64_t erase_seq(BlockId block) const { return erase_seq_.at(block); }
    std::int64_t erase_stamp() const { return erase_stamp_; }
    bool block_full(BlockId block) const {
        return write_ptr_.at(block) == geom_.pages_per_block;
    }

    BlockId block_of(Ppa addr) const {
        return static_cast<BlockId>(addr / geom_.pages_per_block);
    }
    int page_index(Ppa addr) const {
        return static_cast<int>(addr % geom_.pages_per_block);
    }
    LunId lun_of_block(BlockId block) const {
        return static_cast<LunId>(block / geom_.blocks_per_lun);
    }
    Ppa first_page(BlockId block) const {
        return static_cast<Ppa>(block) * geom_.pages_per_block;
    }

    std::int64_t total_live() const { return total_live_; }
    std::int64_t total_free() const { return total_free_; }
    std::int64_t total_dead() const {
        return geom_.total_pages() - total_live_ - total_free_;
    }

    // Throws ConstraintViolation if any internal tally disagrees with the
    // page array; used by the property suites.
    void audit() const;

private:
    void check_page(Ppa addr) const;

    FlashGeometry geom_;
    std::vector<PageState> pages_;
    std::vector<int> write_ptr_;
    std::vector<int> live_count_;
    std::vector<std::int64_t> erase_seq_;
    std::int64_t erase_stamp_ = 0;
    std::int64_t total_live_ = 0;
    std::int64_t total_free_ = 0;
    DeviceCounters counters_;
};

// Round-robin pick among candidate LUNs that still have room. `has_room`
// decides per LUN; `cursor` persists between calls (one per group, so
// placement stays deterministic). Returns -1 if nothing fits.
template <typename HasRoom>
LunId select_lun(int num_luns, HasRoom&& has_room, int& cursor) {
    for (int k = 0; k < num_luns; ++k) {
        LunId lun = static_cast<LunId>((cursor + k) % num_luns);
        if (has_room(lun)) {
            cursor = (lun + 1) % num_luns;
            return lun;
        }
    }
    return -1;
}

}  // namespace ftlsim
