#include "ftlsim/device.hpp"

namespace ftlsim {

void FlashGeometry::validate() const {
    if (channels < 1 || luns_per_channel < 1 || blocks_per_lun < 1 ||
        pages_per_block < 1 || page_size < 1)
        throw std::invalid_argument("flash geometry fields must all be positive");
}

FlashDevice::FlashDevice(FlashGeometry geometry) : geom_(geometry) {
    geom_.validate();
    pages_.assign(static_cast<std::size_t>(geom_.total_pages()), PageState::Free);
    write_ptr_.assign(static_cast<std::size_t>(geom_.total_blocks()), 0);
    live_count_.assign(static_cast<std::size_t>(geom_.total_blocks()), 0);
    erase_seq_.assign(static_cast<std::size_t>(geom_.total_blocks()), 0);
    total_free_ = geom_.total_pages();
}

void FlashDevice::check_page(Ppa addr) const {
    if (addr < 0 || addr >= geom_.total_pages())
        throw ConstraintViolation("physical page address out of range: " + std::to_string(addr));
}

void FlashDevice::write_page(Ppa addr, WriteKind kind) {
    check_page(addr);
    BlockId block = block_of(addr);
    int idx = page_index(addr);
    if (pages_[static_cast<std::size_t>(addr)] != PageState::Free)
        throw ConstraintViolation("write to non-free page " + std::to_string(addr));
    if (idx != write_ptr_[block])
        throw ConstraintViolation("out-of-order program in block " + std::to_string(block) +
                                  ": page " + std::to_string(idx) + ", pointer " +
                                  std::to_string(write_ptr_[block]));
    pages_[static_cast<std::size_t>(addr)] = PageState::Live;
    write_ptr_[block] = idx + 1;
    live_count_[block] += 1;
    total_live_ += 1;
    total_free_ -= 1;
    counters_.physical_writes += 1;
    if (kind == WriteKind::Application)
        counters_.logical_writes += 1;
    else
        counters_.migrations += 1;
}

void FlashDevice::invalidate_page(Ppa addr) {
    check_page(addr);
    if (pages_[static_cast<std::size_t>(addr)] != PageState::Live)
        throw ConstraintViolation("invalidate of non-live page " + std::to_string(addr));
    pages_[static_cast<std::size_t>(addr)] = PageState::Dead;
    live_count_[block_of(addr)] -= 1;
    total_live_ -= 1;
}

void FlashDevice::erase_block(BlockId block) {
    if (block < 0 || block >= geom_.total_blocks())
        throw ConstraintViolation("block id out of range: " + std::to_string(block));
    if (live_count_[block] != 0)
        throw ConstraintViolation("erase of block " + std::to_string(block) + " with " +
                                  std::to_string(live_count_[block]) + " live pages");
    Ppa base = first_page(block);
    for (int i = 0; i < write_ptr_[block]; ++i) {
        pages_[static_cast<std::size_t>(base + i)] = PageState::Free;
        total_free_ += 1;
    }
    write_ptr_[block] = 0;
    erase_seq_[block] = ++erase_stamp_;
    counters_.erases += 1;
}

void FlashDevice::audit() const {
    std::int64_t live = 0, free = 0;
    std::vector<int> per_block(write_ptr_.size(), 0);
    for (std::size_t p = 0; p < pages_.size(); ++p) {
        switch (pages_[p]) {
            case PageState::Live:
                live += 1;
                per_block[static_cast<std::size_t>(block_of(static_cast<Ppa>(p)))] += 1;
                break;
            case PageState::Free:
                free += 1;
                if (page_index(static_cast<Ppa>(p)) < write_ptr_[block_of(static_cast<Ppa>(p))])
                    throw ConstraintViolation("free page below write pointer");
                break;
            case PageState::Dead:
                break;
        }
    }
    if (live != total_live_ || free != total_free_)
        throw ConstraintViolation("page tallies out of sync");
    for (std::size_t b = 0; b < per_block.size(); ++b)
        if (per_block[b] != live_count_[b])
            throw ConstraintViolation("live count mismatch in block " + std::to_string(b));
    if (counters_.physical_writes != counters_.logical_writes + counters_.migrations)
        throw ConstraintViolation("physical_writes != logical_writes + migrations");
}

}  // namespace ftlsim
