#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ftlsim/ftl.hpp"

using namespace ftlsim;

namespace {

FlashGeometry tiny() { return FlashGeometry{1, 1, 8, 4, 4096}; }

// Fills block `b` completely, then invalidates all but `live` of its pages.
void shape_block(FlashDevice& dev, BlockId b, int live) {
    for (int i = 0; i < 4; ++i)
        dev.write_page(dev.first_page(b) + i, WriteKind::Application);
    for (int i = live; i < 4; ++i) dev.invalidate_page(dev.first_page(b) + i);
}

// Erases blocks in the given order to stamp their age, then refills them.
void stamp_ages(FlashDevice& dev, const std::vector<BlockId>& order,
                const std::vector<int>& live) {
    for (BlockId b : order) {
        for (int i = 0; i < dev.write_pointer(b); ++i)
            if (dev.page_state(dev.first_page(b) + i) == PageState::Live)
                dev.invalidate_page(dev.first_page(b) + i);
        dev.erase_block(b);
    }
    for (std::size_t k = 0; k < order.size(); ++k) shape_block(dev, order[k], live[k]);
}

}  // namespace

TEST_CASE("mapping translate and remap") {
    MappingTable mt(16, 32);
    CHECK(!mt.translate(3).has_value());
    mt.remap(3, 10);
    CHECK(mt.translate(3) == 10);
    CHECK(mt.reverse(10) == 3);
    mt.remap(3, 11);
    CHECK(mt.translate(3) == 11);
    CHECK(mt.reverse(10) == kNoLpa);
    CHECK(mt.mapped_count() == 1);
    CHECK_THROWS_AS(mt.translate(16), std::domain_error);
    CHECK_THROWS_AS(mt.translate(-1), std::domain_error);
}

TEST_CASE("lru victim is the least recently erased full block") {
    FlashDevice dev(tiny());
    for (BlockId b : {0, 1, 2}) shape_block(dev, b, 2);
    // Erase order 1, 0, 2 gives seqs 1: oldest=block1.
    stamp_ages(dev, {1, 0, 2}, {2, 2, 2});
    std::vector<BlockId> full{0, 1, 2};
    CHECK(pick_victim_lru(full, dev) == 1);

    std::vector<BlockId> single{2};
    CHECK(pick_victim_lru(single, dev) == 2);

    // Equal (never-stamped) sequence numbers fall back to the lowest id.
    FlashDevice fresh(tiny());
    for (BlockId b : {3, 4, 5}) shape_block(fresh, b, 1);
    std::vector<BlockId> tied{4, 3, 5};
    CHECK(pick_victim_lru(tied, fresh) == 3);

    std::vector<BlockId> none;
    CHECK(!pick_victim_lru(none, dev).has_value());
}

TEST_CASE("greedy victim has the fewest live pages") {
    FlashDevice dev(tiny());
    // live counts (3, 2, 2) with erase order giving seqs block0=1,block1=2,block2=3;
    // the two-way tie on live count resolves to the oldest seq.
    for (BlockId b : {0, 1, 2}) shape_block(dev, b, 0);
    stamp_ages(dev, {0, 1, 2}, {3, 2, 2});
    std::vector<BlockId> full{0, 1, 2};
    CHECK(pick_victim_greedy(full, dev) == 1);

    // All equal live counts: oldest erase wins.
    FlashDevice dev2(tiny());
    for (BlockId b : {0, 1, 2}) shape_block(dev2, b, 0);
    stamp_ages(dev2, {2, 0, 1}, {1, 1, 1});
    CHECK(pick_victim_greedy(full, dev2) == 2);

    // A fully dead block is a free erase and always preferred.
    FlashDevice dev3(tiny());
    for (BlockId b : {0, 1, 2}) shape_block(dev3, b, 0);
    stamp_ages(dev3, {0, 1, 2}, {2, 0, 3});
    CHECK(pick_victim_greedy(full, dev3) == 1);
}

TEST_CASE("policy dispatch") {
    FlashDevice dev(tiny());
    for (BlockId b : {0, 1}) shape_block(dev, b, 0);
    // Block 1 erased first (oldest) holding 3 live; block 0 newest with 1.
    stamp_ages(dev, {1, 0}, {3, 1});
    std::vector<BlockId> full{0, 1};
    CHECK(pick_victim(CleaningPolicy::Greedy, full, dev) == 0);  // fewest live
    CHECK(pick_victim(CleaningPolicy::Lru, full, dev) == 1);     // oldest erase
}

TEST_CASE("block group map") {
    BlockGroupMap bgm(8);
    CHECK(bgm.group_of(3) == 0);
    bgm.assign(3, 7);
    CHECK(bgm.group_of(3) == 7);
}
