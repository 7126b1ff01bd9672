#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ftlsim/device.hpp"

using namespace ftlsim;

namespace {
FlashGeometry tiny() { return FlashGeometry{1, 2, 4, 4, 4096}; }  // 32 pages
}

TEST_CASE("geometry arithmetic and validation") {
    FlashGeometry g{4, 2, 1024, 128, 16 * 1024};
    CHECK(g.num_luns() == 8);
    CHECK(g.total_blocks() == 8192);
    CHECK(g.total_pages() == 1048576);
    CHECK_NOTHROW(g.validate());
    g.channels = 0;
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}

TEST_CASE("pages program in order within a block") {
    FlashDevice dev(tiny());
    dev.write_page(0, WriteKind::Application);
    CHECK(dev.write_pointer(0) == 1);
    CHECK(dev.page_state(0) == PageState::Live);

    CHECK_THROWS_AS(dev.write_page(2, WriteKind::Application), ConstraintViolation);
    CHECK_THROWS_AS(dev.write_page(0, WriteKind::Application), ConstraintViolation);

    dev.write_page(1, WriteKind::Application);
    CHECK(dev.write_pointer(0) == 2);
}

TEST_CASE("invalidation drives the page state machine") {
    FlashDevice dev(tiny());
    dev.write_page(0, WriteKind::Application);
    dev.invalidate_page(0);
    CHECK(dev.page_state(0) == PageState::Dead);
    CHECK_THROWS_AS(dev.invalidate_page(0), ConstraintViolation);  // already dead
    CHECK_THROWS_AS(dev.invalidate_page(1), ConstraintViolation);  // still free
}

TEST_CASE("erase requires a dead block and resets it") {
    FlashDevice dev(tiny());
    for (int i = 0; i < 4; ++i) dev.write_page(i, WriteKind::Application);
    CHECK(dev.block_full(0));
    CHECK_THROWS_AS(dev.erase_block(0), ConstraintViolation);  // live pages remain

    for (int i = 0; i < 4; ++i) dev.invalidate_page(i);
    dev.erase_block(0);
    CHECK(dev.write_pointer(0) == 0);
    CHECK(dev.erase_seq(0) == 1);
    CHECK(dev.counters().erases == 1);
    dev.write_page(0, WriteKind::Application);  // usable again
    CHECK(dev.page_state(0) == PageState::Live);
}

TEST_CASE("counters balance physical against logical and migrations") {
    FlashDevice dev(tiny());
    dev.write_page(0, WriteKind::Application);
    dev.write_page(1, WriteKind::Migration);
    dev.write_page(2, WriteKind::Application);
    const auto& c = dev.counters();
    CHECK(c.logical_writes == 2);
    CHECK(c.migrations == 1);
    CHECK(c.physical_writes == c.logical_writes + c.migrations);
}

TEST_CASE("page conservation under a random valid op sequence") {
    FlashDevice dev(tiny());
    std::mt19937_64 rng(99);
    std::int64_t pba = dev.geometry().total_pages();
    for (int step = 0; step < 2000; ++step) {
        int choice = static_cast<int>(rng() % 3);
        if (choice == 0) {  // program the next page of a random block
            BlockId b = static_cast<BlockId>(rng() % dev.geometry().total_blocks());
            if (!dev.block_full(b))
                dev.write_page(dev.first_page(b) + dev.write_pointer(b),
                               WriteKind::Application);
        } else if (choice == 1) {  // invalidate a random live page
            Ppa p = static_cast<Ppa>(rng() % pba);
            if (dev.page_state(p) == PageState::Live) dev.invalidate_page(p);
        } else {  // erase a random block if it has no live pages
            BlockId b = static_cast<BlockId>(rng() % dev.geometry().total_blocks());
            if (dev.live_count(b) == 0 && dev.write_pointer(b) > 0) dev.erase_block(b);
        }
        CHECK(dev.total_free() + dev.total_live() + dev.total_dead() == pba);
    }
    dev.audit();
}

TEST_CASE("round robin lun selection") {
    int cursor = 0;
    auto always = [](LunId) { return true; };
    CHECK(select_lun(2, always, cursor) == 0);
    CHECK(select_lun(2, always, cursor) == 1);
    CHECK(select_lun(2, always, cursor) == 0);
    CHECK(select_lun(2, always, cursor) == 1);

    cursor = 0;
    auto only_one = [](LunId l) { return l == 1; };
    CHECK(select_lun(2, only_one, cursor) == 1);
    CHECK(select_lun(2, only_one, cursor) == 1);

    cursor = 0;
    auto none = [](LunId) { return false; };
    CHECK(select_lun(2, none, cursor) == -1);
}
