#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ftlsim/bloom.hpp"

using namespace ftlsim;

TEST_CASE("bloom filter has no false negatives") {
    BloomFilter f(1000, 0.3);
    for (std::uint64_t k = 0; k < 1000; ++k) f.insert(k * 7919);
    for (std::uint64_t k = 0; k < 1000; ++k) CHECK(f.maybe_contains(k * 7919));
}

TEST_CASE("bloom filter false positive rate is near the target") {
    BloomFilter f(2000, 0.3);
    for (std::uint64_t k = 0; k < 2000; ++k) f.insert(k);
    int fp = 0;
    const int probes = 20000;
    for (int k = 0; k < probes; ++k)
        if (f.maybe_contains(1000000 + static_cast<std::uint64_t>(k))) ++fp;
    double rate = static_cast<double>(fp) / probes;
    CHECK(rate < 0.45);
    CHECK(rate > 0.15);
}

TEST_CASE("filter sizing matches the two-hash formula") {
    // m = -2n / ln(1 - sqrt(0.3)) = about 2.52 bits per element.
    BloomFilter f(10000, 0.3);
    CHECK(f.bit_count() >= 24000);
    CHECK(f.bit_count() <= 27000);
}

TEST_CASE("repeated updates spanning a rotation promote") {
    TemperatureDetector td(4, 0.3);
    const Lpa addr = 1234567;

    // First sighting: unknown address stays put.
    CHECK(td.classify(addr, WriteKind::Application) == Temperature::Stay);
    td.record(addr, WriteKind::Application, 4);

    // Fill the interval so the filters rotate (interval length 4).
    for (Lpa f = 1; f <= 3; ++f) td.record(900 + f, WriteKind::Application, 4);

    // Second update after rotation: present in the passive filter only.
    CHECK(td.classify(addr, WriteKind::Application) == Temperature::Stay);
    td.record(addr, WriteKind::Application, 4);

    // Third update: in both filters now.
    CHECK(td.classify(addr, WriteKind::Application) == Temperature::Promote);
}

TEST_CASE("unknown migrated pages demote") {
    TemperatureDetector td(64, 0.3);
    // A GC migration of an address never seen by either filter.
    CHECK(td.classify(55555, WriteKind::Migration) == Temperature::Demote);
    // An application write of an unseen address just stays.
    CHECK(td.classify(55555, WriteKind::Application) == Temperature::Stay);
    // Once recorded, a migration no longer demotes.
    td.record(55555, WriteKind::Application, 64);
    CHECK(td.classify(55555, WriteKind::Migration) == Temperature::Stay);
}

TEST_CASE("reset clears both filters") {
    TemperatureDetector td(8, 0.3);
    td.record(1, WriteKind::Application, 8);
    td.reset(8);
    CHECK(td.classify(1, WriteKind::Migration) == Temperature::Demote);
}
