#pragma once

#include <cstdint>
#include <vector>

#include "ftlsim/device.hpp"

// Dual-filter temperature detection: an active and a passive membership
// filter per group, rotated once per group-sized write interval.

namespace ftlsim {

// Fixed two-hash Bloom filter. Bit count is sized from the projected element
// count and the target false-positive rate: with k = 2 hash functions,
// fpr = (1 - e^(-2n/m))^2, so m = -2n / ln(1 - sqrt(fpr)).
class BloomFilter {
public:
    BloomFilter(std::int64_t capacity, double false_positive_rate);

    void insert(std::uint64_t key);
    bool maybe_contains(std::uint64_t key) const;
    std::int64_t bit_count() const { return static_cast<std::int64_t>(bits_.size()); }

private:
    std::vector<bool> bits_;
};

enum class Temperature : unsigned char { Stay, Promote, Demote };

// Per-group detector state. Rotation happens every `capacity` writes into
// the group, where capacity tracks the group's current page count.
class TemperatureDetector {
public:
    TemperatureDetector(std::int64_t capacity, double false_positive_rate);

    // Classify before recording: an application update seen by both filters
    // promotes; a GC migration seen by neither demotes; anything else stays.
    Temperature classify(Lpa lpa, WriteKind kind) const;

    // Records a write into the group. Application writes enter the active
    // filter; every write advances the rotation interval. `current_size`
    // sizes the next filter when the interval turns over.
    void record(Lpa lpa, WriteKind kind, std::int64_t current_size);

    void reset(std::int64_t capacity);

private:
    double fpr_;
    std::int64_t interval_len_;
    std::int64_t writes_in_interval_ = 0;
    BloomFilter active_;
    BloomFilter passive_;
};

}  // namespace ftlsim
