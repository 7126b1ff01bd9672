#include "ftlsim/bloom.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace ftlsim {

namespace {

// splitmix64; cheap, well mixed, and stable across platforms.
std::uint64_t mix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::size_t size_bits(std::int64_t capacity, double fpr) {
    if (!(fpr > 0.0 && fpr < 1.0))
        throw std::invalid_argument("bloom false-positive rate must lie in (0,1)");
    double n = static_cast<double>(std::max<std::int64_t>(capacity, 1));
    double m = -2.0 * n / std::log(1.0 - std::sqrt(fpr));
    return static_cast<std::size_t>(std::max(64.0, std::ceil(m)));
}

}  // namespace

BloomFilter::BloomFilter(std::int64_t capacity, double false_positive_rate)
    : bits_(size_bits(capacity, false_positive_rate), false) {}

void BloomFilter::insert(std::uint64_t key) {
    std::uint64_t h1 = mix(key);
    std::uint64_t h2 = mix(h1 ^ 0xda3e39cb94b95bdbULL) | 1;
    bits_[static_cast<std::size_t>(h1 % bits_.size())] = true;
    bits_[static_cast<std::size_t>((h1 + h2) % bits_.size())] = true;
}

bool BloomFilter::maybe_contains(std::uint64_t key) const {
    std::uint64_t h1 = mix(key);
    std::uint64_t h2 = mix(h1 ^ 0xda3e39cb94b95bdbULL) | 1;
    return bits_[static_cast<std::size_t>(h1 % bits_.size())] &&
           bits_[static_cast<std::size_t>((h1 + h2) % bits_.size())];
}

TemperatureDetector::TemperatureDetector(std::int64_t capacity, double false_positive_rate)
    : fpr_(false_positive_rate),
      interval_len_(std::max<std::int64_t>(capacity, 1)),
      active_(capacity, false_positive_rate),
      passive_(capacity, false_positive_rate) {}

Temperature TemperatureDetector::classify(Lpa lpa, WriteKind kind) const {
    std::uint64_t key = static_cast<std::uint64_t>(lpa);
    bool in_active = active_.maybe_contains(key);
    bool in_passive = passive_.maybe_contains(key);
    if (kind == WriteKind::Application && in_active && in_passive) return Temperature::Promote;
    if (kind == WriteKind::Migration && !in_active && !in_passive) return Temperature::Demote;
    return Temperature::Stay;
}

void TemperatureDetector::record(Lpa lpa, WriteKind kind, std::int64_t current_size) {
    if (kind == WriteKind::Application)
        active_.insert(static_cast<std::uint64_t>(lpa));
    if (++writes_in_interval_ >= interval_len_) {
        passive_ = std::move(active_);
        active_ = BloomFilter(current_size, fpr_);
        interval_len_ = std::max<std::int64_t>(current_size, 1);
        writes_in_interval_ = 0;
    }
}

void TemperatureDetector::reset(std::int64_t capacity) {
    active_ = BloomFilter(capacity, fpr_);
    passive_ = BloomFilter(capacity, fpr_);
    interval_len_ = std::max<std::int64_t>(capacity, 1);
    writes_in_interval_ = 0;
}

}  // namespace ftlsim
