#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ftlsim/device.hpp"

// Deterministic logical-write generators, the frequency-swap scheduler, the
// trace loader, and the oracle temperature classifier.

namespace ftlsim {

struct WorkloadEvent {
    Lpa lpa = 0;
};

// One logical-address range with an update probability.
struct KModalGroup {
    Lpa first = 0;     // inclusive
    Lpa last = 0;      // exclusive
    double freq = 0.0; // p_x

    Lpa span() const { return last - first; }
};

struct SwapEvent {
    std::int64_t write_index = 0;  // takes effect before this event is drawn
    int group_a = 0;
    int group_b = 0;
};

struct KModalSpec {
    std::vector<KModalGroup> groups;
    std::vector<SwapEvent> swaps;  // strictly increasing write_index
    void validate(Lpa logical_pages) const;
};

// Portable uniform draw in [0, n); rejection sampling over the raw 64-bit
// stream so sequences do not depend on the standard library's distribution
// implementation. RNG: std::mt19937_64 (recorded in run metadata).
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n);

inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

class WorkloadSource {
public:
    virtual ~WorkloadSource() = default;
    virtual WorkloadEvent next() = 0;
    virtual bool exhausted() const { return false; }
    std::int64_t emitted() const { return emitted_; }

protected:
    std::int64_t emitted_ = 0;
};

class UniformSource final : public WorkloadSource {
public:
    UniformSource(Lpa logical_pages, std::uint64_t seed)
        : lba_(logical_pages), rng_(seed) {}
    WorkloadEvent next() override;

private:
    Lpa lba_;
    std::mt19937_64 rng_;
};

class KModalSource final : public WorkloadSource {
public:
    KModalSource(KModalSpec spec, Lpa logical_pages, std::uint64_t seed);
    WorkloadEvent next() override;

    // True group of an address under the current (post-swap) frequencies,
    // or -1 if the address falls outside every range.
    int group_of(Lpa lpa) const;
    // Ordinals of groups sorted by current per-page update rate, coldest
    // first; index by group, value = rank.
    std::vector<int> ranks_by_hit_rate() const;
    const KModalSpec& spec() const { return spec_; }
    // Bumps whenever a swap takes effect; lets callers cache rank tables.
    std::size_t swap_version() const { return next_swap_; }

private:
    void apply_due_swaps();

    KModalSpec spec_;
    std::mt19937_64 rng_;
    std::size_t next_swap_ = 0;
};

// Replays addresses from a text trace: one unsigned decimal logical page
// address per line, `#` lines ignored. The whole file is validated against
// the logical space up front; errors carry the line number.
class TraceSource final : public WorkloadSource {
public:
    TraceSource(const std::string& path, Lpa logical_pages);
    WorkloadEvent next() override;
    bool exhausted() const override { return pos_ >= events_.size(); }
    std::size_t size() const { return events_.size(); }

private:
    std::vector<Lpa> events_;
    std::size_t pos_ = 0;
};

std::vector<Lpa> load_trace(const std::string& path, Lpa logical_pages);

// Knows the precise update probability of every page; classifies an address
// to its workload group's temperature rank (coldest = 0). Only meaningful
// for k-modal sources.
class OracleClassifier {
public:
    explicit OracleClassifier(const KModalSource* source) : source_(source) {}
    bool available() const { return source_ != nullptr; }
    int ladder_size() const;
    // Temperature rank of the address, coldest first.
    int classify(Lpa lpa) const;
    // True per-page update probability of the address right now.
    double page_rate(Lpa lpa) const;
    // Bumps when a swap changes the truth.
    std::size_t version() const { return source_ ? source_->swap_version() : 0; }

private:
    const KModalSource* source_;
    mutable std::vector<int> ranks_;
    mutable std::size_t cached_version_ = static_cast<std::size_t>(-1);
};

}  // namespace ftlsim
