#include "ftlsim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace ftlsim {

void KModalSpec::validate(Lpa logical_pages) const {
    if (groups.empty()) throw std::invalid_argument("k-modal spec has no groups");
    double total = 0.0;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        const auto& g = groups[i];
        if (g.first < 0 || g.last <= g.first || g.last > logical_pages)
            throw std::invalid_argument("k-modal group " + std::to_string(i) +
                                        " has a bad address range");
        if (g.freq < 0.0) throw std::invalid_argument("negative update frequency");
        total += g.freq;
        for (std::size_t j = i + 1; j < groups.size(); ++j)
            if (g.first < groups[j].last && groups[j].first < g.last)
                throw std::invalid_argument("k-modal group ranges overlap");
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::invalid_argument("k-modal frequencies must sum to 1");
    for (std::size_t i = 1; i < swaps.size(); ++i)
        if (swaps[i].write_index <= swaps[i - 1].write_index)
            throw std::invalid_argument("swap indices must be strictly increasing");
    for (const auto& s : swaps)
        if (s.group_a < 0 || s.group_b < 0 ||
            s.group_a >= static_cast<int>(groups.size()) ||
            s.group_b >= static_cast<int>(groups.size()))
            throw std::invalid_argument("swap references an unknown group");
}

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_below: empty range");
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                          std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

WorkloadEvent UniformSource::next() {
    ++emitted_;
    return WorkloadEvent{static_cast<Lpa>(uniform_below(rng_, static_cast<std::uint64_t>(lba_)))};
}

KModalSource::KModalSource(KModalSpec spec, Lpa logical_pages, std::uint64_t seed)
    : spec_(std::move(spec)), rng_(seed) {
    spec_.validate(logical_pages);
}

void KModalSource::apply_due_swaps() {
    while (next_swap_ < spec_.swaps.size() &&
           spec_.swaps[next_swap_].write_index <= emitted_) {
        const auto& s = spec_.swaps[next_swap_];
        std::swap(spec_.groups[s.group_a].freq, spec_.groups[s.group_b].freq);
        ++next_swap_;
    }
}

WorkloadEvent KModalSource::next() {
    apply_due_swaps();
    ++emitted_;
    double u = uniform01(rng_);
    double acc = 0.0;
    std::size_t pick = spec_.groups.size() - 1;
    for (std::size_t i = 0; i < spec_.groups.size(); ++i) {
        acc += spec_.groups[i].freq;
        if (u < acc) {
            pick = i;
            break;
        }
    }
    const auto& g = spec_.groups[pick];
    Lpa off = static_cast<Lpa>(uniform_below(rng_, static_cast<std::uint64_t>(g.span())));
    return WorkloadEvent{g.first + off};
}

int KModalSource::group_of(Lpa lpa) const {
    for (std::size_t i = 0; i < spec_.groups.size(); ++i)
        if (lpa >= spec_.groups[i].first && lpa < spec_.groups[i].last)
            return static_cast<int>(i);
    return -1;
}

std::vector<int> KModalSource::ranks_by_hit_rate() const {
    std::vector<std::size_t> order(spec_.groups.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto rate = [&](std::size_t i) {
        return spec_.groups[i].freq / static_cast<double>(spec_.groups[i].span());
    };
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rate(a) < rate(b); });
    std::vector<int> rank(spec_.groups.size(), 0);
    for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<int>(r);
    return rank;
}

std::vector<Lpa> load_trace(const std::string& path, Lpa logical_pages) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open trace file: " + path);
    std::vector<Lpa> events;
    std::string line;
    std::int64_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::size_t start = line.find_first_not_of(" \t\r");
        if (start == std::string::npos || line[start] == '#') continue;
        std::size_t end = line.find_last_not_of(" \t\r");
        std::string token = line.substr(start, end - start + 1);
        Lpa value = 0;
        try {
            std::size_t used = 0;
            value = static_cast<Lpa>(std::stoll(token, &used));
            if (used != token.size() || token[0] == '-') throw std::invalid_argument(token);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": malformed trace line '" + token + "'");
        }
        if (value < 0 || value >= logical_pages)
            throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                     ": address " + std::to_string(value) +
                                     " outside logical space of " +
                                     std::to_string(logical_pages) + " pages");
        events.push_back(value);
    }
    return events;
}

TraceSource::TraceSource(const std::string& path, Lpa logical_pages)
    : events_(load_trace(path, logical_pages)) {}

WorkloadEvent TraceSource::next() {
    if (pos_ >= events_.size()) throw std::runtime_error("trace exhausted");
    ++emitted_;
    return WorkloadEvent{events_[pos_++]};
}

int OracleClassifier::ladder_size() const {
    return source_ ? static_cast<int>(source_->spec().groups.size()) : 1;
}

double OracleClassifier::page_rate(Lpa lpa) const {
    if (!source_) return 0.0;
    int g = source_->group_of(lpa);
    if (g < 0) return 0.0;
    const auto& grp = source_->spec().groups[static_cast<std::size_t>(g)];
    return grp.freq / static_cast<double>(grp.span());
}

int OracleClassifier::classify(Lpa lpa) const {
    if (!source_) return 0;
    int g = source_->group_of(lpa);
    if (g < 0) return 0;  // outside every range: treat as coldest
    if (cached_version_ != source_->swap_version()) {
        ranks_ = source_->ranks_by_hit_rate();
        cached_version_ = source_->swap_version();
    }
    return ranks_[static_cast<std::size_t>(g)];
}

}  // namespace ftlsim
