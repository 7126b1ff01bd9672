#pragma once

#include <cstdint>

// Analytical model of garbage-collection write-amplification under a
// uniform random update workload. All functions are pure and thread-safe.

namespace ftlsim {

struct ModelParams {
    std::int64_t pages_per_block = 128;  // B
    std::int64_t logical_pages = 0;      // LBA
    std::int64_t physical_pages = 0;     // PBA

    double ratio() const { return static_cast<double>(logical_pages) / physical_pages; }
    std::int64_t op_pages() const { return physical_pages - logical_pages; }
    void validate() const;  // throws std::invalid_argument on a bad combination
};

struct EquilibriumPoint {
    double delta = 0.0;  // fraction of pages migrated per GC, in (0,1)
    double wa = 1.0;     // 1 / (1 - delta)
};

// Expected live pages left in a freshly written block after `writes` uniform
// random updates over the logical space: B * exp(-X/LBA).
double live_pages_after(double writes, const ModelParams& params);

// Inverse of live_pages_after: number of uniform updates until the expected
// live count drops to `live_pages`: LBA * ln(B/G).
double writes_until_live_count(double live_pages, const ModelParams& params);

// Unique delta in (0,1) solving ratio = (delta - 1) / ln(delta), found by
// bisection to 1e-12 absolute. Strictly increasing in `ratio`.
double delta_at_equilibrium(double ratio);

// Same quantity through the principal Lambert W branch:
//   delta = -ratio * W0(-(1/ratio) * exp(-1/ratio)).
double delta_at_equilibrium_lambert(double ratio);

// Principal branch of the Lambert W function, w * exp(w) = z, for z >= -1/e.
// Halley iteration; residual |w e^w - z| <= 1e-12 * max(1, |z|).
double lambert_w0(double z);

// WA = 1 / (1 - delta) for delta in [0, 1).
double write_amplification(double delta);

inline EquilibriumPoint equilibrium_point(double ratio) {
    double d = delta_at_equilibrium(ratio);
    return EquilibriumPoint{d, write_amplification(d)};
}

}  // namespace ftlsim
