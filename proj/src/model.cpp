#include "ftlsim/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ftlsim {

namespace {

constexpr double kBisectionTol = 1e-12;

[[noreturn]] void domain_error(const std::string& what) {
    throw std::domain_error(what);
}

// (delta - 1) / ln(delta), the equilibrium ratio LBA/PBA as a function of
// delta. Strictly increasing on (0,1) with limits 0 and 1.
double ratio_of_delta(double delta) {
    return (delta - 1.0) / std::log(delta);
}

}  // namespace

void ModelParams::validate() const {
    if (pages_per_block < 1) throw std::invalid_argument("pages_per_block must be >= 1");
    if (logical_pages <= 0) throw std::invalid_argument("logical_pages must be positive");
    if (physical_pages <= logical_pages)
        throw std::invalid_argument("physical_pages must exceed logical_pages");
    if (physical_pages % pages_per_block != 0)
        throw std::invalid_argument("physical_pages must be a multiple of pages_per_block");
}

double live_pages_after(double writes, const ModelParams& params) {
    if (writes < 0.0) domain_error("live_pages_after: negative write count");
    return static_cast<double>(params.pages_per_block) *
           std::exp(-writes / static_cast<double>(params.logical_pages));
}

double writes_until_live_count(double live_pages, const ModelParams& params) {
    double b = static_cast<double>(params.pages_per_block);
    if (live_pages <= 0.0 || live_pages > b)
        domain_error("writes_until_live_count: live_pages must lie in (0, B]");
    return static_cast<double>(params.logical_pages) * std::log(b / live_pages);
}

double delta_at_equilibrium(double ratio) {
    if (!(ratio > 0.0 && ratio < 1.0))
        domain_error("delta_at_equilibrium: ratio must lie in (0, 1)");
    // Bisection on t = ln(delta): the function is still monotone there, and
    // the log domain resolves the tiny deltas of small ratios (delta ~
    // e^(-1/r)) that a linear bracket cannot separate. |d delta / d t| =
    // delta <= 1, so a 1e-12 bracket in t meets the same absolute tolerance.
    double lo = -700.0;
    double hi = -1e-18;
    while (hi - lo > kBisectionTol) {
        double mid = 0.5 * (lo + hi);
        if (ratio_of_delta(std::exp(mid)) < ratio)
            lo = mid;
        else
            hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

double lambert_w0(double z) {
    constexpr double kBranchPoint = -0.36787944117144233;  // -1/e
    if (z < kBranchPoint) {
        // Allow values a hair below -1/e that arise from rounding of the
        // argument itself.
        if (z > kBranchPoint - 1e-15) z = kBranchPoint;
        else domain_error("lambert_w0: argument below -1/e");
    }
    if (z == 0.0) return 0.0;

    double w;
    if (z < -0.25 / 2.718281828459045) {
        // Branch-point series in p = sqrt(2 (e z + 1)).
        double p = std::sqrt(2.0 * (2.718281828459045 * z + 1.0));
        w = -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p;
    } else if (z < 1.0) {
        w = z;  // W(z) ~ z near 0
    } else {
        double lz = std::log(z);
        w = lz - std::log(lz > 1.0 ? lz : 1.0);
    }

    double tol = 1e-12 * std::max(1.0, std::abs(z));
    for (int iter = 0; iter < 64; ++iter) {
        double ew = std::exp(w);
        double f = w * ew - z;
        if (std::abs(f) <= tol) return w;
        double wp1 = w + 1.0;
        // Halley step
        double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        if (denom == 0.0) break;
        w -= f / denom;
    }
    double residual = std::abs(w * std::exp(w) - z);
    if (residual > tol * 16.0)
        throw std::runtime_error("lambert_w0: iteration failed to converge");
    return w;
}

double delta_at_equilibrium_lambert(double ratio) {
    if (!(ratio > 0.0 && ratio < 1.0))
        domain_error("delta_at_equilibrium_lambert: ratio must lie in (0, 1)");
    double u = 1.0 / ratio;
    double z = -u * std::exp(-u);
    return -ratio * lambert_w0(z);
}

double write_amplification(double delta) {
    if (!(delta >= 0.0 && delta < 1.0))
        domain_error("write_amplification: delta must lie in [0, 1)");
    return 1.0 / (1.0 - delta);
}

}  // namespace ftlsim
