#pragma once

// Per-period rebasement rate.
//
// The combined rate is an initial incentive that decays as 1/(t + t0), plus a
// volume-driven term clamped to +-gas_cap, where gas_cap is the rate at which
// the supply growth attributable to this period's transactions is worth exactly
// the gas those transactions burned. All functions are pure.

#include <toroid/config.hpp>
#include <toroid/numerics.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace toroid {

struct PeriodMetrics {
    std::uint64_t t = 0;      // period ordinal since launch
    std::uint64_t v = 0;      // wallet transfers this period
    std::uint64_t v_prev = 0; // wallet transfers previous period
    Amount s;                 // TRD supply at period start
};

struct RateBreakdown {
    Rate r_initial;
    Rate r_vol;
    Rate r_gas_cap;
    Rate r_combined;
};

/// Lowest admissible combined rate; keeps 1 + R >= 0.01.
inline constexpr Rate kRateFloor = Rate::from_ppb(-990'000'000);

namespace detail {

// Natural log of a positive integer using only IEEE basic operations, so the
// result is bit-identical on every conforming platform.
inline double ln_u64(std::uint64_t n) {
    constexpr double kLn2 = 0.69314718055994530942;
    constexpr double kSqrtHalf = 0.70710678118654752440;
    int e = 0;
    double m = std::frexp(static_cast<double>(n), &e); // m in [0.5, 1)
    if (m < kSqrtHalf) {
        m *= 2.0;
        --e;
    }
    // ln m = 2 atanh(z), |z| <= 0.172
    const double z = (m - 1.0) / (m + 1.0);
    const double z2 = z * z;
    double term = z;
    double sum = 0.0;
    for (int k = 1; k < 60; k += 2) {
        sum += term / k;
        term *= z2;
        if (term == 0.0) break;
    }
    return static_cast<double>(e) * kLn2 + 2.0 * sum;
}

} // namespace detail

/// 1/(t + t0), floor-rounded to ppb.
inline Rate initial_rate(std::uint64_t t, const RebaseConfig& cfg) {
    return Rate::from_ppb(static_cast<std::int64_t>(static_cast<std::uint64_t>(kUnit) / (t + cfg.t0)));
}

/// v * (gas_cost_base / peg_ratio) / s, floor-rounded to ppb and saturated at
/// Rate::kMaxPpb.
inline Rate gas_cap_rate(const PeriodMetrics& m, const RebaseConfig& cfg) {
    if (m.s.raw == 0) fail(ErrorCode::ZeroSupply, "gas cap needs a positive supply");
    const wide num = wide(m.v) * wide(cfg.gas_cost_base.raw) * wide(static_cast<std::uint64_t>(kUnit)) *
                     wide(static_cast<std::uint64_t>(kUnit));
    const wide den = wide(static_cast<std::uint64_t>(cfg.peg_ratio.ppb)) * wide(m.s.raw);
    const wide q = num / den;
    if (q > wide(static_cast<std::uint64_t>(Rate::kMaxPpb))) return Rate::from_ppb(Rate::kMaxPpb);
    return Rate::from_ppb(static_cast<std::int64_t>(q));
}

/// k_v * ln(max(v,1) / max(v_prev,1)), floor-rounded to ppb.
inline Rate volume_rate(const PeriodMetrics& m, const RebaseConfig& cfg) {
    const std::uint64_t v = std::max<std::uint64_t>(m.v, 1);
    const std::uint64_t prev = std::max<std::uint64_t>(m.v_prev, 1);
    if (v == prev) return Rate{};
    const double log_ratio = detail::ln_u64(v) - detail::ln_u64(prev);
    const double scaled = static_cast<double>(cfg.k_v.ppb) * log_ratio;
    return Rate::from_ppb(static_cast<std::int64_t>(std::floor(scaled)));
}

inline RateBreakdown combined_rate(const PeriodMetrics& m, const RebaseConfig& cfg) {
    RateBreakdown out;
    out.r_initial = initial_rate(m.t, cfg);
    out.r_vol = volume_rate(m, cfg);
    out.r_gas_cap = gas_cap_rate(m, cfg);

    Rate volume_part = out.r_vol;
    if (cfg.gas_cap_enabled) volume_part = std::clamp(out.r_vol, -out.r_gas_cap, out.r_gas_cap);
    Rate r = out.r_initial + volume_part;
    if (cfg.floor_zero_during_bootstrap && m.t < cfg.bootstrap_periods) r = std::max(r, Rate{});
    out.r_combined = std::max(r, kRateFloor);
    return out;
}

} // namespace toroid
