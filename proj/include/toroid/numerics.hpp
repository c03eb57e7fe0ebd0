#pragma once

// Fixed-point amounts, rates and the rebase index.
//
// Amounts are unsigned nano-units (1 token == 1'000'000'000 raw). Rates are
// signed parts-per-billion. The rebase index is an exact rational with 128-bit
// components; products that can exceed 128 bits go through 256-bit
// intermediates. Rounding is floor unless a function says otherwise.

#include <toroid/error.hpp>

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <charconv>
#include <compare>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

namespace toroid {

using u128 = unsigned __int128;
using i128 = __int128;
using wide = boost::multiprecision::uint256_t;

inline constexpr std::int64_t kUnit = 1'000'000'000;

namespace detail {

inline wide to_wide(u128 v) {
    wide w = static_cast<std::uint64_t>(v >> 64);
    w <<= 64;
    w |= static_cast<std::uint64_t>(v);
    return w;
}

inline u128 to_u128(const wide& w) {
    if (w > to_wide(~u128{0})) fail(ErrorCode::Overflow, "value exceeds 128 bits");
    const wide lo_mask = (wide(1) << 64) - 1;
    const auto lo = static_cast<std::uint64_t>(w & lo_mask);
    const auto hi = static_cast<std::uint64_t>(w >> 64);
    return (static_cast<u128>(hi) << 64) | lo;
}

inline std::uint64_t to_u64(const wide& w) {
    if (w > wide(std::numeric_limits<std::uint64_t>::max()))
        fail(ErrorCode::Overflow, "value exceeds 64 bits");
    return static_cast<std::uint64_t>(w);
}

inline u128 gcd(u128 a, u128 b) {
    while (b != 0) {
        u128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline int bit_width(u128 v) {
    int n = 0;
    while (v != 0) {
        v >>= 1;
        ++n;
    }
    return n;
}

} // namespace detail

inline std::string to_string(u128 v) {
    if (v == 0) return "0";
    std::string out;
    while (v != 0) {
        out.insert(out.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    return out;
}

inline u128 parse_u128(std::string_view s) {
    if (s.empty()) fail(ErrorCode::ParseError, "empty integer");
    u128 v = 0;
    constexpr u128 max = ~u128{0};
    for (char c : s) {
        if (c < '0' || c > '9') fail(ErrorCode::ParseError, "bad digit in '" + std::string(s) + "'");
        const auto d = static_cast<unsigned>(c - '0');
        if (v > (max - d) / 10) fail(ErrorCode::Overflow, "integer too large: " + std::string(s));
        v = v * 10 + d;
    }
    return v;
}

inline std::uint64_t parse_u64(std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc::result_out_of_range) fail(ErrorCode::Overflow, "integer too large: " + std::string(s));
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        fail(ErrorCode::ParseError, "expected unsigned integer, got '" + std::string(s) + "'");
    return v;
}

/// Parses a plain decimal ("12", "-0.0004", "3.") into nano-units, exactly.
/// More than nine fractional digits is an error rather than a silent rounding.
inline std::int64_t parse_fixed9(std::string_view s) {
    const std::string text(s);
    if (s.empty()) fail(ErrorCode::ParseError, "empty decimal");
    bool negative = false;
    if (s.front() == '-' || s.front() == '+') {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    const auto dot = s.find('.');
    const std::string_view whole = s.substr(0, dot);
    const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : s.substr(dot + 1);
    if (whole.empty() && frac.empty()) fail(ErrorCode::ParseError, "bad decimal '" + text + "'");
    if (frac.size() > 9) fail(ErrorCode::ParseError, "more than 9 decimals in '" + text + "'");
    i128 value = 0;
    for (char c : whole) {
        if (c < '0' || c > '9') fail(ErrorCode::ParseError, "bad decimal '" + text + "'");
        value = value * 10 + (c - '0');
        if (value > std::numeric_limits<std::int64_t>::max()) fail(ErrorCode::Overflow, "decimal too large '" + text + "'");
    }
    std::int64_t frac_units = 0;
    std::int64_t scale = kUnit;
    for (char c : frac) {
        if (c < '0' || c > '9') fail(ErrorCode::ParseError, "bad decimal '" + text + "'");
        scale /= 10;
        frac_units += (c - '0') * scale;
    }
    value = value * kUnit + frac_units;
    if (value > std::numeric_limits<std::int64_t>::max()) fail(ErrorCode::Overflow, "decimal too large '" + text + "'");
    return static_cast<std::int64_t>(negative ? -value : value);
}

/// Formats nano-units as a decimal with exactly nine fractional digits.
inline std::string format_fixed9(std::int64_t units) {
    const bool negative = units < 0;
    const u128 mag = negative ? static_cast<u128>(-static_cast<i128>(units)) : static_cast<u128>(units);
    std::string frac = to_string(mag % kUnit);
    frac.insert(frac.begin(), 9 - frac.size(), '0');
    return (negative ? "-" : "") + to_string(mag / kUnit) + "." + frac;
}

inline std::string format_fixed9(std::uint64_t units) {
    std::string frac = std::to_string(units % kUnit);
    frac.insert(frac.begin(), 9 - frac.size(), '0');
    return std::to_string(units / kUnit) + "." + frac;
}

/// Non-negative token quantity in nano-units. The unit (TRD or base coin) is
/// given by context.
struct Amount {
    std::uint64_t raw = 0;

    static constexpr Amount from_raw(std::uint64_t r) { return Amount{r}; }

    static Amount whole(std::uint64_t tokens) {
        if (tokens > std::numeric_limits<std::uint64_t>::max() / kUnit)
            fail(ErrorCode::Overflow, "token count too large");
        return Amount{tokens * static_cast<std::uint64_t>(kUnit)};
    }

    static Amount parse(std::string_view s) {
        const std::int64_t units = parse_fixed9(s);
        if (units < 0) fail(ErrorCode::ParseError, "amount must be non-negative: " + std::string(s));
        return Amount{static_cast<std::uint64_t>(units)};
    }

    std::string str() const { return format_fixed9(raw); }
    double to_double() const { return static_cast<double>(raw) / static_cast<double>(kUnit); }

    friend constexpr auto operator<=>(Amount, Amount) = default;

    friend Amount operator+(Amount a, Amount b) {
        std::uint64_t out = 0;
        if (__builtin_add_overflow(a.raw, b.raw, &out)) fail(ErrorCode::Overflow, "amount addition overflows");
        return Amount{out};
    }
    friend Amount operator-(Amount a, Amount b) {
        if (b.raw > a.raw) fail(ErrorCode::Overflow, "amount subtraction below zero");
        return Amount{a.raw - b.raw};
    }
    Amount& operator+=(Amount o) { return *this = *this + o; }
    Amount& operator-=(Amount o) { return *this = *this - o; }
};

/// Signed difference of two amounts, used for profit and counterfactual deltas.
struct SignedAmount {
    std::int64_t raw = 0;

    static SignedAmount diff(Amount a, Amount b) {
        const i128 d = static_cast<i128>(a.raw) - static_cast<i128>(b.raw);
        if (d > std::numeric_limits<std::int64_t>::max() || d < std::numeric_limits<std::int64_t>::min())
            fail(ErrorCode::Overflow, "amount difference out of range");
        return SignedAmount{static_cast<std::int64_t>(d)};
    }

    std::string str() const { return format_fixed9(raw); }
    friend constexpr auto operator<=>(SignedAmount, SignedAmount) = default;
};

/// Dimensionless rate in parts per billion.
struct Rate {
    std::int64_t ppb = 0;

    static constexpr std::int64_t kMaxPpb = 10'000'000'000'000LL; // +-10^4, well past the +-10 contract

    static constexpr Rate from_ppb(std::int64_t p) { return Rate{p}; }
    static Rate parse(std::string_view s) { return Rate{parse_fixed9(s)}; }

    std::string str() const { return format_fixed9(ppb); }
    double to_double() const { return static_cast<double>(ppb) / static_cast<double>(kUnit); }

    friend constexpr auto operator<=>(Rate, Rate) = default;
    friend constexpr Rate operator+(Rate a, Rate b) { return Rate{a.ppb + b.ppb}; }
    friend constexpr Rate operator-(Rate a, Rate b) { return Rate{a.ppb - b.ppb}; }
    friend constexpr Rate operator-(Rate a) { return Rate{-a.ppb}; }
};

/// floor(a * r). Rates below zero would produce a negative amount; use
/// scale_amount for (1 + r) scaling.
inline Amount mul_amount_rate(Amount a, Rate r) {
    if (r.ppb < 0) fail(ErrorCode::NegativeResult, "mul_amount_rate with negative rate " + r.str());
    const u128 prod = static_cast<u128>(a.raw) * static_cast<u128>(r.ppb);
    const u128 q = prod / static_cast<u128>(kUnit);
    if (q > std::numeric_limits<std::uint64_t>::max()) fail(ErrorCode::Overflow, "mul_amount_rate overflows");
    return Amount{static_cast<std::uint64_t>(q)};
}

/// floor(a * (1 + r)).
inline Amount scale_amount(Amount a, Rate r) {
    if (r.ppb < -kUnit) fail(ErrorCode::NegativeResult, "scale factor 1 + " + r.str() + " is negative");
    const u128 factor = static_cast<u128>(r.ppb + kUnit);
    const u128 q = static_cast<u128>(a.raw) * factor / static_cast<u128>(kUnit);
    if (q > std::numeric_limits<std::uint64_t>::max()) fail(ErrorCode::Overflow, "scale_amount overflows");
    return Amount{static_cast<std::uint64_t>(q)};
}

/// Cumulative rebase multiplier as an exact rational num/den.
///
/// Components are kept at or below kLimit; grow_index renormalizes by a common
/// right shift (rounded to nearest) when either exceeds it, which moves the
/// represented value by far less than 1e-15 relative while the value stays
/// inside [2^-30, 2^30].
struct Index {
    u128 num = 1;
    u128 den = 1;

    static constexpr int kLimitBits = 92;
    static constexpr u128 kLimit = u128{1} << kLimitBits;

    static constexpr Index one() { return Index{1, 1}; }

    static Index make(u128 num, u128 den) {
        if (den == 0 || num == 0) fail(ErrorCode::NonPositiveFactor, "index components must be positive");
        const u128 g = detail::gcd(num, den);
        return Index{num / g, den / g};
    }

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend constexpr bool operator==(const Index&, const Index&) = default;
};

/// The index 1 + r.
inline Index one_plus(Rate r) {
    if (r.ppb <= -kUnit) fail(ErrorCode::NonPositiveFactor, "1 + " + r.str() + " is not positive");
    return Index::make(static_cast<u128>(r.ppb + kUnit), static_cast<u128>(kUnit));
}

namespace detail {

inline Index renormalize(u128 num, u128 den) {
    const int excess = std::max(bit_width(num), bit_width(den)) - Index::kLimitBits;
    if (excess <= 0) return Index{num, den};
    const u128 half = u128{1} << (excess - 1);
    auto shift = [&](u128 v) {
        const u128 s = (v >> excess) + (((v & ((u128{1} << excess) - 1)) >= half) ? 1 : 0);
        return s == 0 ? u128{1} : s;
    };
    return Index::make(shift(num), shift(den));
}

} // namespace detail

/// idx * (1 + r), reduced and renormalized.
inline Index grow_index(const Index& idx, Rate r) {
    if (r.ppb <= -kUnit) fail(ErrorCode::NonPositiveFactor, "1 + " + r.str() + " is not positive");
    if (r.ppb > Rate::kMaxPpb) fail(ErrorCode::Overflow, "rate " + r.str() + " out of range");
    const Index f = one_plus(r);
    // Cross-reduce first so the products stay small.
    const u128 g1 = detail::gcd(idx.num, f.den);
    const u128 g2 = detail::gcd(f.num, idx.den);
    const wide num = detail::to_wide(idx.num / g1) * detail::to_wide(f.num / g2);
    const wide den = detail::to_wide(idx.den / g2) * detail::to_wide(f.den / g1);
    return detail::renormalize(detail::to_u128(num), detail::to_u128(den));
}

/// floor(a * num / den).
inline Amount apply_index(Amount a, const Index& idx) {
    const wide q = wide(a.raw) * detail::to_wide(idx.num) / detail::to_wide(idx.den);
    return Amount{detail::to_u64(q)};
}

/// Index-invariant balance units held by ledger accounts. One raw TRD at
/// index 1 corresponds to kPerRaw share units, so any balance is reachable
/// exactly by rounding shares up while the index stays below kPerRaw.
struct Shares {
    u128 units = 0;

    static constexpr u128 kPerRaw = 1'000'000'000;

    friend constexpr auto operator<=>(Shares, Shares) = default;

    friend Shares operator+(Shares a, Shares b) {
        if (a.units > ~u128{0} - b.units) fail(ErrorCode::Overflow, "share addition overflows");
        return Shares{a.units + b.units};
    }
    friend Shares operator-(Shares a, Shares b) {
        if (b.units > a.units) fail(ErrorCode::Overflow, "share subtraction below zero");
        return Shares{a.units - b.units};
    }
};

/// Balance represented by `s` at `idx`: floor(s * num / (den * kPerRaw)).
inline Amount balance_at(Shares s, const Index& idx) {
    const wide q = detail::to_wide(s.units) * detail::to_wide(idx.num) /
                   (detail::to_wide(idx.den) * wide(static_cast<std::uint64_t>(Shares::kPerRaw)));
    return Amount{detail::to_u64(q)};
}

/// Largest share count whose value at `idx` does not exceed `a`.
inline Shares shares_floor(Amount a, const Index& idx) {
    const wide q = wide(a.raw) * wide(static_cast<std::uint64_t>(Shares::kPerRaw)) * detail::to_wide(idx.den) /
                   detail::to_wide(idx.num);
    return Shares{detail::to_u128(q)};
}

/// Smallest share count whose value at `idx` is at least `a`. While the index
/// is at most kPerRaw, balance_at(shares_ceil(a, idx), idx) == a exactly.
inline Shares shares_ceil(Amount a, const Index& idx) {
    const wide n = wide(a.raw) * wide(static_cast<std::uint64_t>(Shares::kPerRaw)) * detail::to_wide(idx.den);
    const wide d = detail::to_wide(idx.num);
    return Shares{detail::to_u128((n + d - 1) / d)};
}

} // namespace toroid
