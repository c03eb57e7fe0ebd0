#include <toroid/numerics.hpp>

#include <boost/multiprecision/cpp_int.hpp>
#include <gtest/gtest.h>

#include <random>

using namespace toroid;
using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

namespace {

cpp_int big(u128 v) {
    cpp_int out = static_cast<std::uint64_t>(v >> 64);
    out <<= 64;
    out += static_cast<std::uint64_t>(v);
    return out;
}

cpp_rational value(const Index& idx) { return cpp_rational(big(idx.num), big(idx.den)); }

// floor for non-negative rationals
cpp_int floor_of(const cpp_rational& q) { return numerator(q) / denominator(q); }

} // namespace

TEST(Amount, WholeTokenIsOneBillionRaw) {
    EXPECT_EQ(Amount::whole(1).raw, 1'000'000'000u);
    EXPECT_EQ(Amount::parse("0.0004").raw, 400'000u);
    EXPECT_EQ(Amount::parse("10000").str(), "10000.000000000");
}

TEST(Amount, ArithmeticNeverWraps) {
    const Amount max = Amount::from_raw(std::numeric_limits<std::uint64_t>::max());
    try {
        (void)(max + Amount::from_raw(1));
        FAIL() << "expected overflow";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::Overflow);
    }
    EXPECT_THROW((void)(Amount::from_raw(1) - Amount::from_raw(2)), Error);
}

TEST(Decimal, ParsesExactlyAndRejectsExcessPrecision) {
    EXPECT_EQ(parse_fixed9("0.1"), 100'000'000);
    EXPECT_EQ(parse_fixed9("-0.5"), -500'000'000);
    EXPECT_EQ(parse_fixed9("3."), 3'000'000'000);
    EXPECT_EQ(parse_fixed9(".25"), 250'000'000);
    EXPECT_THROW(parse_fixed9("0.0000000001"), Error);
    EXPECT_THROW(parse_fixed9("1e3"), Error);
    EXPECT_THROW(parse_fixed9(""), Error);
    EXPECT_EQ(format_fixed9(std::int64_t{-1}), "-0.000000001");
    EXPECT_EQ(Rate::from_ppb(69'314'718).str(), "0.069314718");
}

TEST(MulAmountRate, Examples) {
    EXPECT_EQ(mul_amount_rate(Amount::whole(1), Rate::parse("0.1")).raw, 100'000'000u);
    // floor(3 * 333333333 / 1e9) = floor(0.999999999) = 0
    EXPECT_EQ(mul_amount_rate(Amount::from_raw(3), Rate::from_ppb(333'333'333)).raw, 0u);
    EXPECT_EQ(mul_amount_rate(Amount::whole(12345), Rate{}).raw, 0u);
}

TEST(MulAmountRate, RejectsNegativeAndOverflow) {
    try {
        mul_amount_rate(Amount::whole(1), Rate::parse("-0.1"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NegativeResult);
    }
    const Amount max = Amount::from_raw(std::numeric_limits<std::uint64_t>::max());
    EXPECT_THROW(mul_amount_rate(max, Rate::parse("2")), Error);
    EXPECT_THROW(scale_amount(Amount::whole(1), Rate::parse("-1.5")), Error);
    EXPECT_EQ(scale_amount(Amount::whole(10), Rate::parse("-0.2")), Amount::whole(8));
}

TEST(MulAmountRate, FloorMonotoneInAmount) {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 20000; ++i) {
        const Amount a = Amount::from_raw(rng() >> 20);
        const Amount b = Amount::from_raw(a.raw + (rng() >> 40));
        const Rate r = Rate::from_ppb(static_cast<std::int64_t>(rng() % 10'000'000'000ULL));
        ASSERT_LE(mul_amount_rate(a, r), mul_amount_rate(b, r));
    }
}

TEST(ApplyIndex, Examples) {
    EXPECT_EQ(apply_index(Amount::whole(10), Index::make(11, 10)), Amount::whole(11));
    EXPECT_EQ(apply_index(Amount::from_raw(987'654'321), Index::one()).raw, 987'654'321u);
    EXPECT_EQ(apply_index(Amount::from_raw(1), Index::make(1, 3)).raw, 0u);
}

TEST(GrowIndex, Examples) {
    EXPECT_EQ(grow_index(Index::one(), Rate::parse("0.1")), Index::make(11, 10));
    EXPECT_EQ(grow_index(Index::make(11, 10), Rate::parse("-0.1")), Index::make(99, 100));
    const Index idx = Index::make(123'456'789, 98'765'432);
    EXPECT_EQ(grow_index(idx, Rate{}), idx);
    try {
        grow_index(idx, Rate::parse("-1"));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::NonPositiveFactor);
    }
}

TEST(GrowIndex, NoDriftAtZeroRate) {
    Index idx = Index::one();
    for (int i = 0; i < 10'000; ++i) idx = grow_index(idx, Rate{});
    EXPECT_EQ(idx, Index::one());
}

TEST(GrowIndex, ExactUntilRenormalizedThenWithinOnePartIn1e15) {
    std::mt19937_64 rng(11);
    Index idx = Index::one();
    cpp_rational exact = 1;
    int renormalized = 0;
    for (int i = 0; i < 1000; ++i) {
        const Rate r = Rate::from_ppb(static_cast<std::int64_t>(rng() % 40'000'000) - 20'000'000);
        const Index next = grow_index(idx, r);
        const cpp_rational want = value(idx) * cpp_rational(kUnit + r.ppb, kUnit);
        const cpp_rational got = value(next);
        if (got != want) {
            ++renormalized;
            const cpp_rational rel = abs(got - want) / want;
            ASSERT_LE(rel, cpp_rational(1, 1'000'000'000'000'000LL)) << "step " << i;
        }
        ASSERT_LE(next.num, Index::kLimit);
        ASSERT_LE(next.den, Index::kLimit);
        exact *= cpp_rational(kUnit + r.ppb, kUnit);
        idx = next;
    }
    EXPECT_GT(renormalized, 0);
    // Accumulated error over a thousand steps stays tiny.
    EXPECT_LE(abs(value(idx) - exact) / exact, cpp_rational(1, 1'000'000'000'000LL));
}

// floor(s*I*(1+r)) and floor(floor(s*I)*(1+r)) differ by the dropped fraction
// of s*I times (1+r): at most 1 raw when r <= 0, at most 2 raw when 0 < r < 1.
TEST(ApplyIndex, RoundTripAgainstSequentialApplication) {
    std::mt19937_64 rng(3);
    int max_seen_neg = 0, max_seen_pos = 0;
    for (int i = 0; i < 50'000; ++i) {
        const Amount s = Amount::from_raw(rng() >> 12);
        Index idx = Index::one();
        const int steps = static_cast<int>(rng() % 6);
        for (int k = 0; k < steps; ++k)
            idx = grow_index(idx, Rate::from_ppb(static_cast<std::int64_t>(rng() % 200'000'000) - 50'000'000));
        const Rate r = Rate::from_ppb(static_cast<std::int64_t>(rng() % 400'000'000) - 200'000'000);
        const Amount direct = apply_index(s, grow_index(idx, r));
        const Amount seq = apply_index(apply_index(s, idx), one_plus(r));
        const auto diff = static_cast<int>(direct.raw > seq.raw ? direct.raw - seq.raw : seq.raw - direct.raw);
        if (r.ppb <= 0) {
            ASSERT_LE(diff, 1);
            max_seen_neg = std::max(max_seen_neg, diff);
        } else {
            ASSERT_LE(diff, 2);
            max_seen_pos = std::max(max_seen_pos, diff);
        }
    }
    EXPECT_EQ(max_seen_neg, 1);
}

TEST(Shares, CeilReachesExactBalanceAndFloorNeverExceeds) {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 20'000; ++i) {
        Index idx = Index::one();
        const int steps = static_cast<int>(rng() % 8);
        for (int k = 0; k < steps; ++k)
            idx = grow_index(idx, Rate::from_ppb(static_cast<std::int64_t>(rng() % 300'000'000) - 100'000'000));
        const Amount a = Amount::from_raw(rng() >> 10);
        ASSERT_EQ(balance_at(shares_ceil(a, idx), idx), a);
        ASSERT_LE(balance_at(shares_floor(a, idx), idx), a);
        // oracle: floor(shares * idx / kPerRaw)
        const Shares s = shares_floor(a, idx);
        const cpp_rational v = cpp_rational(big(s.units)) * value(idx) / cpp_rational(big(Shares::kPerRaw));
        ASSERT_EQ(cpp_int(balance_at(s, idx).raw), floor_of(v));
    }
}
