#pragma once

#include <toroid/error.hpp>
#include <toroid/numerics.hpp>

#include <cstdint>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>

namespace toroid {

/// Controller and peg constants. Defaults are the daily-period reference
/// configuration: 10% initial incentive decaying as 1/(t + 10), a 90-period
/// bootstrap, 0.0004 base coin per transaction and 0.1 base coin per TRD.
struct RebaseConfig {
    std::uint64_t t0 = 10;
    std::uint64_t bootstrap_periods = 90;
    Rate k_v = Rate::from_ppb(100'000'000);
    Amount gas_cost_base = Amount::from_raw(400'000);
    Rate peg_ratio = Rate::from_ppb(100'000'000);
    bool gas_cap_enabled = true;
    bool floor_zero_during_bootstrap = true;
    std::uint64_t period_seconds = 86'400;
    std::uint64_t min_holding_periods = 1;

    void validate() const {
        if (peg_ratio.ppb <= 0) fail(ErrorCode::InvalidConfig, "peg_ratio must be positive");
        if (gas_cost_base.raw == 0) fail(ErrorCode::InvalidConfig, "gas_cost_base must be positive");
        if (t0 < 1) fail(ErrorCode::InvalidConfig, "t0 must be at least 1");
        if (period_seconds == 0) fail(ErrorCode::InvalidConfig, "period_seconds must be positive");
    }

    /// Collateral backing `minted` TRD at the peg, exact.
    Amount collateral_for(Amount minted) const {
        const u128 prod = static_cast<u128>(minted.raw) * static_cast<u128>(peg_ratio.ppb);
        if (prod % kUnit != 0)
            fail(ErrorCode::NonDivisibleCollateral, minted.str() + " TRD has no exact collateral at the peg");
        const u128 q = prod / kUnit;
        if (q > std::numeric_limits<std::uint64_t>::max()) fail(ErrorCode::Overflow, "collateral overflows");
        return Amount::from_raw(static_cast<std::uint64_t>(q));
    }

    /// TRD minted for `collateral` at the peg, exact.
    Amount minted_for(Amount collateral) const {
        const u128 prod = static_cast<u128>(collateral.raw) * kUnit;
        if (prod % static_cast<u128>(peg_ratio.ppb) != 0)
            fail(ErrorCode::NonDivisibleCollateral,
                 collateral.str() + " is not a multiple of the peg ratio " + peg_ratio.str());
        const u128 q = prod / static_cast<u128>(peg_ratio.ppb);
        if (q > std::numeric_limits<std::uint64_t>::max()) fail(ErrorCode::Overflow, "minted amount overflows");
        return Amount::from_raw(static_cast<std::uint64_t>(q));
    }

    /// Largest amount <= `trd` that can be minted against exact collateral.
    Amount mintable_floor(Amount trd) const {
        const std::uint64_t step = static_cast<std::uint64_t>(
            kUnit / static_cast<std::int64_t>(detail::gcd(static_cast<u128>(peg_ratio.ppb), kUnit)));
        return Amount::from_raw(trd.raw - trd.raw % step);
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline bool parse_bool(const std::string& v, int line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": expected boolean, got '" + v + "'");
}

} // namespace detail

/// Reads `key = value` lines. Blank lines and lines starting with '#' or ';'
/// are skipped; an optional `[section]` header is ignored. Unknown keys are
/// rejected so that typos do not silently fall back to defaults.
inline RebaseConfig parse_config(std::istream& in) {
    RebaseConfig cfg;
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string text = detail::trim(raw);
        if (text.empty() || text[0] == '#' || text[0] == ';' || text[0] == '[') continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": expected key=value");
        const std::string key = detail::trim(text.substr(0, eq));
        const std::string value = detail::trim(text.substr(eq + 1));
        try {
            if (key == "t0") cfg.t0 = parse_u64(value);
            else if (key == "bootstrap_periods") cfg.bootstrap_periods = parse_u64(value);
            else if (key == "k_v") cfg.k_v = Rate::parse(value);
            else if (key == "gas_cost_base") cfg.gas_cost_base = Amount::parse(value);
            else if (key == "peg_ratio") cfg.peg_ratio = Rate::parse(value);
            else if (key == "gas_cap_enabled") cfg.gas_cap_enabled = detail::parse_bool(value, line);
            else if (key == "floor_zero_during_bootstrap") cfg.floor_zero_during_bootstrap = detail::parse_bool(value, line);
            else if (key == "period_seconds") cfg.period_seconds = parse_u64(value);
            else if (key == "min_holding_periods") cfg.min_holding_periods = parse_u64(value);
            else fail(ErrorCode::ParseError, "unknown key '" + key + "'");
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ParseError || e.code() == ErrorCode::Overflow)
                fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": " + e.what());
            throw;
        }
    }
    try {
        cfg.validate();
    } catch (const Error& e) {
        fail(ErrorCode::ParseError, e.what());
    }
    return cfg;
}

inline RebaseConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open config " + path);
    return parse_config(in);
}

inline std::string render_config(const RebaseConfig& cfg) {
    std::ostringstream out;
    out << "t0=" << cfg.t0 << '\n'
        << "bootstrap_periods=" << cfg.bootstrap_periods << '\n'
        << "k_v=" << cfg.k_v.str() << '\n'
        << "gas_cost_base=" << cfg.gas_cost_base.str() << '\n'
        << "peg_ratio=" << cfg.peg_ratio.str() << '\n'
        << "gas_cap_enabled=" << (cfg.gas_cap_enabled ? "true" : "false") << '\n'
        << "floor_zero_during_bootstrap=" << (cfg.floor_zero_during_bootstrap ? "true" : "false") << '\n'
        << "period_seconds=" << cfg.period_seconds << '\n'
        << "min_holding_periods=" << cfg.min_holding_periods << '\n';
    return out.str();
}

} // namespace toroid
