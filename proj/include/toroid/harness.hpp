#pragma once

// Backtest driver: market CSV in, per-period series CSV out.

#include <toroid/config.hpp>
#include <toroid/controller.hpp>
#include <toroid/error.hpp>
#include <toroid/ledger.hpp>
#include <toroid/market.hpp>
#include <toroid/numerics.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

namespace toroid {

struct MarketRow {
    std::string date;     // YYYY-MM-DD
    std::int64_t day = 0; // days since 1970-01-01
    double price = 0.0;   // quote per base coin
    std::uint64_t tx_count = 0;
};

struct SeriesRow {
    std::string date;
    double trd_price = 0.0;
    Amount trd_supply;
    Rate r_initial;
    Rate r_vol;
    Rate r_gas_cap;
    Rate r_combined;
    std::uint64_t tx_count = 0;

    friend bool operator==(const SeriesRow&, const SeriesRow&) = default;
};

inline constexpr const char* kMarketCsvHeader = "date,price,tx_count";
inline constexpr const char* kSeriesCsvHeader = "date,trd_price,trd_supply,r_initial,r_vol,r_gas_cap,r_combined,tx_count";

namespace detail {

// Proleptic Gregorian civil date to days since the Unix epoch.
inline std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline std::int64_t parse_iso_day(const std::string& s, int line) {
    auto bad = [&] { fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": bad date '" + s + "'"); };
    if (s.size() != 10 || s[4] != '-' || s[7] != '-') bad();
    for (std::size_t i : {0, 1, 2, 3, 5, 6, 8, 9})
        if (s[i] < '0' || s[i] > '9') bad();
    const int y = std::stoi(s.substr(0, 4));
    const unsigned m = static_cast<unsigned>(std::stoi(s.substr(5, 2)));
    const unsigned d = static_cast<unsigned>(std::stoi(s.substr(8, 2)));
    static constexpr unsigned kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m < 1 || m > 12 || d < 1) bad();
    const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    if (d > kDays[m - 1] + (m == 2 && leap ? 1 : 0)) bad();
    return days_from_civil(y, m, d);
}

inline double parse_double(const std::string& s, int line) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
        fail(ErrorCode::ParseError, "line " + std::to_string(line) + ": bad number '" + s + "'");
    return v;
}

// Shortest decimal that round-trips the double exactly.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) fail(ErrorCode::InvariantViolation, "cannot format double");
    return std::string(buf, ptr);
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline std::string chomp(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

} // namespace detail

/// Parses `date,price,tx_count` rows. Dates must strictly increase and may not
/// skip more than one period (days are the finest resolution, so sub-daily
/// periods accept consecutive days).
inline std::vector<MarketRow> parse_market_csv(std::istream& in, std::uint64_t period_seconds = 86'400) {
    std::string line;
    if (!std::getline(in, line)) fail(ErrorCode::ParseError, "line 1: missing header");
    if (detail::chomp(line) != kMarketCsvHeader)
        fail(ErrorCode::ParseError, "line 1: expected header '" + std::string(kMarketCsvHeader) + "'");
    const std::int64_t max_gap_days = std::max<std::int64_t>(1, static_cast<std::int64_t>(period_seconds / 86'400));

    std::vector<MarketRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = detail::chomp(line);
        if (line.empty()) continue;
        const auto f = detail::split_csv(line);
        if (f.size() != 3)
            fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected 3 fields, got " +
                                            std::to_string(f.size()));
        MarketRow row;
        row.date = f[0];
        row.day = detail::parse_iso_day(f[0], lineno);
        row.price = detail::parse_double(f[1], lineno);
        try {
            row.tx_count = parse_u64(f[2]);
        } catch (const Error& e) {
            fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": " + e.what());
        }
        if (!(row.price > 0.0) || !std::isfinite(row.price))
            fail(ErrorCode::NonPositivePrice, "line " + std::to_string(lineno) + ": price must be positive");
        if (!rows.empty()) {
            const std::int64_t gap = row.day - rows.back().day;
            if (gap <= 0)
                fail(ErrorCode::NonMonotoneDates, "line " + std::to_string(lineno) + ": " + row.date +
                                                      " does not follow " + rows.back().date);
            if (gap > max_gap_days)
                fail(ErrorCode::DateGap, "line " + std::to_string(lineno) + ": gap of " + std::to_string(gap) +
                                             " days before " + row.date);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::vector<MarketRow> load_market_csv(const std::string& path, std::uint64_t period_seconds = 86'400) {
    std::ifstream in(path);
    if (!in) fail(ErrorCode::IoError, "cannot open " + path);
    return parse_market_csv(in, period_seconds);
}

struct BacktestOptions {
    /// Gas per transaction expressed in TRD; replaces gas_cost_base with the
    /// equivalent base-coin amount at the peg.
    std::optional<Amount> gas_cost_trd;
    /// Mint the arbitrage supply implied by the peg clamp into an
    /// arbitrageur account instead of only recording it.
    bool arb_injection = false;
};

inline RebaseConfig effective_config(RebaseConfig cfg, const BacktestOptions& opts) {
    if (opts.gas_cost_trd) {
        cfg.gas_cost_base = mul_amount_rate(*opts.gas_cost_trd, cfg.peg_ratio);
        if (cfg.gas_cost_base.raw == 0) fail(ErrorCode::InvalidConfig, "gas cost override rounds to zero");
    }
    cfg.validate();
    return cfg;
}

/// One output row per input row after the first. Row t uses the return
/// price(t)/price(t-1) and tx_count(t) as this period's volume; the period
/// ordinal starts at 0.
inline std::vector<SeriesRow> run_backtest(const std::vector<MarketRow>& rows, const RebaseConfig& base_cfg,
                                           Amount initial_supply, const BacktestOptions& opts = {}) {
    if (rows.empty()) fail(ErrorCode::InvalidScenario, "backtest needs at least one market row");
    if (initial_supply.raw == 0) fail(ErrorCode::ZeroSupply, "initial supply must be positive");
    const RebaseConfig cfg = effective_config(base_cfg, opts);

    Ledger ledger(cfg, 0, rows.front().tx_count);
    ledger.open_account(cfg.collateral_for(initial_supply));
    std::optional<AccountId> arbitrageur;
    MarketState market = MarketState::at_peg(rows.front().price, cfg);

    std::vector<SeriesRow> out;
    out.reserve(rows.size() - 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        ledger.record_transfers(rows[i].tx_count);
        const PeriodMetrics m{ledger.current_period(), ledger.tx_count_this_period(),
                              ledger.tx_count_prev_period(), ledger.total_supply()};
        const RateBreakdown rates = combined_rate(m, cfg);
        const Amount supply = ledger.rebase(rates.r_combined);

        const PriceStep step = step_price(market, rows[i].price / rows[i - 1].price, rates.r_combined, supply, cfg);
        market = step.state;
        if (opts.arb_injection && step.arb_minted.raw > 0) {
            const Amount mint = cfg.mintable_floor(step.arb_minted);
            if (mint.raw > 0) {
                const Amount collateral = cfg.collateral_for(mint);
                if (arbitrageur) ledger.deposit(*arbitrageur, collateral);
                else arbitrageur = ledger.open_account(collateral).id;
            }
        }

        SeriesRow row;
        row.date = rows[i].date;
        row.trd_price = market.trd_price;
        row.trd_supply = ledger.total_supply();
        row.r_initial = rates.r_initial;
        row.r_vol = rates.r_vol;
        row.r_gas_cap = rates.r_gas_cap;
        row.r_combined = rates.r_combined;
        row.tx_count = rows[i].tx_count;
        out.push_back(std::move(row));
    }
    return out;
}

inline void render_series_csv(const std::vector<SeriesRow>& rows, std::ostream& out) {
    out << kSeriesCsvHeader << '\n';
    for (const auto& r : rows) {
        out << r.date << ',' << detail::format_double(r.trd_price) << ',' << r.trd_supply.str() << ','
            << r.r_initial.str() << ',' << r.r_vol.str() << ',' << r.r_gas_cap.str() << ',' << r.r_combined.str()
            << ',' << r.tx_count << '\n';
    }
}

inline void write_series_csv(const std::vector<SeriesRow>& rows, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path);
    render_series_csv(rows, out);
    out.flush();
    if (!out) fail(ErrorCode::IoError, "write failed for " + path);
}

inline std::vector<SeriesRow> parse_series_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || detail::chomp(line) != kSeriesCsvHeader)
        fail(ErrorCode::ParseError, "line 1: expected series header");
    std::vector<SeriesRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        line = detail::chomp(line);
        if (line.empty()) continue;
        const auto f = detail::split_csv(line);
        if (f.size() != 8) fail(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected 8 fields");
        SeriesRow r;
        r.date = f[0];
        r.trd_price = detail::parse_double(f[1], lineno);
        r.trd_supply = Amount::parse(f[2]);
        r.r_initial = Rate::parse(f[3]);
        r.r_vol = Rate::parse(f[4]);
        r.r_gas_cap = Rate::parse(f[5]);
        r.r_combined = Rate::parse(f[6]);
        r.tx_count = parse_u64(f[7]);
        rows.push_back(std::move(r));
    }
    return rows;
}

/// Sample standard deviation of successive log returns.
inline double log_return_stddev(const std::vector<double>& prices) {
    if (prices.size() < 3) return 0.0;
    std::vector<double> rets;
    rets.reserve(prices.size() - 1);
    for (std::size_t i = 1; i < prices.size(); ++i) rets.push_back(std::log(prices[i] / prices[i - 1]));
    double mean = 0.0;
    for (double r : rets) mean += r;
    mean /= static_cast<double>(rets.size());
    double ss = 0.0;
    for (double r : rets) ss += (r - mean) * (r - mean);
    return std::sqrt(ss / static_cast<double>(rets.size() - 1));
}

} // namespace toroid
