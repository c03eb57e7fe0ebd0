#pragma once

// Manipulation attacks priced against a no-attack counterfactual.
//
// Every scenario runs twice from identical ledgers under an identical flat
// market: once with the attacker's injected transactions, once without. The
// attacker is charged only gas and their extra TRD is valued at the peg
// ceiling, the best sale price the one-way peg admits.

#include <toroid/config.hpp>
#include <toroid/controller.hpp>
#include <toroid/error.hpp>
#include <toroid/ledger.hpp>
#include <toroid/numerics.hpp>

#include <cstdint>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

namespace toroid {

struct SybilScenario {
    std::uint64_t delta_v_per_period = 0; // injected transfers per attack period
    std::uint64_t periods = 1;
    std::uint64_t baseline_v = 0;         // honest transfers per period
    Amount start_supply;
    Amount attacker_holdings;
    std::optional<std::uint64_t> start_period; // defaults to the end of bootstrap
};

struct AttackReport {
    Amount cost_base;
    SignedAmount extra_supply_trd;
    SignedAmount attacker_gain_base;
    SignedAmount net_profit_base;
    bool profitable = false;
};

/// Gas paid for `v` transactions.
inline Amount sybil_cost(std::uint64_t v, const RebaseConfig& cfg) {
    std::uint64_t out = 0;
    if (__builtin_mul_overflow(v, cfg.gas_cost_base.raw, &out)) fail(ErrorCode::Overflow, "sybil cost overflows");
    return Amount::from_raw(out);
}

namespace detail {

// TRD -> base coin at the peg, floor (toward -inf for losses).
inline SignedAmount value_at_peg(SignedAmount trd, const RebaseConfig& cfg) {
    const i128 prod = static_cast<i128>(trd.raw) * cfg.peg_ratio.ppb;
    i128 q = prod / kUnit;
    if (prod % kUnit != 0 && prod < 0) --q;
    return SignedAmount{static_cast<std::int64_t>(q)};
}

inline void close_period(Ledger& ledger, std::uint64_t transfers, const RebaseConfig& cfg) {
    ledger.record_transfers(transfers);
    const PeriodMetrics m{ledger.current_period(), ledger.tx_count_this_period(), ledger.tx_count_prev_period(),
                          ledger.total_supply()};
    ledger.rebase(combined_rate(m, cfg).r_combined);
}

inline AttackReport make_report(const Ledger& attacked, const Ledger& baseline, std::optional<AccountId> attacker,
                                Amount cost, const RebaseConfig& cfg) {
    AttackReport r;
    r.cost_base = cost;
    r.extra_supply_trd = SignedAmount::diff(attacked.total_supply(), baseline.total_supply());
    SignedAmount extra_holdings;
    if (attacker) extra_holdings = SignedAmount::diff(attacked.balance_of(*attacker), baseline.balance_of(*attacker));
    r.attacker_gain_base = value_at_peg(extra_holdings, cfg);
    const i128 net = static_cast<i128>(r.attacker_gain_base.raw) - static_cast<i128>(cost.raw);
    if (net < std::numeric_limits<std::int64_t>::min()) fail(ErrorCode::Overflow, "net profit out of range");
    r.net_profit_base = SignedAmount{static_cast<std::int64_t>(net)};
    r.profitable = r.net_profit_base.raw > 0;
    return r;
}

inline void check_scenario(const SybilScenario& sc) {
    if (sc.periods < 1) fail(ErrorCode::InvalidScenario, "scenario needs at least one period");
    if (sc.start_supply.raw == 0) fail(ErrorCode::InvalidScenario, "scenario needs a positive supply");
}

} // namespace detail

/// Both arms of a scenario after simulation, before pricing.
struct AttackRun {
    Ledger attacked;
    Ledger baseline;
    std::optional<AccountId> attacker;
    Amount cost_base;

    AttackReport report(const RebaseConfig& cfg) const {
        return detail::make_report(attacked, baseline, attacker, cost_base, cfg);
    }
};

/// Attacker holds `attacker_holdings` of `start_supply` before the attack and
/// injects delta_v transfers in each of `periods` periods. Both arms stop
/// right after the last attacked period's rebase.
inline AttackRun simulate_sybil(const SybilScenario& sc, const RebaseConfig& cfg) {
    detail::check_scenario(sc);
    if (sc.attacker_holdings > sc.start_supply)
        fail(ErrorCode::InvalidScenario, "attacker holdings exceed the supply");
    const std::uint64_t start = sc.start_period.value_or(cfg.bootstrap_periods);

    auto genesis = [&] {
        Ledger l(cfg, start, sc.baseline_v);
        const Amount honest = sc.start_supply - sc.attacker_holdings;
        if (honest.raw > 0) l.open_account(cfg.collateral_for(honest));
        return l;
    };
    AttackRun run{genesis(), genesis(), std::nullopt, Amount{}};
    if (sc.attacker_holdings.raw > 0) {
        const Amount collateral = cfg.collateral_for(sc.attacker_holdings);
        run.attacker = run.attacked.open_account(collateral).id;
        run.baseline.open_account(collateral);
    }

    for (std::uint64_t k = 0; k < sc.periods; ++k) {
        detail::close_period(run.attacked, sc.baseline_v + sc.delta_v_per_period, cfg);
        detail::close_period(run.baseline, sc.baseline_v, cfg);
    }

    std::uint64_t injected = 0;
    if (__builtin_mul_overflow(sc.delta_v_per_period, sc.periods, &injected))
        fail(ErrorCode::Overflow, "injected transaction count overflows");
    run.cost_base = sybil_cost(injected, cfg);
    return run;
}

inline AttackReport run_sybil(const SybilScenario& sc, const RebaseConfig& cfg) {
    return simulate_sybil(sc, cfg).report(cfg);
}

/// The market runs on honest baseline volume. At the start of `buy_period`
/// the attacker buys `attacker_holdings` TRD from the fund at the peg, injects
/// delta_v transfers in every period up to `sell_period`, and sells at the
/// start of `sell_period`. The purchase is identical in both arms and cancels.
inline AttackRun simulate_pump_and_dump(const SybilScenario& sc, std::uint64_t buy_period,
                                        std::uint64_t sell_period, const RebaseConfig& cfg) {
    detail::check_scenario(sc);
    if (!(buy_period < sell_period) || sell_period > sc.periods)
        fail(ErrorCode::InvalidScenario, "need buy < sell <= periods");
    const std::uint64_t start = sc.start_period.value_or(cfg.bootstrap_periods);

    auto genesis = [&] {
        Ledger l(cfg, start, sc.baseline_v);
        l.open_account(cfg.collateral_for(sc.start_supply));
        return l;
    };
    AttackRun run{genesis(), genesis(), std::nullopt, Amount{}};

    for (std::uint64_t k = 0; k < sell_period; ++k) {
        if (k == buy_period && sc.attacker_holdings.raw > 0) {
            const Amount collateral = cfg.collateral_for(sc.attacker_holdings);
            run.attacker = run.attacked.open_account(collateral).id;
            run.baseline.open_account(collateral);
        }
        const bool active = k >= buy_period;
        detail::close_period(run.attacked, sc.baseline_v + (active ? sc.delta_v_per_period : 0), cfg);
        detail::close_period(run.baseline, sc.baseline_v, cfg);
    }

    std::uint64_t injected = 0;
    if (__builtin_mul_overflow(sc.delta_v_per_period, sell_period - buy_period, &injected))
        fail(ErrorCode::Overflow, "injected transaction count overflows");
    run.cost_base = sybil_cost(injected, cfg);
    return run;
}

inline AttackReport run_pump_and_dump(const SybilScenario& sc, std::uint64_t buy_period, std::uint64_t sell_period,
                                      const RebaseConfig& cfg) {
    return simulate_pump_and_dump(sc, buy_period, sell_period, cfg).report(cfg);
}

inline constexpr const char* kAttackCsvHeader =
    "scenario_id,delta_v,periods,cost_base,extra_supply_trd,gain_base,net_profit_base,profitable";

inline std::string attack_csv_row(const std::string& scenario_id, std::uint64_t delta_v, std::uint64_t periods,
                                  const AttackReport& r) {
    std::ostringstream out;
    out << scenario_id << ',' << delta_v << ',' << periods << ',' << r.cost_base.str() << ','
        << r.extra_supply_trd.str() << ',' << r.attacker_gain_base.str() << ',' << r.net_profit_base.str() << ','
        << (r.profitable ? "true" : "false");
    return out.str();
}

} // namespace toroid
