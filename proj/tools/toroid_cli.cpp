// toroid: command-line front end for the backtest, attack pricing and a
// scripted ledger walk-through.
//
// Exit codes: 0 success, 1 input error, 2 internal invariant violation.

#include <toroid/toroid.hpp>

#include <CLI11.hpp>

#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

namespace {

using namespace toroid;

RebaseConfig load_or_default(const std::string& path) {
    return path.empty() ? RebaseConfig{} : load_config(path);
}

void write_attack_csv(const std::string& path, const std::string& row) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::IoError, "cannot write " + path);
    out << kAttackCsvHeader << '\n' << row << '\n';
    if (!out) fail(ErrorCode::IoError, "write failed for " + path);
}

void print_state(const Ledger& l, const std::string& step) {
    std::cout << "-- " << step << '\n';
    std::cout << "   period " << l.current_period() << ", index " << to_string(l.index().num) << '/'
              << to_string(l.index().den) << ", supply " << l.total_supply().str() << " TRD, collateral "
              << l.total_collateral().str() << " base\n";
    for (const auto& [id, a] : l.accounts()) {
        std::cout << "   account " << id << ": balance " << l.balance_of(id).str() << " TRD, minted "
                  << a.minted.str() << ", collateral " << a.collateral.str() << ", created " << a.created_period
                  << '\n';
    }
}

void expect_error(const std::function<void()>& op, const std::string& what) {
    try {
        op();
        std::cout << "   " << what << ": unexpectedly succeeded\n";
        fail(ErrorCode::InvariantViolation, "demo step should have been rejected: " + what);
    } catch (const Error& e) {
        if (e.is_internal()) throw;
        std::cout << "   " << what << ": rejected (" << to_string(e.code()) << ")\n";
    }
}

int ledger_demo() {
    RebaseConfig cfg;
    Ledger l(cfg);
    print_state(l, "empty ledger, peg 0.1 base per TRD");

    const auto alice = l.open_account(Amount::whole(1));
    print_state(l, "alice locks 1 base and opens with " + alice.minted.str() + " TRD");

    const Amount extra = l.deposit(alice.id, Amount::parse("0.5"));
    print_state(l, "alice deposits 0.5 base for another " + extra.str() + " TRD at the same rate");

    const auto bob = l.open_account(Amount::whole(2));
    l.transfer(alice.id, bob.id, Amount::whole(5));
    print_state(l, "bob opens with 2 base, alice sends bob 5 TRD");

    expect_error([&] { l.withdraw(alice.id, Amount::whole(1)); }, "alice withdraws in the opening period");

    l.rebase(Rate::parse("0.1"));
    print_state(l, "rebase +10%: every balance grows by the same factor");

    expect_error([&] { l.withdraw(alice.id, Amount::parse("1.5")); }, "alice reclaims more than 11 TRD can refund");
    const Amount burned = l.withdraw(alice.id, Amount::whole(1));
    print_state(l, "alice returns " + burned.str() + " TRD for 1 base; the rest of the interest stays");

    l.rebase(Rate::parse("-0.3"));
    print_state(l, "rebase -30%");
    expect_error([&] { l.withdraw(bob.id, Amount::whole(2)); }, "bob closes holding fewer TRD than were minted");

    const Amount partial = l.withdraw(bob.id, Amount::parse("1.5"));
    print_state(l, "bob withdraws 1.5 base, burning " + partial.str() + " TRD");

    l.check_invariants();
    std::cout << "invariants hold\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Toroid elastic-supply stablecoin simulator"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Backtest the controller over a market CSV");
    std::string data_path, config_path, out_path, initial_supply, gas_cost_trd;
    bool no_gas_cap = false, no_floor = false, arb_injection = false;
    sim->add_option("--data", data_path, "Market CSV (date,price,tx_count)")->required();
    sim->add_option("--config", config_path, "key=value controller config");
    sim->add_option("--initial-supply", initial_supply, "Genesis TRD supply")->required();
    sim->add_option("--out", out_path, "Series CSV to write")->required();
    sim->add_option("--gas-cost-trd", gas_cost_trd, "Gas per transaction in TRD, overrides gas_cost_base");
    sim->add_flag("--no-gas-cap", no_gas_cap, "Disable the gas cap");
    sim->add_flag("--no-bootstrap-floor", no_floor, "Allow negative rates during bootstrap");
    sim->add_flag("--arb-injection", arb_injection, "Mint peg-clamp arbitrage supply into the ledger");

    // attack
    auto* attack = app.add_subcommand("attack", "Price a manipulation attack");
    attack->require_subcommand(1);
    struct AttackArgs {
        std::uint64_t delta_v = 0, periods = 1, baseline_v = 0;
        std::string supply, holdings, config, out;
        std::optional<std::uint64_t> start_period;
        bool no_gas_cap = false;
    } aa;
    std::uint64_t buy = 0, sell = 0;
    auto add_common = [&](CLI::App* sub, bool periods_required) {
        sub->add_option("--delta-v", aa.delta_v, "Injected transactions per period")->required();
        auto* p = sub->add_option("--periods", aa.periods, "Scenario length in periods");
        if (periods_required) p->required();
        sub->add_option("--baseline-v", aa.baseline_v, "Honest transactions per period");
        sub->add_option("--supply", aa.supply, "TRD supply at the start")->required();
        sub->add_option("--holdings", aa.holdings, "Attacker TRD holdings (default: the whole supply)");
        sub->add_option("--start-period", aa.start_period, "Period ordinal (default: end of bootstrap)");
        sub->add_option("--config", aa.config, "key=value controller config");
        sub->add_flag("--no-gas-cap", aa.no_gas_cap, "Disable the gas cap");
        sub->add_option("--out", aa.out, "Attack report CSV")->required();
    };
    auto* sybil = attack->add_subcommand("sybil", "Inflate the transaction count");
    add_common(sybil, true);
    auto* pump = attack->add_subcommand("pump-dump", "Buy, inflate volume, sell");
    add_common(pump, false);
    pump->add_option("--buy", buy, "Period the attacker buys in")->required();
    pump->add_option("--sell", sell, "Period the attacker sells in")->required();

    // ledger demo
    auto* ledger = app.add_subcommand("ledger", "Ledger utilities");
    ledger->require_subcommand(1);
    auto* demo = ledger->add_subcommand("demo", "Walk through the one-way peg rules");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (sim->parsed()) {
            RebaseConfig cfg = load_or_default(config_path);
            if (no_gas_cap) cfg.gas_cap_enabled = false;
            if (no_floor) cfg.floor_zero_during_bootstrap = false;
            BacktestOptions opts;
            if (!gas_cost_trd.empty()) opts.gas_cost_trd = Amount::parse(gas_cost_trd);
            opts.arb_injection = arb_injection;
            const auto rows = load_market_csv(data_path, cfg.period_seconds);
            const auto series = run_backtest(rows, cfg, Amount::parse(initial_supply), opts);
            write_series_csv(series, out_path);
            return 0;
        }
        if (sybil->parsed() || pump->parsed()) {
            RebaseConfig cfg = load_or_default(aa.config);
            if (aa.no_gas_cap) cfg.gas_cap_enabled = false;
            SybilScenario sc;
            sc.delta_v_per_period = aa.delta_v;
            sc.baseline_v = aa.baseline_v;
            sc.start_supply = Amount::parse(aa.supply);
            sc.attacker_holdings = aa.holdings.empty() ? sc.start_supply : Amount::parse(aa.holdings);
            sc.start_period = aa.start_period;
            if (sybil->parsed()) {
                sc.periods = aa.periods;
                const AttackReport r = run_sybil(sc, cfg);
                write_attack_csv(aa.out, attack_csv_row("sybil", sc.delta_v_per_period, sc.periods, r));
            } else {
                sc.periods = pump->count("--periods") ? aa.periods : sell;
                const AttackReport r = run_pump_and_dump(sc, buy, sell, cfg);
                write_attack_csv(aa.out, attack_csv_row("pump-dump", sc.delta_v_per_period, sell - buy, r));
            }
            return 0;
        }
        if (demo->parsed()) return ledger_demo();
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.is_internal() ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
