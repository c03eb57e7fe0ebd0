// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <toroid/toroid.hpp>

#include "ledger_fuzz.hpp"

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace toroid;
namespace fs = std::filesystem;

namespace {

const std::string kSource = TOROID_SOURCE_DIR;
const std::string kCli = TOROID_CLI;

struct Outcome {
    bool ok = true;
    std::string detail;
};

int failures = 0;

void criterion(int id, const std::string& title, double budget_ms, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out = {false, std::string("exception: ") + e.what()};
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (budget_ms > 0 && ms > budget_ms) {
        out.ok = false;
        out.detail += (out.detail.empty() ? "" : "; ") + std::string("over the time budget");
    }
    if (!out.ok) ++failures;
    std::printf("%s criterion %d: %s (%.3f ms)%s%s\n", out.ok ? "PASS" : "FAIL", id, title.c_str(), ms,
                out.detail.empty() ? "" : " - ", out.detail.c_str());
    std::fflush(stdout);
}

std::uint64_t log_uniform(std::mt19937_64& rng, double lo, double hi) {
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return static_cast<std::uint64_t>(std::llround(std::exp(u(rng))));
}

RebaseConfig gas_tenth_trd() {
    BacktestOptions opts;
    opts.gas_cost_trd = Amount::parse("0.1");
    return effective_config(RebaseConfig{}, opts);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::string& args) {
    const int status = std::system((kCli + " " + args).c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome initial_rate_values() {
    const RebaseConfig cfg;
    const Rate r0 = initial_rate(0, cfg), r90 = initial_rate(90, cfg);
    const bool ok = r0.str() == "0.100000000" && r90.str() == "0.010000000";
    return {ok, "r_I(0)=" + r0.str() + " r_I(90)=" + r90.str()};
}

Outcome sybil_cost_and_cap() {
    const RebaseConfig cfg;
    const Amount cost = sybil_cost(10'000, cfg);
    const Rate cap = gas_cap_rate(PeriodMetrics{0, 10'000, 0, Amount::whole(10'000)}, cfg);
    const bool ok = cost == Amount::whole(4) && cap.ppb == 4'000'000;
    return {ok, "cost=" + cost.str() + " cap=" + cap.str()};
}

Outcome infeasibility() {
    const RebaseConfig cfg;
    std::mt19937_64 rng(20'170'425);
    int cases = 0, profitable = 0;
    std::string first_bad;
    auto check = [&](const AttackReport& r, const std::string& what) {
        ++cases;
        if (r.profitable) {
            ++profitable;
            if (first_bad.empty()) first_bad = what + " net=" + r.net_profit_base.str();
        }
    };
    for (int i = 0; i < 1000; ++i) {
        SybilScenario sc;
        const std::uint64_t s = log_uniform(rng, 1e3, 1e7);
        sc.start_supply = Amount::whole(s);
        sc.attacker_holdings = Amount::whole(1 + rng() % s);
        sc.delta_v_per_period = i % 100 == 0 ? 1'000'000 : log_uniform(rng, 1, 1e6);
        sc.periods = 1 + rng() % 5;
        sc.start_period = cfg.bootstrap_periods + rng() % 2000;
        const std::string what = "s=" + std::to_string(s) + " dv=" + std::to_string(sc.delta_v_per_period);
        check(run_sybil(sc, cfg), "sybil " + what);

        sc.periods = 2 + rng() % 6;
        const std::uint64_t buy = rng() % (sc.periods - 1);
        const std::uint64_t sell = buy + 1 + rng() % (sc.periods - buy);
        check(run_pump_and_dump(sc, buy, sell, cfg), "pump-dump " + what);
    }

    RebaseConfig uncapped = cfg;
    uncapped.gas_cap_enabled = false;
    SybilScenario shown;
    shown.delta_v_per_period = 10'000;
    shown.baseline_v = 100;
    shown.start_supply = Amount::whole(10'000);
    shown.attacker_holdings = Amount::whole(10'000);
    const AttackReport open = run_sybil(shown, uncapped);

    const bool ok = profitable == 0 && open.profitable;
    std::string detail = std::to_string(cases) + " capped cases, " + std::to_string(profitable) +
                         " profitable; uncapped case net=" + open.net_profit_base.str();
    if (!first_bad.empty()) detail += "; first: " + first_bad;
    return {ok, detail};
}

Outcome ledger_properties() {
    const auto stats = toroid::testing::fuzz_ledger(100'000, 25, 8'675'309);
    const bool ok = stats.failure.empty() && stats.sequences == 100'000;
    return {ok, std::to_string(stats.sequences) + " sequences, " + std::to_string(stats.operations) +
                    " operations, max dust " + std::to_string(stats.max_dust) +
                    (stats.failure.empty() ? "" : "; " + stats.failure)};
}

Outcome peg_ceiling() {
    const RebaseConfig cfg;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> ret(0.0, 0.1);
    std::uniform_int_distribution<std::int64_t> rate(-500'000'000, 500'000'000);
    std::uint64_t steps = 0, clamped = 0;
    for (int path = 0; path < 1000; ++path) {
        MarketState s = MarketState::at_peg(1.0 + static_cast<double>(rng() % 10'000), cfg);
        for (int t = 0; t < 1000; ++t) {
            const Amount supply = Amount::from_raw(1 + rng() % 10'000'000'000'000'000ULL);
            const PriceStep next = step_price(s, std::exp(ret(rng)), Rate::from_ppb(rate(rng)), supply, cfg);
            s = next.state;
            ++steps;
            clamped += next.clamped ? 1 : 0;
            if (!(s.trd_price <= cfg.peg_ratio.to_double() * s.base_price))
                return {false, "ceiling exceeded on path " + std::to_string(path) + " step " + std::to_string(t)};
        }
    }
    return {clamped > 0, std::to_string(steps) + " steps, " + std::to_string(clamped) + " clamped"};
}

Outcome withdrawal() {
    const RebaseConfig cfg;
    Ledger up(cfg);
    const auto a = up.open_account(Amount::whole(1));
    up.rebase(Rate::parse("0.1"));
    const Amount burned = up.withdraw(a.id, Amount::whole(1));
    const bool up_ok = a.minted == Amount::whole(10) && burned == Amount::whole(10) &&
                       up.balance_of(a.id) == Amount::whole(1) && up.total_collateral() == Amount{};

    Ledger down(cfg);
    const auto b = down.open_account(Amount::whole(1));
    down.rebase(Rate::parse("-0.2"));
    bool refused = false;
    try {
        down.withdraw(b.id, Amount::whole(1));
    } catch (const Error& e) {
        refused = e.code() == ErrorCode::InsufficientForRefund;
    }
    const Amount partial = down.withdraw(b.id, Amount::parse("0.8"));
    const bool down_ok = refused && partial == Amount::whole(8) && down.balance_of(b.id) == Amount{} &&
                         down.account(b.id).collateral == Amount::parse("0.2");
    return {up_ok && down_ok, "+10%: left " + up.balance_of(a.id).str() + " TRD; -20%: full refused=" +
                                  (refused ? "yes" : "no") + ", partial burned " + partial.str()};
}

Outcome backtest_properties() {
    const auto rows = load_market_csv(kSource + "/data/sample_market.csv");
    const RebaseConfig capped = gas_tenth_trd();
    RebaseConfig uncapped = capped;
    uncapped.gas_cap_enabled = false;
    const Amount s0 = Amount::whole(10'000);
    const auto a = run_backtest(rows, capped, s0);
    const auto b = run_backtest(rows, uncapped, s0);

    std::vector<double> in, out;
    for (const auto& r : rows) in.push_back(r.price);
    out.push_back(MarketState::at_peg(rows.front().price, capped).trd_price);
    for (const auto& r : a) out.push_back(r.trd_price);
    const double sd_in = log_return_stddev(in), sd_trd = log_return_stddev(out);
    const bool vol_ok = sd_trd < sd_in;

    bool capped_ok = true;
    int violations = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (std::llabs(a[i].r_combined.ppb - a[i].r_initial.ppb) > a[i].r_gas_cap.ppb) capped_ok = false;
        const Amount s = i == 0 ? s0 : b[i - 1].trd_supply;
        const Rate cap = gas_cap_rate(PeriodMetrics{i, rows[i + 1].tx_count, rows[i].tx_count, s}, capped);
        if (std::llabs(b[i].r_combined.ppb - b[i].r_initial.ppb) > cap.ppb) ++violations;
    }
    const bool contrast_ok = capped_ok && violations > 0;

    bool boot_ok = true;
    Amount prev = s0;
    for (std::size_t i = 0; i < capped.bootstrap_periods && i < a.size(); ++i) {
        if (a[i].trd_supply < prev) boot_ok = false;
        prev = a[i].trd_supply;
    }

    std::ostringstream d;
    d.precision(6);
    d << "(a) std trd " << sd_trd << " vs input " << sd_in << (vol_ok ? " ok" : " FAILED") << "; (b) capped "
      << (capped_ok ? "within cap" : "EXCEEDS cap") << ", uncapped violations " << violations << "; (c) bootstrap "
      << (boot_ok ? "monotone" : "NOT monotone");
    return {vol_ok && contrast_ok && boot_ok, d.str()};
}

Outcome determinism() {
    const fs::path dir = fs::temp_directory_path() / "toroid_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::string args = "simulate --data " + kSource + "/data/sample_market.csv" +
                             " --initial-supply 10000 --gas-cost-trd 0.1 --out ";
    const std::string first = (dir / "first.csv").string(), second = (dir / "second.csv").string();
    if (run_cli(args + first) != 0 || run_cli(args + second) != 0) return {false, "simulate did not exit 0"};
    const std::string x = slurp(first), y = slurp(second);
    const std::string golden = slurp(kSource + "/tests/data/sample_series_golden.csv");
    fs::remove_all(dir);
    const bool repeat_ok = !x.empty() && x == y;
    const bool golden_ok = x == golden;
    return {repeat_ok && golden_ok, std::string("repeat ") + (repeat_ok ? "identical" : "DIFFERS") +
                                        ", golden file " + (golden_ok ? "identical" : "DIFFERS") + " (" +
                                        std::to_string(x.size()) + " bytes)"};
}

} // namespace

int main() {
    criterion(1, "initial rate worked values", 1.0, initial_rate_values);
    criterion(2, "sybil cost and gas cap", 1.0, sybil_cost_and_cap);
    criterion(3, "manipulation infeasible under the gas cap", 60'000.0, infeasibility);
    criterion(4, "ledger property suite", 120'000.0, ledger_properties);
    criterion(5, "one-way peg ceiling", 10'000.0, peg_ceiling);
    criterion(6, "withdrawal semantics", 1.0, withdrawal);
    criterion(7, "backtest properties on sample data", 10'000.0, backtest_properties);
    criterion(8, "simulate output is byte-identical", 0.0, determinism);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
