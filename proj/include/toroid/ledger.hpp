#pragma once

// Account and collateral state machine.
//
// Balances are never stored. Each account holds index-invariant shares and its
// balance is shares valued at the global rebase index, so a rebase is a single
// index update and every account scales by the same factor. Accounts created
// after a rebase convert at the index of their creation, which insulates them
// from all earlier rebasements.
//
// Mint and burn set the account balance to an exact target by rounding shares
// up; transfers round the moved shares down. Either way the sum of balances
// never exceeds the value of the total share count.

#include <toroid/config.hpp>
#include <toroid/error.hpp>
#include <toroid/numerics.hpp>

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace toroid {

using AccountId = std::uint64_t;

struct Account {
    AccountId id = 0;
    Shares shares;
    Amount collateral;  // base coin locked
    Amount minted;      // TRD owed back to release the collateral
    std::uint64_t created_period = 0;

    friend bool operator==(const Account&, const Account&) = default;
};

class Ledger {
public:
    explicit Ledger(RebaseConfig cfg, std::uint64_t start_period = 0, std::uint64_t prev_tx_count = 0)
        : cfg_(cfg), current_period_(start_period), tx_prev_(prev_tx_count) {
        cfg_.validate();
    }

    const RebaseConfig& config() const { return cfg_; }
    const Index& index() const { return index_; }
    std::uint64_t current_period() const { return current_period_; }
    std::uint64_t tx_count_this_period() const { return tx_this_; }
    std::uint64_t tx_count_prev_period() const { return tx_prev_; }
    Amount total_collateral() const { return total_collateral_; }
    Shares total_shares() const { return total_shares_; }
    const std::map<AccountId, Account>& accounts() const { return accounts_; }

    const Account& account(AccountId id) const {
        auto it = accounts_.find(id);
        if (it == accounts_.end()) fail(ErrorCode::UnknownAccount, "no account " + std::to_string(id));
        return it->second;
    }

    Amount balance_of(AccountId id) const { return balance_at(account(id).shares, index_); }

    /// Sum of per-account balances (floored individually).
    Amount total_supply() const {
        Amount sum;
        for (const auto& [id, a] : accounts_) sum += balance_at(a.shares, index_);
        return sum;
    }

    /// Value of all shares at the current index; exceeds total_supply() by
    /// floor dust of less than one raw unit per account.
    Amount implied_supply() const { return balance_at(total_shares_, index_); }

    struct Opened {
        AccountId id;
        Amount minted;
    };

    Opened open_account(Amount collateral) {
        if (collateral.raw == 0) fail(ErrorCode::ZeroCollateral, "opening an account needs collateral");
        const Amount minted = cfg_.minted_for(collateral);
        const AccountId id = next_id_++;
        Account acct;
        acct.id = id;
        acct.created_period = current_period_;
        accounts_.emplace(id, acct);
        credit_mint(accounts_.at(id), collateral, minted);
        return {id, minted};
    }

    Amount deposit(AccountId id, Amount collateral) {
        Account& acct = mutable_account(id);
        if (collateral.raw == 0) fail(ErrorCode::ZeroCollateral, "deposit needs collateral");
        const Amount minted = cfg_.minted_for(collateral);
        credit_mint(acct, collateral, minted);
        return minted;
    }

    void transfer(AccountId from, AccountId to, Amount amount) {
        if (from == to) fail(ErrorCode::SelfTransfer, "transfer to self");
        Account& src = mutable_account(from);
        Account& dst = mutable_account(to);
        const Amount balance = balance_at(src.shares, index_);
        if (amount > balance)
            fail(ErrorCode::InsufficientBalance, "balance " + balance.str() + " < " + amount.str());
        Shares moved = shares_floor(amount, index_);
        if (moved > src.shares) moved = src.shares;
        src.shares = src.shares - moved;
        dst.shares = dst.shares + moved;
        ++tx_this_;
    }

    /// Counts `n` wallet-to-wallet transfers whose balance effects cancel
    /// (self-dealing round trips between wallets of one owner). Only the
    /// transaction counter changes.
    void record_transfers(std::uint64_t n) {
        if (__builtin_add_overflow(tx_this_, n, &tx_this_)) fail(ErrorCode::Overflow, "transaction counter overflows");
    }

    /// Scales every balance by (1 + r), closes the period and returns the new
    /// total supply.
    Amount rebase(Rate r) {
        index_ = grow_index(index_, r);
        tx_prev_ = tx_this_;
        tx_this_ = 0;
        ++current_period_;
        return total_supply();
    }

    /// Releases `collateral_out` against burning collateral_out / peg TRD.
    /// Interest above the burned amount stays in the account.
    Amount withdraw(AccountId id, Amount collateral_out) {
        Account& acct = mutable_account(id);
        if (current_period_ - acct.created_period < cfg_.min_holding_periods)
            fail(ErrorCode::HoldingPeriodNotMet,
                 "account " + std::to_string(id) + " is " + std::to_string(current_period_ - acct.created_period) +
                     " periods old, needs " + std::to_string(cfg_.min_holding_periods));
        if (collateral_out > acct.collateral)
            fail(ErrorCode::ExceedsCollateral, collateral_out.str() + " > locked " + acct.collateral.str());
        const Amount burned = cfg_.minted_for(collateral_out);
        const Amount balance = balance_at(acct.shares, index_);
        if (burned > balance)
            fail(ErrorCode::InsufficientForRefund, "balance " + balance.str() + " < refund " + burned.str());
        if (burned > acct.minted) fail(ErrorCode::InvariantViolation, "burn exceeds minted obligation");

        const Shares target = shares_ceil(balance - burned, index_);
        total_shares_ = total_shares_ - (acct.shares - target);
        acct.shares = target;
        acct.minted -= burned;
        acct.collateral -= collateral_out;
        total_collateral_ -= collateral_out;
        return burned;
    }

    void write_snapshot(std::ostream& out) const {
        out << to_string(index_.num) << ',' << to_string(index_.den) << ',' << current_period_ << ',' << tx_this_
            << ',' << tx_prev_ << '\n';
        for (const auto& [id, a] : accounts_) {
            out << id << ',' << to_string(a.shares.units) << ',' << a.collateral.raw << ',' << a.minted.raw << ','
                << a.created_period << '\n';
        }
    }

    std::string snapshot() const {
        std::ostringstream out;
        write_snapshot(out);
        return out.str();
    }

    static Ledger read_snapshot(std::istream& in, const RebaseConfig& cfg) {
        auto fields = [](const std::string& line, std::size_t expected, int lineno) {
            std::vector<std::string> out;
            std::stringstream ss(line);
            std::string f;
            while (std::getline(ss, f, ',')) out.push_back(f);
            if (out.size() != expected)
                fail(ErrorCode::ParseError, "snapshot line " + std::to_string(lineno) + ": expected " +
                                                std::to_string(expected) + " fields");
            return out;
        };
        std::string line;
        if (!std::getline(in, line)) fail(ErrorCode::ParseError, "empty snapshot");
        const auto head = fields(line, 5, 1);
        Ledger ledger(cfg, parse_u64(head[2]));
        const u128 num = parse_u128(head[0]);
        const u128 den = parse_u128(head[1]);
        if (num == 0 || den == 0) fail(ErrorCode::ParseError, "snapshot index must be positive");
        ledger.index_ = Index{num, den};
        ledger.tx_this_ = parse_u64(head[3]);
        ledger.tx_prev_ = parse_u64(head[4]);
        int lineno = 1;
        while (std::getline(in, line)) {
            ++lineno;
            if (line.empty()) continue;
            const auto f = fields(line, 5, lineno);
            Account a;
            a.id = parse_u64(f[0]);
            a.shares = Shares{parse_u128(f[1])};
            a.collateral = Amount::from_raw(parse_u64(f[2]));
            a.minted = Amount::from_raw(parse_u64(f[3]));
            a.created_period = parse_u64(f[4]);
            if (cfg.collateral_for(a.minted) != a.collateral)
                fail(ErrorCode::ParseError, "snapshot account " + f[0] + " violates the peg obligation");
            if (!ledger.accounts_.emplace(a.id, a).second)
                fail(ErrorCode::ParseError, "duplicate account " + f[0]);
            ledger.total_shares_ = ledger.total_shares_ + a.shares;
            ledger.total_collateral_ += a.collateral;
            if (a.id >= ledger.next_id_) ledger.next_id_ = a.id + 1;
        }
        return ledger;
    }

    static Ledger from_snapshot(const std::string& text, const RebaseConfig& cfg) {
        std::istringstream in(text);
        return read_snapshot(in, cfg);
    }

    /// Recomputes the aggregate invariants from scratch; throws
    /// InvariantViolation on mismatch.
    void check_invariants() const {
        Shares shares;
        Amount collateral;
        Amount minted;
        for (const auto& [id, a] : accounts_) {
            shares = shares + a.shares;
            collateral += a.collateral;
            minted += a.minted;
            if (cfg_.collateral_for(a.minted) != a.collateral)
                fail(ErrorCode::InvariantViolation, "account " + std::to_string(id) + " breaks the peg obligation");
        }
        if (shares != total_shares_) fail(ErrorCode::InvariantViolation, "share total drifted");
        if (collateral != total_collateral_) fail(ErrorCode::InvariantViolation, "collateral total drifted");
        if (cfg_.collateral_for(minted) != total_collateral_)
            fail(ErrorCode::InvariantViolation, "minted obligations do not match collateral");
        const Amount supply = total_supply();
        const Amount implied = implied_supply();
        if (supply > implied || implied.raw - supply.raw > accounts_.size())
            fail(ErrorCode::InvariantViolation, "supply dust out of bounds");
    }

private:
    Account& mutable_account(AccountId id) {
        auto it = accounts_.find(id);
        if (it == accounts_.end()) fail(ErrorCode::UnknownAccount, "no account " + std::to_string(id));
        return it->second;
    }

    void credit_mint(Account& acct, Amount collateral, Amount minted) {
        const Amount balance = balance_at(acct.shares, index_);
        const Shares target = shares_ceil(balance + minted, index_);
        total_shares_ = total_shares_ + (target - acct.shares);
        acct.shares = target;
        acct.minted += minted;
        acct.collateral += collateral;
        total_collateral_ += collateral;
    }

    RebaseConfig cfg_;
    std::map<AccountId, Account> accounts_;
    Index index_ = Index::one();
    std::uint64_t current_period_ = 0;
    std::uint64_t tx_this_ = 0;
    std::uint64_t tx_prev_ = 0;
    Amount total_collateral_;
    Shares total_shares_;
    AccountId next_id_ = 1;
};

} // namespace toroid
