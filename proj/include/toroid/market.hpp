#pragma once

#include <toroid/config.hpp>
#include <toroid/error.hpp>
#include <toroid/numerics.hpp>

#include <cmath>
#include <limits>

namespace toroid {

/// Diagnostic prices in quote currency. Never fed back into ledger arithmetic.
struct MarketState {
    double trd_price = 0.0;
    double base_price = 0.0;
    Amount arb_minted_cum; // TRD minted by arbitrageurs at the peg, cumulative

    /// Market opens with TRD at the peg ceiling.
    static MarketState at_peg(double base_price, const RebaseConfig& cfg) {
        return MarketState{cfg.peg_ratio.to_double() * base_price, base_price, Amount{}};
    }

    double peg_ceiling(const RebaseConfig& cfg) const { return cfg.peg_ratio.to_double() * base_price; }
};

struct PriceStep {
    MarketState state;
    Amount arb_minted; // minted this step; zero unless the peg clamp bound
    bool clamped = false;
};

/// Advances one period. Market capitalization follows the base-coin return
/// `market_return` and the rebase by r is absorbed completely, so the implied
/// price is trd_price * m / (1 + r). Above the peg ceiling arbitrageurs mint
/// at the peg until the price falls back to it; `supply` (post-rebase TRD
/// supply) sizes that minting.
inline PriceStep step_price(const MarketState& state, double market_return, Rate r, Amount supply,
                            const RebaseConfig& cfg) {
    if (!(market_return > 0.0) || !std::isfinite(market_return))
        fail(ErrorCode::NonPositiveReturn, "market return must be positive");
    if (r.ppb <= -kUnit) fail(ErrorCode::NonPositiveFactor, "1 + " + r.str() + " is not positive");

    PriceStep out;
    out.state = state;
    out.state.base_price = state.base_price * market_return;
    const double factor = 1.0 + r.to_double();
    const double implied = state.trd_price * market_return / factor;
    const double ceiling = out.state.peg_ceiling(cfg);
    if (implied > ceiling) {
        out.clamped = true;
        out.state.trd_price = ceiling;
        // Supply that restores the ceiling with market cap held fixed.
        const double extra = static_cast<double>(supply.raw) * (implied / ceiling - 1.0);
        const double capped = std::min(extra, static_cast<double>(std::numeric_limits<std::uint64_t>::max() / 2));
        out.arb_minted = Amount::from_raw(static_cast<std::uint64_t>(std::floor(capped)));
        out.state.arb_minted_cum += out.arb_minted;
    } else {
        out.state.trd_price = implied;
    }
    return out;
}

} // namespace toroid
