#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace toroid {

enum class ErrorCode {
    Overflow,
    NegativeResult,
    NonPositiveFactor,
    ZeroSupply,
    ZeroCollateral,
    NonDivisibleCollateral,
    UnknownAccount,
    InsufficientBalance,
    SelfTransfer,
    HoldingPeriodNotMet,
    InsufficientForRefund,
    ExceedsCollateral,
    NonPositiveReturn,
    ParseError,
    NonMonotoneDates,
    NonPositivePrice,
    DateGap,
    IoError,
    InvalidConfig,
    InvalidScenario,
    InvariantViolation,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::Overflow: return "Overflow";
    case ErrorCode::NegativeResult: return "NegativeResult";
    case ErrorCode::NonPositiveFactor: return "NonPositiveFactor";
    case ErrorCode::ZeroSupply: return "ZeroSupply";
    case ErrorCode::ZeroCollateral: return "ZeroCollateral";
    case ErrorCode::NonDivisibleCollateral: return "NonDivisibleCollateral";
    case ErrorCode::UnknownAccount: return "UnknownAccount";
    case ErrorCode::InsufficientBalance: return "InsufficientBalance";
    case ErrorCode::SelfTransfer: return "SelfTransfer";
    case ErrorCode::HoldingPeriodNotMet: return "HoldingPeriodNotMet";
    case ErrorCode::InsufficientForRefund: return "InsufficientForRefund";
    case ErrorCode::ExceedsCollateral: return "ExceedsCollateral";
    case ErrorCode::NonPositiveReturn: return "NonPositiveReturn";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonMonotoneDates: return "NonMonotoneDates";
    case ErrorCode::NonPositivePrice: return "NonPositivePrice";
    case ErrorCode::DateGap: return "DateGap";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidScenario: return "InvalidScenario";
    case ErrorCode::InvariantViolation: return "InvariantViolation";
    }
    return "Unknown";
}

/// Every failure raised by the library. The code is stable and intended for
/// programmatic matching; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    // Input errors map to CLI exit code 1; broken invariants to exit code 2.
    bool is_internal() const noexcept {
        return code_ == ErrorCode::InvariantViolation;
    }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

} // namespace toroid
