#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fracevo {

enum class ErrorCode {
    InvalidArgument,
    TailNotBounded,
    NotDeterminable,
    NoLimit,
    OrderIntegral,
    ConditionViolated,
    SamplingOverflow,
    BoundViolated,
    PreconditionFailed,
    SingularBasis,
    ZeroEigenvalue,
    IllConditioned,
    NearPole,
    NoDecay,
    NodeOnPole,
    ToleranceNotMet,
    NoConvergence,
    JetOverflow,
    BranchCrossing,
    AuditFailed,
    NonDecaying,
    EnvelopeViolated,
    ConfigError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::TailNotBounded: return "TailNotBounded";
    case ErrorCode::NotDeterminable: return "NotDeterminable";
    case ErrorCode::NoLimit: return "NoLimit";
    case ErrorCode::OrderIntegral: return "OrderIntegral";
    case ErrorCode::ConditionViolated: return "ConditionViolated";
    case ErrorCode::SamplingOverflow: return "SamplingOverflow";
    case ErrorCode::BoundViolated: return "BoundViolated";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::SingularBasis: return "SingularBasis";
    case ErrorCode::ZeroEigenvalue: return "ZeroEigenvalue";
    case ErrorCode::IllConditioned: return "IllConditioned";
    case ErrorCode::NearPole: return "NearPole";
    case ErrorCode::NoDecay: return "NoDecay";
    case ErrorCode::NodeOnPole: return "NodeOnPole";
    case ErrorCode::ToleranceNotMet: return "ToleranceNotMet";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::JetOverflow: return "JetOverflow";
    case ErrorCode::BranchCrossing: return "BranchCrossing";
    case ErrorCode::AuditFailed: return "AuditFailed";
    case ErrorCode::NonDecaying: return "NonDecaying";
    case ErrorCode::EnvelopeViolated: return "EnvelopeViolated";
    case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

} // namespace fracevo
