#pragma once

#include <stdexcept>
#include <string>

namespace optomech {

enum class ErrorCode {
    InvalidParameter,
    DegenerateMembrane,
    IndeterminateEquation,
    InadmissibleBranch,
    NoOperatingPoint,
    Admissibility,
    PhaseNotFixed,
    SingularInputCoupling,
    StabilityPrecondition,
    Conditioning,
    UnphysicalCovariance,
    NoEntanglement,
    Config,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidParameter: return "invalid-parameter";
    case ErrorCode::DegenerateMembrane: return "degenerate-membrane";
    case ErrorCode::IndeterminateEquation: return "indeterminate-equation";
    case ErrorCode::InadmissibleBranch: return "inadmissible-branch";
    case ErrorCode::NoOperatingPoint: return "no-operating-point";
    case ErrorCode::Admissibility: return "admissibility";
    case ErrorCode::PhaseNotFixed: return "phase-not-fixed";
    case ErrorCode::SingularInputCoupling: return "singular-input-coupling";
    case ErrorCode::StabilityPrecondition: return "stability-precondition";
    case ErrorCode::Conditioning: return "conditioning";
    case ErrorCode::UnphysicalCovariance: return "unphysical-covariance";
    case ErrorCode::NoEntanglement: return "no-entanglement";
    case ErrorCode::Config: return "config";
    }
    return "unknown";
}

/// Library-wide exception; `code()` identifies the failure class.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace optomech
