#pragma once

#include <stdexcept>
#include <string>

namespace stringy {

/// Failure categories shared by every module. Mathematical errors mean the
/// input is well formed but the requested invariant does not exist for it;
/// input errors mean the data itself is malformed.
enum class ErrorKind {
    ZeroDenominator,
    MinusOneCoefficient,
    PoleAtOne,
    CancellationDepthExceeded,
    NotNegativeDefinite,
    BlowupAtMinusOneCurve,
    UnknownSite,
    NotAdmissible,
    AdjunctionViolated,
    InvalidSector,
    NotRotationEligible,
    InconsistentCover,
    DegreeThree,
    InvalidFan,
    NotCalabiYau,
    NonAbelianGroup,
    ExponentOverflow,
    ParseError,
    SchemaError,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::ZeroDenominator: return "ZeroDenominator";
    case ErrorKind::MinusOneCoefficient: return "MinusOneCoefficient";
    case ErrorKind::PoleAtOne: return "PoleAtOne";
    case ErrorKind::CancellationDepthExceeded: return "CancellationDepthExceeded";
    case ErrorKind::NotNegativeDefinite: return "NotNegativeDefinite";
    case ErrorKind::BlowupAtMinusOneCurve: return "BlowupAtMinusOneCurve";
    case ErrorKind::UnknownSite: return "UnknownSite";
    case ErrorKind::NotAdmissible: return "NotAdmissible";
    case ErrorKind::AdjunctionViolated: return "AdjunctionViolated";
    case ErrorKind::InvalidSector: return "InvalidSector";
    case ErrorKind::NotRotationEligible: return "NotRotationEligible";
    case ErrorKind::InconsistentCover: return "InconsistentCover";
    case ErrorKind::DegreeThree: return "DegreeThree";
    case ErrorKind::InvalidFan: return "InvalidFan";
    case ErrorKind::NotCalabiYau: return "NotCalabiYau";
    case ErrorKind::NonAbelianGroup: return "NonAbelianGroup";
    case ErrorKind::ExponentOverflow: return "ExponentOverflow";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::SchemaError: return "SchemaError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    /// Input errors (exit code 2 in the CLI) as opposed to mathematical ones.
    bool is_input_error() const noexcept {
        return kind_ == ErrorKind::ParseError || kind_ == ErrorKind::SchemaError || kind_ == ErrorKind::UnknownSite ||
               kind_ == ErrorKind::InvalidFan || kind_ == ErrorKind::InvalidSector;
    }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

} // namespace stringy
