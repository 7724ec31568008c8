#include "qphase/error.hpp"

namespace qphase {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::DegenerateProbe: return "DegenerateProbe";
        case ErrorCode::InvalidVector: return "InvalidVector";
        case ErrorCode::SingularFisher: return "SingularFisher";
        case ErrorCode::InvalidDirection: return "InvalidDirection";
        case ErrorCode::QuadratureFailure: return "QuadratureFailure";
        case ErrorCode::EmptyDomain: return "EmptyDomain";
        case ErrorCode::InsufficientBudget: return "InsufficientBudget";
        case ErrorCode::MixedProbe: return "MixedProbe";
        case ErrorCode::DegenerateMoment: return "DegenerateMoment";
        case ErrorCode::EmptySample: return "EmptySample";
        case ErrorCode::UndefinedVariance: return "UndefinedVariance";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace qphase
