#include "sgboost/error.hpp"

namespace sgboost {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Parse: return "Parse";
        case ErrorCode::MissingColumn: return "MissingColumn";
        case ErrorCode::MissingValue: return "MissingValue";
        case ErrorCode::UnknownCategory: return "UnknownCategory";
        case ErrorCode::NonBinaryOutcome: return "NonBinaryOutcome";
        case ErrorCode::DegenerateColumn: return "DegenerateColumn";
        case ErrorCode::DegenerateOutcome: return "DegenerateOutcome";
        case ErrorCode::UnattainableDf: return "UnattainableDf";
        case ErrorCode::NumericalFailure: return "NumericalFailure";
        case ErrorCode::ColumnMismatch: return "ColumnMismatch";
        case ErrorCode::TooFewObservations: return "TooFewObservations";
        case ErrorCode::DegenerateFold: return "DegenerateFold";
        case ErrorCode::SingleClass: return "SingleClass";
        case ErrorCode::UnknownLearner: return "UnknownLearner";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::FingerprintMismatch: return "FingerprintMismatch";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace sgboost
