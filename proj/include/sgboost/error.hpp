#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sgboost {

enum class ErrorCode {
    InvalidArgument,
    Parse,
    MissingColumn,
    MissingValue,
    UnknownCategory,
    NonBinaryOutcome,
    DegenerateColumn,
    DegenerateOutcome,
    UnattainableDf,
    NumericalFailure,
    ColumnMismatch,
    TooFewObservations,
    DegenerateFold,
    SingleClass,
    UnknownLearner,
    NonConvergence,
    FingerprintMismatch,
    Io,
};

std::string_view to_string(ErrorCode code);

/// Library-wide exception. Carries a machine-readable code next to the
/// message so the CLI can map failures to exit codes.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

    /// 2 for numerical failures, 1 for everything the user can fix.
    int exit_code() const noexcept {
        return code_ == ErrorCode::NumericalFailure ? 2 : 1;
    }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, std::string(to_string(code)) + ": " + what);
}

}  // namespace sgboost
