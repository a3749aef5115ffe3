#include "ppgbp/error.hpp"

namespace ppgbp {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::invalid_argument: return "InvalidArgument";
        case ErrorCode::non_integer_factor: return "NonIntegerFactor";
        case ErrorCode::signal_too_short: return "SignalTooShort";
        case ErrorCode::out_of_range: return "OutOfRange";
        case ErrorCode::unit_mismatch: return "UnitMismatch";
        case ErrorCode::rate_mismatch: return "RateMismatch";
        case ErrorCode::empty_result: return "EmptyResult";
        case ErrorCode::too_short: return "TooShort";
        case ErrorCode::too_few_knots: return "TooFewKnots";
        case ErrorCode::duplicate_times: return "DuplicateTimes";
        case ErrorCode::extrapolation_requested: return "ExtrapolationRequested";
        case ErrorCode::rank_deficient: return "RankDeficient";
        case ErrorCode::seed_length_mismatch: return "SeedLengthMismatch";
        case ErrorCode::all_candidates_failed: return "AllCandidatesFailed";
        case ErrorCode::missing_annotation: return "MissingAnnotation";
        case ErrorCode::shape_mismatch: return "ShapeMismatch";
        case ErrorCode::empty_input: return "EmptyInput";
        case ErrorCode::unstable_true_model: return "UnstableTrueModel";
        case ErrorCode::invalid_durations: return "InvalidDurations";
        case ErrorCode::parse_error: return "ParseError";
        case ErrorCode::invariant_violation: return "InvariantViolation";
        case ErrorCode::io_error: return "IoError";
        case ErrorCode::diverged: return "Diverged";
    }
    return "Unknown";
}

ErrorCode parse_error_code(std::string_view name) {
    for (int i = 0; i <= static_cast<int>(ErrorCode::diverged); ++i) {
        const auto code = static_cast<ErrorCode>(i);
        if (to_string(code) == name) return code;
    }
    fail(ErrorCode::parse_error, "unknown error code '" + std::string(name) + "'");
}

}  // namespace ppgbp
