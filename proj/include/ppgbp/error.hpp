#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ppgbp {

enum class ErrorCode {
    invalid_argument,
    non_integer_factor,
    signal_too_short,
    out_of_range,
    unit_mismatch,
    rate_mismatch,
    empty_result,
    too_short,
    too_few_knots,
    duplicate_times,
    extrapolation_requested,
    rank_deficient,
    seed_length_mismatch,
    all_candidates_failed,
    missing_annotation,
    shape_mismatch,
    empty_input,
    unstable_true_model,
    invalid_durations,
    parse_error,
    invariant_violation,
    io_error,
    diverged,
};

/// CamelCase name used in machine-parsable error lines, e.g. "RankDeficient".
std::string_view to_string(ErrorCode code);
/// Inverse of to_string; throws ParseError for unknown names.
ErrorCode parse_error_code(std::string_view name);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace ppgbp
