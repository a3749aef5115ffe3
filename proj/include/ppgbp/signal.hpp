#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ppgbp {

/// Working rate of every envelope and model in the pipeline.
inline constexpr double k_model_fs_hz = 100.0;

enum class Unit { mmHg, au };

std::string_view to_string(Unit unit);
Unit parse_unit(std::string_view text);

/**
 * @brief Evenly sampled waveform with its rate, start time and unit.
 *
 * Sample k sits at start_s + k / fs_hz. Construction rejects a non-positive
 * rate and non-finite samples, so every live instance satisfies both.
 */
class UniformSignal {
public:
    UniformSignal(double fs_hz, double start_s, Unit unit, std::vector<double> samples);

    double fs_hz() const noexcept { return fs_hz_; }
    double start_s() const noexcept { return start_s_; }
    Unit unit() const noexcept { return unit_; }
    std::size_t size() const noexcept { return samples_.size(); }
    bool empty() const noexcept { return samples_.empty(); }
    std::span<const double> samples() const noexcept { return samples_; }
    double operator[](std::size_t k) const { return samples_[k]; }

    double time_at(std::size_t k) const { return start_s_ + static_cast<double>(k) / fs_hz_; }
    /// End of the covered extent, start_s + size / fs_hz (one period past the last sample).
    double end_s() const { return time_at(samples_.size()); }

    friend bool operator==(const UniformSignal&, const UniformSignal&) = default;

private:
    double fs_hz_;
    double start_s_;
    Unit unit_;
    std::vector<double> samples_;
};

/// Protocol segment label: BASELINE, BH1..BH5, NB1..NB5, END.
struct IntervalLabel {
    enum class Kind { baseline, bh, nb, end };

    Kind kind = Kind::baseline;
    int index = 0;  // 1-based for BH/NB, 0 otherwise

    static IntervalLabel baseline() { return {Kind::baseline, 0}; }
    static IntervalLabel bh(int k) { return {Kind::bh, k}; }
    static IntervalLabel nb(int k) { return {Kind::nb, k}; }
    static IntervalLabel end() { return {Kind::end, 0}; }

    bool is_bh() const noexcept { return kind == Kind::bh; }
    std::string str() const;
    static IntervalLabel parse(std::string_view text);

    friend auto operator<=>(const IntervalLabel&, const IntervalLabel&) = default;
};

struct IntervalAnnotation {
    IntervalLabel label;
    double start_s = 0.0;
    double end_s = 0.0;

    friend bool operator==(const IntervalAnnotation&, const IntervalAnnotation&) = default;
};

/**
 * @brief Synchronized BP + PPG recording of one subject plus protocol annotations.
 *
 * The constructor enforces the record invariants: matching rate/start/length
 * of both channels, BP in mmHg and PPG in au, and annotations that are
 * ascending, non-overlapping, inside the signal extent and with unique labels.
 * Violations throw ErrorCode::invariant_violation.
 */
class SessionRecord {
public:
    SessionRecord(std::string subject_id, UniformSignal bp, UniformSignal ppg,
                  std::vector<IntervalAnnotation> annotations);

    const std::string& subject_id() const noexcept { return subject_id_; }
    const UniformSignal& bp() const noexcept { return bp_; }
    const UniformSignal& ppg() const noexcept { return ppg_; }
    const std::vector<IntervalAnnotation>& annotations() const noexcept { return annotations_; }

    std::optional<IntervalAnnotation> find(IntervalLabel label) const;
    std::vector<IntervalAnnotation> bh_intervals() const;

    friend bool operator==(const SessionRecord&, const SessionRecord&) = default;

private:
    std::string subject_id_;
    UniformSignal bp_;
    UniformSignal ppg_;
    std::vector<IntervalAnnotation> annotations_;
};

/**
 * Linear-phase windowed-sinc low-pass (Kaiser window).
 *
 * cutoff and transition are in Hz at rate fs_hz; the tap count is odd and the
 * taps sum to exactly one.
 */
std::vector<double> lowpass_taps(double fs_hz, double cutoff_hz, double transition_hz,
                                 double stopband_db);

/// Taps used by downsample() for the given rate pair.
std::vector<double> antialias_taps(double source_fs_hz, double target_fs_hz);

/**
 * Zero-phase low-pass (cutoff 0.4 * target rate, forward-backward, reflect
 * padding by one filter length) followed by integer decimation.
 *
 * Throws NonIntegerFactor when the rate ratio is not an integer and
 * SignalTooShort when the input is not longer than the filter.
 */
UniformSignal downsample(const UniformSignal& signal, double target_fs_hz);

/// Samples whose timestamps fall in [start_s, end_s). Throws OutOfRange outside the extent.
UniformSignal slice(const UniformSignal& signal, double start_s, double end_s);

}  // namespace ppgbp
