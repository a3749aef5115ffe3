#pragma once

#include "ppgbp/arx.hpp"
#include "ppgbp/beats.hpp"
#include "ppgbp/error.hpp"
#include "ppgbp/search.hpp"
#include "ppgbp/signal.hpp"
#include "ppgbp/spline.hpp"
#include "ppgbp/stats.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace ppgbp {

/// Fitted BP channel: SBP is driven by PPG peaks, DBP by PPG troughs.
enum class Channel { sbp, dbp };
enum class Measure { sbp, dbp, mbp };

std::string_view to_string(Channel c);
std::string_view to_string(Measure m);
Channel parse_channel(std::string_view text);

struct Segment {
    IntervalLabel label;
    UniformSignal bp;
    UniformSignal ppg;
};

struct Segmentation {
    std::vector<Segment> segments;  // annotation order
    bool partial = false;           // fewer than BH1..BH5 present
    std::string warning;
};

/// Per-annotation BP/PPG slices. Throws MissingAnnotation when no BH interval exists.
Segmentation segment(const SessionRecord& session);

/// Pointwise (2 * DBP + SBP) / 3. Throws ShapeMismatch or UnitMismatch.
UniformSignal mbp(const UniformSignal& sbp, const UniformSignal& dbp);

struct ProtocolOptions {
    DetectorParams detector;
    OrderGrid grid = OrderGrid::from_env();
    SelectionCriterion selection = SelectionCriterion::free_run;
    bool remove_mean = false;  // fit and simulate on per-interval deviations from the mean
};

/// Beat series of a whole session and their splines.
struct SessionEnvelopes {
    BeatSeries sbp_beats, dbp_beats, ppg_peak_beats, ppg_trough_beats;
    CubicSpline sbp, dbp, ppg_peak, ppg_trough;
};

SessionEnvelopes build_envelopes(const SessionRecord& session, const DetectorParams& params = {});

/// Envelopes of one interval on the common 100 Hz grid t = m / 100, clipped to all four knot spans.
struct IntervalEnvelopes {
    IntervalLabel label;
    UniformSignal sbp, dbp, ppg_peak, ppg_trough;

    const UniformSignal& output(Channel c) const { return c == Channel::sbp ? sbp : dbp; }
    const UniformSignal& input(Channel c) const { return c == Channel::sbp ? ppg_peak : ppg_trough; }
};

IntervalEnvelopes interval_envelopes(const SessionEnvelopes& env, const IntervalAnnotation& interval);

SearchReport fit_interval_report(const SessionRecord& session, IntervalLabel interval, Channel channel,
                                 const ProtocolOptions& options = {});

/// Detect, spline and search; returns the winning model. Errors carry the interval name.
ArxModel fit_interval(const SessionRecord& session, IntervalLabel interval, Channel channel,
                      const ProtocolOptions& options = {});

/// Measured-minus-estimated errors of `model` simulated on the target interval, for m >= m0.
struct ChannelErrors {
    std::size_t first_index = 0;  // grid index (within the interval) of errors[0]
    std::vector<double> measured;
    std::vector<double> estimated;
    std::vector<double> errors;
};

ChannelErrors channel_errors(const ArxModel& model, const IntervalEnvelopes& target, Channel channel,
                             bool remove_mean = false);

/// MBP errors over the range where both channel estimates exist.
ChannelErrors mbp_errors(const ChannelErrors& sbp, const ChannelErrors& dbp);

struct Cell {
    std::optional<ErrorStats> stats;
    std::optional<ErrorCode> error;
    std::string message;

    bool ok() const noexcept { return stats.has_value(); }
};

struct PairCell {
    int model_bh = 0;
    int target_bh = 0;
    Cell cell;
};

struct MeasureReport {
    Measure measure = Measure::sbp;
    std::vector<Cell> model;        // one per BH, order of EvalReport::bh
    std::vector<PairCell> pairs;    // ordered (model, target) pairs, model != target
    std::vector<Cell> pooled_cv;    // one per target BH, pooling its pairs
};

struct ModelEntry {
    int bh = 0;
    Channel channel = Channel::sbp;
    std::optional<ArxModel> model;
    std::optional<ErrorCode> error;
    std::string message;
};

struct EvalReport {
    std::string subject_id;
    SelectionCriterion selection = SelectionCriterion::free_run;
    std::vector<int> bh;  // BH indices evaluated, ascending
    bool partial = false;
    std::vector<ModelEntry> models;
    std::array<MeasureReport, 3> measures;

    const MeasureReport& measure(Measure m) const { return measures[static_cast<std::size_t>(m)]; }
};

/**
 * Model errors for every BH interval and cross-validation errors for every
 * ordered pair of distinct BH intervals, for SBP, DBP and MBP. Failed cells
 * are marked rather than aborting. Throws MissingAnnotation for fewer than
 * two BH intervals.
 */
EvalReport evaluate(const SessionRecord& session, const ProtocolOptions& options = {});

struct SummaryCell {
    std::size_t subjects = 0;  // reports contributing a successful cell
    std::size_t failed = 0;
    double mean_rmse = 0.0;    // mean of per-subject rMSE
    std::optional<ErrorStats> pooled;  // errors pooled across subjects
};

struct MeasureSummary {
    Measure measure = Measure::sbp;
    std::vector<SummaryCell> model;  // per BH, order of Summary::bh
    std::vector<SummaryCell> cv;
    double overall_model_rmse = 0.0;  // mean over the BH cells with data
    double overall_cv_rmse = 0.0;
};

struct Summary {
    std::size_t reports = 0;
    std::vector<int> bh;
    std::array<MeasureSummary, 3> measures;

    const MeasureSummary& measure(Measure m) const { return measures[static_cast<std::size_t>(m)]; }
};

/// Measured and estimated envelopes of one (model, target) evaluation, for plotting.
struct Trace {
    int model_bh = 0;
    int target_bh = 0;
    Measure measure = Measure::sbp;
    double start_s = 0.0;  // time of data.measured[0]
    ChannelErrors data;
};

/// Traces for every BH (model == target) and, with all_pairs, every ordered pair. Failed fits are skipped.
std::vector<Trace> traces(const SessionRecord& session, const ProtocolOptions& options = {}, bool all_pairs = false);

/// Cross-subject tables. Throws EmptyInput for an empty list.
Summary aggregate(std::span<const EvalReport> reports);

}  // namespace ppgbp
