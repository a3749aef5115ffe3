#pragma once

#include "ppgbp/arx.hpp"
#include "ppgbp/beats.hpp"
#include "ppgbp/protocol.hpp"
#include "ppgbp/search.hpp"
#include "ppgbp/signal.hpp"
#include "ppgbp/synth.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ppgbp {

struct SessionFileSet {
    std::filesystem::path signals;
    std::filesystem::path annotations;
};

/// Writes `content` to a temporary sibling file and renames it over `path`. Throws IoError.
void atomic_write(const std::filesystem::path& path, std::string_view content);
std::string read_text(const std::filesystem::path& path);

/// Shortest decimal text that reads back to the same double.
std::string format_double(double v);
/// At most nine significant digits, as used for waveform samples.
std::string format_sample(double v);

// Signals file: header `fs_hz=..,unit_bp=mmHg,unit_ppg=au,start_s=..[,subject_id=..]`,
// then one `bp,ppg` (or `t,bp,ppg`) line per sample.
struct SignalPair {
    std::string subject_id;
    UniformSignal bp;
    UniformSignal ppg;
};
std::string signals_to_text(const SessionRecord& session);
SignalPair signals_from_text(std::string_view text);

// Annotations file: header `label,start_s,end_s`, one interval per line.
std::string annotations_to_text(const std::vector<IntervalAnnotation>& annotations);
std::vector<IntervalAnnotation> annotations_from_text(std::string_view text);

void write_session(const SessionFileSet& files, const SessionRecord& session);
/// Throws ParseError (with line and column), RateMismatch or InvariantViolation.
SessionRecord read_session(const SessionFileSet& files);

// Model file: `key=value` lines (na, nb, nk, fs_hz, a, b, fit_mse); lists are comma separated.
std::string model_to_text(const ArxModel& model);
ArxModel model_from_text(std::string_view text);
void write_model(const std::filesystem::path& path, const ArxModel& model);
ArxModel read_model(const std::filesystem::path& path);

/// Beat file: header `series,t_s,value`, one beat per line.
std::string beats_to_text(const std::vector<std::pair<std::string, BeatSeries>>& series);

std::string search_report_to_json(const SearchReport& report);

std::string eval_report_to_json(const EvalReport& report);
EvalReport eval_report_from_json(std::string_view text);
std::string summary_to_json(const Summary& summary);
std::string synth_truth_to_json(const SynthConfig& config, const GroundTruth& truth);

/// "m.mm ± s.ss"
std::string format_mean_std(double mean, double std);
/// "r.rr"
std::string format_rmse(double rmse);

/// Human tables for one subject: model and cross-validation errors (mean ± std and rMSE).
std::string eval_report_to_table(const EvalReport& report);
/// Human tables for a batch: pooled mean ± std and averaged rMSE, model and cross-validation.
std::string summary_to_table(const Summary& summary);

/// Writes the JSON report to json_path and, when table_path is non-empty, the human table.
void write_report(const EvalReport& report, const std::filesystem::path& json_path,
                  const std::filesystem::path& table_path = {});
void write_report(const Summary& summary, const std::filesystem::path& json_path,
                  const std::filesystem::path& table_path = {});

/// CSV `model_bh,target_bh,measure,t_s,measured,estimated`.
std::string traces_to_csv(const std::vector<Trace>& traces);

}  // namespace ppgbp
