#pragma once

#include "ppgbp/arx.hpp"
#include "ppgbp/signal.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace ppgbp {

/**
 * @brief Parameters of a synthetic breath-hold session.
 *
 * Timeline: BASELINE, then BH k followed by NB k for k = 1..n_bh, then END.
 * NB1..NB(n_bh-1) last nb_gap_s; the trailing NB lasts trailing_nb_s.
 */
struct SynthConfig {
    std::uint64_t seed = 1;
    std::string subject_id = "synth";

    int n_bh = 5;
    double baseline_s = 60.0;
    double nb_gap_s = 90.0;
    double trailing_nb_s = 90.0;
    double end_pad_s = 5.0;             // minimum length of the END segment
    std::vector<double> bh_durations_s; // empty: drawn uniformly from [bh_min_s, bh_max_s]
    double bh_min_s = 25.0;
    double bh_max_s = 45.0;

    double heart_rate_bpm = 72.0;
    double heart_rate_sd_bpm = 3.0;     // beat-to-beat jitter, clipped at 2.5 sd

    double sbp_base_mmHg = 120.0;
    double dbp_base_mmHg = 80.0;
    double bh_rise_mmHg = 25.0;         // SBP ramp amplitude over each BH
    double bh_rise_dbp_mmHg = 15.0;
    double recovery_s = 8.0;            // decay constant of the ramp after a BH
    double wander_mmHg = 1.0;           // slow baseline wander amplitude
    double beat_variability_mmHg = 1.0; // beat-to-beat latent variability

    ArxModel true_sbp_model;
    ArxModel true_dbp_model;
    double noise_sd_mmHg = 1.0;         // added to BP beat values

    bool shared_model = true;
    double perturb_pole_sd = 0.03;      // per-BH relative root scaling when !shared_model
    double perturb_gain_sd = 0.015;     // per-BH relative DC-gain change when !shared_model

    double fs_hz = 1000.0;

    SynthConfig();

    /// Gain + pure delay links (a = [0], b = [100]): the only links whose
    /// measured envelopes close exactly through one-knot-per-beat splines.
    static SynthConfig exact_closure(std::uint64_t seed = 1);

    /// Per-BH perturbed models and envelope noise giving errors of a few mmHg.
    static SynthConfig paper_like(std::uint64_t seed = 1);

    void validate() const;
};

/// Injected noise realization summary.
struct NoiseSummary {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;
};

struct GroundTruth {
    // PPG beats (inputs) and the latent values they carry.
    std::vector<double> ppg_peak_t, ppg_peak_value;
    std::vector<double> ppg_trough_t, ppg_trough_value;
    // BP beats: envelope value before noise and the value written to the waveform.
    std::vector<double> sbp_t, sbp_clean, sbp_emitted;
    std::vector<double> dbp_t, dbp_clean, dbp_emitted;

    std::vector<ArxModel> sbp_models;  // one per BH (identical when shared)
    std::vector<ArxModel> dbp_models;
    std::vector<double> bh_durations_s;

    // 100 Hz envelopes: the latent PPG envelopes and the ARX outputs driven by them.
    UniformSignal ppg_peak_grid{k_model_fs_hz, 0.0, Unit::au, {}};
    UniformSignal sbp_grid{k_model_fs_hz, 0.0, Unit::mmHg, {}};
    UniformSignal ppg_trough_grid{k_model_fs_hz, 0.0, Unit::au, {}};
    UniformSignal dbp_grid{k_model_fs_hz, 0.0, Unit::mmHg, {}};

    NoiseSummary sbp_noise, dbp_noise;
};

struct SynthResult {
    SessionRecord session;
    GroundTruth truth;
};

/// Throws UnstableTrueModel or InvalidDurations; identical config gives identical output.
SynthResult generate(const SynthConfig& config);

/// Input/output data of an equation-error ARX system driven by white Gaussian input.
struct ArxDataset {
    UniformSignal u;
    UniformSignal y;
    std::vector<double> noise;  // e(m), zero for the first m0 samples
};

ArxDataset generate_arx_dataset(const ArxModel& model, std::size_t n, double input_sd, double noise_sd,
                                std::uint64_t seed);

}  // namespace ppgbp
