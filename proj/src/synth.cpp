#include "ppgbp/synth.hpp"

#include "ppgbp/error.hpp"
#include "ppgbp/spline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <numbers>
#include <random>

namespace ppgbp {

namespace {

// Beat timing lives on a 10 ms grid, counted in these ticks.
constexpr double k_tick_hz = 100.0;
constexpr std::int64_t k_ppg_upstroke_ticks = 18;
constexpr std::int64_t k_end_margin_ticks = 2;

double quantize(double x, double step) {
    return std::round(x / step) * step;
}

// Timeline boundaries snap to whole milliseconds.
double q_ms(double x) { return std::round(x * 1e3) / 1e3; }

double q_bp(double x) { return std::round(x * 1e6) / 1e6; }
double q_ppg(double x) { return std::round(x * 1e8) / 1e8; }

struct PulseShape {
    double decay_rate;
    double bump_height;
    double bump_center;
    double bump_width;

    // 1 at the peak (x = 0), 0 at the next trough (x = 1).
    double decay(double x) const {
        const double tail = std::exp(-decay_rate);
        const double base = (std::exp(-decay_rate * x) - tail) / (1.0 - tail);
        const double z = (x - bump_center) / bump_width;
        return base + bump_height * std::exp(-0.5 * z * z);
    }
    // 0 at the trough, 1 at the peak.
    static double upstroke(double x) { return 0.5 * (1.0 - std::cos(std::numbers::pi * x)); }
};

constexpr PulseShape k_bp_shape{2.5, 0.08, 0.30, 0.03};
constexpr PulseShape k_ppg_shape{1.8, 0.03, 0.35, 0.08};

/// Renders alternating peaks and troughs: peaks[k] precedes troughs[k] which precedes peaks[k + 1].
std::vector<double> render(std::int64_t n, const std::vector<std::int64_t>& peak_idx, const std::vector<double>& peak_val,
                           const std::vector<std::int64_t>& trough_idx, const std::vector<double>& trough_val,
                           const PulseShape& shape, double (*q)(double)) {
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    auto fill = [&](std::int64_t from, std::int64_t to, auto&& value_at) {
        for (std::int64_t i = std::max<std::int64_t>(from, 0); i < std::min(to, n); ++i) {
            x[static_cast<std::size_t>(i)] = q(value_at(static_cast<double>(i - from) / static_cast<double>(to - from)));
        }
    };
    for (std::size_t k = 0; k < trough_idx.size(); ++k) {
        const double hi = peak_val[k], lo = trough_val[k];
        fill(peak_idx[k], trough_idx[k], [&](double u) { return lo + (hi - lo) * shape.decay(u); });
        const double next = peak_val[k + 1];
        fill(trough_idx[k], peak_idx[k + 1], [&](double u) { return lo + (next - lo) * PulseShape::upstroke(u); });
    }
    // Extremum samples carry the beat values exactly, with mirrored neighbours
    // so the three-point parabola has its vertex on the sample.
    auto pin = [&](std::int64_t i, double v) {
        if (i < 1 || i + 1 >= n) return;
        const auto s = static_cast<std::size_t>(i);
        x[s] = v;
        x[s + 1] = x[s - 1];
    };
    for (std::size_t k = 0; k < peak_idx.size(); ++k) pin(peak_idx[k], peak_val[k]);
    for (std::size_t k = 0; k < trough_idx.size(); ++k) pin(trough_idx[k], trough_val[k]);
    return x;
}

ArxModel perturbed(const ArxModel& base, double pole_scale, double gain_scale) {
    ArxModel m = base;
    double max_root = 0.0;
    for (const auto& r : ar_roots(base)) max_root = std::max(max_root, std::abs(r));
    if (max_root > 0.0) pole_scale = std::min(pole_scale, 0.995 / max_root);
    double p = 1.0;
    for (auto& a : m.a) {
        p *= pole_scale;
        a *= p;
    }
    const double b_sum = std::accumulate(m.b.begin(), m.b.end(), 0.0);
    if (b_sum != 0.0) {
        const double target = dc_gain(base) * gain_scale;
        const double s = target * (1.0 + std::accumulate(m.a.begin(), m.a.end(), 0.0)) / b_sum;
        for (auto& b : m.b) b *= s;
    }
    return m;
}

/**
 * ARX recursion with the active model chosen by absolute tick index.
 * With a single model this is exactly simulate().
 */
std::vector<double> run_link(const std::vector<ArxModel>& models, const std::vector<std::int64_t>& switch_tick,
                             std::int64_t first_tick, const std::vector<double>& u, double seed_value) {
    const std::size_t m0 = models.front().orders.m0();
    const std::vector<double> seed(m0, seed_value);
    const UniformSignal us(k_model_fs_hz, 0.0, Unit::au, u);
    if (models.size() == 1) {
        const auto y = simulate(models.front(), us, seed);
        return {y.samples().begin(), y.samples().end()};
    }
    std::vector<double> y(u.size());
    std::copy(seed.begin(), seed.end(), y.begin());
    const auto& o = models.front().orders;
    for (std::size_t m = m0; m < y.size(); ++m) {
        const std::int64_t tick = first_tick + static_cast<std::int64_t>(m);
        std::size_t k = 0;
        while (k + 1 < switch_tick.size() && switch_tick[k + 1] <= tick) ++k;
        const auto& model = models[k];
        double acc = 0.0;
        for (int i = 1; i <= o.na; ++i) acc -= model.a[i - 1] * y[m - i];
        for (int j = 1; j <= o.nb; ++j) acc += model.b[j - 1] * u[m - o.nk - j + 1];
        y[m] = acc;
    }
    return y;
}

NoiseSummary summarize(const std::vector<double>& e) {
    NoiseSummary s;
    s.n = e.size();
    if (e.empty()) return s;
    s.mean = std::accumulate(e.begin(), e.end(), 0.0) / static_cast<double>(e.size());
    double dev = 0.0;
    for (double v : e) dev += (v - s.mean) * (v - s.mean);
    s.sd = e.size() > 1 ? std::sqrt(dev / static_cast<double>(e.size() - 1)) : 0.0;
    return s;
}

ArxModel first_order(double a1, double b1, int nk) {
    ArxModel m;
    m.orders = {1, 1, nk};
    m.a = {a1};
    m.b = {b1};
    m.fs_hz = k_model_fs_hz;
    return m;
}

}  // namespace

SynthConfig::SynthConfig()
    : true_sbp_model(first_order(-0.9, 10.0, 3)), true_dbp_model(first_order(-0.85, 15.0, 2)) {}

SynthConfig SynthConfig::exact_closure(std::uint64_t seed) {
    SynthConfig c;
    c.seed = seed;
    c.true_sbp_model = first_order(0.0, 100.0, 3);
    c.true_dbp_model = first_order(0.0, 100.0, 2);
    c.noise_sd_mmHg = 0.0;
    c.shared_model = true;
    return c;
}

SynthConfig SynthConfig::paper_like(std::uint64_t seed) {
    SynthConfig c;
    c.seed = seed;
    c.subject_id = "S" + std::to_string(seed);
    c.noise_sd_mmHg = 2.5;
    c.shared_model = false;
    return c;
}

void SynthConfig::validate() const {
    auto bad_duration = [](const std::string& what) { fail(ErrorCode::invalid_durations, what); };
    if (n_bh < 1 || n_bh > 5) bad_duration("n_bh must lie in 1..5");
    if (!(baseline_s > 0.0) || !(nb_gap_s > 0.0) || !(trailing_nb_s > 0.0) || !(end_pad_s > 0.0)) {
        bad_duration("baseline, NB and END durations must be positive");
    }
    if (bh_durations_s.empty()) {
        if (!(bh_min_s > 0.0) || !(bh_max_s >= bh_min_s)) bad_duration("BH duration range must be positive and ordered");
    } else {
        if (bh_durations_s.size() != static_cast<std::size_t>(n_bh)) {
            bad_duration("bh_durations_s must hold n_bh entries");
        }
        for (double d : bh_durations_s) {
            if (!(d > 0.0) || !std::isfinite(d)) bad_duration("BH durations must be positive");
        }
    }
    if (!(heart_rate_bpm > 0.0) || !(heart_rate_sd_bpm >= 0.0) || heart_rate_bpm - 2.5 * heart_rate_sd_bpm <= 20.0 ||
        heart_rate_bpm + 2.5 * heart_rate_sd_bpm >= 150.0) {
        fail(ErrorCode::invalid_argument, "heart rate band must stay within 20..150 bpm");
    }
    if (!(dbp_base_mmHg < sbp_base_mmHg)) fail(ErrorCode::invalid_argument, "dbp_base must be below sbp_base");
    if (!(noise_sd_mmHg >= 0.0)) fail(ErrorCode::invalid_argument, "noise_sd must be non-negative");
    const double ticks = fs_hz / k_tick_hz;
    if (!(ticks >= 1.0) || ticks != std::round(ticks)) {
        fail(ErrorCode::invalid_argument, "fs_hz must be a positive multiple of 100");
    }
    for (const ArxModel* m : {&true_sbp_model, &true_dbp_model}) {
        m->validate();
        if (m->fs_hz != k_model_fs_hz) fail(ErrorCode::invalid_argument, "true models must run at 100 Hz");
        if (m->orders.nk > 5) fail(ErrorCode::invalid_argument, "true model delay must be at most 5 samples");
        if (!is_stable(*m)) fail(ErrorCode::unstable_true_model, "true model has a root on or outside the unit circle");
        if (!(dc_gain(*m) > 0.0)) fail(ErrorCode::invalid_argument, "true model DC gain must be positive");
    }
}

SynthResult generate(const SynthConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto clipped_normal = [&] { return std::clamp(normal(rng), -2.5, 2.5); };

    GroundTruth truth;

    // Protocol timeline.
    for (int k = 0; k < cfg.n_bh; ++k) {
        if (!cfg.bh_durations_s.empty()) {
            truth.bh_durations_s.push_back(cfg.bh_durations_s[static_cast<std::size_t>(k)]);
        } else {
            std::uniform_real_distribution<double> u(cfg.bh_min_s, cfg.bh_max_s);
            truth.bh_durations_s.push_back(quantize(u(rng), 0.01));
        }
    }
    std::vector<IntervalAnnotation> annotations;
    annotations.push_back({IntervalLabel::baseline(), 0.0, cfg.baseline_s});
    std::vector<double> bh_start, bh_end, nb_end;
    double t = cfg.baseline_s;
    for (int k = 1; k <= cfg.n_bh; ++k) {
        const double d = truth.bh_durations_s[static_cast<std::size_t>(k - 1)];
        const double gap = k == cfg.n_bh ? cfg.trailing_nb_s : cfg.nb_gap_s;
        const double t_bh_end = q_ms(t + d);
        const double t_nb_end = q_ms(t_bh_end + gap);
        bh_start.push_back(t);
        bh_end.push_back(t_bh_end);
        annotations.push_back({IntervalLabel::bh(k), t, t_bh_end});
        annotations.push_back({IntervalLabel::nb(k), t_bh_end, t_nb_end});
        nb_end.push_back(t_nb_end);
        t = t_nb_end;
    }
    const double protocol_end = t;

    // Per-BH models and the ticks at which each takes over (middle of the preceding NB).
    for (int k = 0; k < cfg.n_bh; ++k) {
        if (cfg.shared_model) {
            truth.sbp_models.push_back(cfg.true_sbp_model);
            truth.dbp_models.push_back(cfg.true_dbp_model);
        } else {
            const double ps = 1.0 + cfg.perturb_pole_sd * clipped_normal();
            const double gs = 1.0 + cfg.perturb_gain_sd * clipped_normal();
            const double pd = 1.0 + cfg.perturb_pole_sd * clipped_normal();
            const double gd = 1.0 + cfg.perturb_gain_sd * clipped_normal();
            truth.sbp_models.push_back(perturbed(cfg.true_sbp_model, ps, gs));
            truth.dbp_models.push_back(perturbed(cfg.true_dbp_model, pd, gd));
        }
    }
    std::vector<std::int64_t> switch_tick{std::numeric_limits<std::int64_t>::min()};
    for (int k = 1; k < cfg.n_bh; ++k) {
        const auto i = static_cast<std::size_t>(k - 1);
        switch_tick.push_back(static_cast<std::int64_t>(std::llround(0.5 * (bh_end[i] + nb_end[i]) * k_tick_hz)));
    }
    const std::vector<ArxModel> sbp_link =
        cfg.shared_model ? std::vector<ArxModel>{cfg.true_sbp_model} : truth.sbp_models;
    const std::vector<ArxModel> dbp_link =
        cfg.shared_model ? std::vector<ArxModel>{cfg.true_dbp_model} : truth.dbp_models;

    // Beat ticks: beat 0 sits just before the recording, beat K+1 just after it.
    std::vector<std::int64_t> beat{-8};
    const double stop = protocol_end + cfg.end_pad_s + static_cast<double>(k_end_margin_ticks) / k_tick_hz;
    while (static_cast<double>(beat.back()) / k_tick_hz < stop) {
        const double rr = 60.0 / (cfg.heart_rate_bpm + cfg.heart_rate_sd_bpm * clipped_normal());
        beat.push_back(beat.back() + std::llround(rr * k_tick_hz));
    }
    const std::size_t n_beats = beat.size();  // indices 0..K+1
    const std::size_t K = n_beats - 2;

    // Latent PPG beat values: baseline + slow wander + BH ramp + beat-to-beat variability.
    const double phase1 = 2.0 * std::numbers::pi * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double phase2 = 2.0 * std::numbers::pi * std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    auto wander = [&](double s) {
        return cfg.wander_mmHg * (0.6 * std::sin(2.0 * std::numbers::pi * s / 23.0 + phase1) +
                                  0.4 * std::sin(2.0 * std::numbers::pi * s / 61.0 + phase2));
    };
    auto ramp = [&](double s) {
        double r = 0.0;
        for (std::size_t k = 0; k < bh_start.size(); ++k) {
            if (s >= bh_start[k] && s < bh_end[k]) {
                r += (s - bh_start[k]) / (bh_end[k] - bh_start[k]);
            } else if (s >= bh_end[k]) {
                r += std::exp(-(s - bh_end[k]) / cfg.recovery_s);
            }
        }
        return r;
    };
    const double gain_s = dc_gain(cfg.true_sbp_model);
    const double gain_d = dc_gain(cfg.true_dbp_model);
    const double dbp_wander_scale = cfg.dbp_base_mmHg / cfg.sbp_base_mmHg;
    std::vector<double> P(n_beats), Q(n_beats);
    for (std::size_t k = 0; k < n_beats; ++k) {
        const double tp = static_cast<double>(beat[k]) / k_tick_hz;
        const double tt = static_cast<double>(beat[k] - k_ppg_upstroke_ticks) / k_tick_hz;
        const double vp = cfg.sbp_base_mmHg + wander(tp) + cfg.bh_rise_mmHg * ramp(tp) +
                          cfg.beat_variability_mmHg * normal(rng);
        const double vt = cfg.dbp_base_mmHg + dbp_wander_scale * wander(tt) + cfg.bh_rise_dbp_mmHg * ramp(tt) +
                          cfg.beat_variability_mmHg * normal(rng);
        P[k] = q_ppg(vp / gain_s);
        Q[k] = q_ppg(vt / gain_d);
    }

    // Latent PPG envelope on the 100 Hz grid, driven through the link.
    struct Link {
        std::vector<double> knot_values;  // latent input at in-window beats
        std::vector<std::int64_t> knot_tick;
        int nk;
        std::vector<double> grid_in, grid_out;
        std::int64_t first_tick;
    };
    auto drive = [&](const std::vector<std::int64_t>& ticks, const std::vector<double>& values,
                     const std::vector<ArxModel>& models, double gain) {
        Link l;
        l.knot_tick = ticks;
        l.knot_values = values;
        l.nk = models.front().orders.nk;
        std::vector<double> tk;
        for (auto tick : ticks) tk.push_back(static_cast<double>(tick) / k_tick_hz);
        const auto spline = fit_spline(tk, values, Unit::au);
        l.first_tick = ticks.front();
        const std::int64_t last = ticks.back();
        for (std::int64_t j = l.first_tick; j <= last; ++j) l.grid_in.push_back(spline(static_cast<double>(j) / k_tick_hz));
        std::vector<double> u = l.grid_in;
        u.insert(u.end(), static_cast<std::size_t>(l.nk), u.back());
        l.grid_out = run_link(models, switch_tick, l.first_tick, u, gain * l.grid_in.front());
        return l;
    };

    std::vector<std::int64_t> peak_ticks, trough_ticks;
    std::vector<double> peak_vals, trough_vals;
    for (std::size_t k = 1; k <= K; ++k) {
        peak_ticks.push_back(beat[k]);
        peak_vals.push_back(P[k]);
    }
    for (std::size_t k = 1; k <= K + 1; ++k) {
        trough_ticks.push_back(beat[k] - k_ppg_upstroke_ticks);
        trough_vals.push_back(Q[k]);
    }
    const Link sys = drive(peak_ticks, peak_vals, sbp_link, gain_s);
    const Link dia = drive(trough_ticks, trough_vals, dbp_link, gain_d);

    auto sample_link = [&](const Link& l, std::vector<double>& t_out, std::vector<double>& clean,
                           std::vector<double>& emitted, std::vector<double>& noise) {
        for (auto tick : l.knot_tick) {
            const std::int64_t out_tick = tick + l.nk;
            const double c = l.grid_out[static_cast<std::size_t>(out_tick - l.first_tick)];
            const double e = cfg.noise_sd_mmHg > 0.0 ? cfg.noise_sd_mmHg * normal(rng) : 0.0;
            t_out.push_back(static_cast<double>(out_tick) / k_tick_hz);
            clean.push_back(c);
            emitted.push_back(q_bp(c + e));
            noise.push_back(e);
        }
    };
    std::vector<double> sbp_noise, dbp_noise;
    sample_link(sys, truth.sbp_t, truth.sbp_clean, truth.sbp_emitted, sbp_noise);
    sample_link(dia, truth.dbp_t, truth.dbp_clean, truth.dbp_emitted, dbp_noise);
    truth.sbp_noise = summarize(sbp_noise);
    truth.dbp_noise = summarize(dbp_noise);

    for (std::size_t k = 0; k < peak_ticks.size(); ++k) {
        truth.ppg_peak_t.push_back(static_cast<double>(peak_ticks[k]) / k_tick_hz);
        truth.ppg_peak_value.push_back(peak_vals[k]);
    }
    for (std::size_t k = 0; k < trough_ticks.size(); ++k) {
        truth.ppg_trough_t.push_back(static_cast<double>(trough_ticks[k]) / k_tick_hz);
        truth.ppg_trough_value.push_back(trough_vals[k]);
    }
    auto grid_signal = [](const Link& l, const std::vector<double>& v, Unit unit) {
        return UniformSignal(k_model_fs_hz, static_cast<double>(l.first_tick) / k_tick_hz, unit,
                             std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(l.grid_in.size())));
    };
    truth.ppg_peak_grid = grid_signal(sys, sys.grid_in, Unit::au);
    truth.sbp_grid = grid_signal(sys, sys.grid_out, Unit::mmHg);
    truth.ppg_trough_grid = grid_signal(dia, dia.grid_in, Unit::au);
    truth.dbp_grid = grid_signal(dia, dia.grid_out, Unit::mmHg);

    // Waveforms at the recording rate.
    const auto r = static_cast<std::int64_t>(std::llround(cfg.fs_hz / k_tick_hz));
    const std::int64_t n = (beat[K + 1] - k_end_margin_ticks) * r;
    const int nk_s = cfg.true_sbp_model.orders.nk;
    const int nk_d = cfg.true_dbp_model.orders.nk;

    std::vector<std::int64_t> bp_peak_idx, bp_trough_idx, ppg_peak_idx, ppg_trough_idx;
    std::vector<double> bp_peak_val, bp_trough_val, ppg_peak_val, ppg_trough_val;
    for (std::size_t k = 0; k < n_beats; ++k) {
        bp_peak_idx.push_back((beat[k] + nk_s) * r);
        ppg_peak_idx.push_back(beat[k] * r);
        ppg_peak_val.push_back(P[k]);
        if (k == 0 || k == K + 1) {
            bp_peak_val.push_back(q_bp(gain_s * P[k]));
        } else {
            bp_peak_val.push_back(truth.sbp_emitted[k - 1]);
        }
    }
    for (std::size_t k = 1; k < n_beats; ++k) {
        bp_trough_idx.push_back((beat[k] - k_ppg_upstroke_ticks + nk_d) * r);
        bp_trough_val.push_back(truth.dbp_emitted[k - 1]);
        ppg_trough_idx.push_back((beat[k] - k_ppg_upstroke_ticks) * r);
        ppg_trough_val.push_back(Q[k]);
    }
    auto bp = render(n, bp_peak_idx, bp_peak_val, bp_trough_idx, bp_trough_val, k_bp_shape, q_bp);
    auto ppg = render(n, ppg_peak_idx, ppg_peak_val, ppg_trough_idx, ppg_trough_val, k_ppg_shape, q_ppg);

    const double rec_end = static_cast<double>(n) / cfg.fs_hz;
    annotations.push_back({IntervalLabel::end(), protocol_end, rec_end});

    SessionRecord session(cfg.subject_id, UniformSignal(cfg.fs_hz, 0.0, Unit::mmHg, std::move(bp)),
                          UniformSignal(cfg.fs_hz, 0.0, Unit::au, std::move(ppg)), std::move(annotations));
    return {std::move(session), std::move(truth)};
}

ArxDataset generate_arx_dataset(const ArxModel& model, std::size_t n, double input_sd, double noise_sd,
                                std::uint64_t seed) {
    model.validate();
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto& o = model.orders;
    const std::size_t m0 = o.m0();
    std::vector<double> u(n), y(n, 0.0), e(n, 0.0);
    for (auto& v : u) v = input_sd * normal(rng);
    for (std::size_t m = m0; m < n; ++m) {
        e[m] = noise_sd * normal(rng);
        double acc = 0.0;
        for (int i = 1; i <= o.na; ++i) acc -= model.a[i - 1] * y[m - i];
        for (int j = 1; j <= o.nb; ++j) acc += model.b[j - 1] * u[m - o.nk - j + 1];
        y[m] = acc + e[m];
    }
    return {UniformSignal(model.fs_hz, 0.0, Unit::au, std::move(u)),
            UniformSignal(model.fs_hz, 0.0, Unit::mmHg, std::move(y)), std::move(e)};
}

}  // namespace ppgbp
