#include "ppgbp/signal.hpp"

#include "ppgbp/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>
#include <set>

namespace ppgbp {

namespace {

constexpr double k_time_eps = 1e-9;

}  // namespace

std::string_view to_string(Unit unit) {
    return unit == Unit::mmHg ? "mmHg" : "au";
}

Unit parse_unit(std::string_view text) {
    if (text == "mmHg") return Unit::mmHg;
    if (text == "au") return Unit::au;
    fail(ErrorCode::parse_error, "unknown unit '" + std::string(text) + "'");
}

UniformSignal::UniformSignal(double fs_hz, double start_s, Unit unit, std::vector<double> samples)
    : fs_hz_(fs_hz), start_s_(start_s), unit_(unit), samples_(std::move(samples)) {
    if (!(fs_hz_ > 0.0) || !std::isfinite(fs_hz_)) {
        fail(ErrorCode::invalid_argument, "sampling rate must be positive and finite");
    }
    if (!std::isfinite(start_s_)) {
        fail(ErrorCode::invalid_argument, "start time must be finite");
    }
    for (std::size_t k = 0; k < samples_.size(); ++k) {
        if (!std::isfinite(samples_[k])) {
            fail(ErrorCode::invalid_argument, "non-finite sample at index " + std::to_string(k));
        }
    }
}

std::string IntervalLabel::str() const {
    switch (kind) {
        case Kind::baseline: return "BASELINE";
        case Kind::bh: return "BH" + std::to_string(index);
        case Kind::nb: return "NB" + std::to_string(index);
        case Kind::end: return "END";
    }
    return {};
}

IntervalLabel IntervalLabel::parse(std::string_view text) {
    if (text == "BASELINE") return baseline();
    if (text == "END") return end();
    auto numbered = [&](std::string_view prefix, Kind kind) -> std::optional<IntervalLabel> {
        if (!text.starts_with(prefix)) return std::nullopt;
        auto digits = text.substr(prefix.size());
        int k = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), k);
        if (ec != std::errc{} || ptr != digits.data() + digits.size() || k < 1) return std::nullopt;
        return IntervalLabel{kind, k};
    };
    if (auto l = numbered("BH", Kind::bh)) return *l;
    if (auto l = numbered("NB", Kind::nb)) return *l;
    fail(ErrorCode::parse_error, "unknown interval label '" + std::string(text) + "'");
}

SessionRecord::SessionRecord(std::string subject_id, UniformSignal bp, UniformSignal ppg,
                             std::vector<IntervalAnnotation> annotations)
    : subject_id_(std::move(subject_id)),
      bp_(std::move(bp)),
      ppg_(std::move(ppg)),
      annotations_(std::move(annotations)) {
    auto violation = [](const std::string& what) { fail(ErrorCode::invariant_violation, what); };
    if (bp_.unit() != Unit::mmHg) violation("BP channel must be in mmHg");
    if (ppg_.unit() != Unit::au) violation("PPG channel must be in au");
    if (bp_.fs_hz() != ppg_.fs_hz()) violation("BP and PPG sampling rates differ");
    if (bp_.start_s() != ppg_.start_s()) violation("BP and PPG start times differ");
    if (bp_.size() != ppg_.size()) violation("BP and PPG sample counts differ");

    const double lo = bp_.start_s() - k_time_eps;
    const double hi = bp_.end_s() + k_time_eps;
    std::set<IntervalLabel> seen;
    for (std::size_t i = 0; i < annotations_.size(); ++i) {
        const auto& a = annotations_[i];
        const std::string name = a.label.str();
        if (!(a.end_s > a.start_s)) violation("annotation " + name + " has end <= start");
        if (a.start_s < lo || a.end_s > hi) violation("annotation " + name + " exceeds signal extent");
        if (!seen.insert(a.label).second) violation("annotation label " + name + " repeated");
        if (i > 0 && annotations_[i - 1].end_s > a.start_s + k_time_eps) {
            violation("annotation " + name + " overlaps or precedes " + annotations_[i - 1].label.str());
        }
    }
}

std::optional<IntervalAnnotation> SessionRecord::find(IntervalLabel label) const {
    auto it = std::find_if(annotations_.begin(), annotations_.end(),
                           [&](const IntervalAnnotation& a) { return a.label == label; });
    if (it == annotations_.end()) return std::nullopt;
    return *it;
}

std::vector<IntervalAnnotation> SessionRecord::bh_intervals() const {
    std::vector<IntervalAnnotation> out;
    std::copy_if(annotations_.begin(), annotations_.end(), std::back_inserter(out),
                 [](const IntervalAnnotation& a) { return a.label.is_bh(); });
    return out;
}

std::vector<double> lowpass_taps(double fs_hz, double cutoff_hz, double transition_hz,
                                 double stopband_db) {
    if (!(cutoff_hz > 0.0 && cutoff_hz < fs_hz / 2.0) || !(transition_hz > 0.0)) {
        fail(ErrorCode::invalid_argument, "invalid low-pass specification");
    }
    // Kaiser design formulas for length and shape parameter.
    const double dw = 2.0 * std::numbers::pi * transition_hz / fs_hz;
    auto n = static_cast<std::size_t>(std::ceil((stopband_db - 7.95) / (2.285 * dw))) + 1;
    if (n % 2 == 0) ++n;
    double beta = 0.0;
    if (stopband_db > 50.0) {
        beta = 0.1102 * (stopband_db - 8.7);
    } else if (stopband_db >= 21.0) {
        beta = 0.5842 * std::pow(stopband_db - 21.0, 0.4) + 0.07886 * (stopband_db - 21.0);
    }

    const double fc = cutoff_hz / fs_hz;
    const double mid = static_cast<double>(n - 1) / 2.0;
    const double i0_beta = std::cyl_bessel_i(0.0, beta);
    std::vector<double> taps(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = static_cast<double>(k) - mid;
        const double sinc = x == 0.0 ? 2.0 * fc
                                     : std::sin(2.0 * std::numbers::pi * fc * x) / (std::numbers::pi * x);
        const double r = x / mid;
        const double window = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
        taps[k] = sinc * window;
    }
    const double sum = std::accumulate(taps.begin(), taps.end(), 0.0);
    for (auto& t : taps) t /= sum;
    return taps;
}

std::vector<double> antialias_taps(double source_fs_hz, double target_fs_hz) {
    // Passband to 0.3, stopband from 0.5 (the new Nyquist) of the target rate.
    return lowpass_taps(source_fs_hz, 0.4 * target_fs_hz, 0.2 * target_fs_hz, 60.0);
}

namespace {

std::size_t integer_factor(double source_fs, double target_fs) {
    if (!(target_fs > 0.0) || !std::isfinite(target_fs)) {
        fail(ErrorCode::invalid_argument, "target rate must be positive and finite");
    }
    const double ratio = source_fs / target_fs;
    const double rounded = std::round(ratio);
    if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio) {
        fail(ErrorCode::non_integer_factor,
             "rate ratio " + std::to_string(ratio) + " is not a positive integer");
    }
    return static_cast<std::size_t>(rounded);
}

// Causal FIR over the whole buffer; samples before the start count as zero.
std::vector<double> fir_causal(std::span<const double> taps, std::span<const double> x) {
    std::vector<double> y(x.size(), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const std::size_t kmax = std::min(taps.size() - 1, i);
        double acc = 0.0;
        for (std::size_t k = 0; k <= kmax; ++k) acc += taps[k] * x[i - k];
        y[i] = acc;
    }
    return y;
}

}  // namespace

UniformSignal downsample(const UniformSignal& signal, double target_fs_hz) {
    const std::size_t factor = integer_factor(signal.fs_hz(), target_fs_hz);
    if (factor == 1) return signal;

    const auto taps = antialias_taps(signal.fs_hz(), target_fs_hz);
    const std::size_t pad = taps.size();
    const std::size_t n = signal.size();
    if (n <= pad) {
        fail(ErrorCode::signal_too_short, "signal has " + std::to_string(n) +
                                              " samples, anti-alias filter needs more than " +
                                              std::to_string(pad));
    }

    // Reflect padding (edge sample not repeated).
    const auto x = signal.samples();
    std::vector<double> ext;
    ext.reserve(n + 2 * pad);
    for (std::size_t k = pad; k >= 1; --k) ext.push_back(x[k]);
    ext.insert(ext.end(), x.begin(), x.end());
    for (std::size_t k = 1; k <= pad; ++k) ext.push_back(x[n - 1 - k]);

    auto forward = fir_causal(taps, ext);
    std::reverse(forward.begin(), forward.end());
    auto backward = fir_causal(taps, forward);
    std::reverse(backward.begin(), backward.end());

    std::vector<double> out;
    out.reserve((n + factor - 1) / factor);
    for (std::size_t k = 0; k < n; k += factor) out.push_back(backward[pad + k]);
    return UniformSignal(target_fs_hz, signal.start_s(), signal.unit(), std::move(out));
}

UniformSignal slice(const UniformSignal& signal, double start_s, double end_s) {
    if (!(end_s > start_s)) fail(ErrorCode::out_of_range, "slice window must have end > start");
    if (start_s < signal.start_s() - k_time_eps || end_s > signal.end_s() + k_time_eps) {
        fail(ErrorCode::out_of_range, "slice window exceeds signal extent");
    }
    auto index_of = [&](double t) {
        const double pos = (t - signal.start_s()) * signal.fs_hz();
        return static_cast<std::size_t>(std::max(0.0, std::ceil(pos - k_time_eps * signal.fs_hz())));
    };
    const std::size_t i0 = index_of(start_s);
    const std::size_t i1 = std::min(index_of(end_s), signal.size());
    if (i1 <= i0) fail(ErrorCode::out_of_range, "slice window contains no samples");
    auto s = signal.samples();
    return UniformSignal(signal.fs_hz(), signal.time_at(i0), signal.unit(),
                         std::vector<double>(s.begin() + static_cast<std::ptrdiff_t>(i0),
                                             s.begin() + static_cast<std::ptrdiff_t>(i1)));
}

}  // namespace ppgbp
