#include "ppgbp/beats.hpp"

#include "ppgbp/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace ppgbp {

std::vector<double> BeatSeries::times() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.t_s);
    return out;
}

std::vector<double> BeatSeries::values() const {
    std::vector<double> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back(p.value);
    return out;
}

void DetectorParams::validate() const {
    if (!(refractory_s > 0.0) || !std::isfinite(refractory_s)) {
        fail(ErrorCode::invalid_argument, "refractory period must be positive");
    }
    if (!(min_prominence_frac > 0.0 && min_prominence_frac < 1.0)) {
        fail(ErrorCode::invalid_argument, "prominence fraction must lie in (0, 1)");
    }
}

double percentile(std::span<const double> values, double q) {
    if (values.empty()) fail(ErrorCode::empty_input, "percentile of an empty set");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

std::vector<std::size_t> local_maxima(std::span<const double> x) {
    std::vector<std::size_t> out;
    const std::size_t n = x.size();
    if (n < 3) return out;
    std::size_t i = 1;
    while (i + 1 < n) {
        if (x[i - 1] < x[i]) {
            std::size_t ahead = i + 1;
            while (ahead + 1 < n && x[ahead] == x[i]) ++ahead;
            if (x[ahead] < x[i]) {
                out.push_back((i + ahead - 1) / 2);
                i = ahead;
                continue;
            }
        }
        ++i;
    }
    return out;
}

std::vector<double> peak_prominences(std::span<const double> x, std::span<const std::size_t> peaks) {
    std::vector<double> out;
    out.reserve(peaks.size());
    const std::size_t n = x.size();
    for (std::size_t p : peaks) {
        const double h = x[p];
        double left_min = h;
        for (std::size_t i = p + 1; i-- > 0;) {
            if (x[i] > h) break;
            left_min = std::min(left_min, x[i]);
        }
        double right_min = h;
        for (std::size_t i = p; i < n; ++i) {
            if (x[i] > h) break;
            right_min = std::min(right_min, x[i]);
        }
        out.push_back(h - std::max(left_min, right_min));
    }
    return out;
}

namespace {

// Equivalent to peak_prominences(x, {p})[0] >= threshold, but each side stops
// as soon as it has descended far enough.
bool clears_prominence(std::span<const double> x, std::size_t p, double threshold) {
    const double h = x[p];
    bool left_ok = false;
    for (std::size_t i = p + 1; i-- > 0;) {
        if (x[i] > h) break;
        if (h - x[i] >= threshold) {
            left_ok = true;
            break;
        }
    }
    if (!left_ok) return false;
    for (std::size_t i = p; i < x.size(); ++i) {
        if (x[i] > h) break;
        if (h - x[i] >= threshold) return true;
    }
    return false;
}

}  // namespace

BeatSeries detect_peaks(const UniformSignal& signal, const DetectorParams& params) {
    params.validate();
    const auto x = signal.samples();
    if (x.size() < 3) fail(ErrorCode::too_short, "peak detection needs at least 3 samples");
    if (signal.fs_hz() < 2.0 / params.refractory_s) {
        fail(ErrorCode::invalid_argument, "sampling rate too low for the refractory period");
    }

    const double range = percentile(x, 0.95) - percentile(x, 0.05);
    if (!(range > 0.0)) fail(ErrorCode::empty_result, "signal has no amplitude range");
    const double threshold = params.min_prominence_frac * range;

    const auto maxima = local_maxima(x);

    struct Candidate {
        double t;
        double value;
    };
    std::vector<Candidate> cands;
    for (std::size_t k = 0; k < maxima.size(); ++k) {
        const std::size_t i = maxima[k];
        if (!clears_prominence(x, i, threshold)) continue;
        const double ym = x[i - 1], y0 = x[i], yp = x[i + 1];
        const double denom = ym - 2.0 * y0 + yp;
        double delta = denom != 0.0 ? 0.5 * (ym - yp) / denom : 0.0;
        delta = std::clamp(delta, -0.5, 0.5);
        const double value = y0 - 0.25 * (ym - yp) * delta;
        cands.push_back({signal.start_s() + (static_cast<double>(i) + delta) / signal.fs_hz(), value});
    }
    if (cands.empty()) fail(ErrorCode::empty_result, "no peak clears the prominence threshold");

    // Greedy refractory thinning in priority order: larger value, then earlier time.
    std::vector<std::size_t> order(cands.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (cands[a].value != cands[b].value) return cands[a].value > cands[b].value;
        return cands[a].t < cands[b].t;
    });
    std::set<double> kept_times;
    std::vector<std::size_t> kept;
    for (std::size_t idx : order) {
        const double t = cands[idx].t;
        auto it = kept_times.lower_bound(t);
        if (it != kept_times.end() && *it - t < params.refractory_s) continue;
        if (it != kept_times.begin() && t - *std::prev(it) < params.refractory_s) continue;
        kept_times.insert(t);
        kept.push_back(idx);
    }
    std::sort(kept.begin(), kept.end());

    BeatSeries out{BeatKind::peak, signal.unit(), {}};
    out.points.reserve(kept.size());
    for (std::size_t idx : kept) out.points.push_back({cands[idx].t, cands[idx].value});
    return out;
}

BeatSeries detect_troughs(const UniformSignal& signal, const DetectorParams& params) {
    std::vector<double> negated(signal.samples().begin(), signal.samples().end());
    for (auto& v : negated) v = -v;
    auto beats = detect_peaks(UniformSignal(signal.fs_hz(), signal.start_s(), signal.unit(), std::move(negated)),
                              params);
    for (auto& p : beats.points) p.value = -p.value;
    beats.kind = BeatKind::trough;
    return beats;
}

}  // namespace ppgbp
