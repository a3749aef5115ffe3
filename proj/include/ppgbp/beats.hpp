#pragma once

#include "ppgbp/signal.hpp"

#include <span>
#include <vector>

namespace ppgbp {

enum class BeatKind { peak, trough };

struct BeatPoint {
    double t_s = 0.0;
    double value = 0.0;

    friend bool operator==(const BeatPoint&, const BeatPoint&) = default;
};

/// Irregularly timed beat features (peak or trough instants and values).
struct BeatSeries {
    BeatKind kind = BeatKind::peak;
    Unit unit = Unit::mmHg;
    std::vector<BeatPoint> points;

    std::size_t size() const noexcept { return points.size(); }
    std::vector<double> times() const;
    std::vector<double> values() const;

    friend bool operator==(const BeatSeries&, const BeatSeries&) = default;
};

struct DetectorParams {
    double refractory_s = 0.33;        // minimum inter-beat interval
    double min_prominence_frac = 0.30; // of the 5th..95th percentile amplitude range

    void validate() const;
};

/**
 * Prominence-gated local maxima with refractory suppression.
 *
 * Candidates are local maxima (plateaus resolve to their middle sample) whose
 * topographic prominence is at least min_prominence_frac times the signal's
 * 5th..95th percentile range. Each candidate is refined with a parabola
 * through its three samples, then candidates closer than refractory_s are
 * thinned: the larger refined value survives, the earlier one on ties.
 *
 * Throws TooShort below three samples, InvalidArgument when the rate cannot
 * resolve the refractory period, EmptyResult when nothing survives the gate.
 */
BeatSeries detect_peaks(const UniformSignal& signal, const DetectorParams& params = {});

/// detect_peaks on the negated signal with values negated back; kind = trough.
BeatSeries detect_troughs(const UniformSignal& signal, const DetectorParams& params = {});

/// Linear-interpolation percentile (q in [0, 1]) of a non-empty sample set.
double percentile(std::span<const double> values, double q);

/// Topographic prominence of each index in `peaks` (sample units of x).
std::vector<double> peak_prominences(std::span<const double> x, std::span<const std::size_t> peaks);

/// Indices of local maxima; flat tops count once, at their middle sample.
std::vector<std::size_t> local_maxima(std::span<const double> x);

}  // namespace ppgbp
