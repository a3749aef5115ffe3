#pragma once

#include "ppgbp/beats.hpp"
#include "ppgbp/signal.hpp"

#include <array>
#include <span>
#include <vector>

namespace ppgbp {

/**
 * @brief Not-a-knot interpolating cubic spline.
 *
 * Segment i covers [t_i, t_{i+1}] and is stored as
 * c0 + c1*s + c2*s^2 + c3*s^3 with s = t - t_i.
 */
class CubicSpline {
public:
    CubicSpline(std::vector<double> knots, std::vector<double> values,
                std::vector<std::array<double, 4>> coeffs, Unit unit);

    const std::vector<double>& knots() const noexcept { return knots_; }
    const std::vector<double>& values() const noexcept { return values_; }
    const std::vector<std::array<double, 4>>& coefficients() const noexcept { return coeffs_; }
    Unit unit() const noexcept { return unit_; }
    double front() const { return knots_.front(); }
    double back() const { return knots_.back(); }

    /// Value (order 0) or derivative of order 1..3 at t. Throws ExtrapolationRequested outside the knot span.
    double eval(double t, int derivative = 0) const;
    double operator()(double t) const { return eval(t); }

    /// Derivative of the given order at t, taken from segment `segment` (used for continuity checks).
    double eval_segment(std::size_t segment, double t, int derivative) const;

private:
    std::size_t segment_of(double t) const;

    std::vector<double> knots_;
    std::vector<double> values_;
    std::vector<std::array<double, 4>> coeffs_;
    Unit unit_;
};

/// Throws TooFewKnots (< 4) or DuplicateTimes (times not strictly increasing).
CubicSpline fit_spline(std::span<const double> times, std::span<const double> values, Unit unit = Unit::mmHg);
CubicSpline fit_spline(const BeatSeries& beats);

/**
 * Samples the spline at start_s + k / fs_hz for every k with the grid point
 * not past end_s. Throws ExtrapolationRequested when [start_s, end_s] leaves
 * the knot span.
 */
UniformSignal eval_on_grid(const CubicSpline& spline, double fs_hz, double start_s, double end_s);

}  // namespace ppgbp
