#include "ppgbp/spline.hpp"

#include "ppgbp/error.hpp"

#include <algorithm>
#include <cmath>

namespace ppgbp {

namespace {

constexpr double k_span_eps = 1e-9;

// Thomas algorithm; sub[0] and sup[n-1] are unused.
std::vector<double> solve_tridiagonal(std::vector<double> sub, std::vector<double> diag,
                                      std::vector<double> sup, std::vector<double> rhs) {
    const std::size_t n = diag.size();
    for (std::size_t i = 1; i < n; ++i) {
        const double w = sub[i] / diag[i - 1];
        diag[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    std::vector<double> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (rhs[i] - sup[i] * x[i + 1]) / diag[i];
    return x;
}

}  // namespace

CubicSpline::CubicSpline(std::vector<double> knots, std::vector<double> values,
                         std::vector<std::array<double, 4>> coeffs, Unit unit)
    : knots_(std::move(knots)), values_(std::move(values)), coeffs_(std::move(coeffs)), unit_(unit) {
    if (knots_.size() < 2 || values_.size() != knots_.size() || coeffs_.size() + 1 != knots_.size()) {
        fail(ErrorCode::shape_mismatch, "spline knot, value and segment counts disagree");
    }
}

std::size_t CubicSpline::segment_of(double t) const {
    auto it = std::upper_bound(knots_.begin(), knots_.end(), t);
    std::size_t seg = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
    return std::min(seg, coeffs_.size() - 1);
}

double CubicSpline::eval_segment(std::size_t segment, double t, int derivative) const {
    const auto& c = coeffs_.at(segment);
    const double s = t - knots_[segment];
    switch (derivative) {
        case 0: return c[0] + s * (c[1] + s * (c[2] + s * c[3]));
        case 1: return c[1] + s * (2.0 * c[2] + s * 3.0 * c[3]);
        case 2: return 2.0 * c[2] + 6.0 * c[3] * s;
        case 3: return 6.0 * c[3];
        default: fail(ErrorCode::invalid_argument, "derivative order must be 0..3");
    }
}

double CubicSpline::eval(double t, int derivative) const {
    if (t < front() - k_span_eps || t > back() + k_span_eps) {
        fail(ErrorCode::extrapolation_requested, "spline evaluated outside its knot span");
    }
    t = std::clamp(t, front(), back());
    if (derivative == 0 && t == back()) return values_.back();
    return eval_segment(segment_of(t), t, derivative);
}

CubicSpline fit_spline(std::span<const double> times, std::span<const double> values, Unit unit) {
    if (times.size() != values.size()) fail(ErrorCode::shape_mismatch, "times and values differ in length");
    const std::size_t n = times.size();
    if (n < 4) fail(ErrorCode::too_few_knots, "not-a-knot spline needs at least 4 knots, got " + std::to_string(n));
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(times[i]) || !std::isfinite(values[i])) {
            fail(ErrorCode::invalid_argument, "non-finite knot at index " + std::to_string(i));
        }
        if (i > 0 && !(times[i] > times[i - 1])) {
            fail(ErrorCode::duplicate_times, "knot times not strictly increasing at index " + std::to_string(i));
        }
    }

    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = times[i + 1] - times[i];
        d[i] = (values[i + 1] - values[i]) / h[i];
    }

    // Unknowns are the second derivatives M_1..M_{n-2}; the not-a-knot
    // conditions express M_0 and M_{n-1} through their neighbours and are
    // folded into the first and last rows.
    const std::size_t m = n - 2;
    std::vector<double> sub(m, 0.0), diag(m, 0.0), sup(m, 0.0), rhs(m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
        const std::size_t i = r + 1;
        sub[r] = h[i - 1];
        diag[r] = 2.0 * (h[i - 1] + h[i]);
        sup[r] = h[i];
        rhs[r] = 6.0 * (d[i] - d[i - 1]);
    }
    {
        const double h0 = h[0], h1 = h[1];
        diag[0] = (h0 + h1) * (h0 + 2.0 * h1) / h1;
        sup[0] = (h1 * h1 - h0 * h0) / h1;
    }
    {
        const double hl = h[n - 2], hp = h[n - 3];
        diag[m - 1] = (hl + hp) * (hl + 2.0 * hp) / hp;
        sub[m - 1] = (hp * hp - hl * hl) / hp;
    }
    // For n == 4 both end rows are the same two rows; the assignments above
    // touch disjoint entries (sup[0] and sub[1]), so they compose.
    const auto inner = solve_tridiagonal(sub, diag, sup, rhs);

    std::vector<double> M(n);
    for (std::size_t r = 0; r < m; ++r) M[r + 1] = inner[r];
    M[0] = M[1] - h[0] * (M[2] - M[1]) / h[1];
    M[n - 1] = M[n - 2] + h[n - 2] * (M[n - 2] - M[n - 3]) / h[n - 3];

    std::vector<std::array<double, 4>> coeffs(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        coeffs[i] = {values[i], d[i] - h[i] * (2.0 * M[i] + M[i + 1]) / 6.0, M[i] / 2.0,
                     (M[i + 1] - M[i]) / (6.0 * h[i])};
    }
    return CubicSpline(std::vector<double>(times.begin(), times.end()),
                       std::vector<double>(values.begin(), values.end()), std::move(coeffs), unit);
}

CubicSpline fit_spline(const BeatSeries& beats) {
    const auto t = beats.times();
    const auto v = beats.values();
    return fit_spline(t, v, beats.unit);
}

UniformSignal eval_on_grid(const CubicSpline& spline, double fs_hz, double start_s, double end_s) {
    if (!(fs_hz > 0.0)) fail(ErrorCode::invalid_argument, "grid rate must be positive");
    if (!(end_s >= start_s)) fail(ErrorCode::invalid_argument, "grid end precedes grid start");
    if (start_s < spline.front() - k_span_eps || end_s > spline.back() + k_span_eps) {
        fail(ErrorCode::extrapolation_requested, "grid [" + std::to_string(start_s) + ", " +
                                                     std::to_string(end_s) + "] exceeds knot span");
    }
    const auto count = static_cast<std::size_t>(std::floor((end_s - start_s) * fs_hz + 1e-9)) + 1;
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) {
        const double t = start_s + static_cast<double>(k) / fs_hz;
        out[k] = spline.eval(t);
    }
    return UniformSignal(fs_hz, start_s, spline.unit(), std::move(out));
}

}  // namespace ppgbp
