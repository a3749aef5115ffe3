#include "ppgbp/error.hpp"
#include "ppgbp/signal.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

using namespace ppgbp;

namespace {

UniformSignal tone(double fs, double seconds, double freq, double amp = 1.0, double offset = 0.0) {
    const auto n = static_cast<std::size_t>(std::llround(fs * seconds));
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) {
        x[k] = offset + amp * std::sin(2.0 * std::numbers::pi * freq * static_cast<double>(k) / fs);
    }
    return UniformSignal(fs, 0.0, Unit::mmHg, std::move(x));
}

double rms(std::span<const double> x, std::size_t skip = 0) {
    double s = 0.0;
    for (std::size_t k = skip; k + skip < x.size(); ++k) s += x[k] * x[k];
    return std::sqrt(s / static_cast<double>(x.size() - 2 * skip));
}

UniformSignal bandlimited(std::uint64_t seed, double fs, double seconds) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> f(0.2, 38.0), ph(0.0, 2.0 * std::numbers::pi), a(0.1, 1.0);
    const auto n = static_cast<std::size_t>(fs * seconds);
    std::vector<double> x(n, 0.0);
    for (int c = 0; c < 12; ++c) {
        const double fc = f(rng), p = ph(rng), amp = a(rng);
        for (std::size_t k = 0; k < n; ++k) x[k] += amp * std::sin(2.0 * std::numbers::pi * fc * static_cast<double>(k) / fs + p);
    }
    return UniformSignal(fs, 0.0, Unit::au, std::move(x));
}

}  // namespace

TEST_CASE("uniform signal rejects bad construction") {
    CHECK_THROWS_AS(UniformSignal(0.0, 0.0, Unit::mmHg, {1.0}), Error);
    CHECK_THROWS_AS(UniformSignal(100.0, 0.0, Unit::mmHg, {1.0, NAN}), Error);
    const UniformSignal s(100.0, 2.0, Unit::au, {1, 2, 3});
    CHECK(s.time_at(2) == doctest::Approx(2.02));
    CHECK(s.end_s() == doctest::Approx(2.03));
}

TEST_CASE("downsample keeps DC exactly and passes a 1 Hz tone") {
    const UniformSignal dc(1000.0, 0.0, Unit::mmHg, std::vector<double>(10000, 80.0));
    const auto out = downsample(dc, 100.0);
    CHECK(out.fs_hz() == 100.0);
    CHECK(out.size() == 1000);
    CHECK(out.unit() == Unit::mmHg);
    for (double v : out.samples()) CHECK(v == doctest::Approx(80.0).epsilon(1e-12));

    const auto sine = downsample(tone(1000.0, 10.0, 1.0), 100.0);
    double peak = 0.0;
    for (std::size_t k = 100; k + 100 < sine.size(); ++k) peak = std::max(peak, std::abs(sine[k]));
    CHECK(std::abs(peak - 1.0) < 0.01);
}

TEST_CASE("downsample rejects a stopband tone") {
    const auto in = tone(1000.0, 10.0, 480.0);
    const auto out = downsample(in, 100.0);
    CHECK(rms(out.samples()) < 0.01 * rms(in.samples()));
}

TEST_CASE("anti-alias taps are symmetric, normalized and attenuate the stopband by 60 dB") {
    const auto taps = antialias_taps(1000.0, 100.0);
    REQUIRE(taps.size() % 2 == 1);
    double sum = 0.0;
    for (std::size_t k = 0; k < taps.size(); ++k) {
        sum += taps[k];
        CHECK(taps[k] == doctest::Approx(taps[taps.size() - 1 - k]).epsilon(1e-12));
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-14));
    // Single-pass response; the forward-backward pass squares it.
    auto response = [&](double f) {
        std::complex<double> h = 0.0;
        for (std::size_t k = 0; k < taps.size(); ++k) {
            h += taps[k] * std::polar(1.0, -2.0 * std::numbers::pi * f * static_cast<double>(k) / 1000.0);
        }
        return std::abs(h);
    };
    for (double f = 50.0; f <= 500.0; f += 0.5) CHECK(20.0 * std::log10(response(f)) < -59.0);
    for (double f = 0.0; f <= 30.0; f += 0.5) CHECK(std::abs(response(f) - 1.0) < 2e-3);
}

TEST_CASE("downsample errors") {
    const UniformSignal s(1000.0, 0.0, Unit::au, std::vector<double>(5000, 1.0));
    CHECK_THROWS_WITH_AS(downsample(s, 300.0), doctest::Contains("not a positive integer"), Error);
    try {
        downsample(s, 300.0);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::non_integer_factor);
    }
    const UniformSignal tiny(1000.0, 0.0, Unit::au, std::vector<double>(50, 1.0));
    try {
        downsample(tiny, 100.0);
        FAIL("expected SignalTooShort");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::signal_too_short);
    }
}

TEST_CASE("two-stage decimation agrees with direct decimation on band-limited signals") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto x = bandlimited(seed, 1000.0, 8.0);
        const auto direct = downsample(x, 100.0);
        const auto staged = downsample(downsample(x, 500.0), 100.0);
        REQUIRE(direct.size() == staged.size());
        std::vector<double> diff(direct.size());
        for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = direct[k] - staged[k];
        CHECK(rms(diff, 20) < 0.01 * rms(direct.samples(), 20));
    }
}

TEST_CASE("downsample is linear") {
    const auto x = bandlimited(11, 1000.0, 4.0);
    const auto y = bandlimited(12, 1000.0, 4.0);
    const double alpha = 2.5, beta = -0.75;
    std::vector<double> mix(x.size());
    for (std::size_t k = 0; k < mix.size(); ++k) mix[k] = alpha * x[k] + beta * y[k];
    const auto lhs = downsample(UniformSignal(1000.0, 0.0, Unit::au, mix), 100.0);
    const auto dx = downsample(x, 100.0), dy = downsample(y, 100.0);
    double scale = 0.0;
    for (std::size_t k = 0; k < lhs.size(); ++k) scale = std::max(scale, std::abs(lhs[k]));
    for (std::size_t k = 0; k < lhs.size(); ++k) {
        CHECK(std::abs(lhs[k] - (alpha * dx[k] + beta * dy[k])) <= 1e-9 * scale);
    }
}

TEST_CASE("slice index arithmetic") {
    const auto s = tone(100.0, 10.0, 1.0);
    const auto w = slice(s, 2.0, 4.0);
    CHECK(w.size() == 200);
    CHECK(w.start_s() == doctest::Approx(2.0));
    CHECK(w[0] == s[200]);
    CHECK(slice(s, s.start_s(), s.end_s()) == s);
    try {
        slice(s, -1.0, 5.0);
        FAIL("expected OutOfRange");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::out_of_range);
    }
}

TEST_CASE("nested slices compose") {
    const auto s = tone(100.0, 10.0, 0.3);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    for (int trial = 0; trial < 50; ++trial) {
        double a = u(rng), b = u(rng);
        if (a > b) std::swap(a, b);
        if (b - a < 0.5) continue;
        const double c = a + 0.1 * (b - a), d = b - 0.2 * (b - a);
        const auto lhs = slice(slice(s, a, b), c, d);
        const auto rhs = slice(s, c, d);
        REQUIRE(lhs.size() == rhs.size());
        CHECK(lhs.start_s() == doctest::Approx(rhs.start_s()).epsilon(1e-12));
        for (std::size_t k = 0; k < lhs.size(); ++k) CHECK(lhs[k] == rhs[k]);
    }
}

TEST_CASE("session record invariants") {
    const UniformSignal bp(100.0, 0.0, Unit::mmHg, std::vector<double>(1000, 100.0));
    const UniformSignal ppg(100.0, 0.0, Unit::au, std::vector<double>(1000, 1.0));
    auto make = [&](std::vector<IntervalAnnotation> ann) { return SessionRecord("x", bp, ppg, std::move(ann)); };
    CHECK_NOTHROW(make({{IntervalLabel::baseline(), 0.0, 2.0}, {IntervalLabel::bh(1), 2.0, 5.0}}));
    auto code_of = [&](std::vector<IntervalAnnotation> ann) {
        try {
            make(std::move(ann));
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::io_error;
    };
    CHECK(code_of({{IntervalLabel::bh(1), 0.0, 2.01}, {IntervalLabel::nb(1), 2.0, 5.0}}) == ErrorCode::invariant_violation);
    CHECK(code_of({{IntervalLabel::bh(1), 0.0, 2.0}, {IntervalLabel::bh(1), 3.0, 5.0}}) == ErrorCode::invariant_violation);
    CHECK(code_of({{IntervalLabel::bh(1), 0.0, 20.0}}) == ErrorCode::invariant_violation);
    CHECK(code_of({{IntervalLabel::bh(1), 3.0, 3.0}}) == ErrorCode::invariant_violation);
    CHECK_THROWS_AS(SessionRecord("x", ppg, bp, {}), Error);
}

TEST_CASE("interval labels round trip") {
    for (const auto& text : {"BASELINE", "BH1", "BH5", "NB3", "END"}) CHECK(IntervalLabel::parse(text).str() == text);
    CHECK_THROWS_AS(IntervalLabel::parse("BH"), Error);
    CHECK_THROWS_AS(IntervalLabel::parse("XX1"), Error);
}
