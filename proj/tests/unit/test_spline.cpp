#include "ppgbp/error.hpp"
#include "ppgbp/spline.hpp"

#include "../support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace ppgbp;

namespace {

struct Series {
    std::vector<double> t, y;
};

Series random_series(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> gap(0.4, 1.3), val(60.0, 140.0);
    Series s;
    double t = gap(rng);
    for (std::size_t i = 0; i < n; ++i) {
        s.t.push_back(t);
        s.y.push_back(val(rng));
        t += gap(rng);
    }
    return s;
}

}  // namespace

TEST_CASE("straight line is reproduced everywhere") {
    const std::vector<double> t{0.0, 0.7, 1.9, 2.4, 3.8, 5.0};
    std::vector<double> y;
    for (double v : t) y.push_back(2.0 * v + 1.0);
    const auto sp = fit_spline(t, y);
    for (double x = 0.0; x <= 5.0; x += 0.01) CHECK(sp(x) == doctest::Approx(2.0 * x + 1.0).epsilon(1e-12));
    const auto grid = eval_on_grid(sp, 100.0, 0.5, 4.5);
    CHECK(grid.size() == 401);
    for (std::size_t k = 0; k < grid.size(); ++k) CHECK(grid[k] == doctest::Approx(2.0 * grid.time_at(k) + 1.0).epsilon(1e-12));
}

TEST_CASE("a single cubic is reproduced exactly") {
    const std::vector<double> t{0, 1, 2, 3, 4};
    std::vector<double> y;
    for (double v : t) y.push_back(v * v * v);
    const auto sp = fit_spline(t, y);
    for (double x = 0.0; x <= 4.0; x += 0.001) CHECK(std::abs(sp(x) - x * x * x) < 1e-9);
    // Four knots, the minimum.
    const auto sp4 = fit_spline(std::vector<double>{0, 1, 2.5, 3}, std::vector<double>{0, 1, 15.625, 27});
    for (double x = 0.0; x <= 3.0; x += 0.01) CHECK(std::abs(sp4(x) - x * x * x) < 1e-9);
}

TEST_CASE("knot count and ordering errors") {
    auto code_of = [](std::vector<double> t, std::vector<double> y) {
        try {
            fit_spline(t, y);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::io_error;
    };
    CHECK(code_of({0, 1, 2}, {1, 2, 3}) == ErrorCode::too_few_knots);
    CHECK(code_of({0, 1, 1, 2}, {1, 2, 3, 4}) == ErrorCode::duplicate_times);
    const auto sp = fit_spline(std::vector<double>{0, 1, 2, 3}, std::vector<double>{0, 1, 0, 1});
    try {
        eval_on_grid(sp, 100.0, -0.5, 2.0);
        FAIL("expected ExtrapolationRequested");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::extrapolation_requested);
    }
    CHECK_THROWS_AS(sp(3.5), Error);
}

TEST_CASE("random series agree with the dense solve, pass through knots and are C2") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 100; ++trial) {
        const auto s = random_series(rng, 4 + static_cast<std::size_t>(trial % 30));
        const auto sp = fit_spline(s.t, s.y);
        const auto ref = oracle::dense_spline(s.t, s.y);
        for (std::size_t i = 0; i < s.t.size(); ++i) CHECK(std::abs(sp(s.t[i]) - s.y[i]) <= 1e-12);
        const auto grid = eval_on_grid(sp, 100.0, s.t.front(), s.t.back());
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double x = grid.time_at(k);
            CHECK(std::abs(grid[k] - oracle::dense_eval(s.t, ref, x)) <= 1e-9 * std::max(1.0, std::abs(grid[k])));
        }
        for (std::size_t i = 1; i + 1 < s.t.size(); ++i) {
            for (int d = 0; d <= 2; ++d) {
                const double left = sp.eval_segment(i - 1, s.t[i], d);
                const double right = sp.eval_segment(i, s.t[i], d);
                CHECK(std::abs(left - right) <= 1e-9 * std::max(1.0, std::abs(right)));
            }
        }
    }
}

TEST_CASE("affine equivariance") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 20; ++trial) {
        const auto s = random_series(rng, 12);
        const double alpha = -1.7, beta = 33.0;
        std::vector<double> y2;
        for (double v : s.y) y2.push_back(alpha * v + beta);
        const auto a = fit_spline(s.t, s.y);
        const auto b = fit_spline(s.t, y2);
        for (double x = s.t.front(); x <= s.t.back(); x += 0.037) {
            const double expected = alpha * a(x) + beta;
            CHECK(std::abs(b(x) - expected) <= 1e-9 * std::max(1.0, std::abs(expected)));
        }
    }
}

TEST_CASE("fit from a beat series keeps its unit") {
    BeatSeries beats{BeatKind::peak, Unit::au, {{0.0, 1.0}, {1.0, 1.2}, {2.0, 0.9}, {3.0, 1.1}}};
    const auto sp = fit_spline(beats);
    CHECK(sp.unit() == Unit::au);
    CHECK(eval_on_grid(sp, 100.0, 0.0, 3.0).unit() == Unit::au);
}
