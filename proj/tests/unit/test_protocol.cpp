#include "ppgbp/error.hpp"
#include "ppgbp/protocol.hpp"
#include "ppgbp/stats.hpp"
#include "ppgbp/synth.hpp"

#include "../support/test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

using namespace ppgbp;
using testutil::code_of;

namespace {

SessionRecord blank_session(std::vector<IntervalAnnotation> ann, double seconds = 100.0) {
    const auto n = static_cast<std::size_t>(seconds * 100.0);
    return SessionRecord("s", UniformSignal(100.0, 0.0, Unit::mmHg, std::vector<double>(n, 100.0)),
                         UniformSignal(100.0, 0.0, Unit::au, std::vector<double>(n, 1.0)), std::move(ann));
}

ErrorStats naive_stats(const std::vector<double>& e) {
    const double n = static_cast<double>(e.size());
    const double mean = std::accumulate(e.begin(), e.end(), 0.0) / n;
    double ss = 0.0, sq = 0.0;
    for (double v : e) {
        ss += (v - mean) * (v - mean);
        sq += v * v;
    }
    return {e.size(), mean, std::sqrt(ss / (n - 1.0)), std::sqrt(sq / n)};
}

SynthConfig small_exact(int n_bh) {
    auto cfg = SynthConfig::exact_closure(3);
    cfg.n_bh = n_bh;
    cfg.baseline_s = 20.0;
    cfg.nb_gap_s = 30.0;
    cfg.trailing_nb_s = 30.0;
    return cfg;
}

ProtocolOptions small_grid() {
    ProtocolOptions o;
    o.grid = {{1, 2}, {1, 2}, {1, 3}};
    return o;
}

}  // namespace

TEST_CASE("error statistics") {
    const std::vector<double> e{1.0, -1.0};
    const auto s = ErrorStats::from_errors(e);
    CHECK(s.n == 2);
    CHECK(s.mean == 0.0);
    CHECK(s.std == doctest::Approx(std::sqrt(2.0)));
    CHECK(s.rmse == doctest::Approx(1.0));
    CHECK(code_of([] { ErrorStats::from_errors(std::vector<double>{3.0}); }) == ErrorCode::too_short);

    // rmse^2 = mean^2 + (n-1)/n * std^2
    std::mt19937_64 rng(12);
    std::normal_distribution<double> d(0.7, 2.0);
    std::vector<double> x(333);
    for (auto& v : x) v = d(rng);
    const auto t = ErrorStats::from_errors(x);
    const double n = static_cast<double>(x.size());
    CHECK(t.rmse * t.rmse == doctest::Approx(t.mean * t.mean + (n - 1.0) / n * t.std * t.std).epsilon(1e-12));
    const auto ref = naive_stats(x);
    CHECK(t.mean == doctest::Approx(ref.mean).epsilon(1e-12));
    CHECK(t.std == doctest::Approx(ref.std).epsilon(1e-12));
    CHECK(t.rmse == doctest::Approx(ref.rmse).epsilon(1e-12));
}

TEST_CASE("pooling equals statistics of the concatenation") {
    std::mt19937_64 rng(5);
    std::vector<double> all;
    std::vector<ErrorStats> parts;
    for (int p = 0; p < 6; ++p) {
        std::normal_distribution<double> d(static_cast<double>(p) - 2.0, 0.5 + p);
        std::vector<double> x(20 + 17 * static_cast<std::size_t>(p));
        for (auto& v : x) v = d(rng);
        parts.push_back(ErrorStats::from_errors(x));
        all.insert(all.end(), x.begin(), x.end());
    }
    const auto pooled = ErrorStats::pool(parts);
    const auto ref = naive_stats(all);
    CHECK(pooled.n == ref.n);
    CHECK(pooled.mean == doctest::Approx(ref.mean).epsilon(1e-12));
    CHECK(pooled.std == doctest::Approx(ref.std).epsilon(1e-12));
    CHECK(pooled.rmse == doctest::Approx(ref.rmse).epsilon(1e-12));
    CHECK(ErrorStats::pool(std::span(parts).first(1)) == parts.front());
}

TEST_CASE("mean blood pressure") {
    const UniformSignal s(100.0, 1.0, Unit::mmHg, {120.0, 150.0});
    const UniformSignal d(100.0, 1.0, Unit::mmHg, {80.0, 90.0});
    const auto m = mbp(s, d);
    CHECK(m[0] == doctest::Approx(280.0 / 3.0));
    CHECK(m[1] == doctest::Approx(110.0));
    CHECK(m.start_s() == 1.0);
    CHECK(code_of([&] { mbp(s, UniformSignal(100.0, 1.0, Unit::mmHg, {80.0})); }) == ErrorCode::shape_mismatch);
    CHECK(code_of([&] { mbp(s, UniformSignal(100.0, 1.0, Unit::au, {80.0, 90.0})); }) == ErrorCode::unit_mismatch);
}

TEST_CASE("MBP errors are the weighted channel errors over the common range") {
    ChannelErrors sbp, dbp;
    sbp.first_index = 2;
    dbp.first_index = 4;
    for (int k = 0; k < 10; ++k) {
        sbp.measured.push_back(120.0 + k);
        sbp.estimated.push_back(119.0 + 0.5 * k);
        sbp.errors.push_back(sbp.measured.back() - sbp.estimated.back());
    }
    for (int k = 0; k < 7; ++k) {
        dbp.measured.push_back(80.0 - k);
        dbp.estimated.push_back(81.0 - 2.0 * k);
        dbp.errors.push_back(dbp.measured.back() - dbp.estimated.back());
    }
    const auto m = mbp_errors(sbp, dbp);
    CHECK(m.first_index == 4);
    REQUIRE(m.errors.size() == 7);  // indices 4..10 limited by the DBP run
    for (std::size_t i = 0; i < m.errors.size(); ++i) {
        const double expected = (2.0 * dbp.errors[i] + sbp.errors[i + 2]) / 3.0;
        CHECK(m.errors[i] == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("segmentation") {
    using L = IntervalLabel;
    const auto full = blank_session({{L::baseline(), 0, 10},
                                     {L::bh(1), 10, 20},
                                     {L::nb(1), 20, 30},
                                     {L::bh(2), 30, 40},
                                     {L::nb(2), 40, 50},
                                     {L::bh(3), 50, 60},
                                     {L::nb(3), 60, 70},
                                     {L::bh(4), 70, 75},
                                     {L::nb(4), 75, 80},
                                     {L::bh(5), 80, 90},
                                     {L::nb(5), 90, 95},
                                     {L::end(), 95, 100}});
    const auto seg = segment(full);
    CHECK_FALSE(seg.partial);
    CHECK(seg.warning.empty());
    REQUIRE(seg.segments.size() == 12);
    CHECK(seg.segments[1].label == L::bh(1));
    CHECK(seg.segments[1].bp.size() == 1000);
    CHECK(seg.segments[1].bp.start_s() == doctest::Approx(10.0));
    CHECK(seg.segments[7].ppg.size() == 500);

    const auto partial = segment(blank_session({{L::bh(1), 10, 20}, {L::bh(3), 30, 40}}));
    CHECK(partial.partial);
    CHECK(partial.warning.find("BH2") != std::string::npos);
    CHECK(partial.warning.find("BH5") != std::string::npos);
    CHECK(partial.segments.size() == 2);

    CHECK(code_of([] { segment(blank_session({})); }) == ErrorCode::missing_annotation);
    CHECK(code_of([] { segment(blank_session({{L::baseline(), 0, 10}})); }) == ErrorCode::missing_annotation);
}

TEST_CASE("evaluate needs two BH intervals") {
    const auto res = generate(small_exact(1));
    CHECK(code_of([&] { evaluate(res.session, small_grid()); }) == ErrorCode::missing_annotation);
}

TEST_CASE("evaluation layout and exact closure") {
    const auto res = generate(small_exact(3));
    const auto rep = evaluate(res.session, small_grid());
    CHECK(rep.bh == std::vector<int>{1, 2, 3});
    CHECK(rep.partial);
    CHECK(rep.models.size() == 6);
    for (const auto& mr : rep.measures) {
        REQUIRE(mr.model.size() == 3);
        REQUIRE(mr.pairs.size() == 6);
        REQUIRE(mr.pooled_cv.size() == 3);
        for (const auto& c : mr.model) {
            REQUIRE(c.ok());
            CHECK(c.stats->rmse < 1e-9);
        }
        for (const auto& p : mr.pairs) {
            CHECK(p.model_bh != p.target_bh);
            REQUIRE(p.cell.ok());
            CHECK(p.cell.stats->rmse < 1e-9);
        }
        // Pooled cell of a target aggregates the pairs that target it.
        for (std::size_t t = 0; t < 3; ++t) {
            std::vector<ErrorStats> parts;
            for (const auto& p : mr.pairs) {
                if (p.target_bh == rep.bh[t]) parts.push_back(*p.cell.stats);
            }
            CHECK(parts.size() == 2);
            CHECK(mr.pooled_cv[t].stats->n == ErrorStats::pool(parts).n);
        }
    }
    for (const auto& m : rep.models) {
        REQUIRE(m.model);
        CHECK(m.model->orders.na == 1);
        CHECK(m.model->b[0] == doctest::Approx(100.0).epsilon(1e-9));
    }
    const auto tr = traces(res.session, small_grid(), true);
    CHECK(tr.size() == 3 * 9);
}

TEST_CASE("aggregate") {
    auto make = [](double rmse) {
        EvalReport r;
        r.subject_id = "x";
        r.bh = {1, 2};
        for (std::size_t mi = 0; mi < 3; ++mi) {
            auto& mr = r.measures[mi];
            mr.measure = static_cast<Measure>(mi);
            for (int k = 0; k < 2; ++k) {
                mr.model.push_back({ErrorStats{10, 0.0, rmse * std::sqrt(10.0 / 9.0), rmse}, std::nullopt, {}});
                mr.pooled_cv.push_back({ErrorStats{10, rmse, 0.0, rmse}, std::nullopt, {}});
            }
        }
        return r;
    };
    const std::vector<EvalReport> one{make(2.5)};
    const auto s1 = aggregate(one);
    CHECK(s1.reports == 1);
    CHECK(s1.measure(Measure::sbp).model[0].mean_rmse == doctest::Approx(2.5));
    CHECK(*s1.measure(Measure::sbp).model[0].pooled == one[0].measures[0].model[0].stats);

    std::vector<EvalReport> two{make(3.0), make(5.0)};
    two[1].measures[2].model[1] = {std::nullopt, ErrorCode::rank_deficient, "x"};
    const auto s2 = aggregate(two);
    CHECK(s2.bh == std::vector<int>{1, 2});
    const auto& dbp = s2.measure(Measure::dbp);
    CHECK(dbp.model[0].mean_rmse == doctest::Approx(4.0));
    CHECK(dbp.model[0].subjects == 2);
    CHECK(dbp.overall_model_rmse == doctest::Approx(4.0));
    CHECK(dbp.cv[1].pooled->rmse == doctest::Approx(std::sqrt(17.0)));
    const auto& mbp_s = s2.measure(Measure::mbp);
    CHECK(mbp_s.model[1].failed == 1);
    CHECK(mbp_s.model[1].subjects == 1);
    CHECK(mbp_s.model[1].mean_rmse == doctest::Approx(3.0));
    CHECK(mbp_s.overall_model_rmse == doctest::Approx(3.5));

    CHECK(code_of([] { aggregate(std::span<const EvalReport>{}); }) == ErrorCode::empty_input);
}
