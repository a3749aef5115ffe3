#include "ppgbp/error.hpp"
#include "ppgbp/search.hpp"
#include "ppgbp/synth.hpp"

#include "../support/oracles.hpp"
#include "../support/test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <random>

using namespace ppgbp;
using testutil::code_of;

namespace {

ArxModel random_stable_model(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> order(1, 3);
    std::uniform_real_distribution<double> radius(0.2, 0.85), angle(0.0, 3.0), coef(-1.5, 1.5);
    ArxModel m;
    m.orders = {order(rng), order(rng), order(rng)};
    // Build the AR polynomial from random real poles.
    std::vector<double> poly{1.0};
    for (int i = 0; i < m.orders.na; ++i) {
        const double p = (i % 2 == 0 ? 1.0 : -1.0) * radius(rng);
        std::vector<double> next(poly.size() + 1, 0.0);
        for (std::size_t k = 0; k < poly.size(); ++k) {
            next[k] += poly[k];
            next[k + 1] -= p * poly[k];
        }
        poly = next;
    }
    m.a.assign(poly.begin() + 1, poly.end());
    for (int j = 0; j < m.orders.nb; ++j) {
        double c = coef(rng);
        if (std::abs(c) < 0.3) c = 0.3;
        m.b.push_back(c);
    }
    return m;
}

OrderGrid grid_to(int na, int nb, int nk) { return {{1, na}, {1, nb}, {1, nk}}; }

}  // namespace

TEST_CASE("grid enumeration order and size") {
    const auto g = grid_to(2, 3, 2);
    CHECK(g.size() == 12);
    const auto pts = g.points();
    REQUIRE(pts.size() == 12);
    CHECK(pts.front() == ArxOrders{1, 1, 1});
    CHECK(pts[1] == ArxOrders{1, 1, 2});
    CHECK(pts[2] == ArxOrders{1, 2, 1});
    CHECK(pts.back() == ArxOrders{2, 3, 2});
    CHECK(OrderGrid{}.size() == 125);
    CHECK(code_of([] { OrderGrid{{2, 1}, {1, 1}, {1, 1}}.validate(); }) == ErrorCode::invalid_argument);
}

TEST_CASE("grid bounds from the environment") {
    setenv("PPGBP_MAX_NA", "3", 1);
    setenv("PPGBP_MAX_NK", "7", 1);
    const auto g = OrderGrid::from_env();
    unsetenv("PPGBP_MAX_NA");
    unsetenv("PPGBP_MAX_NK");
    CHECK(g.na.hi == 3);
    CHECK(g.nb.hi == 5);
    CHECK(g.nk.hi == 7);
    CHECK(OrderGrid::from_env() == OrderGrid{});
}

TEST_CASE("noiseless data selects the generating orders") {
    ArxModel m;
    m.orders = {2, 2, 1};
    m.a = {-1.2, 0.5};
    m.b = {1.0, 0.4};
    const auto ds = generate_arx_dataset(m, 500, 1.0, 0.0, 21);
    for (auto crit : {SelectionCriterion::one_step, SelectionCriterion::free_run}) {
        const auto rep = search_orders(ds.y, ds.u, {}, crit);
        CHECK(rep.candidates.size() == 125);
        CHECK(rep.winner().orders == ArxOrders{2, 2, 1});
        CHECK(rep.criterion == crit);
    }
}

TEST_CASE("a singleton grid returns its only point") {
    ArxModel m;
    m.orders = {1, 1, 1};
    m.a = {-0.7};
    m.b = {2.0};
    const auto ds = generate_arx_dataset(m, 300, 1.0, 0.1, 4);
    const auto rep = search_orders(ds.y, ds.u, OrderGrid::single({3, 2, 4}));
    REQUIRE(rep.candidates.size() == 1);
    CHECK(rep.winner_index == 0);
    CHECK(rep.winner().orders == ArxOrders{3, 2, 4});
}

TEST_CASE("one-step winner matches an SVD brute force") {
    std::mt19937_64 rng(314);
    for (int trial = 0; trial < 20; ++trial) {
        const auto m = random_stable_model(rng);
        const auto ds = generate_arx_dataset(m, 600, 1.0, 0.2, 1000 + static_cast<std::uint64_t>(trial));
        const auto rep = search_orders(ds.y, ds.u, grid_to(4, 4, 4));
        const std::vector<double> y(ds.y.samples().begin(), ds.y.samples().end());
        const std::vector<double> u(ds.u.samples().begin(), ds.u.samples().end());
        const auto best = oracle::brute_force_winner(oracle::enumerate_fits(y, u, 4, 4, 4));
        CHECK(rep.winner().orders == ArxOrders{best.na, best.nb, best.nk});
        CHECK(rep.candidates[rep.winner_index].score == doctest::Approx(best.mse).epsilon(1e-9));
    }
}

TEST_CASE("enlarging the grid never worsens the winning score") {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 5; ++trial) {
        const auto m = random_stable_model(rng);
        const auto ds = generate_arx_dataset(m, 500, 1.0, 0.3, 50 + static_cast<std::uint64_t>(trial));
        double prev = INFINITY;
        for (int hi = 1; hi <= 4; ++hi) {
            const auto rep = search_orders(ds.y, ds.u, grid_to(hi, hi, hi));
            const double s = rep.candidates[rep.winner_index].score;
            CHECK(s <= prev);
            prev = s;
        }
    }
}

TEST_CASE("search is deterministic") {
    std::mt19937_64 rng(9);
    const auto m = random_stable_model(rng);
    const auto ds = generate_arx_dataset(m, 400, 1.0, 0.5, 2);
    const auto a = search_orders(ds.y, ds.u, {}, SelectionCriterion::free_run);
    const auto b = search_orders(ds.y, ds.u, {}, SelectionCriterion::free_run);
    REQUIRE(a.candidates.size() == b.candidates.size());
    CHECK(a.winner_index == b.winner_index);
    for (std::size_t i = 0; i < a.candidates.size(); ++i) {
        CHECK(a.candidates[i].orders == b.candidates[i].orders);
        CHECK(a.candidates[i].score == b.candidates[i].score);
        CHECK(a.candidates[i].model == b.candidates[i].model);
    }
}

TEST_CASE("failures are recorded and all-failed is an error") {
    std::vector<double> y(40), u(40, 1.0);
    for (std::size_t k = 0; k < y.size(); ++k) y[k] = std::sin(0.4 * static_cast<double>(k));
    const UniformSignal ys(100.0, 0.0, Unit::mmHg, y), us(100.0, 0.0, Unit::au, u);
    // Single-tap input survives; wider input taps on a constant are rank deficient.
    const auto rep = search_orders(ys, us, grid_to(1, 2, 1));
    REQUIRE(rep.candidates.size() == 2);
    CHECK(rep.candidates[0].ok());
    CHECK_FALSE(rep.candidates[1].ok());
    CHECK(rep.candidates[1].error == ErrorCode::rank_deficient);
    CHECK(rep.winner_index == 0);

    CHECK(code_of([&] { search_orders(ys, us, OrderGrid::single({1, 3, 1})); }) == ErrorCode::all_candidates_failed);
}

TEST_CASE("selection names round trip") {
    CHECK(parse_selection(to_string(SelectionCriterion::one_step)) == SelectionCriterion::one_step);
    CHECK(parse_selection(to_string(SelectionCriterion::free_run)) == SelectionCriterion::free_run);
    CHECK(code_of([] { parse_selection("best"); }) == ErrorCode::parse_error);
}
