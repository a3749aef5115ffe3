#include "ppgbp/search.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <tuple>

namespace ppgbp {

void OrderGrid::validate() const {
    for (const auto* r : {&na, &nb, &nk}) {
        if (r->lo < 1 || r->hi < r->lo || r->hi > k_max_order) {
            fail(ErrorCode::invalid_argument, "order range " + std::to_string(r->lo) + ".." +
                                                  std::to_string(r->hi) + " is empty or out of bounds");
        }
    }
}

std::size_t OrderGrid::size() const {
    auto len = [](const OrderRange& r) { return static_cast<std::size_t>(std::max(0, r.hi - r.lo + 1)); };
    return len(na) * len(nb) * len(nk);
}

std::vector<ArxOrders> OrderGrid::points() const {
    validate();
    std::vector<ArxOrders> out;
    out.reserve(size());
    for (int a = na.lo; a <= na.hi; ++a)
        for (int b = nb.lo; b <= nb.hi; ++b)
            for (int k = nk.lo; k <= nk.hi; ++k) out.push_back({a, b, k});
    return out;
}

OrderGrid OrderGrid::from_env() {
    auto bound = [](const char* name) {
        const char* raw = std::getenv(name);
        if (raw == nullptr || *raw == '\0') return 5;
        char* end = nullptr;
        const long v = std::strtol(raw, &end, 10);
        if (*end != '\0' || v < 1 || v > k_max_order) {
            fail(ErrorCode::invalid_argument, std::string(name) + " must be an integer in 1.." +
                                                  std::to_string(k_max_order));
        }
        return static_cast<int>(v);
    };
    return {{1, bound("PPGBP_MAX_NA")}, {1, bound("PPGBP_MAX_NB")}, {1, bound("PPGBP_MAX_NK")}};
}

OrderGrid OrderGrid::single(const ArxOrders& o) {
    return {{o.na, o.na}, {o.nb, o.nb}, {o.nk, o.nk}};
}

std::string_view to_string(SelectionCriterion c) {
    return c == SelectionCriterion::one_step ? "one_step" : "free_run";
}

SelectionCriterion parse_selection(std::string_view text) {
    if (text == "one_step") return SelectionCriterion::one_step;
    if (text == "free_run") return SelectionCriterion::free_run;
    fail(ErrorCode::parse_error, "unknown selection criterion '" + std::string(text) + "'");
}

double free_run_mse(const ArxModel& model, const UniformSignal& y, const UniformSignal& u) {
    const std::size_t m0 = model.orders.m0();
    const auto ys = y.samples();
    if (ys.size() <= m0) fail(ErrorCode::too_short, "signal not longer than the model's seed length");
    const auto sim = simulate(model, u, ys.first(m0));
    double ss = 0.0;
    for (std::size_t m = m0; m < ys.size(); ++m) {
        const double e = ys[m] - sim[m];
        ss += e * e;
    }
    return ss / static_cast<double>(ys.size() - m0);
}

SearchReport search_orders(const UniformSignal& y, const UniformSignal& u, const OrderGrid& grid,
                           SelectionCriterion criterion) {
    SearchReport report;
    report.criterion = criterion;
    for (const auto& orders : grid.points()) {
        CandidateResult c;
        c.orders = orders;
        c.score = std::numeric_limits<double>::infinity();
        try {
            c.model = fit_arx(y, u, orders);
            c.score = criterion == SelectionCriterion::one_step ? c.model->fit_mse
                                                                : free_run_mse(*c.model, y, u);
            if (!std::isfinite(c.score)) c.score = std::numeric_limits<double>::infinity();
        } catch (const Error& e) {
            c.model.reset();
            c.error = e.code();
            c.message = e.what();
        }
        report.candidates.push_back(std::move(c));
    }

    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : report.candidates) {
        if (c.ok()) best = std::min(best, c.score);
    }
    if (!std::isfinite(best)) {
        fail(ErrorCode::all_candidates_failed,
             "no order candidate produced a finite " + std::string(to_string(criterion)) + " score");
    }

    const auto ys = y.samples();
    const double mean_sq = std::inner_product(ys.begin(), ys.end(), ys.begin(), 0.0) / static_cast<double>(ys.size());
    const double tol = 1e-12 * best + 1e-20 * mean_sq;
    auto key = [](const ArxOrders& o) { return std::make_tuple(o.na + o.nb, o.na, o.nk, o.nb); };
    bool found = false;
    for (std::size_t i = 0; i < report.candidates.size(); ++i) {
        const auto& c = report.candidates[i];
        if (!c.ok() || c.score > best + tol) continue;
        if (!found || key(c.orders) < key(report.candidates[report.winner_index].orders)) {
            report.winner_index = i;
            found = true;
        }
    }
    return report;
}

}  // namespace ppgbp
