#pragma once

#include "ppgbp/arx.hpp"
#include "ppgbp/error.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ppgbp {

struct OrderRange {
    int lo = 1;
    int hi = 5;

    friend bool operator==(const OrderRange&, const OrderRange&) = default;
};

struct OrderGrid {
    OrderRange na;
    OrderRange nb;
    OrderRange nk;

    void validate() const;
    std::size_t size() const;
    /// All grid points in (na, nb, nk) lexicographic order.
    std::vector<ArxOrders> points() const;

    /// 1..5 for each order, with upper bounds overridable through
    /// PPGBP_MAX_NA, PPGBP_MAX_NB and PPGBP_MAX_NK.
    static OrderGrid from_env();
    static OrderGrid single(const ArxOrders& orders);

    friend bool operator==(const OrderGrid&, const OrderGrid&) = default;
};

/**
 * Score used to rank candidates.
 *
 * one_step: the candidate's fit_mse (mean squared one-step residual).
 * free_run: mean squared error of the free-run simulation over the training
 *           data, seeded with the first m0 measured samples.
 */
enum class SelectionCriterion { one_step, free_run };

std::string_view to_string(SelectionCriterion c);
SelectionCriterion parse_selection(std::string_view text);

struct CandidateResult {
    ArxOrders orders;
    std::optional<ArxModel> model;   // empty when the fit failed
    std::optional<ErrorCode> error;  // set when the fit failed
    std::string message;
    double score = 0.0;  // criterion value; +inf when not selectable

    bool ok() const noexcept { return model.has_value(); }
};

struct SearchReport {
    SelectionCriterion criterion = SelectionCriterion::one_step;
    std::vector<CandidateResult> candidates;  // sorted by (na, nb, nk)
    std::size_t winner_index = 0;

    const ArxModel& winner() const { return *candidates.at(winner_index).model; }
};

/**
 * Fits every grid point and picks the lowest score. Scores within
 * 1e-12 relative (plus 1e-20 * mean(y^2) absolute) of the minimum are ties,
 * broken by fewest na+nb, then smaller na, then smaller nk.
 *
 * Failed fits are recorded, not fatal. Throws AllCandidatesFailed when no
 * candidate produced a finite score.
 */
SearchReport search_orders(const UniformSignal& y, const UniformSignal& u, const OrderGrid& grid = {},
                           SelectionCriterion criterion = SelectionCriterion::one_step);

/// Mean squared free-run simulation error of `model` on (y, u) over m >= m0.
double free_run_mse(const ArxModel& model, const UniformSignal& y, const UniformSignal& u);

}  // namespace ppgbp
