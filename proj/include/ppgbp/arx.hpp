#pragma once

#include "ppgbp/signal.hpp"

#include <Eigen/Dense>

#include <complex>
#include <span>
#include <vector>

namespace ppgbp {

/// Upper bound accepted for any single order; grids default to 1..5.
inline constexpr int k_max_order = 20;

struct ArxOrders {
    int na = 1;  // output order
    int nb = 1;  // input order
    int nk = 1;  // pure delay in samples

    /// First sample index with a full set of lagged regressors.
    std::size_t m0() const { return static_cast<std::size_t>(std::max(na, nb + nk - 1)); }
    std::size_t n_params() const { return static_cast<std::size_t>(na + nb); }
    void validate() const;

    friend auto operator<=>(const ArxOrders&, const ArxOrders&) = default;
};

/**
 * @brief Single-input single-output equation-error difference model
 *
 *   y(m) = -sum_i a_i y(m-i) + sum_j b_j u(m-nk-j+1) + e(m)
 */
struct ArxModel {
    ArxOrders orders;
    std::vector<double> a;
    std::vector<double> b;
    double fs_hz = k_model_fs_hz;
    double fit_mse = 0.0;  // mean squared one-step residual over the fitted rows

    void validate() const;

    friend bool operator==(const ArxModel&, const ArxModel&) = default;
};

struct RegressionSystem {
    Eigen::MatrixXd design;   // rows [-y(m-1)..-y(m-na), u(m-nk)..u(m-nk-nb+1)]
    Eigen::VectorXd targets;  // y(m)
    std::size_t m0 = 0;       // sample index of the first row
};

/// Throws TooShort when N <= m0 + na + nb; ShapeMismatch / RateMismatch for misaligned inputs.
RegressionSystem build_regression(const UniformSignal& y, const UniformSignal& u, const ArxOrders& orders);

/**
 * Least-squares fit through column-pivoted Householder QR on unit-norm
 * equilibrated columns. Throws RankDeficient when the smallest to largest
 * pivot ratio falls below 1e-10.
 */
ArxModel fit_arx(const UniformSignal& y, const UniformSignal& u, const ArxOrders& orders);

/**
 * Free-run recursion with e = 0: the first m0 outputs are the seed, every
 * later output uses previously simulated outputs. Output length equals u.
 */
UniformSignal simulate(const ArxModel& model, const UniformSignal& u, std::span<const double> y_seed);

/// One-step residuals e(m) for m >= m0; the result starts at the time of sample m0.
UniformSignal one_step_predict(const ArxModel& model, const UniformSignal& y, const UniformSignal& u);

/// Roots of z^na + a_1 z^(na-1) + ... + a_na.
std::vector<std::complex<double>> ar_roots(const ArxModel& model);
bool is_stable(const ArxModel& model);

/// Steady-state gain sum(b) / (1 + sum(a)).
double dc_gain(const ArxModel& model);

}  // namespace ppgbp
