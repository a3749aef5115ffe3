#include "ppgbp/arx.hpp"

#include "ppgbp/error.hpp"

#include <cmath>
#include <limits>
#include <numeric>

namespace ppgbp {

namespace {

constexpr double k_rank_ratio = 1e-10;

void check_aligned(const UniformSignal& y, const UniformSignal& u) {
    if (y.size() != u.size()) {
        fail(ErrorCode::shape_mismatch, "output and input lengths differ (" + std::to_string(y.size()) + " vs " +
                                            std::to_string(u.size()) + ")");
    }
    if (y.fs_hz() != u.fs_hz()) fail(ErrorCode::rate_mismatch, "output and input rates differ");
}

// Residuals y(m) - prediction(m) for m in [m0, N), written with the same
// accumulation order used everywhere a residual is needed.
std::vector<double> residuals(const ArxModel& model, std::span<const double> y, std::span<const double> u) {
    const auto& o = model.orders;
    const std::size_t m0 = o.m0();
    std::vector<double> e;
    e.reserve(y.size() - m0);
    for (std::size_t m = m0; m < y.size(); ++m) {
        double pred = 0.0;
        for (int i = 1; i <= o.na; ++i) pred -= model.a[i - 1] * y[m - i];
        for (int j = 1; j <= o.nb; ++j) pred += model.b[j - 1] * u[m - o.nk - j + 1];
        e.push_back(y[m] - pred);
    }
    return e;
}

}  // namespace

void ArxOrders::validate() const {
    auto in_range = [](int v) { return v >= 1 && v <= k_max_order; };
    if (!in_range(na) || !in_range(nb) || !in_range(nk)) {
        fail(ErrorCode::invalid_argument, "orders must lie in 1.." + std::to_string(k_max_order) + " (na=" +
                                              std::to_string(na) + ", nb=" + std::to_string(nb) +
                                              ", nk=" + std::to_string(nk) + ")");
    }
}

void ArxModel::validate() const {
    orders.validate();
    if (a.size() != static_cast<std::size_t>(orders.na) || b.size() != static_cast<std::size_t>(orders.nb)) {
        fail(ErrorCode::shape_mismatch, "coefficient counts do not match model orders");
    }
    for (double v : a) {
        if (!std::isfinite(v)) fail(ErrorCode::invalid_argument, "non-finite a coefficient");
    }
    for (double v : b) {
        if (!std::isfinite(v)) fail(ErrorCode::invalid_argument, "non-finite b coefficient");
    }
    if (!(fs_hz > 0.0)) fail(ErrorCode::invalid_argument, "model rate must be positive");
    if (!(fit_mse >= 0.0)) fail(ErrorCode::invalid_argument, "fit_mse must be non-negative");
}

RegressionSystem build_regression(const UniformSignal& y, const UniformSignal& u, const ArxOrders& orders) {
    orders.validate();
    check_aligned(y, u);
    const std::size_t n = y.size();
    const std::size_t m0 = orders.m0();
    if (n <= m0 + orders.n_params()) {
        fail(ErrorCode::too_short, "need more than " + std::to_string(m0 + orders.n_params()) +
                                       " samples for orders (" + std::to_string(orders.na) + "," +
                                       std::to_string(orders.nb) + "," + std::to_string(orders.nk) +
                                       "), got " + std::to_string(n));
    }
    const auto ys = y.samples();
    const auto us = u.samples();
    const auto rows = static_cast<Eigen::Index>(n - m0);
    RegressionSystem sys;
    sys.m0 = m0;
    sys.design.resize(rows, static_cast<Eigen::Index>(orders.n_params()));
    sys.targets.resize(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const std::size_t m = m0 + static_cast<std::size_t>(r);
        for (int i = 1; i <= orders.na; ++i) sys.design(r, i - 1) = -ys[m - i];
        for (int j = 1; j <= orders.nb; ++j) sys.design(r, orders.na + j - 1) = us[m - orders.nk - j + 1];
        sys.targets(r) = ys[m];
    }
    return sys;
}

ArxModel fit_arx(const UniformSignal& y, const UniformSignal& u, const ArxOrders& orders) {
    auto sys = build_regression(y, u, orders);

    const Eigen::VectorXd norms = sys.design.colwise().norm().transpose();
    if ((norms.array() == 0.0).any() || !norms.allFinite()) {
        fail(ErrorCode::rank_deficient, "design matrix has an all-zero or non-finite column");
    }
    const Eigen::MatrixXd scaled = sys.design * norms.cwiseInverse().asDiagonal();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(scaled);
    const Eigen::MatrixXd& r = qr.matrixR();
    const auto k = static_cast<Eigen::Index>(orders.n_params());
    const double ratio = std::abs(r(k - 1, k - 1)) / std::abs(r(0, 0));
    if (!(ratio >= k_rank_ratio)) {
        fail(ErrorCode::rank_deficient, "design matrix numerically rank deficient (pivot ratio " +
                                            std::to_string(ratio) + ")");
    }
    const Eigen::VectorXd theta = qr.solve(sys.targets).cwiseQuotient(norms);

    ArxModel model;
    model.orders = orders;
    model.fs_hz = y.fs_hz();
    model.a.assign(theta.data(), theta.data() + orders.na);
    model.b.assign(theta.data() + orders.na, theta.data() + k);
    if (!theta.allFinite()) fail(ErrorCode::rank_deficient, "least-squares solution is not finite");

    const auto e = residuals(model, y.samples(), u.samples());
    const double ss = std::inner_product(e.begin(), e.end(), e.begin(), 0.0);
    model.fit_mse = ss / static_cast<double>(e.size());
    return model;
}

UniformSignal simulate(const ArxModel& model, const UniformSignal& u, std::span<const double> y_seed) {
    model.validate();
    const auto& o = model.orders;
    const std::size_t m0 = o.m0();
    if (y_seed.size() != m0) {
        fail(ErrorCode::seed_length_mismatch, "seed has " + std::to_string(y_seed.size()) +
                                                  " samples, model needs " + std::to_string(m0));
    }
    if (u.fs_hz() != model.fs_hz) fail(ErrorCode::rate_mismatch, "input rate differs from model rate");
    if (u.size() < m0) fail(ErrorCode::too_short, "input shorter than the seed");

    const auto us = u.samples();
    std::vector<double> y(us.size());
    std::copy(y_seed.begin(), y_seed.end(), y.begin());
    for (std::size_t m = m0; m < y.size(); ++m) {
        double acc = 0.0;
        for (int i = 1; i <= o.na; ++i) acc -= model.a[i - 1] * y[m - i];
        for (int j = 1; j <= o.nb; ++j) acc += model.b[j - 1] * us[m - o.nk - j + 1];
        y[m] = acc;
    }
    // A divergent recursion saturates at the largest finite magnitude so the
    // result is still a valid signal; its error scores become infinite.
    constexpr double big = std::numeric_limits<double>::max();
    for (double& v : y) {
        if (std::isnan(v)) v = big;
        else if (std::isinf(v)) v = std::copysign(big, v);
    }
    return UniformSignal(u.fs_hz(), u.start_s(), Unit::mmHg, std::move(y));
}

UniformSignal one_step_predict(const ArxModel& model, const UniformSignal& y, const UniformSignal& u) {
    model.validate();
    check_aligned(y, u);
    const std::size_t m0 = model.orders.m0();
    if (y.size() <= m0) fail(ErrorCode::too_short, "signal not longer than the model's seed length");
    return UniformSignal(y.fs_hz(), y.time_at(m0), y.unit(), residuals(model, y.samples(), u.samples()));
}

std::vector<std::complex<double>> ar_roots(const ArxModel& model) {
    const auto na = static_cast<Eigen::Index>(model.a.size());
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(na, na);
    for (Eigen::Index j = 0; j < na; ++j) companion(0, j) = -model.a[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 1; i < na; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    const auto ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

bool is_stable(const ArxModel& model) {
    for (const auto& r : ar_roots(model)) {
        if (!(std::abs(r) < 1.0)) return false;
    }
    return true;
}

double dc_gain(const ArxModel& model) {
    const double num = std::accumulate(model.b.begin(), model.b.end(), 0.0);
    const double den = 1.0 + std::accumulate(model.a.begin(), model.a.end(), 0.0);
    return num / den;
}

}  // namespace ppgbp
