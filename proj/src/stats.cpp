#include "ppgbp/stats.hpp"

#include "ppgbp/error.hpp"

#include <cmath>

namespace ppgbp {

ErrorStats ErrorStats::from_errors(std::span<const double> errors) {
    const std::size_t n = errors.size();
    if (n < 2) fail(ErrorCode::too_short, "error statistics need at least 2 samples");
    double sum = 0.0, sum_sq = 0.0;
    for (double e : errors) {
        sum += e;
        sum_sq += e * e;
    }
    const double nd = static_cast<double>(n);
    const double mean = sum / nd;
    double dev = 0.0;
    for (double e : errors) dev += (e - mean) * (e - mean);
    return {n, mean, std::sqrt(dev / (nd - 1.0)), std::sqrt(sum_sq / nd)};
}

ErrorStats ErrorStats::pool(std::span<const ErrorStats> parts) {
    if (parts.size() == 1) return parts.front();
    std::size_t n = 0;
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& p : parts) {
        n += p.n;
        sum += static_cast<double>(p.n) * p.mean;
        sum_sq += static_cast<double>(p.n) * p.rmse * p.rmse;
    }
    if (n < 2) fail(ErrorCode::too_short, "pooled statistics need at least 2 samples");
    const double nd = static_cast<double>(n);
    const double mean = sum / nd;
    // Within-part scatter plus between-part scatter about the pooled mean.
    double dev = 0.0;
    for (const auto& p : parts) {
        const double d = p.mean - mean;
        dev += (static_cast<double>(p.n) - 1.0) * p.std * p.std + static_cast<double>(p.n) * d * d;
    }
    return {n, mean, std::sqrt(dev / (nd - 1.0)), std::sqrt(sum_sq / nd)};
}

}  // namespace ppgbp
