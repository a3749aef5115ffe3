#pragma once

#include <cstddef>
#include <span>

namespace ppgbp {

/// Summary of an error sample: count, mean, sample standard deviation (n-1) and root mean square.
struct ErrorStats {
    std::size_t n = 0;
    double mean = 0.0;
    double std = 0.0;
    double rmse = 0.0;

    /// Throws TooShort for fewer than two samples.
    static ErrorStats from_errors(std::span<const double> errors);

    /// Statistics of the concatenation of the samples behind each part,
    /// computed from the parts' sufficient statistics.
    static ErrorStats pool(std::span<const ErrorStats> parts);

    friend bool operator==(const ErrorStats&, const ErrorStats&) = default;
};

}  // namespace ppgbp
