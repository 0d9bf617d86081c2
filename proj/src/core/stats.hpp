#pragma once

#include <span>

namespace pctv::stats {

struct KendallResult {
    double tau_b = 0.0;
    double z = 0.0;
    /// One-sided p-value for an increasing association (normal approximation,
    /// tie-corrected variance of S).
    double p_increasing = 1.0;
};

KendallResult kendall_tau(std::span<const double> x, std::span<const double> y);

/// values[i] < values[i - 1] for every i.
bool strictly_decreasing(std::span<const double> values);

}  // namespace pctv::stats
