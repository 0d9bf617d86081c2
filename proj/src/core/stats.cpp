#include "stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "error.hpp"

namespace pctv::stats {

namespace {

// sum over tie groups of t(t-1), t(t-1)(2t+5), t(t-1)(t-2).
struct TieSums {
    double a = 0.0, b = 0.0, c = 0.0, pairs = 0.0;
};

TieSums tie_sums(std::span<const double> v) {
    std::map<double, double> count;
    for (double x : v) count[x] += 1.0;
    TieSums s;
    for (const auto& [value, t] : count) {
        s.a += t * (t - 1.0);
        s.b += t * (t - 1.0) * (2.0 * t + 5.0);
        s.c += t * (t - 1.0) * (t - 2.0);
        s.pairs += t * (t - 1.0) / 2.0;
    }
    return s;
}

}  // namespace

KendallResult kendall_tau(std::span<const double> x, std::span<const double> y) {
    require(x.size() == y.size(), ErrorCode::Shape, "kendall_tau: samples differ in length");
    const std::size_t n = x.size();
    KendallResult r;
    if (n < 2) return r;
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = x[j] - x[i], dy = y[j] - y[i];
            const double sx = (dx > 0) - (dx < 0), sy = (dy > 0) - (dy < 0);
            s += sx * sy;
        }
    const auto tx = tie_sums(x), ty = tie_sums(y);
    const double nn = static_cast<double>(n);
    const double n0 = nn * (nn - 1.0) / 2.0;
    const double denom = std::sqrt((n0 - tx.pairs) * (n0 - ty.pairs));
    r.tau_b = denom > 0.0 ? s / denom : 0.0;
    double var = (nn * (nn - 1.0) * (2.0 * nn + 5.0) - tx.b - ty.b) / 18.0 + tx.a * ty.a / (2.0 * nn * (nn - 1.0));
    if (n > 2) var += tx.c * ty.c / (9.0 * nn * (nn - 1.0) * (nn - 2.0));
    if (var > 0.0) {
        r.z = s / std::sqrt(var);
        r.p_increasing = 0.5 * std::erfc(r.z / std::sqrt(2.0));
    }
    return r;
}

bool strictly_decreasing(std::span<const double> values) {
    for (std::size_t i = 1; i < values.size(); ++i)
        if (!(values[i] < values[i - 1])) return false;
    return true;
}

}  // namespace pctv::stats
