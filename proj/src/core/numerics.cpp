#include "numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "error.hpp"

namespace pctv::numerics {

namespace {

struct SimpsonState {
    const std::function<double(double)>& f;
    int evaluations = 0;
    double error = 0.0;
};

double simpson_recurse(SimpsonState& st, double a, double b, double fa, double fm, double fb, double whole,
                       double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = st.f(lm);
    const double frm = st.f(rm);
    st.evaluations += 2;
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
        st.error += std::abs(delta) / 15.0;
        return left + right + delta / 15.0;
    }
    return simpson_recurse(st, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_recurse(st, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

Integral simpson_piece(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    if (b <= a) return {};
    SimpsonState st{f};
    // Coarse pass fixes the absolute tolerance scale.
    constexpr int kCoarse = 64;
    const double h = (b - a) / kCoarse;
    std::vector<double> xs(kCoarse + 1), fs(kCoarse + 1);
    for (int i = 0; i <= kCoarse; ++i) {
        xs[i] = (i == kCoarse) ? b : a + h * i;
        fs[i] = f(xs[i]);
    }
    double scale = 0.0;
    for (int i = 0; i < kCoarse; ++i) scale += 0.5 * h * (std::abs(fs[i]) + std::abs(fs[i + 1]));
    const double abs_tol = std::max(rel_tol * scale, 1e-300);
    double total = 0.0;
    for (int i = 0; i < kCoarse; ++i) {
        const double m = 0.5 * (xs[i] + xs[i + 1]);
        const double fm = f(m);
        const double whole = (xs[i + 1] - xs[i]) / 6.0 * (fs[i] + 4.0 * fm + fs[i + 1]);
        total += simpson_recurse(st, xs[i], xs[i + 1], fs[i], fm, fs[i + 1], whole, abs_tol / kCoarse, 40);
    }
    return {total, st.error};
}

}  // namespace

Integral integrate(const std::function<double(double)>& f, double a, double b, double rel_tol,
                   std::span<const double> breaks) {
    require(rel_tol > 0.0, ErrorCode::Parameter, "integrate: tolerance must be positive");
    std::vector<double> cuts{a};
    for (double x : breaks)
        if (x > a && x < b) cuts.push_back(x);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    Integral out;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        // Pieces are integrated on the open interval so a jump exactly at a cut
        // point is evaluated from the correct side.
        const double lo = cuts[i];
        const double hi = cuts[i + 1];
        const double shrink = (hi - lo) * 1e-13;
        auto piece = simpson_piece(f, lo + (i > 0 ? shrink : 0.0), hi - (i + 2 < cuts.size() ? shrink : 0.0), rel_tol);
        out.value += piece.value;
        out.error_estimate += piece.error_estimate;
    }
    return out;
}

GaussRule gauss_legendre(int order) {
    require(order >= 1, ErrorCode::Parameter, "gauss_legendre: order must be >= 1");
    GaussRule rule;
    rule.nodes.resize(order);
    rule.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= order; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = order * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

double sphere_area(int k) {
    const double half = 0.5 * (k + 1);
    return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double median(std::vector<double> v) {
    if (v.empty()) return std::nan("");
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return (v.size() % 2) ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

void CompensatedSum::add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
        comp_ += (sum_ - t) + x;
    else
        comp_ += (x - t) + sum_;
    sum_ = t;
}

}  // namespace pctv::numerics
