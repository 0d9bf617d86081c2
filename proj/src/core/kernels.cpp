#include "kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "error.hpp"
#include "numerics.hpp"

namespace pctv::kernels {

namespace {

constexpr double kQuadratureTol = 1e-8;
constexpr double kMonotoneSlack = 1e-12;

std::string fmt_double(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

KernelProfile::KernelProfile(std::string name, Fn fn, double support_radius, std::vector<double> breakpoints)
    : name_(std::move(name)),
      fn_(std::make_shared<const Fn>(std::move(fn))),
      support_(support_radius),
      breaks_(std::move(breakpoints)) {
    require(support_radius > 0.0, ErrorCode::InvalidProfile, "kernel support radius must be positive");
    std::sort(breaks_.begin(), breaks_.end());
    breaks_.erase(std::unique(breaks_.begin(), breaks_.end()), breaks_.end());
}

KernelProfile KernelProfile::indicator(double radius) {
    require(radius > 0.0, ErrorCode::Parameter, "indicator radius must be positive");
    return KernelProfile("indicator", [radius](double r) { return r < radius ? 1.0 : 0.0; }, radius, {radius});
}

KernelProfile KernelProfile::gaussian(double width) {
    require(width > 0.0, ErrorCode::Parameter, "gaussian width must be positive");
    return KernelProfile("gaussian", [width](double r) { return std::exp(-(r / width) * (r / width)); }, kInfinite);
}

KernelProfile KernelProfile::step_sum(std::vector<Step> steps) {
    require(!steps.empty(), ErrorCode::Parameter, "step-sum profile needs at least one step");
    double support = 0.0;
    std::vector<double> breaks;
    for (const auto& s : steps) {
        require(s.radius > 0.0, ErrorCode::Parameter, "step radius must be positive");
        support = std::max(support, s.radius);
        breaks.push_back(s.radius);
    }
    auto fn = [steps](double r) {
        double v = 0.0;
        for (const auto& s : steps)
            if (r < s.radius) v += s.height;
        return v;
    };
    return KernelProfile("step-sum", std::move(fn), support, std::move(breaks));
}

KernelProfile KernelProfile::scaled(double c) const {
    auto inner = fn_;
    return KernelProfile(name_ + "*" + fmt_double(c), [inner, c](double r) { return c * (*inner)(r); }, support_,
                         breaks_);
}

KernelProfile KernelProfile::truncated(double alpha) const {
    require(alpha > 0.0, ErrorCode::Parameter, "truncation radius must be positive");
    auto inner = fn_;
    auto breaks = breaks_;
    breaks.push_back(alpha);
    return KernelProfile(name_ + "|<" + fmt_double(alpha), [inner, alpha](double r) {
        return r < alpha ? (*inner)(r) : 0.0;
    }, std::min(alpha, support_), std::move(breaks));
}

double KernelProfile::cutoff_radius(int d) const {
    if (compact()) return support_;
    auto moment = [&](double r) { return (*this)(r) * std::pow(r, d); };
    // March geometrically past the peak of the moment density, then bisect.
    double r = 1e-3;
    double peak = 0.0;
    double prev = r;
    bool past_peak = false;
    while (r < 1e9) {
        const double m = moment(r);
        if (m >= peak) {
            peak = m;
        } else {
            past_peak = true;
        }
        if (past_peak && m < kTruncationLevel) break;
        prev = r;
        r *= 1.01;
    }
    if (r >= 1e9) fail(ErrorCode::Divergence, "kernel '" + name_ + "': radial moment does not decay (K3)");
    double lo = prev, hi = r;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (moment(mid) < kTruncationLevel)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

KernelProfile KernelProfile::effective(int d) const {
    if (compact()) return *this;
    const double cut = cutoff_radius(d);
    auto inner = fn_;
    auto breaks = breaks_;
    breaks.push_back(cut);
    return KernelProfile(name_, [inner, cut](double r) { return r < cut ? (*inner)(r) : 0.0; }, cut,
                         std::move(breaks));
}

ValidationReport validate_profile(const KernelProfile& profile, int d, double tol) {
    require(d >= 2, ErrorCode::Parameter, "validate_profile: dimension must be >= 2");
    require(tol > 0.0, ErrorCode::Parameter, "validate_profile: tolerance must be positive");
    ValidationReport rep;
    std::ostringstream detail;

    auto checked = [&](double r) {
        const double v = profile(r);
        if (!(v >= 0.0))
            fail(ErrorCode::InvalidProfile,
                 "kernel '" + profile.name() + "' is negative or NaN at r=" + fmt_double(r));
        return v;
    };

    // (K1): decreasing radii towards 0.
    const double at0 = checked(0.0);
    rep.k1_grid.push_back(0.0);
    for (int k = 0; k <= 12; ++k) rep.k1_grid.push_back(std::pow(10.0, -k));
    bool continuous = true;
    for (std::size_t i = rep.k1_grid.size() - 3; i < rep.k1_grid.size(); ++i)
        if (std::abs(checked(rep.k1_grid[i]) - at0) > tol * std::max(1.0, at0)) continuous = false;
    for (double r : rep.k1_grid) checked(r);
    rep.k1 = at0 > 0.0 && continuous;
    if (!(at0 > 0.0)) detail << "K1: profile(0) > 0 violated; ";
    else if (!continuous) detail << "K1: profile not continuous at 0; ";

    // (K2): dense grid plus both sides of each breakpoint.
    double reach = profile.compact() ? 2.0 * profile.support_radius() : 50.0;
    if (!profile.compact()) {
        try {
            reach = std::max(reach, 2.0 * profile.cutoff_radius(d));
        } catch (const Error&) {
        }
    }
    constexpr int kGrid = 4096;
    for (int i = 0; i <= kGrid; ++i) rep.k2_grid.push_back(reach * i / kGrid);
    for (double b : profile.breakpoints()) {
        rep.k2_grid.push_back(b * (1.0 - 1e-9));
        rep.k2_grid.push_back(b);
        rep.k2_grid.push_back(b * (1.0 + 1e-9));
    }
    std::sort(rep.k2_grid.begin(), rep.k2_grid.end());
    rep.k2 = true;
    double last = checked(rep.k2_grid.front());
    for (std::size_t i = 1; i < rep.k2_grid.size(); ++i) {
        const double v = checked(rep.k2_grid[i]);
        if (v > last + kMonotoneSlack) {
            rep.k2 = false;
            detail << "K2: increases at r=" << fmt_double(rep.k2_grid[i]) << "; ";
            break;
        }
        last = v;
    }

    // (K3): radial moment of order d over growing ranges.
    auto moment = [&](double r) { return profile(r) * std::pow(r, d); };
    if (profile.compact()) {
        const auto I = numerics::integrate(moment, 0.0, profile.support_radius(), kQuadratureTol,
                                           profile.breakpoints());
        rep.k3_radii.push_back(profile.support_radius());
        rep.k3_integrals.push_back(I.value);
        rep.k3 = std::isfinite(I.value);
    } else {
        double prev = std::nan("");
        for (double R = 5.0; R <= 5.0 * 1024; R *= 2.0) {
            const auto I = numerics::integrate(moment, 0.0, R, kQuadratureTol, profile.breakpoints());
            rep.k3_radii.push_back(R);
            rep.k3_integrals.push_back(I.value);
            if (std::isfinite(prev) && std::abs(I.value - prev) <= tol * std::max(1.0, std::abs(I.value))) {
                rep.k3 = true;
                break;
            }
            prev = I.value;
        }
        if (!rep.k3) detail << "K3: radial moment does not stabilise; ";
    }
    rep.detail = detail.str();
    return rep;
}

double sphere_abs_first_moment(int d) {
    require(d >= 2, ErrorCode::Parameter, "dimension must be >= 2");
    if (d == 2) return 4.0;
    if (d == 3) return 2.0 * std::numbers::pi;
    // Slice the sphere by t = omega_1: dS = |S^{d-2}| (1-t^2)^{(d-3)/2} dt.
    const double expo = 0.5 * (d - 3);
    auto f = [expo](double t) { return t * std::pow(1.0 - t * t, expo); };
    const auto I = numerics::integrate(f, 0.0, 1.0, 1e-12);
    return numerics::sphere_area(d - 2) * 2.0 * I.value;
}

SurfaceTension surface_tension(const KernelProfile& profile, int d) {
    require(d >= 2, ErrorCode::Parameter, "surface_tension: dimension must be >= 2");
    const KernelProfile eff = profile.effective(d);
    auto moment = [&](double r) { return eff(r) * std::pow(r, d); };
    const auto I = numerics::integrate(moment, 0.0, eff.support_radius(), kQuadratureTol, eff.breakpoints());
    if (!std::isfinite(I.value)) fail(ErrorCode::Divergence, "surface_tension: radial integral diverges");
    const double cd = sphere_abs_first_moment(d);
    SurfaceTension st;
    st.value = cd * I.value;
    st.dimension = d;
    st.quadrature_error_estimate = cd * I.error_estimate;
    require(st.value > 0.0, ErrorCode::InvalidProfile, "surface_tension: kernel '" + profile.name() + "' has zero mass");
    return st;
}

double eval_scaled(const KernelProfile& profile, double eps, std::span<const double> z, int d) {
    require(eps > 0.0, ErrorCode::Parameter, "eval_scaled: eps must be positive");
    require(static_cast<int>(z.size()) == d, ErrorCode::Shape, "eval_scaled: displacement has wrong dimension");
    double r2 = 0.0;
    for (double c : z) r2 += c * c;
    return std::pow(eps, -d) * profile(std::sqrt(r2) / eps);
}

KernelProfile make_profile(const KernelSpec& spec) {
    if (spec.name == "indicator") return KernelProfile::indicator(spec.radius);
    if (spec.name == "gaussian") return KernelProfile::gaussian(spec.width);
    if (spec.name == "step-sum") return KernelProfile::step_sum(spec.steps);
    fail(ErrorCode::Parameter, "unknown kernel '" + spec.name + "'");
}

}  // namespace pctv::kernels
