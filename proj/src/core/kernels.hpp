#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace pctv::kernels {

inline constexpr double kInfinite = std::numeric_limits<double>::infinity();

/// Gaussian-type profiles are cut where profile(r) * r^d drops below this.
inline constexpr double kTruncationLevel = 1e-12;

/// One step of a piecewise-constant profile: contributes `height` on [0, radius).
struct Step {
    double radius;
    double height;
};

/// Radial profile of an isotropic kernel, eta(x) = profile(|x|).
///
/// Immutable; copies share the underlying evaluator. Jumps of the profile are
/// listed in breakpoints() so quadrature can split there. A compactly supported
/// profile is 0 at and beyond support_radius().
class KernelProfile {
public:
    using Fn = std::function<double(double)>;

    KernelProfile(std::string name, Fn fn, double support_radius, std::vector<double> breakpoints = {});

    /// 1 on [0, radius), 0 from radius on.
    static KernelProfile indicator(double radius = 1.0);
    /// exp(-(r/width)^2), infinite support.
    static KernelProfile gaussian(double width = 1.0);
    /// Sum of steps; non-increasing whenever all heights are >= 0.
    static KernelProfile step_sum(std::vector<Step> steps);

    double operator()(double r) const { return (*fn_)(r); }

    const std::string& name() const { return name_; }
    double support_radius() const { return support_; }
    bool compact() const { return support_ < kInfinite; }
    std::span<const double> breakpoints() const { return breaks_; }

    /// c * profile.
    KernelProfile scaled(double c) const;
    /// profile * 1[r < alpha].
    KernelProfile truncated(double alpha) const;

    /// Radius beyond which computations treat the profile as zero in dimension d.
    /// Equals support_radius() for compact profiles; otherwise the point past the
    /// peak of profile(r) r^d where that product falls below kTruncationLevel.
    /// Throws Divergence if no such radius exists.
    double cutoff_radius(int d) const;

    /// Profile actually used by discrete and continuum computations in dimension d.
    KernelProfile effective(int d) const;

private:
    std::string name_;
    std::shared_ptr<const Fn> fn_;
    double support_;
    std::vector<double> breaks_;
};

struct ValidationReport {
    bool k1 = false;  // profile(0) > 0 and continuous at 0
    bool k2 = false;  // non-increasing
    bool k3 = false;  // finite radial moment of order d
    std::vector<double> k1_grid;
    std::vector<double> k2_grid;
    std::vector<double> k3_radii;
    std::vector<double> k3_integrals;
    std::string detail;

    bool ok() const { return k1 && k2 && k3; }
};

/// Checks (K1)-(K3) on sampled radius grids. Throws InvalidProfile if the
/// profile is negative anywhere on the grids.
ValidationReport validate_profile(const KernelProfile& profile, int d, double tol);

struct SurfaceTension {
    double value = 0.0;
    int dimension = 0;
    double quadrature_error_estimate = 0.0;
};

/// Integral over the unit sphere S^{d-1} of |omega_1|.
double sphere_abs_first_moment(int d);

/// sigma = int_{R^d} eta(h) |h_1| dh, through the radial reduction
/// c_d * int_0^inf profile(r) r^d dr on the effective (truncated) profile.
SurfaceTension surface_tension(const KernelProfile& profile, int d);

/// eps^{-d} profile(|z| / eps).
double eval_scaled(const KernelProfile& profile, double eps, std::span<const double> z, int d);

/// Kernel as declared in an experiment config ({"name": "indicator", "radius": 1.0}).
struct KernelSpec {
    std::string name = "indicator";
    double radius = 1.0;
    double width = 1.0;
    std::vector<Step> steps;
};
KernelProfile make_profile(const KernelSpec& spec);

}  // namespace pctv::kernels
