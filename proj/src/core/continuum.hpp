#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "geometry.hpp"
#include "kernels.hpp"

namespace pctv::continuum {

using ScalarField = std::function<double(std::span<const double>)>;

/// Smooth test function with an analytic gradient.
struct SmoothFunction {
    ScalarField value;
    std::function<void(std::span<const double>, std::span<double>)> gradient;
};

/// u(x) = x_axis.
SmoothFunction coordinate(int axis);

/// Largest relative mismatch between the analytic gradient and central finite
/// differences (step h) over `samples` random interior points.
double gradient_mismatch(const SmoothFunction& u, const geometry::Domain& domain, int samples, std::uint64_t seed,
                         double h = 1e-6);

/// Deterministic or stochastic estimate of a functional. For Monte Carlo,
/// error_estimate is the standard error and samples the pair count.
struct Estimate {
    double value = 0.0;
    double error_estimate = 0.0;
    std::size_t samples = 0;
};

/// int_D |grad u| rho^2 dx by tensor midpoint quadrature with `resolution`
/// cells per axis over the bounding box; the error estimate is the difference
/// to the same rule at resolution / 2.
Estimate weighted_tv_smooth(const SmoothFunction& u, const geometry::Density& rho, const geometry::Domain& domain,
                            int resolution);

/// Planar polygon (any simple polygon, either orientation).
struct PolygonalSet {
    std::vector<geometry::Point2> vertices;

    bool contains(const geometry::Point2& p) const;

    static PolygonalSet rectangle(geometry::Point2 lower, geometry::Point2 upper);
    /// Regular `segments`-gon inscribed in the circle.
    static PolygonalSet disk(geometry::Point2 centre, double radius, int segments);
};

struct Segment {
    geometry::Point2 a;
    geometry::Point2 b;
    double length() const;
};

/// Pieces of the polygon boundary strictly inside the domain.
std::vector<Segment> boundary_in_domain(const PolygonalSet& set, const geometry::Domain& domain);

/// int_{dE cap D} rho^2 dS with `order`-point Gauss-Legendre per piece.
/// Planar domains only (Unsupported otherwise).
double weighted_perimeter(const PolygonalSet& set, const geometry::Density& rho, const geometry::Domain& domain,
                          int order = 8);

/// Weighted area of the cut {x_axis = position} inside the domain, in any
/// dimension: int over the cut of rho^2, midpoint rule with `resolution` cells
/// per remaining axis. Exact for constant rho on a box.
double weighted_planar_cut(const geometry::Domain& domain, const geometry::Density& rho, int axis, double position,
                           int resolution = 256);

enum class NonlocalMethod { Quadrature, MonteCarlo };

struct NonlocalOptions {
    NonlocalMethod method = NonlocalMethod::Quadrature;
    /// Quadrature: grid cells per eps along each axis.
    int cells_per_eps = 16;
    /// Quadrature: sub-samples per axis when averaging the kernel over a stencil cell.
    int kernel_subsamples = 8;
    /// Monte Carlo: number of (X, Y) pairs and the seeds of the two streams.
    std::size_t samples = 1'000'000;
    std::uint64_t seed_x = 1;
    std::uint64_t seed_y = 2;
};

/// (1/eps) int int eta_eps(x-y) |u(x)-u(y)| rho(x) rho(y) dx dy.
///
/// Quadrature: cell-centred values of u and rho on a grid of pitch about
/// eps / cells_per_eps, against a stencil of cell-averaged kernel weights
/// restricted to the kernel support; the error estimate compares with the rule
/// at half the resolution. Monte Carlo: X, Y drawn i.i.d. from rho dx with
/// independent streams; the integrand is symmetric so swapping the two seeds
/// reproduces the estimate bit for bit.
Estimate nonlocal_tv(const ScalarField& u, const geometry::Density& rho, const geometry::Domain& domain,
                     const kernels::KernelProfile& profile, double eps, const NonlocalOptions& options = {});

}  // namespace pctv::continuum
