#include "continuum.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"
#include "numerics.hpp"
#include "rng.hpp"

namespace pctv::continuum {

using geometry::Domain;
using geometry::Density;
using geometry::Point2;

SmoothFunction coordinate(int axis) {
    require(axis >= 0, ErrorCode::Parameter, "coordinate: axis must be >= 0");
    SmoothFunction u;
    u.value = [axis](std::span<const double> x) { return x[axis]; };
    u.gradient = [axis](std::span<const double>, std::span<double> g) {
        std::fill(g.begin(), g.end(), 0.0);
        g[axis] = 1.0;
    };
    return u;
}

double gradient_mismatch(const SmoothFunction& u, const Domain& domain, int samples, std::uint64_t seed, double h) {
    const int d = domain.dim();
    const auto cloud = geometry::sample_iid(domain, Density::uniform(domain), samples, seed);
    double worst = 0.0;
    std::vector<double> g(d), xp(d), xm(d);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        auto x = cloud.point(i);
        u.gradient(x, g);
        for (int k = 0; k < d; ++k) {
            std::copy(x.begin(), x.end(), xp.begin());
            std::copy(x.begin(), x.end(), xm.begin());
            xp[k] += h;
            xm[k] -= h;
            const double fd = (u.value(xp) - u.value(xm)) / (2.0 * h);
            const double scale = std::max(1.0, std::abs(g[k]));
            worst = std::max(worst, std::abs(fd - g[k]) / scale);
        }
    }
    return worst;
}

namespace {

// Midpoint rule over the bounding box, masked by the domain.
template <class Fn>
double box_midpoint(const Domain& domain, int resolution, Fn&& integrand) {
    const int d = domain.dim();
    const auto& bb = domain.bounding_box();
    std::vector<double> h(d), x(d);
    double cell = 1.0;
    for (int k = 0; k < d; ++k) {
        h[k] = (bb.upper[k] - bb.lower[k]) / resolution;
        cell *= h[k];
    }
    std::vector<int> idx(d, 0);
    numerics::CompensatedSum total;
    while (true) {
        for (int k = 0; k < d; ++k) x[k] = bb.lower[k] + (idx[k] + 0.5) * h[k];
        if (domain.contains(x)) total.add(integrand(std::span<const double>(x)));
        int k = d - 1;
        while (k >= 0 && ++idx[k] >= resolution) idx[k--] = 0;
        if (k < 0) break;
    }
    return total.value() * cell;
}

double grad_norm_weighted(const SmoothFunction& u, const Density& rho, std::span<const double> x, std::vector<double>& g) {
    u.gradient(x, g);
    double s = 0.0;
    for (double c : g) s += c * c;
    const double r = rho(x);
    return std::sqrt(s) * r * r;
}

}  // namespace

Estimate weighted_tv_smooth(const SmoothFunction& u, const Density& rho, const Domain& domain, int resolution) {
    require(resolution >= 2, ErrorCode::Parameter, "weighted_tv_smooth: resolution must be >= 2");
    std::vector<double> g(domain.dim());
    auto f = [&](std::span<const double> x) { return grad_norm_weighted(u, rho, x, g); };
    const double fine = box_midpoint(domain, resolution, f);
    const double coarse = box_midpoint(domain, resolution / 2, f);
    return {fine, std::abs(fine - coarse), 0};
}

bool PolygonalSet::contains(const Point2& p) const {
    bool inside = false;
    const std::size_t m = vertices.size();
    for (std::size_t i = 0, j = m - 1; i < m; j = i++) {
        const auto& a = vertices[i];
        const auto& b = vertices[j];
        if ((a[1] > p[1]) != (b[1] > p[1])) {
            const double xc = a[0] + (p[1] - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
            if (p[0] < xc) inside = !inside;
        }
    }
    return inside;
}

PolygonalSet PolygonalSet::rectangle(Point2 lower, Point2 upper) {
    require(lower[0] < upper[0] && lower[1] < upper[1], ErrorCode::Parameter, "rectangle must have positive extent");
    return {{lower, {upper[0], lower[1]}, upper, {lower[0], upper[1]}}};
}

PolygonalSet PolygonalSet::disk(Point2 centre, double radius, int segments) {
    require(radius > 0.0 && segments >= 3, ErrorCode::Parameter, "disk needs radius > 0 and >= 3 segments");
    PolygonalSet s;
    for (int k = 0; k < segments; ++k) {
        const double t = 2.0 * M_PI * k / segments;
        s.vertices.push_back({centre[0] + radius * std::cos(t), centre[1] + radius * std::sin(t)});
    }
    return s;
}

double Segment::length() const { return std::hypot(b[0] - a[0], b[1] - a[1]); }

std::vector<Segment> boundary_in_domain(const PolygonalSet& set, const Domain& domain) {
    require(domain.dim() == 2, ErrorCode::Unsupported, "polygonal sets live in the plane");
    require(set.vertices.size() >= 3, ErrorCode::Parameter, "polygon needs at least 3 vertices");
    std::vector<Segment> out;
    const std::size_t m = set.vertices.size();
    for (std::size_t i = 0; i < m; ++i) {
        const Point2& a = set.vertices[i];
        const Point2& b = set.vertices[(i + 1) % m];
        for (const auto& [t0, t1] : domain.clip_segment(a, b)) {
            out.push_back({{a[0] + t0 * (b[0] - a[0]), a[1] + t0 * (b[1] - a[1])},
                           {a[0] + t1 * (b[0] - a[0]), a[1] + t1 * (b[1] - a[1])}});
        }
    }
    return out;
}

double weighted_perimeter(const PolygonalSet& set, const Density& rho, const Domain& domain, int order) {
    require(domain.dim() == 2, ErrorCode::Unsupported, "weighted_perimeter: planar domains only");
    const auto rule = numerics::gauss_legendre(order);
    numerics::CompensatedSum total;
    for (const auto& seg : boundary_in_domain(set, domain)) {
        const double half = 0.5 * seg.length();
        for (int q = 0; q < order; ++q) {
            const double t = 0.5 * (rule.nodes[q] + 1.0);
            const double x[2] = {seg.a[0] + t * (seg.b[0] - seg.a[0]), seg.a[1] + t * (seg.b[1] - seg.a[1])};
            const double r = rho(x);
            total.add(rule.weights[q] * half * r * r);
        }
    }
    return total.value();
}

double weighted_planar_cut(const Domain& domain, const Density& rho, int axis, double position, int resolution) {
    const int d = domain.dim();
    require(axis >= 0 && axis < d, ErrorCode::Parameter, "weighted_planar_cut: axis out of range");
    require(resolution >= 1, ErrorCode::Parameter, "weighted_planar_cut: resolution must be >= 1");
    const auto& bb = domain.bounding_box();
    std::vector<int> axes;
    for (int k = 0; k < d; ++k)
        if (k != axis) axes.push_back(k);
    std::vector<double> h(d, 0.0), x(d);
    double cell = 1.0;
    for (int k : axes) {
        h[k] = (bb.upper[k] - bb.lower[k]) / resolution;
        cell *= h[k];
    }
    x[axis] = position;
    std::vector<int> idx(axes.size(), 0);
    numerics::CompensatedSum total;
    while (true) {
        for (std::size_t a = 0; a < axes.size(); ++a) x[axes[a]] = bb.lower[axes[a]] + (idx[a] + 0.5) * h[axes[a]];
        if (domain.contains(x)) {
            const double r = rho(x);
            total.add(r * r);
        }
        int a = static_cast<int>(axes.size()) - 1;
        while (a >= 0 && ++idx[a] >= resolution) idx[a--] = 0;
        if (a < 0) break;
    }
    return total.value() * cell;
}

namespace {

Estimate nonlocal_quadrature_once(const ScalarField& u, const Density& rho, const Domain& domain,
                                  const kernels::KernelProfile& eff, double eps, int cells_per_eps, int subsamples) {
    const int d = domain.dim();
    const auto& bb = domain.bounding_box();
    std::vector<std::size_t> count(d), stride(d);
    std::vector<double> h(d);
    double cell = 1.0;
    std::size_t total = 1;
    for (int k = d - 1; k >= 0; --k) {
        const double extent = bb.upper[k] - bb.lower[k];
        count[k] = static_cast<std::size_t>(std::ceil(extent * cells_per_eps / eps));
        h[k] = extent / count[k];
        cell *= h[k];
        stride[k] = total;
        total *= count[k];
    }

    // Cell-centred samples.
    std::vector<double> uval(total), rval(total, 0.0);
    std::vector<double> x(d);
    for (std::size_t c = 0; c < total; ++c) {
        std::size_t rest = c;
        for (int k = 0; k < d; ++k) {
            const std::size_t i = rest / stride[k];
            rest %= stride[k];
            x[k] = bb.lower[k] + (i + 0.5) * h[k];
        }
        if (domain.contains(x)) {
            uval[c] = u(x);
            rval[c] = rho(x);
        }
    }

    // Stencil of cell-averaged weights (1/eps) int_cell eta_eps(z) dz.
    struct Tap {
        std::vector<std::ptrdiff_t> off;
        double weight;
    };
    std::vector<Tap> taps;
    const double reach = eps * eff.support_radius();
    std::vector<std::ptrdiff_t> span_k(d);
    for (int k = 0; k < d; ++k) span_k[k] = static_cast<std::ptrdiff_t>(std::ceil(reach / h[k])) + 1;
    std::vector<std::ptrdiff_t> off(d);
    for (int k = 0; k < d; ++k) off[k] = -span_k[k];
    const double kscale = std::pow(eps, -d) / eps;
    std::vector<int> sub(d);
    std::vector<double> z(d);
    const double sub_count = std::pow(static_cast<double>(subsamples), d);
    while (true) {
        // Skip cells that cannot touch the support.
        double near2 = 0.0;
        for (int k = 0; k < d; ++k) {
            const double gap = std::max(0.0, (std::abs(static_cast<double>(off[k])) - 0.5) * h[k]);
            near2 += gap * gap;
        }
        if (std::sqrt(near2) < reach) {
            double acc = 0.0;
            std::fill(sub.begin(), sub.end(), 0);
            while (true) {
                double r2 = 0.0;
                for (int k = 0; k < d; ++k) {
                    z[k] = (static_cast<double>(off[k]) - 0.5 + (sub[k] + 0.5) / subsamples) * h[k];
                    r2 += z[k] * z[k];
                }
                acc += eff(std::sqrt(r2) / eps);
                int k = d - 1;
                while (k >= 0 && ++sub[k] >= subsamples) sub[k--] = 0;
                if (k < 0) break;
            }
            const double w = kscale * acc / sub_count * cell;
            bool centre = std::all_of(off.begin(), off.end(), [](std::ptrdiff_t o) { return o == 0; });
            if (w > 0.0 && !centre) taps.push_back({off, w});
        }
        int k = d - 1;
        while (k >= 0 && ++off[k] > span_k[k]) {
            off[k] = -span_k[k];
            --k;
        }
        if (k < 0) break;
    }

    numerics::CompensatedSum sum;
    std::vector<std::size_t> idx(d);
    for (std::size_t c = 0; c < total; ++c) {
        if (rval[c] == 0.0) continue;
        std::size_t rest = c;
        for (int k = 0; k < d; ++k) {
            idx[k] = rest / stride[k];
            rest %= stride[k];
        }
        double local = 0.0;
        for (const auto& tap : taps) {
            std::ptrdiff_t lin = 0;
            bool ok = true;
            for (int k = 0; k < d; ++k) {
                const std::ptrdiff_t j = static_cast<std::ptrdiff_t>(idx[k]) + tap.off[k];
                if (j < 0 || j >= static_cast<std::ptrdiff_t>(count[k])) {
                    ok = false;
                    break;
                }
                lin += j * static_cast<std::ptrdiff_t>(stride[k]);
            }
            if (!ok || rval[lin] == 0.0) continue;
            local += tap.weight * std::abs(uval[c] - uval[lin]) * rval[lin];
        }
        sum.add(local * rval[c] * cell);
    }
    return {sum.value(), 0.0, 0};
}

}  // namespace

Estimate nonlocal_tv(const ScalarField& u, const Density& rho, const Domain& domain,
                     const kernels::KernelProfile& profile, double eps, const NonlocalOptions& options) {
    require(eps > 0.0, ErrorCode::Parameter, "nonlocal_tv: eps must be positive");
    const int d = domain.dim();
    const kernels::KernelProfile eff = profile.effective(d);
    if (options.method == NonlocalMethod::Quadrature) {
        require(options.cells_per_eps >= 2 && options.kernel_subsamples >= 1, ErrorCode::Parameter,
                "nonlocal_tv: cells_per_eps must be >= 2 and kernel_subsamples >= 1");
        auto fine = nonlocal_quadrature_once(u, rho, domain, eff, eps, options.cells_per_eps, options.kernel_subsamples);
        auto coarse = nonlocal_quadrature_once(u, rho, domain, eff, eps, std::max(2, options.cells_per_eps / 2),
                                               options.kernel_subsamples);
        fine.error_estimate = std::abs(fine.value - coarse.value);
        return fine;
    }
    require(options.samples >= 2, ErrorCode::Parameter, "nonlocal_tv: Monte Carlo needs at least 2 samples");
    const auto xs = geometry::sample_iid(domain, rho, options.samples, options.seed_x);
    const auto ys = geometry::sample_iid(domain, rho, options.samples, options.seed_y);
    numerics::CompensatedSum s, s2;
    const double kscale = std::pow(eps, -d) / eps;
    for (std::size_t i = 0; i < options.samples; ++i) {
        auto x = xs.point(i);
        auto y = ys.point(i);
        const double r = geometry::distance(x, y);
        const double f = kscale * eff(r / eps) * std::abs(u(x) - u(y));
        s.add(f);
        s2.add(f * f);
    }
    const double n = static_cast<double>(options.samples);
    const double mean = s.value() / n;
    const double var = std::max(0.0, (s2.value() / n - mean * mean) * n / (n - 1.0));
    return {mean, std::sqrt(var / n), options.samples};
}

}  // namespace pctv::continuum
