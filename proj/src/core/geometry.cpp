#include "geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "error.hpp"
#include "rng.hpp"

namespace pctv::geometry {

bool Box::contains(std::span<const double> x) const {
    for (int k = 0; k < dim(); ++k)
        if (!(x[k] > lower[k] && x[k] < upper[k])) return false;
    return true;
}

double Box::volume() const {
    double v = 1.0;
    for (int k = 0; k < dim(); ++k) v *= upper[k] - lower[k];
    return v;
}

double distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double t = a[k] - b[k];
        s += t * t;
    }
    return std::sqrt(s);
}

namespace {

void check_box(const Box& b) {
    require(b.dim() >= 1 && b.upper.size() == b.lower.size(), ErrorCode::Parameter, "box bounds have mismatched sizes");
    for (int k = 0; k < b.dim(); ++k)
        require(b.lower[k] < b.upper[k], ErrorCode::Parameter, "box must have positive extent on every axis");
}

bool boxes_overlap(const Box& a, const Box& b) {
    for (int k = 0; k < a.dim(); ++k)
        if (!(a.lower[k] < b.upper[k] && b.lower[k] < a.upper[k])) return false;
    return true;
}

double cross(const Point2& o, const Point2& a, const Point2& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Open-slab clip of a + t(b-a), t in [0,1], against one box.
bool clip_box(const Box& box, const Point2& a, const Point2& b, double& t0, double& t1) {
    t0 = 0.0;
    t1 = 1.0;
    for (int k = 0; k < 2; ++k) {
        const double dir = b[k] - a[k];
        if (dir == 0.0) {
            if (!(a[k] > box.lower[k] && a[k] < box.upper[k])) return false;
            continue;
        }
        double ta = (box.lower[k] - a[k]) / dir;
        double tb = (box.upper[k] - a[k]) / dir;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    return t1 > t0;
}

}  // namespace

Domain Domain::box(std::vector<double> lower, std::vector<double> upper) {
    Domain d;
    d.kind_ = Kind::Box;
    d.name_ = "box";
    d.boxes_.push_back(Box{std::move(lower), std::move(upper)});
    check_box(d.boxes_.front());
    d.finish();
    return d;
}

Domain Domain::unit_cube(int d) {
    require(d >= 1, ErrorCode::Parameter, "dimension must be >= 1");
    Domain out = box(std::vector<double>(d, 0.0), std::vector<double>(d, 1.0));
    out.name_ = "unit-cube";
    return out;
}

Domain Domain::box_union(std::vector<Box> boxes, std::string name) {
    require(!boxes.empty(), ErrorCode::Parameter, "box union needs at least one box");
    for (const auto& b : boxes) {
        check_box(b);
        require(b.dim() == boxes.front().dim(), ErrorCode::Parameter, "box union mixes dimensions");
    }
    // Connectivity of the open union <=> connectivity of the overlap graph.
    std::vector<int> seen(boxes.size(), 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    while (!stack.empty()) {
        const std::size_t i = stack.back();
        stack.pop_back();
        for (std::size_t j = 0; j < boxes.size(); ++j)
            if (!seen[j] && boxes_overlap(boxes[i], boxes[j])) {
                seen[j] = 1;
                stack.push_back(j);
            }
    }
    require(std::all_of(seen.begin(), seen.end(), [](int s) { return s != 0; }), ErrorCode::Parameter,
            "box union '" + name + "' is not connected");
    Domain d;
    d.kind_ = boxes.size() == 1 ? Kind::Box : Kind::BoxUnion;
    d.name_ = std::move(name);
    d.boxes_ = std::move(boxes);
    d.finish();
    return d;
}

Domain Domain::dumbbell(double neck_width, double neck_length) {
    require(neck_width > 0.0 && neck_width < 1.0, ErrorCode::Parameter, "dumbbell neck width must be in (0, 1)");
    require(neck_length > 0.0, ErrorCode::Parameter, "dumbbell neck length must be positive");
    const double y0 = 0.5 - 0.5 * neck_width;
    const double y1 = 0.5 + 0.5 * neck_width;
    // The neck reaches into both squares so the open boxes overlap.
    std::vector<Box> boxes{
        Box{{0.0, 0.0}, {1.0, 1.0}},
        Box{{0.5, y0}, {1.5 + neck_length, y1}},
        Box{{1.0 + neck_length, 0.0}, {2.0 + neck_length, 1.0}},
    };
    return box_union(std::move(boxes), "dumbbell");
}

Domain Domain::convex_polygon(std::vector<Point2> vertices) {
    require(vertices.size() >= 3, ErrorCode::Parameter, "polygon needs at least 3 vertices");
    double area2 = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const auto& p = vertices[i];
        const auto& q = vertices[(i + 1) % vertices.size()];
        area2 += p[0] * q[1] - q[0] * p[1];
    }
    if (area2 < 0.0) std::reverse(vertices.begin(), vertices.end());
    const std::size_t m = vertices.size();
    for (std::size_t i = 0; i < m; ++i)
        require(cross(vertices[i], vertices[(i + 1) % m], vertices[(i + 2) % m]) > 0.0, ErrorCode::Parameter,
                "polygon is not strictly convex");
    Domain d;
    d.kind_ = Kind::ConvexPolygon;
    d.name_ = "convex-polygon";
    d.polygon_ = std::move(vertices);
    d.finish();
    return d;
}

void Domain::finish() {
    if (kind_ == Kind::ConvexPolygon) {
        dim_ = 2;
        bbox_.lower = {polygon_[0][0], polygon_[0][1]};
        bbox_.upper = bbox_.lower;
        double a2 = 0.0, cx = 0.0, cy = 0.0;
        for (std::size_t i = 0; i < polygon_.size(); ++i) {
            const auto& p = polygon_[i];
            const auto& q = polygon_[(i + 1) % polygon_.size()];
            for (int k = 0; k < 2; ++k) {
                bbox_.lower[k] = std::min(bbox_.lower[k], p[k]);
                bbox_.upper[k] = std::max(bbox_.upper[k], p[k]);
            }
            const double c = p[0] * q[1] - q[0] * p[1];
            a2 += c;
            cx += (p[0] + q[0]) * c;
            cy += (p[1] + q[1]) * c;
        }
        volume_ = 0.5 * a2;
        centroid_ = {cx / (3.0 * a2), cy / (3.0 * a2)};
        return;
    }
    dim_ = boxes_.front().dim();
    bbox_ = boxes_.front();
    for (const auto& b : boxes_)
        for (int k = 0; k < dim_; ++k) {
            bbox_.lower[k] = std::min(bbox_.lower[k], b.lower[k]);
            bbox_.upper[k] = std::max(bbox_.upper[k], b.upper[k]);
        }
    // Exact volume and centroid by coordinate compression: every cell of the
    // compressed grid lies entirely inside or outside the union.
    std::vector<std::vector<double>> cuts(dim_);
    for (int k = 0; k < dim_; ++k) {
        for (const auto& b : boxes_) {
            cuts[k].push_back(b.lower[k]);
            cuts[k].push_back(b.upper[k]);
        }
        std::sort(cuts[k].begin(), cuts[k].end());
        cuts[k].erase(std::unique(cuts[k].begin(), cuts[k].end()), cuts[k].end());
    }
    std::vector<std::size_t> idx(dim_, 0);
    std::vector<double> mid(dim_);
    volume_ = 0.0;
    centroid_.assign(dim_, 0.0);
    while (true) {
        double cell = 1.0;
        for (int k = 0; k < dim_; ++k) {
            mid[k] = 0.5 * (cuts[k][idx[k]] + cuts[k][idx[k] + 1]);
            cell *= cuts[k][idx[k] + 1] - cuts[k][idx[k]];
        }
        if (contains(mid)) {
            volume_ += cell;
            for (int k = 0; k < dim_; ++k) centroid_[k] += cell * mid[k];
        }
        int k = dim_ - 1;
        while (k >= 0 && ++idx[k] + 1 >= cuts[k].size()) idx[k--] = 0;
        if (k < 0) break;
    }
    for (auto& c : centroid_) c /= volume_;
}

bool Domain::contains(std::span<const double> x) const {
    if (kind_ == Kind::ConvexPolygon) {
        const Point2 p{x[0], x[1]};
        for (std::size_t i = 0; i < polygon_.size(); ++i)
            if (!(cross(polygon_[i], polygon_[(i + 1) % polygon_.size()], p) > 0.0)) return false;
        return true;
    }
    for (const auto& b : boxes_)
        if (b.contains(x)) return true;
    return false;
}

std::vector<std::pair<double, double>> Domain::clip_segment(const Point2& a, const Point2& b) const {
    require(dim_ == 2, ErrorCode::Unsupported, "clip_segment: planar domains only");
    std::vector<std::pair<double, double>> out;
    if (kind_ == Kind::ConvexPolygon) {
        double t0 = 0.0, t1 = 1.0;
        const Point2 dir{b[0] - a[0], b[1] - a[1]};
        for (std::size_t i = 0; i < polygon_.size(); ++i) {
            const auto& p = polygon_[i];
            const auto& q = polygon_[(i + 1) % polygon_.size()];
            // Inside: cross(p, q, x) > 0, affine in t.
            const double c0 = cross(p, q, a);
            const double c1 = (q[0] - p[0]) * dir[1] - (q[1] - p[1]) * dir[0];
            if (c1 == 0.0) {
                if (!(c0 > 0.0)) return out;
                continue;
            }
            const double t = -c0 / c1;
            if (c1 > 0.0)
                t0 = std::max(t0, t);
            else
                t1 = std::min(t1, t);
        }
        if (t1 > t0) out.emplace_back(t0, t1);
        return out;
    }
    for (const auto& box : boxes_) {
        double t0, t1;
        if (clip_box(box, a, b, t0, t1)) out.emplace_back(t0, t1);
    }
    std::sort(out.begin(), out.end());
    std::vector<std::pair<double, double>> merged;
    for (const auto& iv : out) {
        if (!merged.empty() && iv.first <= merged.back().second)
            merged.back().second = std::max(merged.back().second, iv.second);
        else
            merged.push_back(iv);
    }
    return merged;
}

std::vector<std::vector<double>> Domain::corners() const {
    std::vector<std::vector<double>> out;
    if (kind_ == Kind::ConvexPolygon) {
        for (const auto& p : polygon_) out.push_back({p[0], p[1]});
        return out;
    }
    for (const auto& b : boxes_) {
        for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << dim_); ++mask) {
            std::vector<double> c(dim_);
            for (int k = 0; k < dim_; ++k) c[k] = (mask >> k & 1) ? b.upper[k] : b.lower[k];
            out.push_back(std::move(c));
        }
    }
    return out;
}

Density::Density(std::string name, Fn fn, double lower_bound, double upper_bound)
    : name_(std::move(name)), fn_(std::make_shared<const Fn>(std::move(fn))), lower_(lower_bound), upper_(upper_bound) {
    require(lower_bound > 0.0 && upper_bound >= lower_bound && std::isfinite(upper_bound), ErrorCode::Parameter,
            "density bounds must satisfy 0 < m <= M < inf");
}

Density Density::uniform(const Domain& domain) {
    const double v = 1.0 / domain.volume();
    return Density("uniform", [v](std::span<const double>) { return v; }, v, v);
}

Density Density::affine(const Domain& domain, double constant, std::vector<double> gradient) {
    require(static_cast<int>(gradient.size()) == domain.dim(), ErrorCode::Parameter,
            "affine density gradient has wrong dimension");
    auto raw = [&](std::span<const double> x) {
        double v = constant;
        for (std::size_t k = 0; k < gradient.size(); ++k) v += gradient[k] * x[k];
        return v;
    };
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& c : domain.corners()) {
        lo = std::min(lo, raw(c));
        hi = std::max(hi, raw(c));
    }
    require(lo > 0.0, ErrorCode::Parameter, "affine density must be positive on the domain");
    const double mass = raw(domain.centroid()) * domain.volume();
    const double scale = 1.0 / mass;
    auto fn = [constant, gradient, scale](std::span<const double> x) {
        double v = constant;
        for (std::size_t k = 0; k < gradient.size(); ++k) v += gradient[k] * x[k];
        return v * scale;
    };
    return Density("affine", std::move(fn), lo * scale, hi * scale);
}

double normalization_error(const Density& density, const Domain& domain, int resolution) {
    require(resolution >= 1, ErrorCode::Parameter, "resolution must be >= 1");
    const int d = domain.dim();
    const auto& bb = domain.bounding_box();
    std::vector<double> h(d), x(d);
    double cell = 1.0;
    for (int k = 0; k < d; ++k) {
        h[k] = (bb.upper[k] - bb.lower[k]) / resolution;
        cell *= h[k];
    }
    std::vector<int> idx(d, 0);
    double total = 0.0;
    while (true) {
        for (int k = 0; k < d; ++k) x[k] = bb.lower[k] + (idx[k] + 0.5) * h[k];
        if (domain.contains(x)) total += density(x) * cell;
        int k = d - 1;
        while (k >= 0 && ++idx[k] >= resolution) idx[k--] = 0;
        if (k < 0) break;
    }
    return std::abs(total - 1.0);
}

PointCloud sample_iid(const Domain& domain, const Density& density, std::size_t n, std::uint64_t seed) {
    require(n >= 1, ErrorCode::Parameter, "sample_iid: n must be >= 1");
    const int d = domain.dim();
    const auto& bb = domain.bounding_box();
    const double envelope = density.upper_bound();
    Rng rng(seed);
    PointCloud cloud;
    cloud.dim = d;
    cloud.seed = seed;
    cloud.coords.reserve(n * d);
    std::vector<double> x(d);
    std::uint64_t attempts = 0;
    std::size_t accepted = 0;
    while (accepted < n) {
        ++attempts;
        for (int k = 0; k < d; ++k) x[k] = rng.uniform(bb.lower[k], bb.upper[k]);
        const double u = rng.uniform() * envelope;
        if (domain.contains(x)) {
            const double rho = density(x);
            if (rho > envelope * (1.0 + 1e-12))
                fail(ErrorCode::Envelope, "sample_iid: density exceeds its declared upper bound");
            if (u < rho) {
                cloud.coords.insert(cloud.coords.end(), x.begin(), x.end());
                ++accepted;
            }
        }
        if (attempts >= 100000 && attempts % 100000 == 0 &&
            static_cast<double>(accepted) < 1e-4 * static_cast<double>(attempts))
            fail(ErrorCode::Envelope, "sample_iid: acceptance rate below 1e-4; density envelope misconfigured");
    }
    return cloud;
}

PointCloud grid_points(int k, int d) {
    require(k >= 1 && d >= 1, ErrorCode::Parameter, "grid_points: k and d must be >= 1");
    PointCloud cloud;
    cloud.dim = d;
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= static_cast<std::size_t>(k);
    cloud.coords.reserve(total * d);
    std::vector<int> idx(d, 0);
    for (std::size_t p = 0; p < total; ++p) {
        for (int a = 0; a < d; ++a) cloud.coords.push_back((2.0 * idx[a] + 1.0) / (2.0 * k));
        int a = d - 1;
        while (a >= 0 && ++idx[a] >= k) idx[a--] = 0;
    }
    return cloud;
}

Density lipschitz_approx(const Density& density, const Domain& domain, double k, Approx direction, int grid_per_axis) {
    require(k > 0.0, ErrorCode::Parameter, "lipschitz_approx: k must be positive");
    const int d = domain.dim();
    if (grid_per_axis <= 0) grid_per_axis = d == 2 ? 256 : d == 3 ? 64 : 16;
    const auto& bb = domain.bounding_box();
    auto samples = std::make_shared<std::vector<double>>();
    auto values = std::make_shared<std::vector<double>>();
    const PointCloud unit = grid_points(grid_per_axis, d);
    std::vector<double> y(d);
    for (std::size_t i = 0; i < unit.size(); ++i) {
        auto u = unit.point(i);
        for (int a = 0; a < d; ++a) y[a] = bb.lower[a] + u[a] * (bb.upper[a] - bb.lower[a]);
        if (!domain.contains(y)) continue;
        samples->insert(samples->end(), y.begin(), y.end());
        values->push_back(density(y));
    }
    const bool below = direction == Approx::Below;
    auto fn = [density, samples, values, k, d, below](std::span<const double> x) {
        double best = density(x);
        for (std::size_t i = 0; i < values->size(); ++i) {
            const double r = distance(x, std::span<const double>(samples->data() + i * d, d));
            if (below)
                best = std::min(best, (*values)[i] + k * r);
            else
                best = std::max(best, (*values)[i] - k * r);
        }
        return best;
    };
    return Density(density.name() + (below ? "-lip-below" : "-lip-above"), std::move(fn), density.lower_bound(),
                   density.upper_bound());
}

void write_csv(const PointCloud& cloud, std::ostream& os) {
    for (int k = 0; k < cloud.dim; ++k) os << (k ? "," : "") << 'x' << k;
    os << "\r\n";
    char buf[32];
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        auto p = cloud.point(i);
        for (int k = 0; k < cloud.dim; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", p[k]);
            os << (k ? "," : "") << buf;
        }
        os << "\r\n";
    }
}

PointCloud read_csv(std::istream& is) {
    std::string line;
    require(static_cast<bool>(std::getline(is, line)), ErrorCode::Io, "point cloud CSV is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    PointCloud cloud;
    cloud.dim = static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
    for (int k = 0; k < cloud.dim; ++k) {
        const std::string want = "x" + std::to_string(k);
        const auto pos = line.find(want);
        require(pos != std::string::npos, ErrorCode::Io, "point cloud CSV header must be x0,...,x{d-1}");
    }
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string cell;
        int count = 0;
        while (std::getline(ss, cell, ',')) {
            cloud.coords.push_back(std::stod(cell));
            ++count;
        }
        require(count == cloud.dim, ErrorCode::Io, "point cloud CSV row has wrong column count");
    }
    return cloud;
}

}  // namespace pctv::geometry
