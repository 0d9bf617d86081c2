#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace pctv::geometry {

/// Open axis-aligned box.
struct Box {
    std::vector<double> lower;
    std::vector<double> upper;

    int dim() const { return static_cast<int>(lower.size()); }
    bool contains(std::span<const double> x) const;
    double volume() const;
};

using Point2 = std::array<double, 2>;

/// Open, bounded, connected domain with Lipschitz boundary: a box, a connected
/// union of boxes, or a convex polygon in the plane.
class Domain {
public:
    enum class Kind { Box, BoxUnion, ConvexPolygon };

    static Domain box(std::vector<double> lower, std::vector<double> upper);
    static Domain unit_cube(int d);
    /// Throws Parameter if the open boxes do not form a connected set.
    static Domain box_union(std::vector<Box> boxes, std::string name = "box-union");
    /// Two unit squares joined by a horizontal neck of the given width and length;
    /// left square (0,1)^2, right square (1+length, 2+length) x (0,1).
    static Domain dumbbell(double neck_width = 0.15, double neck_length = 0.5);
    /// Vertices in either orientation; throws Parameter if not strictly convex.
    static Domain convex_polygon(std::vector<Point2> vertices);

    Kind kind() const { return kind_; }
    const std::string& name() const { return name_; }
    int dim() const { return dim_; }
    double volume() const { return volume_; }
    const Box& bounding_box() const { return bbox_; }
    const std::vector<Box>& boxes() const { return boxes_; }
    const std::vector<Point2>& polygon() const { return polygon_; }
    /// Centre of mass of the uniform measure on the domain.
    const std::vector<double>& centroid() const { return centroid_; }

    bool contains(std::span<const double> x) const;

    /// Parameter intervals (t0, t1) within [0, 1] where a + t (b - a) lies in
    /// the domain. Planar domains only; intervals are disjoint and sorted.
    std::vector<std::pair<double, double>> clip_segment(const Point2& a, const Point2& b) const;

    /// Every vertex of the domain's boxes or polygon (extreme points for linear functions).
    std::vector<std::vector<double>> corners() const;

private:
    Domain() = default;
    void finish();

    Kind kind_ = Kind::Box;
    std::string name_;
    int dim_ = 0;
    double volume_ = 0.0;
    Box bbox_;
    std::vector<Box> boxes_;
    std::vector<Point2> polygon_;
    std::vector<double> centroid_;
};

/// Positive, bounded weight on a domain. Used both for probability densities
/// (normalised) and for plain continuum weights such as rho^2.
class Density {
public:
    using Fn = std::function<double(std::span<const double>)>;

    Density(std::string name, Fn fn, double lower_bound, double upper_bound);

    /// 1 / vol(D).
    static Density uniform(const Domain& domain);
    /// Normalised version of c + g.x on the domain; throws Parameter if it is
    /// not strictly positive there.
    static Density affine(const Domain& domain, double constant, std::vector<double> gradient);

    double operator()(std::span<const double> x) const { return (*fn_)(x); }
    const std::string& name() const { return name_; }
    double lower_bound() const { return lower_; }
    double upper_bound() const { return upper_; }

private:
    std::string name_;
    std::shared_ptr<const Fn> fn_;
    double lower_;
    double upper_;
};

/// |int_D rho - 1| by midpoint quadrature on a `resolution`^d grid over the bounding box.
double normalization_error(const Density& density, const Domain& domain, int resolution);

/// Points stored row-major, `dim` coordinates each.
struct PointCloud {
    int dim = 0;
    std::vector<double> coords;
    std::uint64_t seed = 0;

    std::size_t size() const { return dim ? coords.size() / static_cast<std::size_t>(dim) : 0; }
    std::span<const double> point(std::size_t i) const { return {coords.data() + i * dim, static_cast<std::size_t>(dim)}; }
};

/// n i.i.d. draws from density * dx by rejection against the bounding box with
/// envelope upper_bound(). Throws Envelope if the acceptance rate drops below
/// 1e-4 or the density exceeds its declared bound.
PointCloud sample_iid(const Domain& domain, const Density& density, std::size_t n, std::uint64_t seed);

/// The k^d centres ((2i_1+1)/2k, ..., (2i_d+1)/2k) of the grid cubes of (0,1)^d,
/// first axis varying slowest.
PointCloud grid_points(int k, int d);

enum class Approx { Below, Above };

/// Lipschitz envelope of rho with constant k: inf_y rho(y) + k|x-y| (Below) or
/// sup_y rho(y) - k|x-y| (Above), the inf/sup taken over y = x and the centres of
/// a `grid_per_axis`^d grid of the bounding box that fall inside the domain.
/// grid_per_axis <= 0 selects 256 (d=2), 64 (d=3) or 16 otherwise.
Density lipschitz_approx(const Density& density, const Domain& domain, double k, Approx direction,
                         int grid_per_axis = 0);

void write_csv(const PointCloud& cloud, std::ostream& os);
PointCloud read_csv(std::istream& is);

double distance(std::span<const double> a, std::span<const double> b);

}  // namespace pctv::geometry
