#include <doctest.h>

#include <cmath>
#include <sstream>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"

using namespace pctv;
using namespace pctv::geometry;

TEST_CASE("uniform samples stay in the square") {
    const auto D = Domain::unit_cube(2);
    const auto cloud = sample_iid(D, Density::uniform(D), 1000, 11);
    CHECK(cloud.size() == 1000);
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        auto p = cloud.point(i);
        CHECK((p[0] > 0.0 && p[0] < 1.0 && p[1] > 0.0 && p[1] < 1.0));
    }
}

TEST_CASE("sample means") {
    const auto D = Domain::unit_cube(2);
    const std::size_t n = 100000;
    auto mean = [&](const PointCloud& c, int axis) {
        double s = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) s += c.point(i)[axis];
        return s / static_cast<double>(c.size());
    };
    const auto u = sample_iid(D, Density::uniform(D), n, 5);
    CHECK(std::abs(mean(u, 0) - 0.5) < 0.005);
    CHECK(std::abs(mean(u, 1) - 0.5) < 0.005);

    // rho ~ 1 + x1: E x1 = 5/9, Var x1 = 13/162.
    const auto a = sample_iid(D, Density::affine(D, 1.0, {1.0, 0.0}), n, 5);
    const double sd = std::sqrt(13.0 / 162.0 / n);
    CHECK(std::abs(mean(a, 0) - 5.0 / 9.0) < 5 * sd);
    CHECK(std::abs(mean(a, 1) - 0.5) < 5 * std::sqrt(1.0 / 12.0 / n));
}

TEST_CASE("sampling is deterministic in the seed") {
    const auto D = Domain::dumbbell();
    const auto a = sample_iid(D, Density::uniform(D), 300, 9);
    const auto b = sample_iid(D, Density::uniform(D), 300, 9);
    const auto c = sample_iid(D, Density::uniform(D), 300, 10);
    CHECK(a.coords == b.coords);
    CHECK(a.coords != c.coords);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(D.contains(a.point(i)));
}

TEST_CASE("affine density is normalised") {
    const auto D = Domain::unit_cube(2);
    const auto rho = Density::affine(D, 1.0, {1.0, 0.0});
    const double x[2] = {0.25, 0.9};
    CHECK(rho(x) == doctest::Approx(1.25 / 1.5));
    CHECK(normalization_error(rho, D, 64) < 1e-10);
    CHECK(rho.lower_bound() == doctest::Approx(1.0 / 1.5));
    CHECK(rho.upper_bound() == doctest::Approx(2.0 / 1.5));
}

TEST_CASE("grid_points") {
    auto g = grid_points(1, 2);
    REQUIRE(g.size() == 1);
    CHECK(g.point(0)[0] == 0.5);
    CHECK(g.point(0)[1] == 0.5);

    g = grid_points(2, 2);
    REQUIRE(g.size() == 4);
    for (std::size_t i = 0; i < 4; ++i)
        for (int a = 0; a < 2; ++a) CHECK((g.point(i)[a] == 0.25 || g.point(i)[a] == 0.75));

    g = grid_points(3, 3);
    CHECK(g.size() == 27);
    double lo = 1.0;
    for (double c : g.coords) lo = std::min(lo, c);
    CHECK(lo == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK_THROWS_AS(grid_points(0, 2), Error);
}

TEST_CASE("lipschitz approximants") {
    const auto D = Domain::unit_cube(1);
    const auto flat = Density::uniform(D);
    const auto below_flat = lipschitz_approx(flat, D, 0.5, Approx::Below);
    const auto above_flat = lipschitz_approx(flat, D, 0.5, Approx::Above);
    for (double t : {0.1, 0.5, 0.9}) {
        const double x[1] = {t};
        CHECK(below_flat(x) == flat(x));
        CHECK(above_flat(x) == flat(x));
    }

    Density lin("1+x", [](std::span<const double> x) { return 1.0 + x[0]; }, 1.0, 2.0);
    // Lipschitz constant 1 <= k = 2: unchanged below.
    const auto same = lipschitz_approx(lin, D, 2.0, Approx::Below);
    const auto below = lipschitz_approx(lin, D, 0.5, Approx::Below, 1000);
    for (double t : {0.05, 0.3, 0.77, 0.99}) {
        const double x[1] = {t};
        CHECK(same(x) == doctest::Approx(1.0 + t).epsilon(1e-14));
        // Brute-force inf over a 10^4 grid of y in (0,1).
        double inf = 1e300;
        for (int i = 0; i < 10000; ++i) {
            const double y = (i + 0.5) / 10000.0;
            inf = std::min(inf, 1.0 + y + 0.5 * std::abs(t - y));
        }
        CHECK(below(x) == doctest::Approx(inf).epsilon(1e-3));
        CHECK(below(x) == doctest::Approx(1.0 + 0.5 * t).epsilon(1e-3));
    }
}

TEST_CASE("domains") {
    const auto db = Domain::dumbbell(0.25, 0.5);
    CHECK(db.volume() == doctest::Approx(2.0 + 0.25 * 0.5));
    const double neck[2] = {1.25, 0.5};
    const double gap[2] = {1.25, 0.9};
    CHECK(db.contains(neck));
    CHECK_FALSE(db.contains(gap));
    const auto tri = Domain::convex_polygon({{0, 0}, {1, 0}, {0, 1}});
    CHECK(tri.volume() == doctest::Approx(0.5));
    const auto box = Domain::box({0, 0, 0}, {1, 2, 3});
    CHECK(box.volume() == doctest::Approx(6.0));
    CHECK_THROWS_AS(Domain::box({0, 0}, {1, 0}), Error);
}

TEST_CASE("point cloud CSV round trip") {
    const auto D = Domain::unit_cube(3);
    const auto c = sample_iid(D, Density::uniform(D), 50, 2);
    std::stringstream ss;
    write_csv(c, ss);
    const auto back = read_csv(ss);
    CHECK(back.dim == 3);
    CHECK(back.coords == c.coords);
}
