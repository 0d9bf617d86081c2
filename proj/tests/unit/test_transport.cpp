#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <vector>

#include "error.hpp"
#include "geometry.hpp"
#include "transport.hpp"

using namespace pctv;
using namespace pctv::transport;

namespace {

DiscreteMeasure uniform_measure(int d, std::vector<double> pts) {
    const std::size_t n = pts.size() / d;
    return DiscreteMeasure::weighted(d, std::move(pts), std::vector<double>(n, 1.0 / n));
}

std::vector<double> random_points(std::mt19937_64& gen, std::size_t n, int d) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> p(n * d);
    for (auto& x : p) x = U(gen);
    return p;
}

std::vector<double> random_masses(std::mt19937_64& gen, std::size_t n) {
    std::uniform_real_distribution<double> U(0.1, 1.0);
    std::vector<double> m(n);
    for (auto& x : m) x = U(gen);
    const double s = std::accumulate(m.begin(), m.end(), 0.0);
    for (auto& x : m) x /= s;
    // Absorb rounding so the total is 1 to within an ulp or two.
    m.back() = 1.0 - std::accumulate(m.begin(), m.end() - 1, 0.0);
    return m;
}

double dist(const DiscreteMeasure& a, std::size_t i, const DiscreteMeasure& b, std::size_t j) {
    return geometry::distance(a.point(i), b.point(j));
}

// 1-D quantile coupling: W_p^p = int_0^1 |F^-1(t) - G^-1(t)|^p dt.
double quantile_cost(const DiscreteMeasure& a, const DiscreteMeasure& b, double p) {
    auto sorted = [](const DiscreteMeasure& m) {
        std::vector<std::pair<double, double>> v;
        for (std::size_t i = 0; i < m.size(); ++i) v.emplace_back(m.points[i], m.masses[i]);
        std::sort(v.begin(), v.end());
        return v;
    };
    const auto A = sorted(a), B = sorted(b);
    std::size_t i = 0, j = 0;
    double ra = A[0].second, rb = B[0].second, cost = 0.0;
    while (i < A.size() && j < B.size()) {
        const double m = std::min(ra, rb);
        cost += m * std::pow(std::abs(A[i].first - B[j].first), p);
        ra -= m;
        rb -= m;
        if (ra <= 1e-15 && ++i < A.size()) ra = A[i].second;
        if (rb <= 1e-15 && ++j < B.size()) rb = B[j].second;
    }
    return cost;
}

double brute_tlp(const LiftedFunction& a, const LiftedFunction& b, double p) {
    const std::size_t n = a.values.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e300;
    do {
        double c = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            c += std::pow(dist(a.measure, i, b.measure, perm[i]), p) +
                 std::pow(std::abs(a.values[i] - b.values[perm[i]]), p);
        best = std::min(best, c / n);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::pow(best, 1.0 / p);
}

void check_marginals(const TransportPlan& plan) {
    CHECK(marginal_violation(plan) < 1e-10);
    for (const auto& e : plan.entries) CHECK(e.mass >= 0.0);
}

}  // namespace

TEST_CASE("ot_distance examples") {
    const auto mu = uniform_measure(1, {0.0, 1.0});
    const auto nu = uniform_measure(1, {0.5, 1.5});
    const auto r = ot_distance(mu, nu, 1.0);
    CHECK(r.distance == doctest::Approx(0.5).epsilon(1e-14));
    check_marginals(r.plan);

    const auto self = ot_distance(mu, mu, 2.0);
    CHECK(self.distance == 0.0);
    REQUIRE(self.plan.entries.size() == 2);
    for (const auto& e : self.plan.entries) CHECK(e.i == e.j);

    const auto x = uniform_measure(2, {0.1, 0.2});
    const auto y = uniform_measure(2, {0.4, 0.6});
    for (double p : {1.0, 2.0, 3.5}) CHECK(ot_distance(x, y, p).distance == doctest::Approx(0.5).epsilon(1e-14));

    DiscreteMeasure bad{1, {0.0, 1.0}, {0.5, 0.4}};
    CHECK_THROWS_AS(ot_distance(bad, mu, 1.0), Error);
    CHECK_THROWS_AS(ot_distance(mu, mu, 0.5), Error);
}

TEST_CASE("transportation simplex matches the 1-D quantile oracle") {
    std::mt19937_64 gen(2);
    for (int t = 0; t < 200; ++t) {
        const std::size_t m = 1 + gen() % 12, k = 1 + gen() % 12;
        const auto a = DiscreteMeasure::weighted(1, random_points(gen, m, 1), random_masses(gen, m));
        const auto b = DiscreteMeasure::weighted(1, random_points(gen, k, 1), random_masses(gen, k));
        for (double p : {1.0, 2.0}) {
            const auto r = ot_distance(a, b, p);
            CHECK(r.cost == doctest::Approx(quantile_cost(a, b, p)).epsilon(1e-9));
            check_marginals(r.plan);
            CHECK(plan_cost(r.plan, a, b, p) == doctest::Approx(r.cost).epsilon(1e-12));
        }
    }
}

TEST_CASE("assignment solver matches 1-D sorted matching") {
    std::mt19937_64 gen(3);
    for (int t = 0; t < 50; ++t) {
        const std::size_t n = 1 + gen() % 40;
        const auto a = uniform_measure(1, random_points(gen, n, 1));
        const auto b = uniform_measure(1, random_points(gen, n, 1));
        CHECK(ot_distance(a, b, 2.0).cost == doctest::Approx(quantile_cost(a, b, 2.0)).epsilon(1e-10));
    }
}

TEST_CASE("bottleneck distance") {
    const auto grid = DiscreteMeasure::empirical(geometry::grid_points(4, 2));
    const auto r0 = bottleneck_distance(grid, grid);
    CHECK(r0.distance == 0.0);
    for (std::size_t i = 0; i < 16; ++i) CHECK(r0.map.assignment[i] == i);

    const auto x = uniform_measure(2, {0.1, 0.2});
    const auto y = uniform_measure(2, {0.4, 0.6});
    CHECK(bottleneck_distance(x, y).distance == doctest::Approx(0.5));

    // 6 random points vs a 3 x 2 lattice; brute force over 720 permutations.
    std::mt19937_64 gen(4);
    const auto lattice = uniform_measure(2, {1 / 6., 0.25, 1 / 6., 0.75, 0.5, 0.25, 0.5, 0.75, 5 / 6., 0.25, 5 / 6., 0.75});
    for (int t = 0; t < 30; ++t) {
        const auto pts = uniform_measure(2, random_points(gen, 6, 2));
        std::vector<std::size_t> perm(6);
        std::iota(perm.begin(), perm.end(), 0);
        double best = 1e300;
        do {
            double worst = 0.0;
            for (std::size_t i = 0; i < 6; ++i) worst = std::max(worst, dist(pts, i, lattice, perm[i]));
            best = std::min(best, worst);
        } while (std::next_permutation(perm.begin(), perm.end()));
        const auto r = bottleneck_distance(pts, lattice);
        CHECK(r.distance == best);
        double worst = 0.0;
        for (std::size_t i = 0; i < 6; ++i) worst = std::max(worst, dist(pts, i, lattice, r.map.assignment[i]));
        CHECK(worst == r.distance);
        // Mean displacement never exceeds the maximum one.
        CHECK(ot_distance(pts, lattice, 2.0).distance <= r.distance + 1e-12);
    }
    CHECK_THROWS_AS(bottleneck_distance(x, grid), Error);
}

TEST_CASE("bottleneck on larger random instances is a valid optimum") {
    std::mt19937_64 gen(5);
    for (int t = 0; t < 5; ++t) {
        const std::size_t n = 300;
        const auto a = uniform_measure(2, random_points(gen, n, 2));
        const auto b = uniform_measure(2, random_points(gen, n, 2));
        const auto r = bottleneck_distance(a, b);
        std::vector<std::size_t> sorted = r.map.assignment;
        std::sort(sorted.begin(), sorted.end());
        for (std::size_t i = 0; i < n; ++i) REQUIRE(sorted[i] == i);
        // No perfect matching exists strictly below the reported value.
        std::vector<std::vector<std::uint32_t>> adj(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (dist(a, i, b, j) < r.distance) adj[i].push_back(static_cast<std::uint32_t>(j));
        std::vector<std::size_t> match;
        CHECK(hopcroft_karp(adj, n, match) < n);
    }
}

TEST_CASE("TL^p distance") {
    std::mt19937_64 gen(6);
    std::normal_distribution<double> N;
    for (int t = 0; t < 40; ++t) {
        const std::size_t n = 5;
        LiftedFunction a{uniform_measure(2, random_points(gen, n, 2)), {}};
        LiftedFunction b{uniform_measure(2, random_points(gen, n, 2)), {}};
        for (std::size_t i = 0; i < n; ++i) {
            a.values.push_back(N(gen));
            b.values.push_back(N(gen));
        }
        const auto r = tlp_distance(a, b, 1.0);
        CHECK(std::abs(r.distance - brute_tlp(a, b, 1.0)) < 1e-10);
        check_marginals(r.plan);
        CHECK(tlp_distance(a, a, 1.0).distance == 0.0);
        CHECK(tlp_distance(b, a, 1.0).distance == r.distance);
    }
    LiftedFunction x{uniform_measure(2, {0.0, 0.0}), {1.0}};
    LiftedFunction y{uniform_measure(2, {0.3, 0.4}), {3.0}};
    CHECK(tlp_distance(x, y, 2.0).distance == doctest::Approx(std::sqrt(0.25 + 4.0)));
    CHECK(tlp_distance(x, y, 1.0).distance == doctest::Approx(2.5));
}

TEST_CASE("TL^p convergence on shared atoms") {
    std::mt19937_64 gen(7);
    const auto mu = uniform_measure(2, random_points(gen, 30, 2));
    LiftedFunction f{mu, {}};
    for (std::size_t i = 0; i < 30; ++i) f.values.push_back(mu.point(i)[0]);
    double prev = 1e300;
    for (int k = 1; k <= 6; ++k) {
        LiftedFunction fk = f;
        double lp = 0.0;
        for (std::size_t i = 0; i < 30; ++i) {
            fk.values[i] += std::sin(3.0 * i) / (1 << k);
            lp += std::abs(fk.values[i] - f.values[i]) / 30.0;
        }
        const double d = tlp_distance(fk, f, 1.0).distance;
        CHECK(d <= lp + 1e-12);
        CHECK(d < prev);
        prev = d;
    }
    CHECK(prev < 0.02);
}

TEST_CASE("plan inverse and composition") {
    std::mt19937_64 gen(8);
    for (int t = 0; t < 20; ++t) {
        const auto a = DiscreteMeasure::weighted(2, random_points(gen, 5, 2), random_masses(gen, 5));
        const auto b = DiscreteMeasure::weighted(2, random_points(gen, 4, 2), random_masses(gen, 4));
        const auto c = DiscreteMeasure::weighted(2, random_points(gen, 6, 2), random_masses(gen, 6));
        const auto p12 = ot_distance(a, b, 1.0).plan;
        const auto p23 = ot_distance(b, c, 1.0).plan;

        const auto inv = plan_inverse(p12);
        check_marginals(inv);
        CHECK(plan_cost(inv, b, a, 1.0) == doctest::Approx(plan_cost(p12, a, b, 1.0)).epsilon(1e-14));
        const auto back = plan_inverse(inv);
        REQUIRE(back.entries.size() == p12.entries.size());
        for (std::size_t k = 0; k < back.entries.size(); ++k) {
            CHECK(back.entries[k].i == p12.entries[k].i);
            CHECK(back.entries[k].j == p12.entries[k].j);
            CHECK(back.entries[k].mass == p12.entries[k].mass);
        }

        const auto p13 = plan_compose(p12, p23);
        check_marginals(p13);
        CHECK(plan_cost(p13, a, c, 1.0) <= plan_cost(p12, a, b, 1.0) + plan_cost(p23, b, c, 1.0) + 1e-12);

        const auto diag = ot_distance(b, b, 1.0).plan;
        const auto same = plan_compose(p12, diag);
        REQUIRE(same.entries.size() == p12.entries.size());
        for (std::size_t k = 0; k < same.entries.size(); ++k) {
            CHECK(same.entries[k].i == p12.entries[k].i);
            CHECK(same.entries[k].j == p12.entries[k].j);
            CHECK(same.entries[k].mass == doctest::Approx(p12.entries[k].mass).epsilon(1e-14));
        }

        const auto loop = plan_compose(p12, inv);
        check_marginals(loop);
        CHECK(plan_cost(loop, a, a, 1.0) <= 2.0 * plan_cost(p12, a, b, 1.0) + 1e-12);
        CHECK_THROWS_AS(plan_compose(p12, p12), Error);
    }

    // Permutation plans on uniform 2-atom measures.
    const auto m2 = uniform_measure(1, {0.0, 1.0});
    const auto swap = induced_plan({{1, 0}}, m2, m2);
    const auto id = plan_compose(swap, swap);
    REQUIRE(id.entries.size() == 2);
    CHECK(id.entries[0].i == 0);
    CHECK(id.entries[0].j == 0);
    CHECK(id.entries[1].i == 1);
    CHECK(id.entries[1].j == 1);
    CHECK(plan_inverse(id).entries.size() == 2);
}

TEST_CASE("push-forward change of variables") {
    std::mt19937_64 gen(9);
    const auto masses = random_masses(gen, 10);
    TransportMap T;
    for (int i = 0; i < 10; ++i) T.assignment.push_back(gen() % 4);
    const auto pf = push_forward(T, masses, 4);
    const double phi[4] = {0.3, -1.0, 2.0, 0.7};
    double lhs = 0.0, rhs = 0.0;
    for (int j = 0; j < 4; ++j) lhs += phi[j] * pf[j];
    for (int i = 0; i < 10; ++i) rhs += phi[T.assignment[i]] * masses[i];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-15));
}

TEST_CASE("plan CSV") {
    const auto m2 = uniform_measure(1, {0.0, 1.0});
    std::ostringstream os;
    write_plan_csv(induced_plan({{1, 0}}, m2, m2), os);
    CHECK(os.str() == "i,j,mass\r\n0,1,0.5\r\n1,0,0.5\r\n");
}

TEST_CASE("matching experiment") {
    CHECK(matching_ratio(256, 2, 0.1) == doctest::Approx(16 * 0.1 / std::pow(std::log(256.0), 0.75)));
    CHECK(matching_ratio(512, 3, 0.1) == doctest::Approx(8 * 0.1 / std::cbrt(std::log(512.0))));
    const std::vector<std::size_t> ns{16, 64};
    const std::vector<std::uint64_t> seeds{0, 1};
    const auto rows = matching_scaling_experiment(ns, 2, seeds);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].n == 16);
    CHECK(rows[3].seed == 1);
    for (const auto& r : rows) CHECK(r.dist > 0.0);
    const std::vector<std::size_t> bad{10};
    CHECK_THROWS_AS(matching_scaling_experiment(bad, 2, seeds), Error);
}
