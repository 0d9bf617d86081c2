#include "transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "error.hpp"
#include "numerics.hpp"
#include "rng.hpp"

namespace pctv::transport {

namespace {

constexpr double kMassTol = 1e-12;
constexpr double kZeroDistance = 1e-14;

void sort_entries(std::vector<PlanEntry>& e) {
    std::sort(e.begin(), e.end(), [](const PlanEntry& a, const PlanEntry& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
}

// Merge duplicates of a (i, j)-sorted list.
std::vector<PlanEntry> merge_sorted(const std::vector<PlanEntry>& e) {
    std::vector<PlanEntry> out;
    for (const auto& x : e) {
        if (!out.empty() && out.back().i == x.i && out.back().j == x.j)
            out.back().mass += x.mass;
        else
            out.push_back(x);
    }
    return out;
}

double powp(double x, double p) { return p == 1.0 ? x : p == 2.0 ? x * x : std::pow(x, p); }

double root_distance(double cost, double p) {
    const double d = std::pow(std::max(cost, 0.0), 1.0 / p);
    return d <= kZeroDistance ? 0.0 : d;
}

OtResult solve_with_costs(const DiscreteMeasure& mu, const DiscreteMeasure& nu, const std::vector<double>& cost, double p) {
    OtResult out;
    out.plan.source_masses = mu.masses;
    out.plan.target_masses = nu.masses;
    if (mu.size() == nu.size() && mu.is_uniform() && nu.is_uniform()) {
        const auto a = solve_assignment(cost, mu.size());
        const double m = 1.0 / static_cast<double>(mu.size());
        for (std::size_t i = 0; i < mu.size(); ++i) out.plan.entries.push_back({i, a.col_of_row[i], m});
        numerics::CompensatedSum s;
        for (std::size_t i = 0; i < mu.size(); ++i) s.add(cost[i * mu.size() + a.col_of_row[i]]);
        out.cost = s.value() * m;
    } else {
        auto plan = solve_transportation(cost, mu.masses, nu.masses);
        out.plan.entries = std::move(plan.entries);
        numerics::CompensatedSum s;
        for (const auto& e : out.plan.entries) s.add(e.mass * cost[e.i * nu.size() + e.j]);
        out.cost = s.value();
    }
    out.distance = root_distance(out.cost, p);
    return out;
}

}  // namespace

DiscreteMeasure DiscreteMeasure::empirical(const geometry::PointCloud& cloud) {
    DiscreteMeasure mu;
    mu.dim = cloud.dim;
    mu.points = cloud.coords;
    mu.masses.assign(cloud.size(), 1.0 / static_cast<double>(cloud.size()));
    return mu;
}

DiscreteMeasure DiscreteMeasure::weighted(int dim, std::vector<double> points, std::vector<double> masses) {
    DiscreteMeasure mu{dim, std::move(points), std::move(masses)};
    validate(mu);
    return mu;
}

bool DiscreteMeasure::is_uniform() const {
    if (masses.empty()) return false;
    const double m = 1.0 / static_cast<double>(masses.size());
    return std::all_of(masses.begin(), masses.end(), [m](double x) { return std::abs(x - m) <= kMassTol; });
}

void validate(const DiscreteMeasure& mu) {
    require(mu.dim >= 1, ErrorCode::Shape, "measure has no dimension");
    require(mu.points.size() == mu.masses.size() * static_cast<std::size_t>(mu.dim), ErrorCode::Shape,
            "measure: point and mass counts disagree");
    require(!mu.masses.empty(), ErrorCode::Marginal, "measure has no atoms");
    numerics::CompensatedSum s;
    for (double m : mu.masses) {
        require(m > 0.0 && std::isfinite(m), ErrorCode::Marginal, "measure masses must be positive");
        s.add(m);
    }
    require(std::abs(s.value() - 1.0) <= kMassTol, ErrorCode::Marginal, "measure masses must sum to 1");
}

double marginal_violation(const TransportPlan& plan) {
    std::vector<numerics::CompensatedSum> rows(plan.source_masses.size()), cols(plan.target_masses.size());
    for (const auto& e : plan.entries) {
        if (e.i >= rows.size() || e.j >= cols.size() || !(e.mass >= 0.0)) return std::numeric_limits<double>::infinity();
        rows[e.i].add(e.mass);
        cols[e.j].add(e.mass);
    }
    double worst = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) worst = std::max(worst, std::abs(rows[i].value() - plan.source_masses[i]));
    for (std::size_t j = 0; j < cols.size(); ++j) worst = std::max(worst, std::abs(cols[j].value() - plan.target_masses[j]));
    return worst;
}

double plan_cost(const TransportPlan& plan, const DiscreteMeasure& source, const DiscreteMeasure& target, double p) {
    numerics::CompensatedSum s;
    for (const auto& e : plan.entries) s.add(e.mass * powp(geometry::distance(source.point(e.i), target.point(e.j)), p));
    return s.value();
}

TransportPlan induced_plan(const TransportMap& map, const DiscreteMeasure& source, const DiscreteMeasure& target) {
    require(map.assignment.size() == source.size(), ErrorCode::Shape, "induced_plan: map size differs from source");
    TransportPlan plan;
    plan.source_masses = source.masses;
    plan.target_masses = push_forward(map, source.masses, target.size());
    for (std::size_t i = 0; i < source.size(); ++i) plan.entries.push_back({i, map.assignment[i], source.masses[i]});
    sort_entries(plan.entries);
    plan.entries = merge_sorted(plan.entries);
    return plan;
}

std::vector<double> push_forward(const TransportMap& map, std::span<const double> source_masses, std::size_t target_size) {
    require(map.assignment.size() == source_masses.size(), ErrorCode::Shape, "push_forward: map size differs from source");
    std::vector<double> out(target_size, 0.0);
    for (std::size_t i = 0; i < source_masses.size(); ++i) {
        require(map.assignment[i] < target_size, ErrorCode::Index, "push_forward: target index out of range");
        out[map.assignment[i]] += source_masses[i];
    }
    return out;
}

OtResult ot_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
    require(p >= 1.0 && std::isfinite(p), ErrorCode::Parameter, "ot_distance: p must be in [1, inf)");
    validate(mu);
    validate(nu);
    require(mu.dim == nu.dim, ErrorCode::Shape, "ot_distance: measures live in different dimensions");
    std::vector<double> cost(mu.size() * nu.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t j = 0; j < nu.size(); ++j) cost[i * nu.size() + j] = powp(geometry::distance(mu.point(i), nu.point(j)), p);
    return solve_with_costs(mu, nu, cost, p);
}

OtResult tlp_distance(const LiftedFunction& a, const LiftedFunction& b, double p) {
    require(p >= 1.0 && std::isfinite(p), ErrorCode::Parameter, "tlp_distance: p must be in [1, inf)");
    validate(a.measure);
    validate(b.measure);
    require(a.measure.dim == b.measure.dim, ErrorCode::Shape, "tlp_distance: measures live in different dimensions");
    require(a.values.size() == a.measure.size() && b.values.size() == b.measure.size(), ErrorCode::Shape,
            "tlp_distance: one value per atom required");
    for (double v : a.values) require(std::isfinite(v), ErrorCode::Parameter, "tlp_distance: values must be finite");
    for (double v : b.values) require(std::isfinite(v), ErrorCode::Parameter, "tlp_distance: values must be finite");
    const auto& mu = a.measure;
    const auto& nu = b.measure;
    std::vector<double> cost(mu.size() * nu.size());
    for (std::size_t i = 0; i < mu.size(); ++i)
        for (std::size_t j = 0; j < nu.size(); ++j)
            cost[i * nu.size() + j] = powp(geometry::distance(mu.point(i), nu.point(j)), p) +
                                      powp(std::abs(a.values[i] - b.values[j]), p);
    return solve_with_costs(mu, nu, cost, p);
}

TransportPlan plan_inverse(const TransportPlan& plan) {
    TransportPlan inv;
    inv.source_masses = plan.target_masses;
    inv.target_masses = plan.source_masses;
    inv.entries.reserve(plan.entries.size());
    for (const auto& e : plan.entries) inv.entries.push_back({e.j, e.i, e.mass});
    sort_entries(inv.entries);
    return inv;
}

TransportPlan plan_compose(const TransportPlan& p12, const TransportPlan& p23) {
    require(p12.target_masses.size() == p23.source_masses.size(), ErrorCode::Composition,
            "plan_compose: middle measures have different atom counts");
    for (std::size_t j = 0; j < p12.target_masses.size(); ++j)
        require(std::abs(p12.target_masses[j] - p23.source_masses[j]) <= kMassTol, ErrorCode::Composition,
                "plan_compose: middle marginals differ");
    std::vector<std::vector<const PlanEntry*>> out_of(p23.source_masses.size());
    for (const auto& e : p23.entries) {
        require(e.i < out_of.size(), ErrorCode::Index, "plan_compose: entry index out of range");
        out_of[e.i].push_back(&e);
    }
    TransportPlan out;
    out.source_masses = p12.source_masses;
    out.target_masses = p23.target_masses;
    for (const auto& a : p12.entries) {
        require(a.j < out_of.size(), ErrorCode::Index, "plan_compose: entry index out of range");
        const double mid = p12.target_masses[a.j];
        for (const PlanEntry* b : out_of[a.j]) out.entries.push_back({a.i, b->j, a.mass * b->mass / mid});
    }
    sort_entries(out.entries);
    out.entries = merge_sorted(out.entries);
    return out;
}

void write_plan_csv(const TransportPlan& plan, std::ostream& os) {
    os << "i,j,mass\r\n";
    char buf[32];
    for (const auto& e : plan.entries) {
        std::snprintf(buf, sizeof buf, "%.17g", e.mass);
        os << e.i << ',' << e.j << ',' << buf << "\r\n";
    }
}

double matching_ratio(std::size_t n, int d, double dist) {
    const double nn = static_cast<double>(n);
    const double logn = std::log(nn);
    if (d == 2) return std::sqrt(nn) * dist / std::pow(logn, 0.75);
    return std::pow(nn, 1.0 / d) * dist / std::pow(logn, 1.0 / d);
}

std::uint64_t matching_sample_seed(std::uint64_t seed, std::size_t n) { return Rng(seed).split(n).next_u64(); }

std::vector<MatchingRow> matching_scaling_experiment(std::span<const std::size_t> n_values, int d,
                                                     std::span<const std::uint64_t> seeds) {
    require(d >= 2, ErrorCode::Parameter, "matching experiment: d must be >= 2");
    const auto cube = geometry::Domain::unit_cube(d);
    const auto uniform = geometry::Density::uniform(cube);
    std::vector<MatchingRow> rows;
    for (std::size_t n : n_values) {
        const int k = static_cast<int>(std::llround(std::pow(static_cast<double>(n), 1.0 / d)));
        std::size_t kd = 1;
        for (int a = 0; a < d; ++a) kd *= static_cast<std::size_t>(k);
        require(kd == n && n >= 2, ErrorCode::Parameter, "matching experiment: n must be a perfect d-th power >= 2");
        const auto grid = DiscreteMeasure::empirical(geometry::grid_points(k, d));
        for (std::uint64_t seed : seeds) {
            const auto cloud = geometry::sample_iid(cube, uniform, n, matching_sample_seed(seed, n));
            const auto res = bottleneck_distance(DiscreteMeasure::empirical(cloud), grid);
            rows.push_back({n, d, seed, res.distance, matching_ratio(n, d, res.distance)});
        }
    }
    return rows;
}

}  // namespace pctv::transport
