#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "geometry.hpp"

namespace pctv::transport {

/// Atoms with positive masses summing to one.
struct DiscreteMeasure {
    int dim = 0;
    std::vector<double> points;  // row-major
    std::vector<double> masses;

    std::size_t size() const { return masses.size(); }
    std::span<const double> point(std::size_t i) const { return {points.data() + i * dim, static_cast<std::size_t>(dim)}; }

    /// Empirical measure (1/n) sum delta_{X_i}.
    static DiscreteMeasure empirical(const geometry::PointCloud& cloud);
    static DiscreteMeasure weighted(int dim, std::vector<double> points, std::vector<double> masses);

    /// True when every mass equals 1/n to 1e-12.
    bool is_uniform() const;
};

/// Throws Marginal unless masses are positive and sum to 1 within 1e-12;
/// Shape if points and masses disagree.
void validate(const DiscreteMeasure& mu);

struct PlanEntry {
    std::size_t i;
    std::size_t j;
    double mass;
};

/// Sparse coupling between a source and a target measure. The marginal masses
/// are carried along so plans can be inverted and composed without the atoms.
struct TransportPlan {
    std::vector<double> source_masses;
    std::vector<double> target_masses;
    std::vector<PlanEntry> entries;  // sorted by (i, j), no duplicates
};

/// Largest absolute deviation of row/column sums from the carried marginals,
/// or +inf if some entry has negative mass or an out-of-range index.
double marginal_violation(const TransportPlan& plan);

/// sum mass * |x_i - y_j|^p.
double plan_cost(const TransportPlan& plan, const DiscreteMeasure& source, const DiscreteMeasure& target, double p);

/// Assignment of each source atom to a target atom.
struct TransportMap {
    std::vector<std::size_t> assignment;
};

/// (id x T)_# mu.
TransportPlan induced_plan(const TransportMap& map, const DiscreteMeasure& source, const DiscreteMeasure& target);
/// Masses of T_# mu on the target atoms.
std::vector<double> push_forward(const TransportMap& map, std::span<const double> source_masses, std::size_t target_size);

struct OtResult {
    double distance = 0.0;  // cost^(1/p)
    double cost = 0.0;
    TransportPlan plan;
};

/// Exact p-OT distance. Uniform measures with equal atom counts go through the
/// assignment solver; everything else through the transportation simplex.
OtResult ot_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

struct BottleneckResult {
    double distance = 0.0;
    TransportMap map;
};

/// Min over permutations of the max displacement, for uniform measures with
/// equal atom counts (Unsupported otherwise). Threshold search on pairwise
/// distances with Hopcroft-Karp feasibility checks.
BottleneckResult bottleneck_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

/// Element (mu, f) of TL^p.
struct LiftedFunction {
    DiscreteMeasure measure;
    std::vector<double> values;
};

/// TL^p distance as the p-OT distance between the lifted measures on D x R with
/// cost |x - y|^p + |f(x) - g(y)|^p.
OtResult tlp_distance(const LiftedFunction& a, const LiftedFunction& b, double p);

TransportPlan plan_inverse(const TransportPlan& plan);
/// Gluing through the shared marginal: (i,k) receives sum_j m12(i,j) m23(j,k) / m(j).
/// Throws Composition if p12's target marginal is not p23's source marginal.
TransportPlan plan_compose(const TransportPlan& p12, const TransportPlan& p23);

/// "i,j,mass" rows.
void write_plan_csv(const TransportPlan& plan, std::ostream& os);

// Solvers, exposed for testing.

struct Assignment {
    std::vector<std::size_t> col_of_row;
    double cost = 0.0;
};
/// Min-cost perfect matching of an n x n row-major cost matrix.
Assignment solve_assignment(std::span<const double> cost, std::size_t n);

/// Min-cost transportation problem (m x k row-major costs, supplies and demands
/// with equal totals) by the primal network simplex on the bipartite graph.
TransportPlan solve_transportation(std::span<const double> cost, std::span<const double> supply,
                                   std::span<const double> demand);

/// Perfect matching on the bipartite graph with adjacency lists `adj`
/// (left -> right). `match` holds a warm start (right index or npos per left
/// vertex) and receives the result; returns the matching size.
std::size_t hopcroft_karp(const std::vector<std::vector<std::uint32_t>>& adj, std::size_t right_size,
                          std::vector<std::size_t>& match);

struct MatchingRow {
    std::size_t n;
    int d;
    std::uint64_t seed;
    double dist;
    double ratio;
};

/// sqrt(n) dist / (log n)^{3/4} for d = 2, n^{1/d} dist / (log n)^{1/d} for d >= 3.
double matching_ratio(std::size_t n, int d, double dist);

/// For each n (a perfect d-th power) and seed: n uniform points in (0,1)^d,
/// bottleneck matching to the n grid centres.
std::vector<MatchingRow> matching_scaling_experiment(std::span<const std::size_t> n_values, int d,
                                                     std::span<const std::uint64_t> seeds);

/// Seed of the uniform sample used for (seed, n) in the scaling experiment.
std::uint64_t matching_sample_seed(std::uint64_t seed, std::size_t n);

}  // namespace pctv::transport
