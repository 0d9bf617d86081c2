#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "geometry.hpp"
#include "kernels.hpp"

namespace pctv::graph {

/// Weights below this are dropped when building a graph.
inline constexpr double kMinWeight = 1e-15;

struct Edge {
    std::uint32_t i;
    std::uint32_t j;
    double w;
};

/// Symmetric epsilon-neighbourhood graph. Each undirected edge is stored once
/// with i < j; edges are sorted by (i, j). No self-loops.
struct WeightedGraph {
    std::size_t n = 0;
    double eps = 1.0;
    int dim = 0;
    std::string kernel;
    std::vector<Edge> edges;
};

/// W_ij = eps^{-d} eta(|X_i - X_j| / eps) for every pair with weight above
/// kMinWeight, found with a cell list whose bin width is eps times the
/// kernel's effective support.
WeightedGraph build_graph(const geometry::PointCloud& cloud, const kernels::KernelProfile& profile, double eps);

/// Wraps an explicit edge list (any order, i != j, positive weights). Duplicate
/// pairs are rejected.
WeightedGraph from_edges(std::size_t n, double eps, std::vector<Edge> edges, std::string kernel = "explicit");

/// Subset of {0, ..., n-1} stored as a bitset.
class VertexSet {
public:
    explicit VertexSet(std::size_t n) : n_(n), words_((n + 63) / 64, 0) {}
    /// Throws Index on an out-of-range member.
    static VertexSet from_indices(std::size_t n, std::span<const std::size_t> members);
    static VertexSet from_labels(std::span<const std::uint8_t> labels);

    std::size_t universe() const { return n_; }
    bool contains(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
    void insert(std::size_t i);
    void erase(std::size_t i) { words_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }
    std::size_t count() const;
    VertexSet complement() const;

private:
    std::size_t n_;
    std::vector<std::uint64_t> words_;
};

/// (1/eps)(1/n^2) sum over ordered pairs of W_ij |u_i - u_j|.
double graph_total_variation(const WeightedGraph& g, std::span<const double> u);

/// 2 sum_{i in A} sum_{j not in A} W_ij.
double graph_perimeter(const WeightedGraph& g, const VertexSet& a);
double graph_perimeter(const WeightedGraph& g, std::span<const std::size_t> members);

/// The factor 1 / (n^2 eps) mapping an unscaled double sum to GTV; shared by
/// GTV and GPer so GTV(chi_A) == GPer(A) * factor holds bit for bit.
double gtv_scale(const WeightedGraph& g);

bool is_connected(const WeightedGraph& g);
/// Component id per vertex, ids numbered by smallest member in increasing order.
std::vector<std::uint32_t> component_labels(const WeightedGraph& g);

struct CoareaLevel {
    double level;  // s_k
    double gtv;    // GTV(chi_{u > s_k})
    double gap;    // s_{k+1} - s_k
};

/// Level sets between consecutive distinct values of u. sum gap * gtv equals
/// GTV(u) for piecewise-constant u.
std::vector<CoareaLevel> coarea_decompose(const WeightedGraph& g, std::span<const double> u);
double coarea_sum(std::span<const CoareaLevel> levels);

/// "i,j,w" rows.
void write_edges_csv(const WeightedGraph& g, std::ostream& os);
/// "vertex,value" rows.
void write_values_csv(std::span<const double> u, std::ostream& os);

/// Compressed adjacency (both directions) for local moves.
struct Adjacency {
    std::vector<std::size_t> offsets;
    std::vector<std::uint32_t> neighbors;
    std::vector<double> weights;
};
Adjacency adjacency(const WeightedGraph& g);

}  // namespace pctv::graph
