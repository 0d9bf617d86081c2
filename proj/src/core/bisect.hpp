#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "geometry.hpp"
#include "graph.hpp"
#include "transport.hpp"

namespace pctv::bisect {

/// Balanced two-way split; labels[i] == 1 marks membership in A, |A| = n/2.
struct Bisection {
    std::vector<std::uint8_t> labels;
    double energy = 0.0;  // GTV(chi_A)
};

/// GTV(chi_A) = GPer(A) / (n^2 eps). Throws Shape on a length mismatch and
/// Parameter if the labels are not balanced.
double bisection_energy(const graph::WeightedGraph& g, std::span<const std::uint8_t> labels);

/// Order of the sorted member lists of A: at the first vertex where a and b
/// differ, the one containing that vertex comes first.
bool member_order_less(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

/// Exhaustive minimiser over all balanced subsets; n even and n <= 24,
/// Unsupported otherwise. Ties go to the first set in member order.
Bisection brute_force_bisection(const graph::WeightedGraph& g);

inline constexpr std::size_t kMaxBruteForce = 24;

struct LocalSearchOptions {
    std::uint64_t seed = 0;
    std::size_t restarts = 32;
    std::size_t max_iters = 0;  // swaps per restart; 0 means 10 n
    /// Balanced start. When given it is the only start; restarts is ignored.
    std::vector<std::uint8_t> warm_start;
    /// Also start from balanced_disconnection(g) when one exists.
    bool component_start = true;
};

/// Best-improving balanced 1-1 swaps from random balanced starts. Result is
/// the (energy, member order) minimum over restarts. Swaps cannot move whole
/// components, so a zero-energy split is only reachable via component_start.
Bisection local_search_bisection(const graph::WeightedGraph& g, const LocalSearchOptions& options = {});

/// A balanced union of connected components, if one exists (subset sum over
/// component sizes). Its energy is zero.
std::optional<std::vector<std::uint8_t>> balanced_disconnection(const graph::WeightedGraph& g);

/// Half-space {x_axis < position}.
struct PlanarCut {
    int axis = 0;
    double position = 0.0;
};

/// Continuum minimisers of the balanced perimeter problem used as references:
/// for a box, the mid cuts across every axis of minimal cross-section; for the
/// dumbbell, the cut through the middle of the neck. Other domains fall back to
/// the first-axis cut through the centroid.
std::vector<PlanarCut> reference_cuts(const geometry::Domain& domain);

std::vector<std::uint8_t> cut_labels(const geometry::PointCloud& cloud, const PlanarCut& cut);

/// Fraction of matching labels, maximised over the two identifications.
double agreement(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

/// Cell-centre discretisation of rho on a k^d lattice over the bounding
/// box: centres of cells whose centre lies in the domain, masses proportional
/// to rho at the centre.
transport::DiscreteMeasure discretize(const geometry::Domain& domain, const geometry::Density& rho, int cells_per_axis);

/// TL^1 distance from (nu_n, chi_A) to (nu, chi_E), E the reference half-space
/// intersected with D, with nu replaced by discretize(domain, rho, k).
/// Minimised over the references and over E versus its complement.
double tl1_to_reference(const geometry::PointCloud& cloud, std::span<const std::uint8_t> labels,
                        const geometry::Domain& domain, const geometry::Density& rho, int cells_per_axis);

}  // namespace pctv::bisect
