#include "bisect.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

#include "error.hpp"
#include "numerics.hpp"
#include "rng.hpp"

namespace pctv::bisect {

namespace {

void check_balanced(const graph::WeightedGraph& g, std::span<const std::uint8_t> labels) {
    require(labels.size() == g.n, ErrorCode::Shape, "bisection labels have length " + std::to_string(labels.size()) +
                                                        ", graph has " + std::to_string(g.n) + " vertices");
    std::size_t ones = 0;
    for (auto l : labels) {
        require(l <= 1, ErrorCode::Parameter, "bisection labels must be 0 or 1");
        ones += l;
    }
    require(2 * ones == g.n, ErrorCode::Parameter, "bisection labels are not balanced");
}

// Same tie tolerance everywhere energies are compared.
bool energy_less(double a, double b) { return a < b - 1e-12 * std::max(std::abs(a), std::abs(b)); }
bool energy_tie(double a, double b) { return !energy_less(a, b) && !energy_less(b, a); }

bool better(const Bisection& a, const Bisection& b) {
    if (energy_less(a.energy, b.energy)) return true;
    return energy_tie(a.energy, b.energy) && member_order_less(a.labels, b.labels);
}

}  // namespace

double bisection_energy(const graph::WeightedGraph& g, std::span<const std::uint8_t> labels) {
    check_balanced(g, labels);
    return graph::graph_perimeter(g, graph::VertexSet::from_labels(labels)) * graph::gtv_scale(g);
}

bool member_order_less(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i)
        if (a[i] != b[i]) return a[i] > b[i];
    return a.size() < b.size();
}

Bisection brute_force_bisection(const graph::WeightedGraph& g) {
    const std::size_t n = g.n;
    require(n % 2 == 0 && n >= 2, ErrorCode::Unsupported, "brute_force_bisection: n must be even and positive");
    require(n <= kMaxBruteForce, ErrorCode::Unsupported,
            "brute_force_bisection: n = " + std::to_string(n) + " exceeds the enumeration bound");
    std::vector<double> w(n * n, 0.0), rowsum(n, 0.0);
    for (const auto& e : g.edges) {
        w[e.i * n + e.j] = w[e.j * n + e.i] = e.w;
        rowsum[e.i] += e.w;
        rowsum[e.j] += e.w;
    }
    // A complement has the same energy and the member-order-first of the two
    // contains vertex 0, so enumerate sets with 0 in A: masks over 1..n-1.
    const std::size_t half = n / 2;
    const std::uint32_t m = static_cast<std::uint32_t>(n - 1);
    const std::uint32_t limit = m == 32 ? 0 : (std::uint32_t{1} << m);
    std::uint32_t mask = (std::uint32_t{1} << (half - 1)) - 1;
    double best_cut = std::numeric_limits<double>::infinity();
    std::vector<std::uint8_t> best, cur(n);
    std::vector<std::size_t> members(half);
    while (true) {
        members[0] = 0;
        std::size_t c = 1;
        for (std::uint32_t bits = mask; bits; bits &= bits - 1) members[c++] = 1 + std::countr_zero(bits);
        double cut = 0.0;
        for (std::size_t a = 0; a < half; ++a) {
            const double* row = w.data() + members[a] * n;
            double inside = 0.0;
            for (std::size_t b = 0; b < half; ++b) inside += row[members[b]];
            cut += rowsum[members[a]] - inside;
        }
        std::fill(cur.begin(), cur.end(), 0);
        for (auto v : members) cur[v] = 1;
        if (best.empty() || energy_less(cut, best_cut) || (energy_tie(cut, best_cut) && member_order_less(cur, best))) {
            if (best.empty() || energy_less(cut, best_cut)) best_cut = cut;
            best = cur;
        }
        if (half == 1) break;
        // Next mask with the same popcount (Gosper).
        const std::uint32_t t = mask | (mask - 1);
        const std::uint32_t next = (t + 1) | (((~t & (t + 1)) - 1) >> (std::countr_zero(mask) + 1));
        if (next >= limit || next <= mask) break;
        mask = next;
    }
    return {best, bisection_energy(g, best)};
}

Bisection local_search_bisection(const graph::WeightedGraph& g, const LocalSearchOptions& options) {
    const std::size_t n = g.n;
    require(n % 2 == 0 && n >= 2, ErrorCode::Unsupported, "local_search_bisection: n must be even and positive");
    if (!options.warm_start.empty()) check_balanced(g, options.warm_start);
    require(options.restarts >= 1 || !options.warm_start.empty(), ErrorCode::Parameter,
            "local_search_bisection: restarts must be at least 1");
    const std::size_t max_iters = options.max_iters ? options.max_iters : 10 * n;
    const auto adj = graph::adjacency(g);
    double wmax = 0.0;
    for (const auto& e : g.edges) wmax = std::max(wmax, e.w);
    const double tol = 1e-10 * std::max(wmax, 1e-300);

    std::vector<std::uint8_t> label(n);
    std::vector<double> gain(n);    // external minus internal weight
    std::vector<double> mark(n, 0.0);  // w(a, .) for the current a
    std::vector<std::uint32_t> side_a, side_b;
    auto recompute = [&](std::size_t v) {
        double s = 0.0;
        for (std::size_t k = adj.offsets[v]; k < adj.offsets[v + 1]; ++k)
            s += label[adj.neighbors[k]] != label[v] ? adj.weights[k] : -adj.weights[k];
        gain[v] = s;
    };

    auto descend = [&] {
        for (std::size_t v = 0; v < n; ++v) recompute(v);
        for (std::size_t iter = 0; iter < max_iters; ++iter) {
            side_a.clear();
            side_b.clear();
            for (std::uint32_t v = 0; v < n; ++v) (label[v] ? side_a : side_b).push_back(v);
            auto by_gain = [&](std::uint32_t x, std::uint32_t y) { return gain[x] != gain[y] ? gain[x] > gain[y] : x < y; };
            std::sort(side_a.begin(), side_a.end(), by_gain);
            std::sort(side_b.begin(), side_b.end(), by_gain);
            double best = tol;
            std::size_t ba = n, bb = n;
            for (std::uint32_t a : side_a) {
                if (gain[a] + gain[side_b[0]] <= best) break;
                for (std::size_t k = adj.offsets[a]; k < adj.offsets[a + 1]; ++k) mark[adj.neighbors[k]] = adj.weights[k];
                for (std::uint32_t b : side_b) {
                    const double upper = gain[a] + gain[b];
                    if (upper <= best) break;
                    const double s = upper - 2.0 * mark[b];
                    if (s > best) {
                        best = s;
                        ba = a;
                        bb = b;
                    }
                }
                for (std::size_t k = adj.offsets[a]; k < adj.offsets[a + 1]; ++k) mark[adj.neighbors[k]] = 0.0;
            }
            if (ba == n) break;
            label[ba] = 0;
            label[bb] = 1;
            for (std::size_t v : {ba, bb}) {
                recompute(v);
                for (std::size_t k = adj.offsets[v]; k < adj.offsets[v + 1]; ++k) recompute(adj.neighbors[k]);
            }
        }
    };

    Bisection best;
    auto consider = [&] {
        Bisection cand{label, bisection_energy(g, label)};
        if (best.labels.empty() || better(cand, best)) best = std::move(cand);
    };

    if (!options.warm_start.empty()) {
        label = options.warm_start;
        descend();
        consider();
        return best;
    }
    if (options.component_start) {
        if (auto split = balanced_disconnection(g)) {
            label = std::move(*split);
            descend();
            consider();
        }
    }
    const Rng root(options.seed);
    std::vector<std::uint32_t> perm(n);
    for (std::size_t r = 0; r < options.restarts; ++r) {
        Rng rng = root.split(r);
        std::iota(perm.begin(), perm.end(), 0U);
        rng.shuffle(perm);
        std::fill(label.begin(), label.end(), 0);
        for (std::size_t k = 0; k < n / 2; ++k) label[perm[k]] = 1;
        descend();
        consider();
    }
    return best;
}

std::optional<std::vector<std::uint8_t>> balanced_disconnection(const graph::WeightedGraph& g) {
    const std::size_t n = g.n;
    if (n % 2 != 0 || n == 0) return std::nullopt;
    const auto comp = graph::component_labels(g);
    const std::size_t nc = comp.empty() ? 0 : *std::max_element(comp.begin(), comp.end()) + 1;
    if (nc < 2) return std::nullopt;
    std::vector<std::size_t> size(nc, 0);
    for (auto c : comp) ++size[c];
    // reach[c][s]: some subset of components 0..c-1 has total size s.
    const std::size_t half = n / 2;
    std::vector<std::vector<std::uint8_t>> reach(nc + 1, std::vector<std::uint8_t>(half + 1, 0));
    reach[0][0] = 1;
    for (std::size_t c = 0; c < nc; ++c)
        for (std::size_t s = 0; s <= half; ++s)
            reach[c + 1][s] = reach[c][s] || (s >= size[c] && reach[c][s - size[c]]);
    if (!reach[nc][half]) return std::nullopt;
    std::vector<std::uint8_t> take(nc, 0);
    for (std::size_t c = nc, s = half; c > 0; --c) {
        if (!reach[c - 1][s]) {
            take[c - 1] = 1;
            s -= size[c - 1];
        }
    }
    std::vector<std::uint8_t> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = take[comp[i]];
    return labels;
}

std::vector<PlanarCut> reference_cuts(const geometry::Domain& domain) {
    const auto& bb = domain.bounding_box();
    std::vector<PlanarCut> cuts;
    if (domain.kind() == geometry::Domain::Kind::Box) {
        double longest = 0.0;
        for (int k = 0; k < domain.dim(); ++k) longest = std::max(longest, bb.upper[k] - bb.lower[k]);
        for (int k = 0; k < domain.dim(); ++k)
            if (bb.upper[k] - bb.lower[k] >= longest * (1.0 - 1e-12)) cuts.push_back({k, 0.5 * (bb.lower[k] + bb.upper[k])});
        return cuts;
    }
    cuts.push_back({0, domain.centroid()[0]});
    return cuts;
}

std::vector<std::uint8_t> cut_labels(const geometry::PointCloud& cloud, const PlanarCut& cut) {
    require(cut.axis >= 0 && cut.axis < cloud.dim, ErrorCode::Parameter, "cut_labels: axis out of range");
    std::vector<std::uint8_t> labels(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) labels[i] = cloud.point(i)[cut.axis] < cut.position ? 1 : 0;
    return labels;
}

double agreement(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    require(a.size() == b.size(), ErrorCode::Shape, "agreement: label vectors differ in length");
    if (a.empty()) return 1.0;
    std::size_t same = 0;
    for (std::size_t i = 0; i < a.size(); ++i) same += (a[i] != 0) == (b[i] != 0);
    const double f = static_cast<double>(same) / static_cast<double>(a.size());
    return std::max(f, 1.0 - f);
}

transport::DiscreteMeasure discretize(const geometry::Domain& domain, const geometry::Density& rho, int cells_per_axis) {
    require(cells_per_axis >= 1, ErrorCode::Parameter, "discretize: need at least one cell per axis");
    const int d = domain.dim();
    const auto& bb = domain.bounding_box();
    std::vector<double> h(d);
    std::size_t total = 1;
    for (int k = 0; k < d; ++k) {
        h[k] = (bb.upper[k] - bb.lower[k]) / cells_per_axis;
        total *= static_cast<std::size_t>(cells_per_axis);
    }
    transport::DiscreteMeasure mu;
    mu.dim = d;
    std::vector<double> x(d);
    numerics::CompensatedSum sum;
    for (std::size_t c = 0; c < total; ++c) {
        std::size_t rest = c;
        for (int k = d - 1; k >= 0; --k) {
            const std::size_t ik = rest % static_cast<std::size_t>(cells_per_axis);
            rest /= static_cast<std::size_t>(cells_per_axis);
            x[k] = bb.lower[k] + (static_cast<double>(ik) + 0.5) * h[k];
        }
        if (!domain.contains(x)) continue;
        const double m = rho(x);
        if (!(m > 0.0)) continue;
        mu.points.insert(mu.points.end(), x.begin(), x.end());
        mu.masses.push_back(m);
        sum.add(m);
    }
    require(!mu.masses.empty(), ErrorCode::Parameter, "discretize: no cell centre lies in the domain");
    const double total_mass = sum.value();
    for (double& m : mu.masses) m /= total_mass;
    return mu;
}

double tl1_to_reference(const geometry::PointCloud& cloud, std::span<const std::uint8_t> labels,
                        const geometry::Domain& domain, const geometry::Density& rho, int cells_per_axis) {
    require(labels.size() == cloud.size(), ErrorCode::Shape, "tl1_to_reference: one label per point required");
    require(cloud.dim == domain.dim(), ErrorCode::Shape, "tl1_to_reference: point cloud and domain dimensions differ");
    transport::LiftedFunction discrete{transport::DiscreteMeasure::empirical(cloud), {}};
    discrete.values.assign(labels.begin(), labels.end());
    transport::LiftedFunction continuum{discretize(domain, rho, cells_per_axis), {}};
    const auto& grid = continuum.measure;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& cut : reference_cuts(domain)) {
        for (int flip = 0; flip < 2; ++flip) {
            continuum.values.resize(grid.size());
            for (std::size_t i = 0; i < grid.size(); ++i) {
                const bool inside = grid.point(i)[cut.axis] < cut.position;
                continuum.values[i] = (inside != (flip == 1)) ? 1.0 : 0.0;
            }
            best = std::min(best, transport::tlp_distance(discrete, continuum, 1.0).distance);
        }
    }
    return best;
}

}  // namespace pctv::bisect
