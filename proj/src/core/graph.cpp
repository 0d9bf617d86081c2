#include "graph.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "error.hpp"
#include "numerics.hpp"
#include "spatial.hpp"

namespace pctv::graph {

WeightedGraph build_graph(const geometry::PointCloud& cloud, const kernels::KernelProfile& profile, double eps) {
    require(eps > 0.0 && std::isfinite(eps), ErrorCode::Parameter, "build_graph: eps must be positive");
    require(cloud.dim >= 1, ErrorCode::Parameter, "build_graph: point cloud has no dimension");
    require(cloud.size() < (std::size_t{1} << 32), ErrorCode::Unsupported, "build_graph: too many points");
    const int d = cloud.dim;
    const kernels::KernelProfile eff = profile.effective(d);
    const double reach = eps * eff.support_radius();
    const double scale = std::pow(eps, -d);

    WeightedGraph g;
    g.n = cloud.size();
    g.eps = eps;
    g.dim = d;
    g.kernel = profile.name();
    if (g.n < 2) return g;

    const spatial::CellGrid cells(cloud.coords, d, reach);
    std::vector<std::pair<std::uint32_t, double>> row;
    for (std::size_t i = 0; i < g.n; ++i) {
        row.clear();
        const auto xi = cloud.point(i);
        cells.for_each_near(xi, [&](std::uint32_t j) {
            if (j <= i) return;
            const double r = geometry::distance(xi, cloud.point(j));
            if (!(r < reach)) return;
            const double w = scale * eff(r / eps);
            if (w > kMinWeight) row.emplace_back(j, w);
        });
        std::sort(row.begin(), row.end());
        for (const auto& [j, w] : row) g.edges.push_back({static_cast<std::uint32_t>(i), j, w});
    }
    return g;
}

WeightedGraph from_edges(std::size_t n, double eps, std::vector<Edge> edges, std::string kernel) {
    require(eps > 0.0, ErrorCode::Parameter, "from_edges: eps must be positive");
    for (auto& e : edges) {
        require(e.i < n && e.j < n, ErrorCode::Index, "from_edges: vertex index out of range");
        require(e.i != e.j, ErrorCode::Parameter, "from_edges: self-loops are not allowed");
        require(e.w > 0.0, ErrorCode::Parameter, "from_edges: weights must be positive");
        if (e.i > e.j) std::swap(e.i, e.j);
    }
    std::sort(edges.begin(), edges.end(), [](const Edge& a, const Edge& b) { return a.i != b.i ? a.i < b.i : a.j < b.j; });
    for (std::size_t k = 1; k < edges.size(); ++k)
        require(edges[k].i != edges[k - 1].i || edges[k].j != edges[k - 1].j, ErrorCode::Parameter,
                "from_edges: duplicate edge");
    WeightedGraph g;
    g.n = n;
    g.eps = eps;
    g.kernel = std::move(kernel);
    g.edges = std::move(edges);
    return g;
}

VertexSet VertexSet::from_indices(std::size_t n, std::span<const std::size_t> members) {
    VertexSet s(n);
    for (std::size_t i : members) {
        require(i < n, ErrorCode::Index, "vertex index " + std::to_string(i) + " out of range");
        s.insert(i);
    }
    return s;
}

VertexSet VertexSet::from_labels(std::span<const std::uint8_t> labels) {
    VertexSet s(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i]) s.insert(i);
    return s;
}

void VertexSet::insert(std::size_t i) {
    require(i < n_, ErrorCode::Index, "vertex index out of range");
    words_[i >> 6] |= std::uint64_t{1} << (i & 63);
}

std::size_t VertexSet::count() const {
    std::size_t c = 0;
    for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
    return c;
}

VertexSet VertexSet::complement() const {
    VertexSet s(n_);
    for (std::size_t k = 0; k < words_.size(); ++k) s.words_[k] = ~words_[k];
    if (n_ & 63) s.words_.back() &= (std::uint64_t{1} << (n_ & 63)) - 1;
    return s;
}

double gtv_scale(const WeightedGraph& g) {
    const double n = static_cast<double>(g.n);
    return 1.0 / (n * n * g.eps);
}

double graph_total_variation(const WeightedGraph& g, std::span<const double> u) {
    require(u.size() == g.n, ErrorCode::Shape, "graph_total_variation: u has length " + std::to_string(u.size()) +
                                                   ", graph has " + std::to_string(g.n) + " vertices");
    if (g.n == 0) return 0.0;
    numerics::CompensatedSum s;
    for (const auto& e : g.edges) s.add(e.w * std::abs(u[e.i] - u[e.j]));
    return (2.0 * s.value()) * gtv_scale(g);
}

double graph_perimeter(const WeightedGraph& g, const VertexSet& a) {
    require(a.universe() == g.n, ErrorCode::Shape, "graph_perimeter: vertex set has wrong universe size");
    numerics::CompensatedSum s;
    for (const auto& e : g.edges)
        if (a.contains(e.i) != a.contains(e.j)) s.add(e.w);
    return 2.0 * s.value();
}

double graph_perimeter(const WeightedGraph& g, std::span<const std::size_t> members) {
    return graph_perimeter(g, VertexSet::from_indices(g.n, members));
}

std::vector<std::uint32_t> component_labels(const WeightedGraph& g) {
    std::vector<std::uint32_t> parent(g.n);
    std::iota(parent.begin(), parent.end(), 0U);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const auto& e : g.edges) {
        auto a = find(e.i), b = find(e.j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<std::uint32_t> label(g.n), id_of_root(g.n, UINT32_MAX);
    std::uint32_t next = 0;
    for (std::uint32_t i = 0; i < g.n; ++i) {
        const auto r = find(i);
        if (id_of_root[r] == UINT32_MAX) id_of_root[r] = next++;
        label[i] = id_of_root[r];
    }
    return label;
}

bool is_connected(const WeightedGraph& g) {
    if (g.n <= 1) return true;
    const auto labels = component_labels(g);
    return std::all_of(labels.begin(), labels.end(), [](std::uint32_t l) { return l == 0; });
}

std::vector<CoareaLevel> coarea_decompose(const WeightedGraph& g, std::span<const double> u) {
    require(u.size() == g.n, ErrorCode::Shape, "coarea_decompose: u has wrong length");
    for (double x : u) require(std::isfinite(x), ErrorCode::Parameter, "coarea_decompose: u must be finite");
    std::vector<double> levels(u.begin(), u.end());
    std::sort(levels.begin(), levels.end());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
    if (levels.size() < 2) return {};
    const std::size_t m = levels.size();
    auto rank = [&](double x) {
        return static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), x) - levels.begin());
    };
    // Edge (i, j) crosses {u > s_k} exactly for k in [rank of min, rank of max).
    std::vector<numerics::CompensatedSum> diff(m);
    std::vector<numerics::CompensatedSum> leave(m);
    for (const auto& e : g.edges) {
        std::size_t a = rank(u[e.i]), b = rank(u[e.j]);
        if (a == b) continue;
        if (a > b) std::swap(a, b);
        diff[a].add(e.w);
        leave[b].add(e.w);
    }
    std::vector<CoareaLevel> out;
    out.reserve(m - 1);
    double running = 0.0;
    const double scale = gtv_scale(g);
    for (std::size_t k = 0; k + 1 < m; ++k) {
        running += diff[k].value() - leave[k].value();
        out.push_back({levels[k], (2.0 * running) * scale, levels[k + 1] - levels[k]});
    }
    return out;
}

double coarea_sum(std::span<const CoareaLevel> levels) {
    numerics::CompensatedSum s;
    for (const auto& l : levels) s.add(l.gap * l.gtv);
    return s.value();
}

void write_edges_csv(const WeightedGraph& g, std::ostream& os) {
    os << "i,j,w\r\n";
    char buf[32];
    for (const auto& e : g.edges) {
        std::snprintf(buf, sizeof buf, "%.17g", e.w);
        os << e.i << ',' << e.j << ',' << buf << "\r\n";
    }
}

void write_values_csv(std::span<const double> u, std::ostream& os) {
    os << "vertex,value\r\n";
    char buf[32];
    for (std::size_t i = 0; i < u.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", u[i]);
        os << i << ',' << buf << "\r\n";
    }
}

Adjacency adjacency(const WeightedGraph& g) {
    Adjacency adj;
    adj.offsets.assign(g.n + 1, 0);
    for (const auto& e : g.edges) {
        ++adj.offsets[e.i + 1];
        ++adj.offsets[e.j + 1];
    }
    for (std::size_t i = 0; i < g.n; ++i) adj.offsets[i + 1] += adj.offsets[i];
    adj.neighbors.resize(adj.offsets.back());
    adj.weights.resize(adj.offsets.back());
    std::vector<std::size_t> fill(adj.offsets.begin(), adj.offsets.end() - 1);
    for (const auto& e : g.edges) {
        adj.neighbors[fill[e.i]] = e.j;
        adj.weights[fill[e.i]++] = e.w;
        adj.neighbors[fill[e.j]] = e.i;
        adj.weights[fill[e.j]++] = e.w;
    }
    return adj;
}

}  // namespace pctv::graph
