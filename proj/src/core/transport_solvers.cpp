#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "error.hpp"
#include "spatial.hpp"
#include "transport.hpp"

namespace pctv::transport {

namespace {
constexpr std::size_t npos = static_cast<std::size_t>(-1);
}

// Shortest augmenting path with potentials, O(n^3).
Assignment solve_assignment(std::span<const double> cost, std::size_t n) {
    require(cost.size() == n * n, ErrorCode::Shape, "solve_assignment: cost matrix must be n x n");
    for (double c : cost) require(std::isfinite(c), ErrorCode::Parameter, "solve_assignment: costs must be finite");
    const double inf = std::numeric_limits<double>::infinity();
    // 1-based rows/columns; column 0 is the virtual start.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
    std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
    std::vector<char> used(n + 1);
    for (std::size_t i = 1; i <= n; ++i) {
        p[0] = i;
        std::size_t j0 = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = p[j0];
            double delta = inf;
            std::size_t j1 = 0;
            const double* row = cost.data() + (i0 - 1) * n;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = row[j - 1] - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    Assignment a;
    a.col_of_row.assign(n, 0);
    for (std::size_t j = 1; j <= n; ++j) a.col_of_row[p[j] - 1] = j - 1;
    for (std::size_t i = 0; i < n; ++i) a.cost += cost[i * n + a.col_of_row[i]];
    return a;
}

TransportPlan solve_transportation(std::span<const double> cost, std::span<const double> supply,
                                   std::span<const double> demand) {
    const std::size_t m = supply.size(), k = demand.size();
    require(m > 0 && k > 0, ErrorCode::Shape, "solve_transportation: empty problem");
    require(cost.size() == m * k, ErrorCode::Shape, "solve_transportation: cost matrix must be m x k");
    double cmax = 0.0;
    for (double c : cost) {
        require(std::isfinite(c), ErrorCode::Parameter, "solve_transportation: costs must be finite");
        cmax = std::max(cmax, std::abs(c));
    }
    TransportPlan plan;
    plan.source_masses.assign(supply.begin(), supply.end());
    plan.target_masses.assign(demand.begin(), demand.end());

    // Basic cells; nodes 0..m-1 are rows, m..m+k-1 columns.
    struct Cell {
        std::size_t i, j;
        double x;
    };
    std::vector<Cell> basis;
    basis.reserve(m + k - 1);

    // Least-cost start, crossing out exactly one line per allocation so the
    // m + k - 1 basic cells form a spanning tree.
    {
        std::vector<std::size_t> order(m * k);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cost[a] < cost[b]; });
        std::vector<double> s(supply.begin(), supply.end()), d(demand.begin(), demand.end());
        std::vector<char> row_done(m, 0), col_done(k, 0);
        std::size_t rows_left = m, cols_left = k;
        for (std::size_t c : order) {
            if (basis.size() == m + k - 1) break;
            const std::size_t i = c / k, j = c % k;
            if (row_done[i] || col_done[j]) continue;
            const bool last_row = rows_left == 1, last_col = cols_left == 1;
            double x;
            if (last_row && last_col)
                x = std::max(s[i], d[j]);
            else if (last_row)
                x = d[j];
            else if (last_col)
                x = s[i];
            else
                x = std::min(s[i], d[j]);
            x = std::max(x, 0.0);
            basis.push_back({i, j, x});
            s[i] -= x;
            d[j] -= x;
            const bool cross_row = !last_row && (last_col || s[i] <= d[j]);
            if (cross_row) {
                row_done[i] = 1;
                --rows_left;
            } else {
                col_done[j] = 1;
                --cols_left;
            }
        }
    }
    require(basis.size() == m + k - 1, ErrorCode::Internal, "solve_transportation: degenerate initial basis");

    const std::size_t nodes = m + k;
    std::vector<std::vector<std::size_t>> tree(nodes);
    auto link = [&](std::size_t b) {
        tree[basis[b].i].push_back(b);
        tree[m + basis[b].j].push_back(b);
    };
    auto unlink = [&](std::size_t b) {
        for (std::size_t node : {basis[b].i, m + basis[b].j}) {
            auto& l = tree[node];
            *std::find(l.begin(), l.end(), b) = l.back();
            l.pop_back();
        }
    };
    for (std::size_t b = 0; b < basis.size(); ++b) link(b);

    std::vector<double> pot(nodes);
    std::vector<std::size_t> parent_cell(nodes), depth(nodes), queue(nodes);
    auto other = [&](std::size_t b, std::size_t node) { return node < m ? m + basis[b].j : basis[b].i; };
    auto rebuild = [&] {
        std::fill(depth.begin(), depth.end(), npos);
        depth[0] = 0;
        pot[0] = 0.0;
        parent_cell[0] = npos;
        std::size_t head = 0, tail = 0;
        queue[tail++] = 0;
        while (head < tail) {
            const std::size_t a = queue[head++];
            for (std::size_t b : tree[a]) {
                const std::size_t c = other(b, a);
                if (depth[c] != npos) continue;
                depth[c] = depth[a] + 1;
                parent_cell[c] = b;
                // u_i + v_j = c_ij, with v stored negated-free: pot[m + j] = v_j.
                const double cij = cost[basis[b].i * k + basis[b].j];
                pot[c] = cij - pot[a];
                queue[tail++] = c;
            }
        }
        require(tail == nodes, ErrorCode::Internal, "solve_transportation: basis is not a spanning tree");
    };

    const double tol = 1e-12 * std::max(1.0, cmax);
    const std::size_t block = std::max<std::size_t>(k, (m * k) / 16 + 1);
    const std::size_t max_iter = 50 * (m + k) * (m + k) + 1000;
    std::size_t scan = 0;
    std::vector<std::size_t> path_a, path_b;
    std::vector<std::size_t> cycle;
    for (std::size_t iter = 0;; ++iter) {
        require(iter < max_iter, ErrorCode::Internal, "solve_transportation: iteration limit reached");
        rebuild();
        // Partial pricing: best reduced cost within the first block that has a negative one.
        std::size_t enter = npos;
        double best = -tol;
        for (std::size_t seen = 0; seen < m * k;) {
            const std::size_t stop = std::min(m * k, seen + block);
            for (; seen < stop; ++seen) {
                const std::size_t c = scan;
                scan = scan + 1 == m * k ? 0 : scan + 1;
                const double r = cost[c] - pot[c / k] - pot[m + c % k];
                if (r < best) {
                    best = r;
                    enter = c;
                }
            }
            if (enter != npos) break;
        }
        if (enter == npos) break;

        const std::size_t ei = enter / k, ej = enter % k;
        path_a.clear();
        path_b.clear();
        std::size_t a = ei, b = m + ej;
        while (a != b) {
            if (depth[a] >= depth[b]) {
                path_a.push_back(parent_cell[a]);
                a = other(parent_cell[a], a);
            } else {
                path_b.push_back(parent_cell[b]);
                b = other(parent_cell[b], b);
            }
        }
        // Cycle after the entering cell: from column ej up to the apex, then down to row ei.
        cycle.assign(path_b.begin(), path_b.end());
        cycle.insert(cycle.end(), path_a.rbegin(), path_a.rend());
        std::size_t leave = npos;
        double theta = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < cycle.size(); t += 2)
            if (basis[cycle[t]].x < theta) {
                theta = basis[cycle[t]].x;
                leave = t;
            }
        for (std::size_t t = 0; t < cycle.size(); ++t) basis[cycle[t]].x += (t % 2 == 0 ? -theta : theta);
        const std::size_t out = cycle[leave];
        unlink(out);
        basis[out] = {ei, ej, theta};
        link(out);
    }

    for (const auto& c : basis)
        if (c.x > 0.0) plan.entries.push_back({c.i, c.j, c.x});
    std::sort(plan.entries.begin(), plan.entries.end(),
              [](const PlanEntry& x, const PlanEntry& y) { return x.i != y.i ? x.i < y.i : x.j < y.j; });
    return plan;
}

std::size_t hopcroft_karp(const std::vector<std::vector<std::uint32_t>>& adj, std::size_t right_size,
                          std::vector<std::size_t>& match) {
    const std::size_t n = adj.size();
    match.resize(n, npos);
    std::vector<std::size_t> match_r(right_size, npos);
    std::size_t size = 0;
    // Keep only warm-start pairs that are still edges and not in conflict.
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = match[i];
        if (j == npos) continue;
        const bool ok = j < right_size && match_r[j] == npos &&
                        std::find(adj[i].begin(), adj[i].end(), static_cast<std::uint32_t>(j)) != adj[i].end();
        if (ok) {
            match_r[j] = i;
            ++size;
        } else {
            match[i] = npos;
        }
    }

    std::vector<std::size_t> dist(n), queue(n), it(n), stack;
    while (true) {
        // BFS layers from free left vertices.
        std::size_t head = 0, tail = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (match[i] == npos) {
                dist[i] = 0;
                queue[tail++] = i;
            } else {
                dist[i] = npos;
            }
        }
        bool found = false;
        while (head < tail) {
            const std::size_t i = queue[head++];
            for (std::uint32_t j : adj[i]) {
                const std::size_t w = match_r[j];
                if (w == npos)
                    found = true;
                else if (dist[w] == npos) {
                    dist[w] = dist[i] + 1;
                    queue[tail++] = w;
                }
            }
        }
        if (!found) break;

        // Layered DFS, iterative.
        std::fill(it.begin(), it.end(), 0);
        std::size_t augmented = 0;
        for (std::size_t root = 0; root < n; ++root) {
            if (match[root] != npos) continue;
            stack.assign(1, root);
            while (!stack.empty()) {
                const std::size_t i = stack.back();
                if (it[i] == adj[i].size()) {
                    dist[i] = npos;
                    stack.pop_back();
                    continue;
                }
                const std::size_t j = adj[i][it[i]];
                const std::size_t w = match_r[j];
                if (w == npos) {
                    // Augment along the stack.
                    for (std::size_t s = stack.size(); s-- > 0;) {
                        const std::size_t l = stack[s];
                        const std::size_t r = adj[l][it[l]];
                        match[l] = r;
                        match_r[r] = l;
                    }
                    for (std::size_t l : stack) dist[l] = npos;
                    ++augmented;
                    break;
                }
                if (dist[w] != npos && dist[w] == dist[i] + 1) {
                    stack.push_back(w);
                } else {
                    ++it[i];
                }
            }
        }
        if (augmented == 0) break;
        size += augmented;
    }
    return size;
}

namespace {

// Adjacency of pairs with |x_i - y_j| <= t.
std::vector<std::vector<std::uint32_t>> threshold_graph(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double t) {
    std::vector<std::vector<std::uint32_t>> adj(mu.size());
    const spatial::CellGrid grid(nu.points, nu.dim, t);
    for (std::size_t i = 0; i < mu.size(); ++i) {
        const auto x = mu.point(i);
        grid.for_each_near(x, [&](std::uint32_t j) {
            if (geometry::distance(x, nu.point(j)) <= t) adj[i].push_back(j);
        });
        std::sort(adj[i].begin(), adj[i].end());
    }
    return adj;
}

}  // namespace

BottleneckResult bottleneck_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    validate(mu);
    validate(nu);
    require(mu.dim == nu.dim, ErrorCode::Shape, "bottleneck_distance: measures live in different dimensions");
    require(mu.size() == nu.size() && mu.is_uniform() && nu.is_uniform(), ErrorCode::Unsupported,
            "bottleneck_distance: needs uniform measures with equal atom counts");
    require(mu.size() < (std::size_t{1} << 32), ErrorCode::Unsupported, "bottleneck_distance: too many atoms");
    const std::size_t n = mu.size();
    const int d = mu.dim;

    std::vector<std::size_t> match(n, npos);
    std::vector<std::size_t> best_match;
    auto feasible = [&](double t) {
        const auto adj = threshold_graph(mu, nu, t);
        if (hopcroft_karp(adj, n, match) != n) return false;
        best_match = match;
        return true;
    };

    double diag2 = 0.0;
    for (int k = 0; k < d; ++k) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (const auto* m : {&mu, &nu})
            for (std::size_t i = 0; i < n; ++i) {
                lo = std::min(lo, m->points[i * d + k]);
                hi = std::max(hi, m->points[i * d + k]);
            }
        diag2 += (hi - lo) * (hi - lo);
    }
    const double diag = std::sqrt(diag2);

    double lo = 0.0, hi;
    if (feasible(0.0)) {
        hi = 0.0;
    } else {
        // Exponential search for a feasible radius.
        double r = diag / std::pow(static_cast<double>(n), 1.0 / d) / 2.0;
        if (!(r > 0.0)) r = diag;
        while (true) {
            if (r >= diag) {
                hi = diag;
                require(feasible(diag), ErrorCode::Internal, "bottleneck_distance: full graph has no perfect matching");
                break;
            }
            if (feasible(r)) {
                hi = r;
                break;
            }
            lo = r;
            r *= 2.0;
        }
        // Bisect until few candidate distances remain in (lo, hi], then search them exactly.
        constexpr std::size_t kCandidates = 256;
        for (int step = 0;; ++step) {
            std::vector<double> cand;
            const auto adj = threshold_graph(mu, nu, hi);
            for (std::size_t i = 0; i < n; ++i)
                for (std::uint32_t j : adj[i]) {
                    const double dij = geometry::distance(mu.point(i), nu.point(j));
                    if (dij > lo) cand.push_back(dij);
                }
            if (cand.size() <= kCandidates || step >= 60) {
                std::sort(cand.begin(), cand.end());
                cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
                // cand.back() == hi-feasible distance; find the smallest feasible one.
                std::size_t a = 0, b = cand.size() - 1;
                while (a < b) {
                    const std::size_t mid = (a + b) / 2;
                    if (feasible(cand[mid]))
                        b = mid;
                    else
                        a = mid + 1;
                }
                hi = cand[a];
                require(feasible(hi), ErrorCode::Internal, "bottleneck_distance: threshold search lost feasibility");
                break;
            }
            const double mid = 0.5 * (lo + hi);
            if (feasible(mid))
                hi = mid;
            else
                lo = mid;
        }
    }

    BottleneckResult res;
    res.map.assignment = best_match;
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, geometry::distance(mu.point(i), nu.point(best_match[i])));
    res.distance = worst <= 1e-14 ? 0.0 : worst;
    return res;
}

}  // namespace pctv::transport
