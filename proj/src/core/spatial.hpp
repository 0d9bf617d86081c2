#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

namespace pctv::spatial {

/// Uniform lattice of cells over the bounding box of a point set; only occupied
/// cells are stored (sorted linear keys). Cells are at least `width` wide, so
/// every point within `width` of a query lies in the 3^d block around the
/// query's cell.
class CellGrid {
public:
    CellGrid(std::span<const double> coords, int dim, double width) : d_(dim) {
        const std::size_t n = dim ? coords.size() / dim : 0;
        lower_.assign(d_, 0.0);
        counts_.assign(d_, 1);
        cell_.assign(d_, 1.0);
        std::vector<double> upper(d_, 0.0);
        if (n) {
            for (int k = 0; k < d_; ++k) lower_[k] = upper[k] = coords[k];
        }
        for (std::size_t i = 0; i < n; ++i)
            for (int k = 0; k < d_; ++k) {
                lower_[k] = std::min(lower_[k], coords[i * d_ + k]);
                upper[k] = std::max(upper[k], coords[i * d_ + k]);
            }
        // Cap the lattice so linear keys fit in 62 bits; larger cells stay correct.
        const double per_axis_cap = std::floor(std::pow(2.0, 62.0 / d_));
        for (int k = 0; k < d_; ++k) {
            const double extent = upper[k] - lower_[k];
            double c = width > 0.0 ? std::floor(extent / width) : per_axis_cap;
            c = std::clamp(c, 1.0, per_axis_cap);
            counts_[k] = static_cast<std::uint64_t>(c);
            cell_[k] = extent > 0.0 ? extent / c : 1.0;
        }
        std::vector<std::uint64_t> keys(n);
        std::vector<std::int64_t> c(d_);
        for (std::size_t i = 0; i < n; ++i) keys[i] = encode(cell_of(coords.subspan(i * d_, d_), c));
        order_.resize(n);
        std::iota(order_.begin(), order_.end(), 0U);
        std::stable_sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) { return keys[a] < keys[b]; });
        for (std::size_t s = 0; s < n;) {
            std::size_t e = s;
            while (e < n && keys[order_[e]] == keys[order_[s]]) ++e;
            occupied_.push_back({keys[order_[s]], s, e});
            s = e;
        }
    }

    /// Calls fn(index) for every stored point in the 3^d cells around x.
    template <class Fn>
    void for_each_near(std::span<const double> x, Fn&& fn) const {
        std::vector<std::int64_t> base(d_), off(d_, -1);
        cell_of(x, base);
        while (true) {
            bool valid = true;
            std::uint64_t nk = 0;
            for (int k = 0; k < d_; ++k) {
                const std::int64_t c = base[k] + off[k];
                if (c < 0 || c >= static_cast<std::int64_t>(counts_[k])) {
                    valid = false;
                    break;
                }
                nk = nk * counts_[k] + static_cast<std::uint64_t>(c);
            }
            if (valid) {
                auto it = std::lower_bound(occupied_.begin(), occupied_.end(), nk,
                                           [](const Range& r, std::uint64_t key) { return r.key < key; });
                if (it != occupied_.end() && it->key == nk)
                    for (std::size_t s = it->begin; s < it->end; ++s) fn(order_[s]);
            }
            int k = d_ - 1;
            while (k >= 0 && ++off[k] > 1) off[k--] = -1;
            if (k < 0) break;
        }
    }

private:
    struct Range {
        std::uint64_t key;
        std::size_t begin;
        std::size_t end;
    };

    // Cell coordinates of x, clamped to the lattice. Clamping only ever adds
    // candidates, never drops one.
    std::vector<std::int64_t>& cell_of(std::span<const double> x, std::vector<std::int64_t>& out) const {
        for (int k = 0; k < d_; ++k) {
            const double f = std::floor((x[k] - lower_[k]) / cell_[k]);
            const double hi = static_cast<double>(counts_[k]) - 1.0;
            out[k] = static_cast<std::int64_t>(std::clamp(f, 0.0, hi));
        }
        return out;
    }

    std::uint64_t encode(const std::vector<std::int64_t>& c) const {
        std::uint64_t key = 0;
        for (int k = 0; k < d_; ++k) key = key * counts_[k] + static_cast<std::uint64_t>(c[k]);
        return key;
    }

    int d_;
    std::vector<double> lower_;
    std::vector<std::uint64_t> counts_;
    std::vector<double> cell_;
    std::vector<std::uint32_t> order_;
    std::vector<Range> occupied_;
};

}  // namespace pctv::spatial
