#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace pctv {

/// Seedable, splittable generator (xoshiro256** seeded through splitmix64).
///
/// All sampling in the library goes through this type so that a run is fully
/// described by (seed, name(), version()). Floating-point draws use only the
/// top 53 bits and never a std:: distribution, whose output differs between
/// standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    static constexpr std::string_view name() { return "xoshiro256ss-splitmix64"; }
    static constexpr int version() { return 1; }

    std::uint64_t seed() const { return seed_; }

    std::uint64_t next_u64();
    /// Uniform on [0, 1).
    double uniform();
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, bound), bound > 0. Unbiased (Lemire).
    std::uint64_t below(std::uint64_t bound);

    /// Independent child stream keyed by `stream`; does not advance *this.
    Rng split(std::uint64_t stream) const;

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t seed_;
    std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state);

/// Seed of child stream `stream` of `seed` (same as Rng(seed).split(stream).seed()).
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) { return Rng(seed).split(stream).seed(); }

}  // namespace pctv
