#ifndef URA_SEEDING_HPP
#define URA_SEEDING_HPP

#include <cstdint>
#include <random>

namespace ura {

// splitmix64 finalizer; full-period mixer used for seed derivation.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based split: the derived stream for item `index` under `master`
// is independent of how many other items exist, so datasets are reproducible
// under any parallelism degree.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return mix64(master ^ mix64(index + 0x517cc1b727220a95ULL));
}

inline std::mt19937_64 make_rng(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

} // namespace ura

#endif
