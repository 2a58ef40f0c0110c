#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace corrchange {

using Rng = std::mt19937_64;

// Domain tags keep independent uses of one user seed (bootstrap replicates,
// bridge paths, Monte Carlo panels) on disjoint substreams.
inline constexpr std::uint64_t kDomainBootstrap = 1;
inline constexpr std::uint64_t kDomainBridges = 2;
inline constexpr std::uint64_t kDomainDgp = 3;
inline constexpr std::uint64_t kDomainStudy = 4;

/// splitmix64-style mix of a base seed and a stream index. Used to derive
/// one independent substream per bootstrap replicate / simulation path so
/// that parallel execution order cannot affect results.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
    return Rng(mix_seed(seed, stream));
}

/// Process-wide cap on worker threads. 0 means hardware concurrency.
/// Results never depend on this value; it only controls scheduling.
void set_max_threads(int n);
int max_threads();

namespace detail {

/// Runs body(begin, end) over a partition of [0, n). Chunks are contiguous
/// and the partition depends only on n and the thread cap, never on timing.
void parallel_for(std::size_t n,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace detail
}  // namespace corrchange
