#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

namespace corrchange {

/// Empirical distribution of sup_{0<=s<=1} ||B^d(s)||_1 for d independent
/// standard Brownian bridges, tabulated by Monte Carlo.
struct QuantileTable {
    int d = 0;
    int grid_n = 0;
    std::int64_t paths = 0;
    std::uint64_t seed = 0;
    std::vector<double> samples;  // sorted ascending
};

/// Simulates `paths` suprema of the L1 norm of d independent Brownian
/// bridges. Each path builds W on the grid s_m = m/grid_n from scaled
/// Gaussian partial sums, sets B(s_m) = W(s_m) - s_m W(1), and records the
/// supremum of sum_i |B_i|. Between grid points the supremum is completed
/// by sampling the cell maximum from the Brownian crossing law (the L1
/// process has quadratic variation d*dt), which removes the O(grid^-1/2)
/// downward bias of the bare grid maximum. Paths use independent
/// substreams of `seed`; results do not depend on thread count.
QuantileTable simulate_sup_l1_bridges(int d, int grid_n, std::int64_t paths,
                                      std::uint64_t seed);

/// Empirical (1-alpha)-quantile, lower interpolation. alpha in (0, 1];
/// alpha = 1 degenerates to the smallest sample.
double critical_value(const QuantileTable& table, double alpha);

/// Fraction of samples strictly greater than stat (stat >= 0 required).
double p_value(const QuantileTable& table, double stat);

// --- optional binary cache -------------------------------------------------
// Sidecar format: magic, version, (d, grid_n, paths, seed) header, then the
// sorted samples as little-endian 64-bit floats. A corrupt or mismatched
// file is ignored and regenerated; the cache is never a semantic dependency.

std::filesystem::path quantile_cache_file(const std::filesystem::path& dir,
                                          int d, int grid_n,
                                          std::int64_t paths,
                                          std::uint64_t seed);

std::optional<QuantileTable> load_quantile_table(const std::filesystem::path& file,
                                                 int d, int grid_n,
                                                 std::int64_t paths,
                                                 std::uint64_t seed);

bool save_quantile_table(const std::filesystem::path& file,
                         const QuantileTable& table);

/// Loads from cache_dir when possible, otherwise simulates and (best
/// effort) saves.
QuantileTable cached_sup_l1_bridges(int d, int grid_n, std::int64_t paths,
                                    std::uint64_t seed,
                                    const std::optional<std::filesystem::path>& cache_dir);

}  // namespace corrchange
