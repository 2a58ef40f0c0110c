#include "corrchange/limit.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "corrchange/errors.hpp"
#include "corrchange/rng.hpp"

namespace corrchange {

namespace {

constexpr std::uint32_t kCacheMagic = 0x54514343;  // "CCQT"
constexpr std::uint32_t kCacheVersion = 1;

// -ln(u) for u ~ U(0,1) exceeds this with probability ~1e-20; cells whose
// completed maximum cannot beat the running best even at that extreme are
// skipped without consuming randomness.
constexpr double kLogTail = 46.1;

}  // namespace

QuantileTable simulate_sup_l1_bridges(int d, int grid_n, std::int64_t paths,
                                      std::uint64_t seed) {
    if (d < 1) throw InputError("bridge dimension must be >= 1");
    if (grid_n < 2) throw InputError("grid size must be >= 2");
    if (paths < 100) throw InputError("need at least 100 paths");

    QuantileTable table;
    table.d = d;
    table.grid_n = grid_n;
    table.paths = paths;
    table.seed = seed;
    table.samples.resize(static_cast<std::size_t>(paths));

    const double dt = 1.0 / grid_n;
    const double sqrt_dt = std::sqrt(dt);
    const double two_d_dt = 2.0 * d * dt;
    const double tail_term = two_d_dt * kLogTail;

    detail::parallel_for(static_cast<std::size_t>(paths), [&](std::size_t lo, std::size_t hi) {
        Eigen::MatrixXd w(grid_n, d);
        Eigen::VectorXd l1(grid_n + 1);
        for (std::size_t path = lo; path < hi; ++path) {
            Rng rng = make_stream(seed, path);
            std::normal_distribution<double> gauss(0.0, sqrt_dt);

            for (int i = 0; i < d; ++i) {
                double running = 0.0;
                for (int m = 0; m < grid_n; ++m) {
                    running += gauss(rng);
                    w(m, i) = running;
                }
            }

            // L1 norm of the bridge on the grid; endpoints are exactly zero
            l1[0] = 0.0;
            double best = 0.0;
            for (int m = 1; m <= grid_n; ++m) {
                const double s = static_cast<double>(m) * dt;
                double sum = 0.0;
                for (int i = 0; i < d; ++i) {
                    sum += std::abs(w(m - 1, i) - s * w(grid_n - 1, i));
                }
                l1[m] = sum;
                if (sum > best) best = sum;
            }

            // Complete the supremum between grid points: conditional on its
            // endpoints the L1 process has quadratic variation d*dt per cell,
            // so the cell maximum follows the Brownian crossing law. Without
            // this the grid maximum is biased low by O(grid_n^-1/2).
            std::uniform_real_distribution<double> unif(0.0, 1.0);
            for (int m = 0; m < grid_n; ++m) {
                const double a = l1[m];
                const double b = l1[m + 1];
                const double diff = b - a;
                const double reach =
                    0.5 * (a + b + std::sqrt(diff * diff + tail_term));
                if (reach <= best) continue;
                double u = unif(rng);
                if (u < 1e-300) u = 1e-300;
                const double cell =
                    0.5 * (a + b + std::sqrt(diff * diff - two_d_dt * std::log(u)));
                if (cell > best) best = cell;
            }
            table.samples[path] = best;
        }
    });

    std::sort(table.samples.begin(), table.samples.end());
    return table;
}

double critical_value(const QuantileTable& table, double alpha) {
    if (table.samples.empty()) throw InputError("quantile table is empty");
    if (!(alpha > 0.0) || alpha > 1.0) {
        throw InputError("alpha must lie in (0, 1], got " + std::to_string(alpha));
    }
    const auto n = static_cast<std::int64_t>(table.samples.size());
    std::int64_t idx =
        static_cast<std::int64_t>(std::ceil((1.0 - alpha) * static_cast<double>(n))) - 1;
    idx = std::clamp<std::int64_t>(idx, 0, n - 1);
    return table.samples[static_cast<std::size_t>(idx)];
}

double p_value(const QuantileTable& table, double stat) {
    if (table.samples.empty()) throw InputError("quantile table is empty");
    if (stat < 0.0) throw InputError("statistic must be nonnegative");
    const auto it = std::upper_bound(table.samples.begin(), table.samples.end(), stat);
    const auto greater = std::distance(it, table.samples.end());
    return static_cast<double>(greater) / static_cast<double>(table.samples.size());
}

// --- cache -------------------------------------------------------------

std::filesystem::path quantile_cache_file(const std::filesystem::path& dir,
                                          int d, int grid_n, std::int64_t paths,
                                          std::uint64_t seed) {
    std::ostringstream name;
    name << "bridge_d" << d << "_g" << grid_n << "_p" << paths << "_s" << seed
         << ".qtab";
    return dir / name.str();
}

namespace {

struct CacheHeader {
    std::uint32_t magic;
    std::uint32_t version;
    std::int32_t d;
    std::int32_t grid_n;
    std::int64_t paths;
    std::uint64_t seed;
};

static_assert(sizeof(CacheHeader) == 32);

}  // namespace

std::optional<QuantileTable> load_quantile_table(const std::filesystem::path& file,
                                                 int d, int grid_n,
                                                 std::int64_t paths,
                                                 std::uint64_t seed) {
    if constexpr (std::endian::native != std::endian::little) return std::nullopt;

    std::ifstream in(file, std::ios::binary);
    if (!in) return std::nullopt;

    CacheHeader header{};
    in.read(reinterpret_cast<char*>(&header), sizeof(header));
    if (!in) return std::nullopt;
    if (header.magic != kCacheMagic || header.version != kCacheVersion ||
        header.d != d || header.grid_n != grid_n || header.paths != paths ||
        header.seed != seed || header.paths <= 0) {
        return std::nullopt;
    }

    QuantileTable table;
    table.d = d;
    table.grid_n = grid_n;
    table.paths = paths;
    table.seed = seed;
    table.samples.resize(static_cast<std::size_t>(paths));
    in.read(reinterpret_cast<char*>(table.samples.data()),
            static_cast<std::streamsize>(sizeof(double) * table.samples.size()));
    if (!in || in.gcount() !=
                   static_cast<std::streamsize>(sizeof(double) * table.samples.size())) {
        return std::nullopt;
    }
    // a stray extra byte means the file is not what we wrote
    if (in.peek() != std::ifstream::traits_type::eof()) return std::nullopt;
    if (!std::is_sorted(table.samples.begin(), table.samples.end())) return std::nullopt;
    return table;
}

bool save_quantile_table(const std::filesystem::path& file, const QuantileTable& table) {
    if constexpr (std::endian::native != std::endian::little) return false;

    std::ofstream out(file, std::ios::binary | std::ios::trunc);
    if (!out) return false;

    const CacheHeader header{kCacheMagic, kCacheVersion, table.d, table.grid_n,
                             table.paths, table.seed};
    out.write(reinterpret_cast<const char*>(&header), sizeof(header));
    out.write(reinterpret_cast<const char*>(table.samples.data()),
              static_cast<std::streamsize>(sizeof(double) * table.samples.size()));
    return static_cast<bool>(out);
}

QuantileTable cached_sup_l1_bridges(int d, int grid_n, std::int64_t paths,
                                    std::uint64_t seed,
                                    const std::optional<std::filesystem::path>& cache_dir) {
    if (cache_dir) {
        const auto file = quantile_cache_file(*cache_dir, d, grid_n, paths, seed);
        if (auto cached = load_quantile_table(file, d, grid_n, paths, seed)) {
            return *std::move(cached);
        }
        QuantileTable table = simulate_sup_l1_bridges(d, grid_n, paths, seed);
        std::error_code ec;
        std::filesystem::create_directories(*cache_dir, ec);
        save_quantile_table(file, table);  // best effort
        return table;
    }
    return simulate_sup_l1_bridges(d, grid_n, paths, seed);
}

}  // namespace corrchange
