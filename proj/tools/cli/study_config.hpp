#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "corrchange/sim.hpp"

namespace corrchange::cli {

enum class BreakScope { first_pair, all_pairs };

/// Key/value description of a rejection study: one row per
/// (delta_rho, T) combination, mirroring the tabular simulation layout.
struct StudyConfig {
    int p = 4;
    Distribution distribution = Distribution::normal;
    double ma = 0.0;
    std::vector<int> T_list;
    std::vector<double> delta_list;     // 0 means a size (no break) row
    BreakScope scope = BreakScope::first_pair;
    double z0 = 0.5;
    int mc_reps = 0;
    int bootstrap_B = 199;
    std::optional<int> block_length;    // default floor(T^(1/4))
    double alpha = 0.05;
    std::uint64_t seed = 42;
    int grid_n = 1000;
    std::int64_t paths = 100000;
};

StudyConfig parse_study_config(std::istream& in);
StudyConfig parse_study_config_file(const std::filesystem::path& path);

/// Runs one rejection study per (delta, T) row and writes CSV. Rows whose
/// shifted correlation matrix is not positive definite are emitted with "*"
/// in the rate columns instead of aborting the study.
void run_study(const StudyConfig& config, std::ostream& out,
               const std::optional<std::filesystem::path>& cache_dir);

}  // namespace corrchange::cli
