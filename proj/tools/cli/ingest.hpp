#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "corrchange/panel.hpp"

namespace corrchange::cli {

enum class IngestMode { returns, prices };

struct InputSpec {
    std::filesystem::path path;
    IngestMode mode = IngestMode::returns;
    char delimiter = ',';
    bool has_header = true;
    std::vector<std::string> columns;  // header labels or 1-based indices; empty = all
};

/// Reads a delimited text file into a panel. A non-numeric first column is
/// carried through as row labels (dates) and never parsed as data. In
/// prices mode the panel holds log returns ln(P_t / P_{t-1}) and is one row
/// shorter than the file. All parse failures carry 1-based line numbers.
Panel ingest(const InputSpec& spec);

struct RollingCorrelations {
    std::vector<std::string> starts;   // window start index or date
    Eigen::MatrixXd values;            // (T - window + 1) x d
    std::vector<std::string> pair_names;
};

/// Pearson correlation of every length-`window` row range, per pair.
RollingCorrelations rolling_correlations(const Panel& panel, int window);

void write_rolling_csv(std::ostream& out, const RollingCorrelations& rolling);

}  // namespace corrchange::cli
