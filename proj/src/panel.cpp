#include "corrchange/panel.hpp"

#include <cmath>

#include "corrchange/errors.hpp"

namespace corrchange {

Panel make_panel(Eigen::MatrixXd data, std::vector<std::string> labels) {
    Panel panel;
    panel.data = std::move(data);
    if (labels.empty()) {
        labels.reserve(panel.cols());
        for (Eigen::Index j = 0; j < panel.cols(); ++j) {
            labels.push_back("X" + std::to_string(j + 1));
        }
    }
    panel.labels = std::move(labels);
    check_panel(panel);
    return panel;
}

void check_panel(const Panel& panel) {
    if (panel.rows() < 3) {
        throw InputError("panel needs at least 3 rows, got " +
                         std::to_string(panel.rows()));
    }
    if (panel.cols() < 2) {
        throw InputError("panel needs at least 2 columns, got " +
                         std::to_string(panel.cols()));
    }
    if (!panel.data.allFinite()) {
        throw InputError("panel contains non-finite entries");
    }
    if (static_cast<Eigen::Index>(panel.labels.size()) != panel.cols()) {
        throw InputError("panel has " + std::to_string(panel.labels.size()) +
                         " labels for " + std::to_string(panel.cols()) + " columns");
    }
    if (!panel.row_labels.empty() &&
        static_cast<Eigen::Index>(panel.row_labels.size()) != panel.rows()) {
        throw InputError("panel row labels do not match the number of rows");
    }
}

PairIndex::PairIndex(int p) : p_(p) {
    if (p < 2) throw InputError("pair index needs p >= 2");
    pairs_.reserve(static_cast<std::size_t>(p) * (p - 1) / 2);
    for (int i = 0; i < p; ++i) {
        for (int j = i + 1; j < p; ++j) {
            pairs_.emplace_back(i, j);
        }
    }
}

int PairIndex::index(int i, int j) const {
    if (i == j || i < 0 || j < 0 || i >= p_ || j >= p_) {
        throw InputError("invalid pair (" + std::to_string(i) + ", " +
                         std::to_string(j) + ")");
    }
    if (i > j) std::swap(i, j);
    // offset of row i in the lexicographic enumeration, then the gap to j
    return i * p_ - i * (i + 1) / 2 + (j - i - 1);
}

std::vector<std::string> pair_labels(const Panel& panel) {
    const PairIndex idx(static_cast<int>(panel.cols()));
    std::vector<std::string> out;
    out.reserve(idx.d());
    for (const auto& [i, j] : idx.pairs()) {
        out.push_back(panel.labels[i] + ":" + panel.labels[j]);
    }
    return out;
}

}  // namespace corrchange
