#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

namespace corrchange {

/// A T x p block of observations, columns are variables.
struct Panel {
    Eigen::MatrixXd data;
    std::vector<std::string> labels;      // p column labels
    std::vector<std::string> row_labels;  // optional (dates), empty or size T

    Eigen::Index rows() const { return data.rows(); }
    Eigen::Index cols() const { return data.cols(); }
};

/// Builds a panel with validation; labels default to X1..Xp.
Panel make_panel(Eigen::MatrixXd data, std::vector<std::string> labels = {});

/// Throws InputError unless T >= 3, p >= 2, every entry finite and label
/// counts line up.
void check_panel(const Panel& panel);

/// Lexicographic enumeration of the d = p(p-1)/2 unordered column pairs:
/// (0,1),(0,2),...,(0,p-1),(1,2),...,(p-2,p-1).
class PairIndex {
public:
    explicit PairIndex(int p);

    int p() const noexcept { return p_; }
    int d() const noexcept { return static_cast<int>(pairs_.size()); }
    std::pair<int, int> pair(int idx) const { return pairs_.at(idx); }
    const std::vector<std::pair<int, int>>& pairs() const noexcept { return pairs_; }

    /// Position of unordered pair {i, j}; i != j required.
    int index(int i, int j) const;

private:
    int p_;
    std::vector<std::pair<int, int>> pairs_;
};

/// "A:B"-style labels for each pair, for report and CSV headers.
std::vector<std::string> pair_labels(const Panel& panel);

}  // namespace corrchange
