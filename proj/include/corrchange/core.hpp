#pragma once

#include <optional>

#include "corrchange/bootstrap.hpp"
#include "corrchange/panel.hpp"

namespace corrchange {

/// Pairwise correlations computed from the first k observations, one row
/// per prefix length k = 2..T, one column per unordered pair. Entries where
/// either prefix variance is zero are flagged undefined instead of NaN.
struct CorrPath {
    Eigen::MatrixXd rho;                         // (T-1) x d, row k-2 <-> prefix k
    Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> defined;
    int T = 0;
    PairIndex pairs{2};

    int d() const noexcept { return pairs.d(); }
    /// Row index for prefix length k.
    Eigen::Index row_of(int k) const { return k - 2; }
    bool row_defined(int k) const { return defined.row(row_of(k)).all(); }
};

/// The weighted fluctuation process (k/sqrt(T)) * ||P_{k,T}||_1 for
/// k = 2..T, optionally after standardizing P_{k,T}. Rows touching an
/// undefined prefix correlation are excluded from maxima via `defined`
/// and carry value 0.
struct DeviationProcess {
    Eigen::VectorXd values;       // length T-1, entry k-2 <-> prefix k
    std::vector<bool> defined;
    bool standardized = false;
    int T = 0;

    int k_at(Eigen::Index i) const { return static_cast<int>(i) + 2; }
};

/// Streaming single pass over the panel: Welford-style running means and
/// compensated co-moment sums, O(T * d) total.
CorrPath prefix_correlations(const Panel& panel);

/// Full-sample pairwise correlation vector (the last CorrPath row).
/// Throws DegenerateDataError if any column is constant.
Eigen::VectorXd full_correlations(const Panel& panel);

/// Builds the deviation process from a correlation path. With e_inv_sqrt
/// present each P_{k,T} is left-multiplied by it before taking the L1 norm.
DeviationProcess deviation_process(const CorrPath& corr,
                                   const std::optional<Eigen::MatrixXd>& e_inv_sqrt = std::nullopt);

/// Maximum of the process over defined rows. Throws DegenerateDataError
/// if no row is defined.
double process_max(const DeviationProcess& process);

/// Q_T = max_k (k/sqrt(T)) ||P_{k,T}||_1 over unordered pairs.
/// Throws DegenerateDataError if a column is constant over the full sample.
double q_statistic(const Panel& panel);

/// max_k (k/sqrt(T)) ||E^{-1/2} P_{k,T}||_1, to be compared against
/// quantiles of the d-dimensional Brownian bridge limit law.
double standardized_statistic(const Panel& panel, const EMatrix& e_hat);

/// Smallest k attaining the maximum of the process (ties break low).
int changepoint_estimate(const DeviationProcess& process);

}  // namespace corrchange
