#include "corrchange/core.hpp"

#include <cmath>
#include <string>

#include "corrchange/errors.hpp"
#include "corrchange/linalg.hpp"

namespace corrchange {

namespace {

inline void kahan_add(double& sum, double& comp, double value) {
    const double y = value - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
}

inline double clamp_corr(double r) {
    if (r > 1.0) return 1.0;
    if (r < -1.0) return -1.0;
    return r;
}

// Running first and second moments over a growing prefix: Welford means with
// compensated accumulation of the centered (co-)moment sums. One state is
// shared by the full prefix path and the full-sample correlation routine so
// the two agree bit for bit.
struct MomentStream {
    explicit MomentStream(const PairIndex& pairs)
        : pairs_(pairs),
          mean_(Eigen::VectorXd::Zero(pairs.p())),
          m2_(Eigen::VectorXd::Zero(pairs.p())),
          m2_comp_(Eigen::VectorXd::Zero(pairs.p())),
          cross_(Eigen::VectorXd::Zero(pairs.d())),
          cross_comp_(Eigen::VectorXd::Zero(pairs.d())),
          delta_(pairs.p()),
          residual_(pairs.p()) {}

    template <typename Row>
    void absorb(const Row& x, int count_after) {
        const double inv = 1.0 / count_after;
        for (int i = 0; i < pairs_.p(); ++i) {
            delta_[i] = x[i] - mean_[i];
            mean_[i] += delta_[i] * inv;
            residual_[i] = x[i] - mean_[i];
        }
        for (int i = 0; i < pairs_.p(); ++i) {
            kahan_add(m2_[i], m2_comp_[i], delta_[i] * residual_[i]);
        }
        for (int c = 0; c < pairs_.d(); ++c) {
            const auto& [i, j] = pairs_.pairs()[c];
            kahan_add(cross_[c], cross_comp_[c], delta_[i] * residual_[j]);
        }
    }

    /// Correlation of pair c from the rows absorbed so far; false when a
    /// prefix variance vanishes.
    bool correlation(int c, double& out) const {
        const auto& [i, j] = pairs_.pairs()[c];
        if (!(m2_[i] > 0.0) || !(m2_[j] > 0.0)) return false;
        out = clamp_corr(cross_[c] / std::sqrt(m2_[i] * m2_[j]));
        return true;
    }

private:
    const PairIndex& pairs_;
    Eigen::VectorXd mean_, m2_, m2_comp_, cross_, cross_comp_, delta_, residual_;
};

}  // namespace

CorrPath prefix_correlations(const Panel& panel) {
    check_panel(panel);
    const int T = static_cast<int>(panel.rows());
    const int p = static_cast<int>(panel.cols());

    CorrPath out;
    out.T = T;
    out.pairs = PairIndex(p);
    const int d = out.pairs.d();
    out.rho.setZero(T - 1, d);
    out.defined.setConstant(T - 1, d, false);

    MomentStream stream(out.pairs);
    for (int t = 0; t < T; ++t) {
        stream.absorb(panel.data.row(t), t + 1);
        if (t == 0) continue;
        const int row = t - 1;  // prefix length k = t + 1
        for (int c = 0; c < d; ++c) {
            double r = 0.0;
            if (stream.correlation(c, r)) {
                out.rho(row, c) = r;
                out.defined(row, c) = true;
            }
        }
    }
    return out;
}

namespace detail_core {

bool try_full_correlations(const Eigen::MatrixXd& data, const PairIndex& pairs,
                           Eigen::VectorXd& out) {
    MomentStream stream(pairs);
    const int rows = static_cast<int>(data.rows());
    for (int t = 0; t < rows; ++t) {
        stream.absorb(data.row(t), t + 1);
    }
    out.resize(pairs.d());
    for (int c = 0; c < pairs.d(); ++c) {
        if (!stream.correlation(c, out[c])) return false;
    }
    return true;
}

}  // namespace detail_core

Eigen::VectorXd full_correlations(const Panel& panel) {
    check_panel(panel);
    const PairIndex pairs(static_cast<int>(panel.cols()));
    Eigen::VectorXd out;
    if (!detail_core::try_full_correlations(panel.data, pairs, out)) {
        throw DegenerateDataError(
            "full-sample correlation undefined: a column is constant");
    }
    return out;
}

DeviationProcess deviation_process(const CorrPath& corr,
                                   const std::optional<Eigen::MatrixXd>& e_inv_sqrt) {
    const int T = corr.T;
    const int d = corr.d();
    if (e_inv_sqrt) {
        if (e_inv_sqrt->rows() != d || e_inv_sqrt->cols() != d) {
            throw InputError("standardizer is " + std::to_string(e_inv_sqrt->rows()) +
                             "x" + std::to_string(e_inv_sqrt->cols()) +
                             " but the correlation path has d = " + std::to_string(d));
        }
    }

    DeviationProcess out;
    out.T = T;
    out.standardized = e_inv_sqrt.has_value();
    out.values.setZero(T - 1);
    out.defined.assign(T - 1, false);

    const Eigen::Index last = corr.rho.rows() - 1;
    const bool full_defined = corr.defined.row(last).all();
    const double root_t = std::sqrt(static_cast<double>(T));

    Eigen::VectorXd p_vec(d), standardized(d);
    for (int k = 2; k <= T; ++k) {
        const Eigen::Index row = corr.row_of(k);
        if (!full_defined || !corr.defined.row(row).all()) continue;

        p_vec = (corr.rho.row(row) - corr.rho.row(last)).transpose();
        double norm = 0.0;
        if (e_inv_sqrt) {
            standardized.noalias() = (*e_inv_sqrt) * p_vec;
            norm = standardized.cwiseAbs().sum();
        } else {
            norm = p_vec.cwiseAbs().sum();
        }
        out.values[row] = (k / root_t) * norm;
        out.defined[row] = true;
    }
    return out;
}

double process_max(const DeviationProcess& process) {
    double best = -1.0;
    for (Eigen::Index i = 0; i < process.values.size(); ++i) {
        if (process.defined[i] && process.values[i] > best) best = process.values[i];
    }
    if (best < 0.0) {
        throw DegenerateDataError("deviation process has no defined entries");
    }
    return best;
}

double q_statistic(const Panel& panel) {
    const CorrPath corr = prefix_correlations(panel);
    if (!corr.defined.row(corr.rho.rows() - 1).all()) {
        throw DegenerateDataError(
            "full-sample correlation undefined: a column is constant");
    }
    return process_max(deviation_process(corr));
}

double standardized_statistic(const Panel& panel, const EMatrix& e_hat) {
    const CorrPath corr = prefix_correlations(panel);
    if (!corr.defined.row(corr.rho.rows() - 1).all()) {
        throw DegenerateDataError(
            "full-sample correlation undefined: a column is constant");
    }
    if (e_hat.m.rows() != corr.d()) {
        throw InputError("E matrix dimension " + std::to_string(e_hat.m.rows()) +
                         " does not match d = " + std::to_string(corr.d()));
    }
    const Eigen::MatrixXd root = inv_sqrt(e_hat.m);
    return process_max(deviation_process(corr, root));
}

int changepoint_estimate(const DeviationProcess& process) {
    const double best = process_max(process);
    for (Eigen::Index i = 0; i < process.values.size(); ++i) {
        if (process.defined[i] && process.values[i] == best) {
            return process.k_at(i);
        }
    }
    throw DegenerateDataError("deviation process has no defined entries");
}

}  // namespace corrchange
