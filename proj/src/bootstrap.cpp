#include "corrchange/bootstrap.hpp"

#include <atomic>
#include <cmath>
#include <string>

#include "corrchange/errors.hpp"

namespace corrchange {

namespace detail_core {
bool try_full_correlations(const Eigen::MatrixXd& data, const PairIndex& pairs,
                           Eigen::VectorXd& out);
}

int default_block_length(int T) {
    if (T < 1) throw InputError("block length rule needs T >= 1");
    int l = static_cast<int>(std::floor(std::pow(static_cast<double>(T), 0.25)));
    // pow can land a hair under an exact fourth root; repair by integer checks
    while (static_cast<long long>(l + 1) * (l + 1) * (l + 1) * (l + 1) <= T) ++l;
    while (l > 1 && static_cast<long long>(l) * l * l * l > T) --l;
    return std::max(l, 1);
}

namespace {

void check_block_length(int block_length, Eigen::Index T) {
    if (block_length < 1 || block_length >= T) {
        throw InputError("block length " + std::to_string(block_length) +
                         " not in [1, T) for T = " + std::to_string(T));
    }
}

// One resample draw into a preallocated buffer, no Panel churn.
void resample_into(const Eigen::MatrixXd& data, int block_length, Rng& rng,
                   Eigen::MatrixXd& out) {
    const int T = static_cast<int>(data.rows());
    const int n_blocks = T - block_length + 1;
    const int n_draws = T / block_length;
    std::uniform_int_distribution<int> pick(0, n_blocks - 1);
    for (int b = 0; b < n_draws; ++b) {
        const int start = pick(rng);
        out.middleRows(static_cast<Eigen::Index>(b) * block_length, block_length) =
            data.middleRows(start, block_length);
    }
}

}  // namespace

Panel resample_panel(const Panel& panel, int block_length, Rng& rng) {
    check_panel(panel);
    check_block_length(block_length, panel.rows());
    const int n_draws = static_cast<int>(panel.rows()) / block_length;

    Panel out;
    out.labels = panel.labels;
    out.data.resize(static_cast<Eigen::Index>(n_draws) * block_length, panel.cols());
    resample_into(panel.data, block_length, rng, out.data);
    return out;
}

EMatrix estimate_E(const Panel& panel, const BootstrapConfig& cfg) {
    check_panel(panel);
    check_block_length(cfg.block_length, panel.rows());
    if (cfg.replications < 2) {
        throw InputError("bootstrap needs B >= 2, got " +
                         std::to_string(cfg.replications));
    }

    const int T = static_cast<int>(panel.rows());
    const PairIndex pairs(static_cast<int>(panel.cols()));
    const int d = pairs.d();
    const int B = cfg.replications;
    const double scale = std::sqrt(static_cast<double>(T));
    const Eigen::Index resampled_rows =
        static_cast<Eigen::Index>(T / cfg.block_length) * cfg.block_length;
    constexpr int kMaxRedraws = 10;

    Eigen::MatrixXd replicates(B, d);
    std::atomic<bool> degenerate{false};

    detail::parallel_for(static_cast<std::size_t>(B), [&](std::size_t lo, std::size_t hi) {
        Eigen::MatrixXd buffer(resampled_rows, panel.cols());
        Eigen::VectorXd corr(d);
        for (std::size_t b = lo; b < hi; ++b) {
            Rng rng = make_stream(cfg.seed, b);
            bool ok = false;
            for (int attempt = 0; attempt < kMaxRedraws && !ok; ++attempt) {
                resample_into(panel.data, cfg.block_length, rng, buffer);
                ok = detail_core::try_full_correlations(buffer, pairs, corr);
            }
            if (!ok) {
                degenerate.store(true, std::memory_order_relaxed);
                replicates.row(b).setZero();
                continue;
            }
            replicates.row(b) = scale * corr.transpose();
        }
    });

    if (degenerate.load()) {
        throw DegenerateDataError(
            "a bootstrap replicate stayed degenerate after " +
            std::to_string(kMaxRedraws) + " redraws (constant column)");
    }

    const Eigen::RowVectorXd mean = replicates.colwise().mean();
    const Eigen::MatrixXd centered = replicates.rowwise() - mean;

    EMatrix out;
    out.d = d;
    out.meta = cfg;
    out.m = centered.transpose() * centered / static_cast<double>(B - 1);
    return out;
}

}  // namespace corrchange
