#include "corrchange/sim.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "corrchange/core.hpp"
#include "corrchange/errors.hpp"
#include "corrchange/linalg.hpp"

namespace corrchange {

namespace {

constexpr int kMaBurnIn = 50;

Eigen::MatrixXd correlation_matrix(int p, const Eigen::VectorXd& pair_values) {
    const PairIndex pairs(p);
    Eigen::MatrixXd r = Eigen::MatrixXd::Identity(p, p);
    for (int c = 0; c < pairs.d(); ++c) {
        const auto& [i, j] = pairs.pairs()[c];
        r(i, j) = pair_values[c];
        r(j, i) = pair_values[c];
    }
    return r;
}

/// Cholesky factor of a pair-vector correlation matrix; throws
/// NotPositiveDefiniteError naming `what` if the matrix fails the PD check.
Eigen::MatrixXd correlation_factor(int p, const Eigen::VectorXd& pair_values,
                                   const std::string& what) {
    const Eigen::MatrixXd r = correlation_matrix(p, pair_values);
    if (!is_positive_definite(r, 1e-10)) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r, Eigen::EigenvaluesOnly);
        throw NotPositiveDefiniteError(
            what + " correlation matrix is not positive definite (min eigenvalue " +
                std::to_string(eig.eigenvalues().minCoeff()) + ")",
            eig.eigenvalues().minCoeff());
    }
    Eigen::LLT<Eigen::MatrixXd> llt(r);
    if (llt.info() != Eigen::Success) {
        throw NotPositiveDefiniteError(what + " correlation matrix: Cholesky failed", 0.0);
    }
    return llt.matrixL();
}

void check_dgp(const DgpSpec& dgp) {
    if (dgp.p < 2) throw InputError("DGP needs p >= 2");
    if (dgp.T < 3) throw InputError("DGP needs T >= 3");
    if (dgp.ma_coefficient < 0.0 || dgp.ma_coefficient >= 1.0) {
        throw InputError("MA coefficient must lie in [0, 1)");
    }
    const int d = dgp.p * (dgp.p - 1) / 2;
    if (dgp.base_correlation.size() != 0 && dgp.base_correlation.size() != d) {
        throw InputError("base correlation needs " + std::to_string(d) + " entries");
    }
    if (dgp.variances.size() != 0) {
        if (dgp.variances.size() != dgp.p) {
            throw InputError("variances need " + std::to_string(dgp.p) + " entries");
        }
        if ((dgp.variances.array() <= 0.0).any()) {
            throw InputError("variances must be strictly positive");
        }
    }
}

Eigen::VectorXd base_pair_vector(const DgpSpec& dgp) {
    const int d = dgp.p * (dgp.p - 1) / 2;
    return dgp.base_correlation.size() == 0 ? Eigen::VectorXd::Zero(d).eval()
                                            : dgp.base_correlation;
}

Eigen::VectorXd variance_vector(const DgpSpec& dgp) {
    return dgp.variances.size() == 0 ? Eigen::VectorXd::Ones(dgp.p).eval()
                                     : dgp.variances;
}

/// Innovation correlation factors with their first applicable observation
/// row (0-based, rows sorted ascending, first entry at row 0).
struct FactorSchedule {
    std::vector<int> start_rows;
    std::vector<Eigen::MatrixXd> factors;

    const Eigen::MatrixXd& factor_for(int row) const {
        std::size_t seg = 0;
        while (seg + 1 < start_rows.size() && row >= start_rows[seg + 1]) ++seg;
        return factors[seg];
    }
};

/// Shared generator: innovations with per-segment correlation factors,
/// optional t3 scale mixing and MA(1) filtering, constant means/variances.
Panel generate_scheduled(const DgpSpec& dgp, const FactorSchedule& schedule, Rng& rng) {
    const int T = dgp.T;
    const int p = dgp.p;
    const double theta = dgp.ma_coefficient;
    const bool ma = theta != 0.0;
    const int burn = ma ? kMaBurnIn : 0;
    const bool t3 = dgp.distribution == Distribution::student_t3;

    std::normal_distribution<double> gauss(0.0, 1.0);
    std::chi_squared_distribution<double> chi2(3.0);

    Eigen::MatrixXd out(T, p);
    Eigen::VectorXd z(p), eps(p), prev = Eigen::VectorXd::Zero(p);

    for (int t = -burn; t < T; ++t) {
        const Eigen::MatrixXd& factor = schedule.factor_for(std::max(t, 0));
        for (int i = 0; i < p; ++i) z[i] = gauss(rng);
        eps.noalias() = factor * z;
        if (t3) {
            // L z / sqrt(chi2_3) is multivariate t3 rescaled to unit variance
            eps /= std::sqrt(chi2(rng));
        }
        if (t >= 0) {
            if (ma) {
                out.row(t) = (eps + theta * prev).transpose();
            } else {
                out.row(t) = eps.transpose();
            }
        }
        if (ma) prev = eps;
    }

    const Eigen::VectorXd variances = variance_vector(dgp);
    const double ma_norm = ma ? 1.0 / std::sqrt(1.0 + theta * theta) : 1.0;
    for (int i = 0; i < p; ++i) {
        out.col(i) *= std::sqrt(variances[i]) * ma_norm;
    }

    Panel panel;
    panel.data = std::move(out);
    panel.labels.reserve(p);
    for (int i = 0; i < p; ++i) panel.labels.push_back("X" + std::to_string(i + 1));
    return panel;
}

}  // namespace

Panel generate(const DgpSpec& dgp, const std::optional<BreakSpec>& brk, Rng& rng) {
    check_dgp(dgp);
    const Eigen::VectorXd base = base_pair_vector(dgp);

    FactorSchedule schedule;
    schedule.start_rows.push_back(0);
    schedule.factors.push_back(correlation_factor(dgp.p, base, "base"));

    if (brk) {
        const int d = dgp.p * (dgp.p - 1) / 2;
        if (brk->delta_rho.size() != d) {
            throw InputError("break needs " + std::to_string(d) + " shift entries");
        }
        if (!(brk->location > 0.0) || !(brk->location < 1.0)) {
            throw InputError("break location must lie in (0, 1)");
        }
        const Eigen::VectorXd post = base + brk->delta_rho;
        const int first_post = static_cast<int>(std::floor(brk->location * dgp.T));
        schedule.start_rows.push_back(first_post);
        schedule.factors.push_back(correlation_factor(dgp.p, post, "post-break"));
    }

    return generate_scheduled(dgp, schedule, rng);
}

double rejection_study(const DgpSpec& dgp, const std::optional<BreakSpec>& brk,
                       int mc_reps, const BootstrapConfig& boot,
                       const QuantileTable& table, double alpha) {
    if (mc_reps < 1) throw InputError("need at least one Monte Carlo repetition");
    const double crit = critical_value(table, alpha);

    std::vector<std::uint8_t> rejected(static_cast<std::size_t>(mc_reps), 0);
    detail::parallel_for(static_cast<std::size_t>(mc_reps), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t rep = lo; rep < hi; ++rep) {
            Rng rng = make_stream(mix_seed(dgp.seed, kDomainDgp), rep);
            const Panel panel = generate(dgp, brk, rng);

            BootstrapConfig rep_boot = boot;
            rep_boot.seed = mix_seed(mix_seed(boot.seed, kDomainStudy), rep);
            const EMatrix e_hat = estimate_E(panel, rep_boot);

            rejected[rep] = standardized_statistic(panel, e_hat) > crit ? 1 : 0;
        }
    });

    long count = 0;
    for (const auto r : rejected) count += r;
    return static_cast<double>(count) / static_cast<double>(mc_reps);
}

Eigen::MatrixXd drift_C(const StepFunctionG& g, int grid_n) {
    if (grid_n < 1) throw InputError("drift grid must have at least one cell");
    if (g.magnitude < 0.0) throw InputError("magnitude must be >= 0");
    const int d = static_cast<int>(g.components.size());
    if (d < 1) throw InputError("step function has no components");
    if (g.variances.size() < 2) throw InputError("need at least two variances");
    const int p = static_cast<int>(g.variances.size());
    const PairIndex pairs(p);
    if (pairs.d() != d) {
        throw InputError("step function has " + std::to_string(d) +
                         " components but " + std::to_string(p) +
                         " variances imply d = " + std::to_string(pairs.d()));
    }
    if ((g.variances.array() <= 0.0).any()) {
        throw InputError("variances must be strictly positive");
    }

    bool any_nonconstant = false;
    std::vector<std::vector<std::pair<double, double>>> sorted(d);
    for (int c = 0; c < d; ++c) {
        sorted[c] = g.components[c].jumps;
        for (const auto& [z, level] : sorted[c]) {
            (void)level;
            if (!(z > 0.0) || !(z < 1.0)) {
                throw InputError("jump points must lie in (0, 1)");
            }
        }
        std::stable_sort(sorted[c].begin(), sorted[c].end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        double level = 0.0;
        for (const auto& [z, next] : sorted[c]) {
            (void)z;
            if (next != level) any_nonconstant = true;
            level = next;
        }
    }
    if (!any_nonconstant) {
        throw InputError("step function must be non-constant in some component");
    }

    Eigen::MatrixXd out(grid_n + 1, d);
    for (int c = 0; c < d; ++c) {
        const auto& [a, b] = pairs.pairs()[c];
        const double pair_scale =
            g.magnitude / std::sqrt(g.variances[a] * g.variances[b]);

        // exact integral of the step function at s, then the bridge-type
        // combination I(s) - s I(1)
        auto integral = [&](double s) {
            double acc = 0.0;
            double level = 0.0;
            double pos = 0.0;
            for (const auto& [z, next] : sorted[c]) {
                if (z >= s) break;
                acc += level * (z - pos);
                pos = z;
                level = next;
            }
            return acc + level * (s - pos);
        };

        const double total = integral(1.0);
        for (int m = 0; m <= grid_n; ++m) {
            const double s = static_cast<double>(m) / grid_n;
            out(m, c) = pair_scale * (integral(s) - s * total);
        }
    }
    return out;
}

LocalPowerResult local_power_study(const StepFunctionG& g, const DgpSpec& dgp,
                                   int mc_reps, const BootstrapConfig& boot,
                                   const QuantileTable& table, double alpha) {
    check_dgp(dgp);
    if (mc_reps < 1) throw InputError("need at least one Monte Carlo repetition");
    if (g.magnitude < 0.0) throw InputError("magnitude must be >= 0");
    const int d = dgp.p * (dgp.p - 1) / 2;
    if (static_cast<int>(g.components.size()) != d) {
        throw InputError("step function needs " + std::to_string(d) + " components");
    }

    const double crit = critical_value(table, alpha);
    const Eigen::VectorXd base = base_pair_vector(dgp);
    const Eigen::VectorXd variances = variance_vector(dgp);
    const PairIndex pairs(dgp.p);

    // union of jump points -> piecewise-constant correlation segments;
    // row t (1-based) is past jump z once t > z*T, matching generate()
    std::vector<double> breakpoints;
    std::vector<std::vector<std::pair<double, double>>> sorted_jumps(d);
    for (int c = 0; c < d; ++c) {
        sorted_jumps[c] = g.components[c].jumps;
        std::stable_sort(sorted_jumps[c].begin(), sorted_jumps[c].end(),
                         [](const auto& a, const auto& b) { return a.first < b.first; });
        for (const auto& [z, level] : sorted_jumps[c]) {
            (void)level;
            if (!(z > 0.0) || !(z < 1.0)) {
                throw InputError("jump points must lie in (0, 1)");
            }
            breakpoints.push_back(z);
        }
    }
    std::sort(breakpoints.begin(), breakpoints.end());
    breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()),
                      breakpoints.end());

    const double shrink = g.magnitude / std::sqrt(static_cast<double>(dgp.T));
    auto level_at = [&](int component, double s) {
        double level = 0.0;
        for (const auto& [z, next] : sorted_jumps[component]) {
            if (z <= s) level = next;  // level applies beyond z
        }
        return level;
    };

    FactorSchedule schedule;
    double segment_start = 0.0;
    for (std::size_t seg = 0; seg <= breakpoints.size(); ++seg) {
        const int start_row =
            seg == 0 ? 0 : static_cast<int>(std::floor(breakpoints[seg - 1] * dgp.T));
        Eigen::VectorXd rho(d);
        for (int c = 0; c < d; ++c) {
            const auto& [i, j] = pairs.pairs()[c];
            rho[c] = base[c] + shrink * level_at(c, segment_start) /
                                   std::sqrt(variances[i] * variances[j]);
        }
        schedule.start_rows.push_back(start_row);
        schedule.factors.push_back(
            correlation_factor(dgp.p, rho, "local-alternative segment"));
        if (seg < breakpoints.size()) segment_start = breakpoints[seg];
    }

    std::vector<std::uint8_t> rejected(static_cast<std::size_t>(mc_reps), 0);
    Eigen::MatrixXd processes(mc_reps, dgp.T - 1);

    detail::parallel_for(static_cast<std::size_t>(mc_reps), [&](std::size_t lo, std::size_t hi) {
        for (std::size_t rep = lo; rep < hi; ++rep) {
            Rng rng = make_stream(mix_seed(dgp.seed, kDomainDgp), rep);
            const Panel panel = generate_scheduled(dgp, schedule, rng);

            BootstrapConfig rep_boot = boot;
            rep_boot.seed = mix_seed(mix_seed(boot.seed, kDomainStudy), rep);
            const EMatrix e_hat = estimate_E(panel, rep_boot);

            const CorrPath corr = prefix_correlations(panel);
            const Eigen::MatrixXd root = inv_sqrt(e_hat.m);
            const DeviationProcess process = deviation_process(corr, root);

            rejected[rep] = process_max(process) > crit ? 1 : 0;
            processes.row(rep) = process.values.transpose();
        }
    });

    LocalPowerResult result;
    long count = 0;
    for (const auto r : rejected) count += r;
    result.rejection_rate = static_cast<double>(count) / static_cast<double>(mc_reps);
    result.mean_process = processes.colwise().mean().transpose();
    return result;
}

}  // namespace corrchange
