#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "corrchange/bootstrap.hpp"
#include "corrchange/limit.hpp"
#include "corrchange/panel.hpp"
#include "corrchange/rng.hpp"

namespace corrchange {

enum class Distribution { normal, student_t3 };

/// Data-generating process for the simulation studies: p-variate normal or
/// t3 innovations with a target correlation matrix, optional MA(1) filter.
struct DgpSpec {
    int p = 4;
    Distribution distribution = Distribution::normal;
    double ma_coefficient = 0.0;         // theta in [0, 1); 0 disables MA(1)
    Eigen::VectorXd base_correlation;    // d entries in pair order; empty = zeros
    Eigen::VectorXd variances;           // p entries; empty = ones
    int T = 500;
    std::uint64_t seed = 0;
};

/// Correlation shift applied to all pairs at a fractional sample location.
struct BreakSpec {
    Eigen::VectorXd delta_rho;  // d entries in pair order
    double location = 0.5;      // z0 in (0, 1)
};

/// One component of the step function g: level changes at the given points,
/// starting from level 0. (z, level) means g = level for s > z until the
/// next jump.
struct StepComponent {
    std::vector<std::pair<double, double>> jumps;
};

/// Step-function local alternative: pair moments drift by
/// (M/sqrt(T)) * g(t/T) around their base level.
struct StepFunctionG {
    std::vector<StepComponent> components;  // d entries in pair order
    double magnitude = 1.0;                 // M >= 0 (0 recovers the null)
    Eigen::VectorXd variances;              // p entries; empty = ones
};

/// Draws a panel from the DGP, switching the innovation correlation factor
/// at row floor(z0*T)+1 when a break is present. Means and variances stay
/// constant throughout. Throws NotPositiveDefiniteError if the pre- or
/// post-break correlation matrix is not positive definite.
Panel generate(const DgpSpec& dgp, const std::optional<BreakSpec>& brk, Rng& rng);

/// Runs the full test (estimate_E -> standardized statistic -> compare to
/// the table's critical value) on mc_reps fresh panels and returns the
/// rejection fraction. Deterministic given the seeds in dgp and boot.
double rejection_study(const DgpSpec& dgp, const std::optional<BreakSpec>& brk,
                       int mc_reps, const BootstrapConfig& boot,
                       const QuantileTable& table, double alpha);

/// The deterministic drift C(s) of the limit under local alternatives,
/// evaluated on the inclusive grid s = m/grid_n, m = 0..grid_n, using exact
/// integration of the step function. Rows 0 and grid_n are exactly zero.
Eigen::MatrixXd drift_C(const StepFunctionG& g, int grid_n);

struct LocalPowerResult {
    double rejection_rate = 0.0;
    Eigen::VectorXd mean_process;  // Monte Carlo mean standardized process, k = 2..T
};

/// Simulates panels whose pair correlations follow
/// base + (M/sqrt(T)) g(t/T) / sqrt(v_i v_j) as piecewise-constant
/// segments, then runs the standardized test on each.
LocalPowerResult local_power_study(const StepFunctionG& g, const DgpSpec& dgp,
                                   int mc_reps, const BootstrapConfig& boot,
                                   const QuantileTable& table, double alpha);

}  // namespace corrchange
