#pragma once

#include <cstdint>

#include "corrchange/panel.hpp"
#include "corrchange/rng.hpp"

namespace corrchange {

struct BootstrapConfig {
    int block_length = 1;        // l_T, 1 <= l_T < T
    int replications = 199;      // B >= 2
    std::uint64_t seed = 0;
};

/// Block-bootstrap estimate of the asymptotic covariance of the scaled
/// full-sample correlation vector. Symmetric PSD by construction.
struct EMatrix {
    Eigen::MatrixXd m;           // d x d
    int d = 0;
    BootstrapConfig meta;
};

/// floor(T^(1/4)), clamped to >= 1. Integer-exact (no pow rounding).
int default_block_length(int T);

/// Moving block bootstrap resample: all T - l_T + 1 overlapping blocks of
/// l_T consecutive rows, floor(T/l_T) of them drawn uniformly with
/// replacement and concatenated. Output length floor(T/l_T) * l_T.
Panel resample_panel(const Panel& panel, int block_length, Rng& rng);

/// For each of B replicates, resamples the panel, computes the scaled
/// full-sample correlation vector sqrt(T) * rho_b, and returns the sample
/// covariance of the B vectors about their bootstrap mean. Replicate b
/// draws from an independent substream of cfg.seed, so the result is
/// bit-identical for any thread count. Replicates with a constant column
/// are redrawn (up to 10 tries each) before DegenerateDataError.
EMatrix estimate_E(const Panel& panel, const BootstrapConfig& cfg);

}  // namespace corrchange
