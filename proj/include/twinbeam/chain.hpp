#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "twinbeam/types.hpp"

namespace twinbeam {

/// Discretisation of the medium into N interleaved squeeze/loss stages.
struct ChainConfig {
    MediumParams medium;
    std::int64_t stages = 1;
    std::int64_t max_stages = 10'000'000;  ///< ResourceError above this

    double stage_squeeze() const;  ///< s = S / N
    double stage_ta() const;       ///< t_a = Ta^(1/2N), amplitude per stage
    double stage_tb() const;

    void validate() const;
};

/// Expansion coefficients of the output probe (alpha) and conjugate (beta)
/// operators over the 2N+2 input modes, ordered seed probe, seed conjugate,
/// then the per-stage probe/conjugate vacuum pairs.
struct CoefficientSet {
    std::vector<double> alpha;
    std::vector<double> beta;

    /// Canonical commutator of the output probe operator: the signed sum
    /// over annihilation (+) and creation (-) mode coefficients. Equals 1
    /// for any physical chain.
    double alpha_commutator() const;

    /// Same for the output conjugate operator; equals -1.
    double beta_commutator() const;
};

/// Single-stage transfer matrix (not symmetric when ta != tb).
Eigen::Matrix2d stage_matrix(const ChainConfig& cfg);

/// All 2N+2 coefficients by right-to-left accumulation of stage products.
CoefficientSet chain_coefficients(const ChainConfig& cfg);

/// Brute-force noise figure of the N-stage chain including final detection
/// loss. Streams the per-stage vacuum contributions without materialising
/// the coefficient lists, with compensated summation.
NoiseResult nf_discrete(const ChainConfig& cfg, const DetectionParams& det);

struct ConvergenceRow {
    std::int64_t stages = 0;
    double nf = 0.0;
    double abs_error = 0.0;  ///< |nf - nf_general|
};

/// Discrete-vs-continuum error table over an ascending list of stage counts.
std::vector<ConvergenceRow> convergence_table(const MediumParams& m,
                                              const DetectionParams& det,
                                              const std::vector<std::int64_t>& stage_counts);

}  // namespace twinbeam
