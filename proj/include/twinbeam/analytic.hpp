#pragma once

#include "twinbeam/types.hpp"

namespace twinbeam {

/// Detected beam powers relative to the incident probe power.
struct GainPair {
    double probe = 0.0;
    double conjugate = 0.0;
};

/// Ideal mixing with perfect detection: NF = 1 / (2G - 1).
NoiseResult nf_ideal(double gain);

/// Lossless mixing followed by detection losses only.
NoiseResult nf_post_loss(double gain, const DetectionParams& det);

/// Full continuum gain/loss model: matrix exponential of the medium
/// generator plus the Sylvester-equation vacuum sum, then detection loss.
NoiseResult nf_general(const MediumParams& m, const DetectionParams& det);

/// Closed form for probe-only absorption (tb = 1) with balanced detection.
NoiseResult nf_forward_closed(double squeeze, double ta, double eta);

/// Closed form for conjugate-only absorption (ta = 1, the reverse
/// configuration) with balanced detection.
NoiseResult nf_reverse_closed(double squeeze, double tb, double eta);

/// Effective gains (G_a, G_b) from the first column of exp(generator),
/// scaled by the detection transmissions.
GainPair effective_gains(const MediumParams& m, const DetectionParams& det);

struct TransmissionOptimum {
    double ta = 1.0;
    NoiseResult noise;
};

/// Probe transmission minimising the forward-configuration noise figure:
/// 100-point bracketing grid over (0, 1] followed by golden-section search
/// to |delta ta| <= 1e-8.
TransmissionOptimum optimal_probe_transmission(double squeeze, double eta);

}  // namespace twinbeam
