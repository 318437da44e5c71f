#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace twinbeam {

// Inputs outside the physical domain (transmissions, efficiencies, gains).
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// The 3x3 Sylvester system has a zero eigenvalue-sum and cannot be solved;
// callers are expected to handle the lossless case before solving.
struct SingularSystem : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A requested chain exceeds the configured stage budget.
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Measured gains are inconsistent with any medium parameters.
struct NoSolution : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Iterative inversion exhausted its budget above tolerance.
struct NotConverged : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Mixing medium: squeezing accumulated over the cell plus the intensity
/// transmissions each beam would see in the absence of mixing.
struct MediumParams {
    double squeeze = 0.0;  ///< squeezing parameter S >= 0
    double ta = 1.0;       ///< probe intensity transmission, (0, 1]
    double tb = 1.0;       ///< conjugate intensity transmission, (0, 1]

    /// Intrinsic mixing gain G = cosh^2 S.
    double intrinsic_gain() const
    {
        const double c = std::cosh(squeeze);
        return c * c;
    }

    /// Build from intrinsic gain instead of the squeezing parameter.
    static MediumParams from_gain(double gain, double ta = 1.0, double tb = 1.0);

    void validate() const;
};

/// Post-medium intensity transmissions (optics plus detector efficiency).
struct DetectionParams {
    double eta_a = 1.0;  ///< probe detection transmission, (0, 1]
    double eta_b = 1.0;  ///< conjugate detection transmission, (0, 1]

    static DetectionParams balanced(double eta) { return {eta, eta}; }

    void validate() const;
};

/// Hyperbolic parameters of the closed-form noise-figure expressions:
/// xi is the hyperbolic rotation rate of the medium generator, chi the
/// gain/loss asymmetry angle with tanh(chi) = (log ta - log tb) / (4 xi).
struct ClosedFormParams {
    double xi = 0.0;
    double chi = 0.0;
};

/// Noise figure split into shot-noise, mixing-correlation and injected-vacuum
/// contributions, each in units of the shot-noise level.
struct VarianceBreakdown {
    double snl_term = 1.0;
    double mixing_term = 0.0;  ///< <= 0 when the beams are squeezed
    double vacuum_term = 0.0;  ///< vacuum injected by in-medium loss, >= 0

    double total() const { return snl_term + mixing_term + vacuum_term; }
};

/// Relative-intensity noise of the twin beams. All quantities are
/// dimensionless; variance_rel and snl_rel are in units of the incident
/// probe photon number.
struct NoiseResult {
    double nf_linear = 1.0;
    double nf_db = 0.0;
    double variance_rel = 0.0;
    double snl_rel = 0.0;  ///< equals gain_probe + gain_conjugate
    double gain_probe = 0.0;
    double gain_conjugate = 0.0;
    VarianceBreakdown breakdown;
};

inline double db_from_linear(double nf) { return 10.0 * std::log10(nf); }
inline double linear_from_db(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace twinbeam
