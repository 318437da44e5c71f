#pragma once

#include <optional>

#include "twinbeam/types.hpp"

namespace twinbeam {

/// One detuning point of measured effective gains, optionally with the
/// measured relative-intensity noise.
struct MeasurementRecord {
    double detuning_mhz = 0.0;
    double gain_probe = 0.0;
    double gain_conjugate = 0.0;
    std::optional<double> nf_db;
};

/// Medium parameters recovered from a pair of measured gains.
struct InversionResult {
    double intrinsic_gain = 1.0;  ///< G = cosh^2 S, >= 1
    double ta = 1.0;              ///< inferred probe transmission, (0, 1]
    double residual = 0.0;        ///< max abs mismatch of the two gain equations
    bool converged = false;

    double squeeze() const;  ///< S = arccosh(sqrt(G))
};

struct InversionOptions {
    double tb = 1.0;           ///< assumed conjugate transmission
    double tolerance = 1e-10;  ///< on the gain mismatch
    int max_iterations = 200;  ///< Newton budget before the bisection fallback
};

/// Solve the two effective-gain equations for (G, Ta) given balanced
/// detection eta. Damped Newton on the closed-form transfer-matrix entries
/// with a nested-bisection fallback. Throws NoSolution when the gains are
/// inconsistent with any medium, NotConverged when iteration stalls.
InversionResult invert_gains(const MeasurementRecord& rec, double eta,
                             const InversionOptions& opt = {});

/// Squeezing the forward-configuration model predicts for recovered
/// parameters at detection transmission eta.
NoiseResult predict_squeezing(const InversionResult& inv, double eta);

/// Remove a measured background's excess noise power (above shot noise)
/// from a measured noise level, linearly in noise power. Throws DomainError
/// when the background exceeds the measurement.
double excess_noise_db(double measured_db, double background_db);

}  // namespace twinbeam
