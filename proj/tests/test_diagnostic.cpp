#include <cmath>
#include <cstring>

#include <doctest.h>

#include "twinbeam/analytic.hpp"
#include "twinbeam/diagnostic.hpp"

using namespace twinbeam;

namespace {

constexpr double kEta = 0.85;

MeasurementRecord record_for(double squeeze, double ta, double eta = kEta, double tb = 1.0)
{
    const GainPair g = effective_gains({squeeze, ta, tb}, DetectionParams::balanced(eta));
    MeasurementRecord rec;
    rec.gain_probe = g.probe;
    rec.gain_conjugate = g.conjugate;
    return rec;
}

}  // namespace

TEST_CASE("lossless gains invert exactly")
{
    MeasurementRecord rec;
    rec.gain_probe = 3.0 * kEta;
    rec.gain_conjugate = 2.0 * kEta;
    const InversionResult inv = invert_gains(rec, kEta);
    CHECK(inv.converged);
    CHECK(inv.intrinsic_gain == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(inv.ta == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(inv.residual <= 1e-10);
}

TEST_CASE("round trip through the forward map")
{
    const InversionResult inv = invert_gains(record_for(0.9, 0.6), kEta);
    const double expected_gain = std::cosh(0.9) * std::cosh(0.9);
    CHECK(inv.intrinsic_gain == doctest::Approx(expected_gain).epsilon(1e-9));
    CHECK(inv.ta == doctest::Approx(0.6).epsilon(1e-9));
    CHECK(inv.squeeze() == doctest::Approx(0.9).epsilon(1e-9));
}

TEST_CASE("round-trip grid stays within 1e-8")
{
    double worst = 0.0;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
            const double s = 0.1 + (2.5 - 0.1) * i / 19.0;
            const double ta = 0.1 + 0.9 * j / 19.0;
            const InversionResult inv = invert_gains(record_for(s, ta), kEta);
            const double c = std::cosh(s);
            worst = std::max(worst, std::abs(inv.intrinsic_gain - c * c));
            worst = std::max(worst, std::abs(inv.ta - ta));
        }
    CHECK(worst <= 1e-8);
}

TEST_CASE("pure absorption maps to the unsqueezed branch")
{
    MeasurementRecord rec;
    rec.gain_probe = 0.2 * kEta;
    rec.gain_conjugate = 0.0;
    const InversionResult inv = invert_gains(rec, kEta);
    CHECK(inv.converged);
    CHECK(inv.intrinsic_gain == 1.0);
    CHECK(inv.ta == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(inv.residual == 0.0);

    rec.gain_probe = kEta;  // boundary: no loss, no mixing
    CHECK(invert_gains(rec, kEta).ta == doctest::Approx(1.0).epsilon(1e-12));

    rec.gain_probe = 1.2 * kEta;  // gain without conjugate light is impossible
    CHECK_THROWS_AS(invert_gains(rec, kEta), NoSolution);
}

TEST_CASE("infeasible gain pairs are rejected")
{
    MeasurementRecord rec;
    rec.gain_probe = 3.0 * kEta;
    rec.gain_conjugate = 0.5 * kEta;  // Ga - Gb > eta violates the commutator bound
    CHECK_THROWS_AS(invert_gains(rec, kEta), NoSolution);
}

TEST_CASE("bisection fallback recovers the same solution")
{
    InversionOptions opts;
    opts.max_iterations = 0;  // skip Newton entirely
    const InversionResult inv = invert_gains(record_for(0.9, 0.6), kEta, opts);
    CHECK(inv.converged);
    CHECK(inv.intrinsic_gain == doctest::Approx(std::cosh(0.9) * std::cosh(0.9)).epsilon(1e-8));
    CHECK(inv.ta == doctest::Approx(0.6).epsilon(1e-8));
}

TEST_CASE("inversion with an assumed conjugate transmission")
{
    InversionOptions opts;
    opts.tb = 0.9;
    const InversionResult inv = invert_gains(record_for(0.9, 0.6, kEta, 0.9), kEta, opts);
    CHECK(inv.intrinsic_gain == doctest::Approx(std::cosh(0.9) * std::cosh(0.9)).epsilon(1e-8));
    CHECK(inv.ta == doctest::Approx(0.6).epsilon(1e-8));
}

TEST_CASE("inversion is deterministic")
{
    const MeasurementRecord rec = record_for(1.7, 0.35);
    const InversionResult a = invert_gains(rec, kEta);
    const InversionResult b = invert_gains(rec, kEta);
    CHECK(std::memcmp(&a.intrinsic_gain, &b.intrinsic_gain, sizeof(double)) == 0);
    CHECK(std::memcmp(&a.ta, &b.ta, sizeof(double)) == 0);
    CHECK(std::memcmp(&a.residual, &b.residual, sizeof(double)) == 0);
}

TEST_CASE("inversion input validation")
{
    MeasurementRecord rec;
    rec.gain_probe = 1.0;
    rec.gain_conjugate = 0.5;
    CHECK_THROWS_AS(invert_gains(rec, 0.0), DomainError);
    CHECK_THROWS_AS(invert_gains(rec, 1.2), DomainError);

    rec.gain_probe = 0.0;
    CHECK_THROWS_AS(invert_gains(rec, kEta), DomainError);

    rec.gain_probe = -1.0;
    CHECK_THROWS_AS(invert_gains(rec, kEta), DomainError);

    rec.gain_probe = 1.0;
    InversionOptions opts;
    opts.tb = 0.0;
    CHECK_THROWS_AS(invert_gains(rec, kEta, opts), DomainError);
}

TEST_CASE("predicted squeezing")
{
    InversionResult lossless;
    lossless.intrinsic_gain = 3.0;
    lossless.ta = 1.0;
    lossless.converged = true;
    const NoiseResult r = predict_squeezing(lossless, kEta);
    CHECK(r.nf_linear == doctest::Approx(0.32).epsilon(1e-12));
    CHECK(r.nf_db == doctest::Approx(-4.94850021680094).epsilon(1e-9));

    const InversionResult inv = invert_gains(record_for(0.9, 0.6), kEta);
    CHECK(predict_squeezing(inv, kEta).nf_linear ==
          nf_forward_closed(inv.squeeze(), inv.ta, kEta).nf_linear);

    InversionResult trivial;
    trivial.converged = true;
    CHECK(predict_squeezing(trivial, kEta).nf_linear == 1.0);
    CHECK(predict_squeezing(trivial, kEta).nf_db == 0.0);

    InversionResult stale;
    CHECK_THROWS_AS(predict_squeezing(stale, kEta), DomainError);
}

TEST_CASE("excess noise subtraction")
{
    CHECK(excess_noise_db(2.5, 0.0) == doctest::Approx(2.5).epsilon(1e-12));

    // equal measurement and background: corrected power is exactly 1
    const double three_db = 10.0 * std::log10(2.0);
    CHECK(excess_noise_db(three_db, three_db) == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS_AS(excess_noise_db(0.0, three_db), DomainError);
    CHECK_THROWS_AS(excess_noise_db(std::nan(""), 0.0), DomainError);
}
