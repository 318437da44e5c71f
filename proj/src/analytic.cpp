#include "twinbeam/analytic.hpp"

#include <cmath>
#include <limits>

#include "twinbeam/symmat.hpp"

namespace twinbeam {

namespace {

void check_gain(double gain)
{
    if (!(gain >= 1.0) || !std::isfinite(gain))
        throw DomainError("intrinsic gain must satisfy G >= 1");
}

void check_eta(double eta)
{
    if (!(eta > 0.0 && eta <= 1.0))
        throw DomainError("detection transmission must lie in (0, 1]");
}

NoiseResult assemble(double variance, double ga, double gb, double vacuum_term)
{
    NoiseResult r;
    r.gain_probe = ga;
    r.gain_conjugate = gb;
    r.snl_rel = ga + gb;
    r.variance_rel = variance;
    r.nf_linear = variance / r.snl_rel;
    r.nf_db = db_from_linear(r.nf_linear);
    r.breakdown.vacuum_term = vacuum_term;
    r.breakdown.mixing_term = r.nf_linear - 1.0 - vacuum_term;
    return r;
}

// Shot-noise-limited trivial result for an unsqueezed medium: the attenuated
// probe stays at the shot-noise limit and the conjugate is dark.
NoiseResult no_mixing_result(double ta, double eta_a)
{
    NoiseResult r;
    r.gain_probe = eta_a * ta;
    r.gain_conjugate = 0.0;
    r.snl_rel = r.gain_probe;
    r.variance_rel = r.gain_probe;
    r.nf_linear = 1.0;
    r.nf_db = 0.0;
    return r;
}

}  // namespace

NoiseResult nf_ideal(double gain)
{
    check_gain(gain);
    return assemble(1.0, gain, gain - 1.0, 0.0);
}

NoiseResult nf_post_loss(double gain, const DetectionParams& det)
{
    check_gain(gain);
    det.validate();
    const double ea = det.eta_a;
    const double eb = det.eta_b;
    const double diff = ea - eb;
    const double snl = gain * ea + (gain - 1.0) * eb;
    const double nf = 1.0 + 2.0 * (gain - 1.0) * (gain * diff * diff - eb * eb) / snl;
    return assemble(nf * snl, ea * gain, eb * (gain - 1.0), 0.0);
}

NoiseResult nf_general(const MediumParams& m, const DetectionParams& det)
{
    m.validate();
    det.validate();
    if (m.squeeze == 0.0)
        return no_mixing_result(m.ta, det.eta_a);

    const Mat2 a0 = medium_generator(m);
    const Mat2 e = sym_exp(a0);
    const Mat2 e2 = sym_exp(2.0 * a0);
    const bool lossless = (m.ta == 1.0 && m.tb == 1.0);
    const Mat2 x = lossless ? Mat2(Mat2::Zero())
                            : sylvester_solve(a0, vacuum_rhs(m));

    const Vec2 v(e(0, 0), -e(1, 0));
    Mat2 p = Mat2::Zero();
    p(0, 0) = det.eta_a;
    p(1, 1) = det.eta_b;

    const double medium_vacuum = v.dot(p * x * p * v);
    const Mat2 full = p * (e2 + x) * p + (Mat2::Identity() - p) * p;
    const double variance = v.dot(full * v);

    const double ga = det.eta_a * e(0, 0) * e(0, 0);
    const double gb = det.eta_b * e(1, 0) * e(1, 0);
    return assemble(variance, ga, gb, medium_vacuum / (ga + gb));
}

NoiseResult nf_forward_closed(double squeeze, double ta, double eta)
{
    check_eta(eta);
    const MediumParams m{squeeze, ta, 1.0};
    m.validate();
    if (squeeze == 0.0)
        return no_mixing_result(ta, eta);
    const GainPair g = effective_gains(m, DetectionParams::balanced(eta));

    const ClosedFormParams cf = closed_form_params(m);
    const double xi = cf.xi;
    const double denom = std::cosh(2.0 * xi + cf.chi);
    const double sh = std::sinh(xi);
    const double lta = std::log(ta);
    const double mixing = -eta * 2.0 * squeeze * sh * sh / (xi * denom);
    const double vacuum = eta * std::sqrt(ta) * squeeze * lta * lta * sh * sh * sh * sh
                          / (2.0 * xi * xi * xi * denom);

    NoiseResult r;
    r.nf_linear = 1.0 + mixing + vacuum;
    r.nf_db = db_from_linear(r.nf_linear);
    r.gain_probe = g.probe;
    r.gain_conjugate = g.conjugate;
    r.snl_rel = g.probe + g.conjugate;
    r.variance_rel = r.nf_linear * r.snl_rel;
    r.breakdown.mixing_term = mixing;
    r.breakdown.vacuum_term = vacuum;
    return r;
}

NoiseResult nf_reverse_closed(double squeeze, double tb, double eta)
{
    check_eta(eta);
    const MediumParams m{squeeze, 1.0, tb};
    m.validate();
    if (squeeze == 0.0)
        return no_mixing_result(1.0, eta);
    const GainPair g = effective_gains(m, DetectionParams::balanced(eta));

    const ClosedFormParams cf = closed_form_params(m);
    const double xi = cf.xi;
    const double chi = cf.chi;
    const double denom = std::cosh(2.0 * xi + chi);
    const double cxc = std::cosh(xi + chi);
    const double ltb = std::log(tb);
    const double mixing = -eta * 2.0 * squeeze * cxc * cxc / (xi * denom);
    const double core = 4.0 * squeeze - ltb * std::sinh(2.0 * xi + chi);
    const double vacuum = eta * std::sqrt(tb) * squeeze * core * core
                          / (8.0 * xi * xi * xi * denom);

    NoiseResult r;
    r.nf_linear = 1.0 + mixing + vacuum;
    r.nf_db = db_from_linear(r.nf_linear);
    r.gain_probe = g.probe;
    r.gain_conjugate = g.conjugate;
    r.snl_rel = g.probe + g.conjugate;
    r.variance_rel = r.nf_linear * r.snl_rel;
    r.breakdown.mixing_term = mixing;
    r.breakdown.vacuum_term = vacuum;
    return r;
}

GainPair effective_gains(const MediumParams& m, const DetectionParams& det)
{
    m.validate();
    det.validate();
    const Mat2 e = sym_exp(medium_generator(m));
    return {det.eta_a * e(0, 0) * e(0, 0), det.eta_b * e(1, 0) * e(1, 0)};
}

TransmissionOptimum optimal_probe_transmission(double squeeze, double eta)
{
    if (!(squeeze > 0.0) || !std::isfinite(squeeze))
        throw DomainError("optimal transmission requires squeeze > 0");
    check_eta(eta);

    const auto nf_at = [&](double ta) {
        return nf_forward_closed(squeeze, ta, eta).nf_linear;
    };

    // Bracket on a 100-point grid over (0, 1].
    constexpr int grid = 100;
    int best = grid;
    double best_nf = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= grid; ++i) {
        const double nf = nf_at(static_cast<double>(i) / grid);
        if (nf < best_nf) {
            best_nf = nf;
            best = i;
        }
    }
    double lo = static_cast<double>(std::max(best - 1, 1)) / grid;
    double hi = static_cast<double>(std::min(best + 1, grid)) / grid;

    // Golden-section refinement.
    constexpr double inv_phi = 0.6180339887498949;
    double x1 = hi - inv_phi * (hi - lo);
    double x2 = lo + inv_phi * (hi - lo);
    double f1 = nf_at(x1);
    double f2 = nf_at(x2);
    while (hi - lo > 1e-8) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = nf_at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = nf_at(x2);
        }
    }

    TransmissionOptimum opt;
    opt.ta = 0.5 * (lo + hi);
    opt.noise = nf_forward_closed(squeeze, opt.ta, eta);
    return opt;
}

}  // namespace twinbeam
