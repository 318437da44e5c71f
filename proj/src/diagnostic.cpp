#include "twinbeam/diagnostic.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "twinbeam/analytic.hpp"

namespace twinbeam {

namespace {

// First column (a1, b1) of exp(generator) as a function of the squeezing
// parameter s and u = log(ta), at fixed ub = log(tb), with the Jacobian
// d(a1, b1)/d(s, u). Series branches keep the S -> 0 limit smooth.
struct ColumnEval {
    double a1 = 0.0;
    double b1 = 0.0;
    Eigen::Matrix2d jac = Eigen::Matrix2d::Zero();
};

ColumnEval eval_column(double s, double u, double ub)
{
    const double mean = 0.25 * (u + ub);
    const double delta = 0.25 * (u - ub);
    const double xi = std::hypot(s, delta);

    double ch;          // cosh(xi)
    double g;           // sinhc(xi)
    double gp_over_xi;  // sinhc'(xi)/xi = (cosh(xi) - sinhc(xi))/xi^2
    if (xi < 1e-4) {
        const double x2 = xi * xi;
        ch = 1.0 + x2 / 2.0 + x2 * x2 / 24.0;
        g = 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
        gp_over_xi = 1.0 / 3.0 + x2 / 30.0;
    } else {
        ch = std::cosh(xi);
        g = std::sinh(xi) / xi;
        gp_over_xi = (ch - g) / (xi * xi);
    }

    const double em = std::exp(mean);
    ColumnEval e;
    e.a1 = em * (ch + delta * g);
    e.b1 = em * s * g;
    e.jac(0, 0) = em * s * (g + delta * gp_over_xi);
    e.jac(0, 1) = 0.25 * em * (ch + 2.0 * delta * g + delta * delta * gp_over_xi + g);
    e.jac(1, 0) = em * (g + s * s * gp_over_xi);
    e.jac(1, 1) = 0.25 * em * s * (g + delta * gp_over_xi);
    return e;
}

struct Point {
    double s = 0.0;
    double u = 0.0;  // log(ta) <= 0
};

double gain_residual(const Point& p, double ub, double eta, double ga, double gb)
{
    const ColumnEval e = eval_column(p.s, p.u, ub);
    return std::max(std::abs(eta * e.a1 * e.a1 - ga),
                    std::abs(eta * e.b1 * e.b1 - gb));
}

// Bisect s so that a1(s, u) matches the target; a1 is strictly increasing
// in s.
double solve_probe_column(double u, double ub, double a_target)
{
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 64 && eval_column(hi, u, ub).a1 < a_target; ++i)
        hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (eval_column(mid, u, ub).a1 < a_target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

// Outer bisection over u = log(ta): pick s to reproduce the probe column,
// then drive the conjugate-column mismatch to zero.
std::optional<Point> bisect_fallback(double ub, double a_target, double b_target)
{
    const auto mismatch = [&](double u) {
        const double s = solve_probe_column(u, ub, a_target);
        return eval_column(s, u, ub).b1 - b_target;
    };

    constexpr double u_floor = -30.0;
    constexpr int scan = 256;
    double prev_u = 0.0;
    double prev_f = mismatch(0.0);
    double lo = 0.0;
    double hi = 0.0;
    bool bracketed = false;
    for (int i = 1; i <= scan; ++i) {
        const double u = u_floor * static_cast<double>(i) / scan;
        const double f = mismatch(u);
        if (prev_f == 0.0 || prev_f * f < 0.0) {
            lo = prev_u;
            hi = u;
            bracketed = true;
            break;
        }
        prev_u = u;
        prev_f = f;
    }
    if (!bracketed)
        return std::nullopt;

    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (prev_f * mismatch(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    Point p;
    p.u = 0.5 * (lo + hi);
    p.s = solve_probe_column(p.u, ub, a_target);
    return p;
}

}  // namespace

double InversionResult::squeeze() const
{
    return std::acosh(std::sqrt(std::max(intrinsic_gain, 1.0)));
}

InversionResult invert_gains(const MeasurementRecord& rec, double eta,
                             const InversionOptions& opt)
{
    if (!(eta > 0.0 && eta <= 1.0))
        throw DomainError("detection transmission must lie in (0, 1]");
    if (!(opt.tb > 0.0 && opt.tb <= 1.0))
        throw DomainError("assumed conjugate transmission must lie in (0, 1]");
    if (!std::isfinite(rec.gain_probe) || !std::isfinite(rec.gain_conjugate) ||
        rec.gain_probe < 0.0 || rec.gain_conjugate < 0.0)
        throw DomainError("measured gains must be finite and >= 0");
    if (!(rec.gain_probe > 0.0))
        throw DomainError("measured probe gain must be positive");

    const double ga = rec.gain_probe;
    const double gb = rec.gain_conjugate;

    // Unseeded conjugate: pure absorption, S = 0 and Ta = Ga/eta exactly.
    if (gb < 1e-6 * ga) {
        const double ta = ga / eta;
        if (ta > 1.0 + 1e-12)
            throw NoSolution("probe gain exceeds the detection transmission with a dark conjugate");
        InversionResult r;
        r.intrinsic_gain = 1.0;
        r.ta = std::min(ta, 1.0);
        r.residual = gb;  // conjugate power treated as below the measurement floor
        r.converged = true;
        return r;
    }

    // With tb = 1 the output-commutator bound requires Ga - Gb <= eta for
    // every (S, Ta); equality holds only at Ta = 1.
    if (opt.tb == 1.0 && ga - gb > eta * (1.0 + 1e-9))
        throw NoSolution("gain difference exceeds the commutator bound for a loss-free conjugate");

    const double a_target = std::sqrt(ga / eta);
    const double b_target = std::sqrt(gb / eta);
    const double ub = std::log(opt.tb);

    Point p;
    p.s = std::acosh(std::sqrt(std::max(ga / eta, 1.0)));
    p.u = 0.0;
    double res = gain_residual(p, ub, eta, ga, gb);

    for (int it = 0; it < opt.max_iterations && res > opt.tolerance; ++it) {
        const ColumnEval e = eval_column(p.s, p.u, ub);
        const Eigen::Vector2d f(e.a1 - a_target, e.b1 - b_target);
        const Eigen::Vector2d step = e.jac.partialPivLu().solve(f);
        if (!step.allFinite())
            break;

        bool improved = false;
        double lambda = 1.0;
        for (int half = 0; half < 60; ++half) {
            Point trial;
            trial.s = std::max(p.s - lambda * step(0), 0.0);
            trial.u = std::min(p.u - lambda * step(1), 0.0);
            const double trial_res = gain_residual(trial, ub, eta, ga, gb);
            if (trial_res < res) {
                p = trial;
                res = trial_res;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!improved)
            break;
    }

    if (res > opt.tolerance) {
        const auto fallback = bisect_fallback(ub, a_target, b_target);
        if (!fallback)
            throw NoSolution("no medium parameters reproduce both measured gains");
        const double fres = gain_residual(*fallback, ub, eta, ga, gb);
        if (fres < res) {
            p = *fallback;
            res = fres;
        }
        if (res > opt.tolerance)
            throw NotConverged("gain inversion stalled at residual " + std::to_string(res));
    }

    InversionResult r;
    const double c = std::cosh(p.s);
    r.intrinsic_gain = c * c;
    r.ta = std::exp(p.u);
    r.residual = res;
    r.converged = true;
    return r;
}

NoiseResult predict_squeezing(const InversionResult& inv, double eta)
{
    if (!inv.converged)
        throw DomainError("cannot predict squeezing from an unconverged inversion");
    return nf_forward_closed(inv.squeeze(), inv.ta, eta);
}

double excess_noise_db(double measured_db, double background_db)
{
    if (!std::isfinite(measured_db) || !std::isfinite(background_db))
        throw DomainError("noise levels must be finite");
    const double corrected = linear_from_db(measured_db) - (linear_from_db(background_db) - 1.0);
    if (corrected <= 0.0)
        throw DomainError("background noise exceeds the measured level");
    return db_from_linear(corrected);
}

}  // namespace twinbeam
