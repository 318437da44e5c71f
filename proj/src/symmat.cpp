#include "twinbeam/symmat.hpp"

#include <algorithm>
#include <cmath>

namespace twinbeam {

MediumParams MediumParams::from_gain(double gain, double ta, double tb)
{
    if (!(gain >= 1.0) || !std::isfinite(gain))
        throw DomainError("intrinsic gain must satisfy G >= 1");
    MediumParams m;
    m.squeeze = std::acosh(std::sqrt(gain));
    m.ta = ta;
    m.tb = tb;
    m.validate();
    return m;
}

void MediumParams::validate() const
{
    if (!(squeeze >= 0.0) || !std::isfinite(squeeze))
        throw DomainError("squeezing parameter must be finite and >= 0");
    if (!(ta > 0.0 && ta <= 1.0))
        throw DomainError("probe transmission must lie in (0, 1]");
    if (!(tb > 0.0 && tb <= 1.0))
        throw DomainError("conjugate transmission must lie in (0, 1]");
}

void DetectionParams::validate() const
{
    if (!(eta_a > 0.0 && eta_a <= 1.0))
        throw DomainError("probe detection transmission must lie in (0, 1]");
    if (!(eta_b > 0.0 && eta_b <= 1.0))
        throw DomainError("conjugate detection transmission must lie in (0, 1]");
}

double sinhc(double x)
{
    if (std::abs(x) < 1e-4) {
        const double x2 = x * x;
        return 1.0 + x2 / 6.0 + x2 * x2 / 120.0;
    }
    return std::sinh(x) / x;
}

Mat2 medium_generator(const MediumParams& m)
{
    m.validate();
    Mat2 a;
    a << 0.5 * std::log(m.ta), m.squeeze,
         m.squeeze, 0.5 * std::log(m.tb);
    return a;
}

namespace {

// Trace/traceless split of a symmetric 2x2 matrix.
struct TracelessSplit {
    double mean;   // (a11 + a22) / 2
    double delta;  // (a11 - a22) / 2
    double off;    // a12
    double xi;     // sqrt(delta^2 + off^2), D^2 = xi^2 I
};

TracelessSplit split(const Mat2& a)
{
    TracelessSplit s;
    s.mean = 0.5 * (a(0, 0) + a(1, 1));
    s.delta = 0.5 * (a(0, 0) - a(1, 1));
    s.off = a(0, 1);
    s.xi = std::hypot(s.delta, s.off);
    return s;
}

}  // namespace

Mat2 sym_exp(const Mat2& a)
{
    const TracelessSplit s = split(a);
    const double scale = std::exp(s.mean);
    const double c = std::cosh(s.xi);
    const double k = sinhc(s.xi);
    Mat2 e;
    e << scale * (c + k * s.delta), scale * k * s.off,
         scale * k * s.off, scale * (c - k * s.delta);
    return e;
}

Mat2 sylvester_solve(const Mat2& a0, const Mat2& rhs)
{
    const double a = a0(0, 0);
    const double b = a0(0, 1);
    const double c = a0(1, 1);

    // Rows correspond to the (0,0), (0,1) and (1,1) entries of
    // A0 X + X A0 with unknowns (x11, x12, x22).
    Eigen::Matrix3d sys;
    sys << 2.0 * a, 2.0 * b, 0.0,
           b, a + c, b,
           0.0, 2.0 * b, 2.0 * c;

    const double scale = sys.cwiseAbs().maxCoeff();
    const double det = sys.determinant();
    if (scale == 0.0 || std::abs(det) < 1e-14 * scale * scale * scale)
        throw SingularSystem("Sylvester system is singular: two eigenvalues of the generator sum to zero");

    const Eigen::Vector3d r(rhs(0, 0), rhs(0, 1), rhs(1, 1));
    const Eigen::Vector3d x = sys.partialPivLu().solve(r);

    Mat2 out;
    out << x(0), x(1), x(1), x(2);
    return out;
}

Mat2 vacuum_rhs(const MediumParams& m)
{
    const Mat2 e = sym_exp(medium_generator(m));
    const double t00 = -std::log(m.ta);
    const double t11 = -std::log(m.tb);
    // exp(A0) T exp(A0) - T, assembled entry-wise so the result is
    // symmetric to the last bit
    const double off = e(0, 0) * t00 * e(0, 1) + e(0, 1) * t11 * e(1, 1);
    Mat2 rhs;
    rhs << e(0, 0) * e(0, 0) * t00 + e(0, 1) * e(0, 1) * t11 - t00, off,
           off, e(0, 1) * e(0, 1) * t00 + e(1, 1) * e(1, 1) * t11 - t11;
    return rhs;
}

ClosedFormParams closed_form_params(const MediumParams& m)
{
    const TracelessSplit s = split(medium_generator(m));
    ClosedFormParams p;
    p.xi = s.xi;
    if (s.xi == 0.0)
        return p;
    // |delta/xi| <= 1 analytically but may round above 1
    const double r = std::clamp(s.delta / s.xi, -1.0 + 1e-15, 1.0 - 1e-15);
    p.chi = std::atanh(r);
    return p;
}

}  // namespace twinbeam
