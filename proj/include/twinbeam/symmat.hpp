#pragma once

#include <Eigen/Dense>

#include "twinbeam/types.hpp"

namespace twinbeam {

using Mat2 = Eigen::Matrix2d;
using Vec2 = Eigen::Vector2d;

/// sinh(x)/x with a series branch near zero (sinhc(0) = 1).
double sinhc(double x);

/// Generator of the continuum gain/loss evolution,
/// [[log(ta)/2, S], [S, log(tb)/2]].
Mat2 medium_generator(const MediumParams& m);

/// Exact exponential of a symmetric 2x2 matrix via the trace/traceless
/// split: exp(A) = e^m (cosh(xi) I + sinhc(xi) D) with D = A - m I and
/// D^2 = xi^2 I.
Mat2 sym_exp(const Mat2& a);

/// Solve A0 X + X A0 = rhs for symmetric X (A0, rhs symmetric) via the
/// explicit 3x3 system over (x11, x12, x22). Throws SingularSystem when two
/// eigenvalues of A0 sum to zero.
Mat2 sylvester_solve(const Mat2& a0, const Mat2& rhs);

/// Right-hand side of the vacuum-noise Sylvester equation,
/// exp(A0) T exp(A0) - T with T = diag(-log ta, -log tb).
Mat2 vacuum_rhs(const MediumParams& m);

/// Hyperbolic parameters (xi, chi) of the closed-form expressions. xi is
/// identical (same code path) to the traceless norm used by sym_exp.
ClosedFormParams closed_form_params(const MediumParams& m);

}  // namespace twinbeam
