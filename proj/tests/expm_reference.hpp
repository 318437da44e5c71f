#pragma once

#include <Eigen/Dense>

// Scaling-and-squaring Taylor exponential, independent of the closed-form
// implementation under test.
inline Eigen::Matrix2d expm_reference(Eigen::Matrix2d a)
{
    int squarings = 0;
    double norm = a.norm();
    while (norm > 0.25) {
        a *= 0.5;
        norm *= 0.5;
        ++squarings;
    }

    Eigen::Matrix2d term = Eigen::Matrix2d::Identity();
    Eigen::Matrix2d sum = Eigen::Matrix2d::Identity();
    for (int k = 1; k <= 40 && term.norm() > 1e-20; ++k) {
        term = (term * a) / static_cast<double>(k);
        sum += term;
    }
    for (int i = 0; i < squarings; ++i)
        sum = sum * sum;
    return sum;
}
