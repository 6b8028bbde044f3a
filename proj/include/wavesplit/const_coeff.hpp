#pragma once

#include <complex>

#include <Eigen/Dense>

#include "wavesplit/grid.hpp"

namespace wavesplit {

/// Coefficients of u_t = a u_x + b v_x, v_t = c u_x + d v_x.
struct ConstCoeffs {
    double a = 0.0;
    double b = 1.0;
    double c = 1.0;
    double d = 0.0;

    /// (a - d)^2 + 4bc
    double discriminant() const { return (a - d) * (a - d) + 4.0 * b * c; }
};

/// Eigenvectors are normalized to (1, v_i). Mode 1 always takes the +sqrt(delta)
/// branch. Speeds are signed: mode i obeys m_t = speed_i * m_x and therefore
/// travels with physical velocity -speed_i.
struct EigenBasis {
    double v1;
    double v2;
    double speed1;
    double speed2;
    double delta;
};

struct ModePair {
    ModePair(Field pi_, Field lambda_);

    const GridSpec& grid() const { return pi.grid(); }

    Field pi;
    Field lambda;
};

struct ConstProjectors {
    Eigen::Matrix2d p1;
    Eigen::Matrix2d p2;
};

/// Throws DegenerateB if b == 0, NotHyperbolic if the discriminant is not positive.
EigenBasis eigen_basis(const ConstCoeffs& coeffs);

/// P1 = (1, v1)^T (v2, -1) / (v2 - v1), P2 = (1, v2)^T (-v1, 1) / (v2 - v1).
/// Throws DegenerateEigenbasis when |v2 - v1| < 1e-12 * max(1, |v1|, |v2|).
ConstProjectors projectors(const EigenBasis& basis);

/// Fourier symbol of the evolution operator, ik [[a, b], [c, d]].
Eigen::Matrix2cd evolution_symbol(const ConstCoeffs& coeffs, double k);

/// sum_i lambda_i P_i with lambda_i = ik * speed_i; reproduces evolution_symbol.
Eigen::Matrix2cd spectral_synthesis(const EigenBasis& basis, double k);

/// Pi = (v2 u - v)/(v2 - v1), Lambda = (-v1 u + v)/(v2 - v1), pointwise.
ModePair split_cauchy(const StateVec& state, const EigenBasis& basis);

/// Exact translation Pi(x, t) = Pi(x + speed1 t), Lambda(x, t) = Lambda(x + speed2 t).
/// Negative t runs the translation backward.
ModePair evolve_modes(const ModePair& modes, const EigenBasis& basis, double t);

/// u = Pi + Lambda, v = v1 Pi + v2 Lambda.
StateVec reconstruct(const ModePair& modes, const EigenBasis& basis);

} // namespace wavesplit
