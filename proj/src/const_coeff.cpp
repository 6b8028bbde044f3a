#include "wavesplit/const_coeff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wavesplit {

ModePair::ModePair(Field pi_, Field lambda_) : pi(std::move(pi_)), lambda(std::move(lambda_)) {
    require_same_grid(pi.grid(), lambda.grid(), "mode pair");
}

EigenBasis eigen_basis(const ConstCoeffs& coeffs) {
    if (coeffs.b == 0.0) {
        throw Error(ErrorCode::DegenerateB, "b must be nonzero to normalize eigenvectors");
    }
    const double delta = coeffs.discriminant();
    if (!(delta > 0.0)) {
        throw Error(ErrorCode::NotHyperbolic,
                    "discriminant (a-d)^2 + 4bc = " + std::to_string(delta) + " is not positive");
    }
    const double root = std::sqrt(delta);
    EigenBasis basis{};
    basis.delta = delta;
    basis.v1 = ((coeffs.d - coeffs.a) + root) / (2.0 * coeffs.b);
    basis.v2 = ((coeffs.d - coeffs.a) - root) / (2.0 * coeffs.b);
    basis.speed1 = 0.5 * ((coeffs.a + coeffs.d) + root);
    basis.speed2 = 0.5 * ((coeffs.a + coeffs.d) - root);
    return basis;
}

namespace {

double checked_gap(const EigenBasis& basis) {
    const double gap = basis.v2 - basis.v1;
    const double scale = std::max({1.0, std::abs(basis.v1), std::abs(basis.v2)});
    if (std::abs(gap) < 1e-12 * scale) {
        throw Error(ErrorCode::DegenerateEigenbasis, "eigenvector components coincide");
    }
    return gap;
}

} // namespace

ConstProjectors projectors(const EigenBasis& basis) {
    const double gap = checked_gap(basis);
    const double v1 = basis.v1;
    const double v2 = basis.v2;
    ConstProjectors p;
    p.p1 << v2, -1.0, v1 * v2, -v1;
    p.p2 << -v1, 1.0, -v1 * v2, v2;
    p.p1 /= gap;
    p.p2 /= gap;
    return p;
}

Eigen::Matrix2cd evolution_symbol(const ConstCoeffs& coeffs, double k) {
    Eigen::Matrix2d m;
    m << coeffs.a, coeffs.b, coeffs.c, coeffs.d;
    return std::complex<double>(0.0, k) * m.cast<std::complex<double>>();
}

Eigen::Matrix2cd spectral_synthesis(const EigenBasis& basis, double k) {
    const ConstProjectors p = projectors(basis);
    const std::complex<double> l1(0.0, k * basis.speed1);
    const std::complex<double> l2(0.0, k * basis.speed2);
    return l1 * p.p1.cast<std::complex<double>>() + l2 * p.p2.cast<std::complex<double>>();
}

ModePair split_cauchy(const StateVec& state, const EigenBasis& basis) {
    const double gap = checked_gap(basis);
    Field pi = (1.0 / gap) * (basis.v2 * state.u - state.v);
    Field lambda = (1.0 / gap) * (state.v - basis.v1 * state.u);
    return ModePair(std::move(pi), std::move(lambda));
}

ModePair evolve_modes(const ModePair& modes, const EigenBasis& basis, double t) {
    if (!std::isfinite(t)) {
        throw Error(ErrorCode::InvalidArgument, "evolution time must be finite");
    }
    if (t == 0.0) return modes;
    return ModePair(spectral_shift(modes.pi, basis.speed1 * t),
                    spectral_shift(modes.lambda, basis.speed2 * t));
}

StateVec reconstruct(const ModePair& modes, const EigenBasis& basis) {
    return StateVec(modes.pi + modes.lambda, basis.v1 * modes.pi + basis.v2 * modes.lambda);
}

} // namespace wavesplit
