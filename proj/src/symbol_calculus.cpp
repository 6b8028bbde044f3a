#include "wavesplit/symbol_calculus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wavesplit {

namespace {

void check_pointwise(const Field& a, const Field& b, const Field& c, const Field& d) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (b[i] == 0.0) {
            throw Error(ErrorCode::DegenerateB, "b vanishes at grid index " + std::to_string(i));
        }
        const double disc = (a[i] - d[i]) * (a[i] - d[i]) + 4.0 * b[i] * c[i];
        if (!(disc > 0.0)) {
            throw NotHyperbolicAt(i, "(a-d)^2 + 4bc = " + std::to_string(disc) +
                                         " at grid index " + std::to_string(i));
        }
    }
}

} // namespace

CoefficientSet CoefficientSet::create(Field a, Field b, Field c, Field d, double epsilon_hint) {
    require_same_grid(a.grid(), b.grid(), "coefficients");
    require_same_grid(a.grid(), c.grid(), "coefficients");
    require_same_grid(a.grid(), d.grid(), "coefficients");
    if (!(epsilon_hint >= 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "epsilon_hint must be nonnegative");
    }
    check_pointwise(a, b, c, d);
    return CoefficientSet(std::move(a), std::move(b), std::move(c), std::move(d), epsilon_hint);
}

CoefficientSet CoefficientSet::particular(Field b, Field c, double epsilon_hint) {
    const GridSpec grid = b.grid();
    return create(Field::zeros(grid), std::move(b), std::move(c), Field::zeros(grid), epsilon_hint);
}

bool CoefficientSet::is_particular(double tol) const {
    return a_.values().cwiseAbs().maxCoeff() <= tol && d_.values().cwiseAbs().maxCoeff() <= tol;
}

double CoefficientSet::max_speed() const {
    const QPair q = q_pm(*this);
    return std::max(q.plus.values().cwiseAbs().maxCoeff(), q.minus.values().cwiseAbs().maxCoeff());
}

QPair q_pm(const CoefficientSet& coeffs) {
    const Field& a = coeffs.a();
    const Field& b = coeffs.b();
    const Field& c = coeffs.c();
    const Field& d = coeffs.d();
    check_pointwise(a, b, c, d);

    const auto n = static_cast<Eigen::Index>(a.size());
    Eigen::VectorXd plus(n);
    Eigen::VectorXd minus(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double ai = a.values()[i];
        const double di = d.values()[i];
        const double root = std::sqrt((ai - di) * (ai - di) + 4.0 * b.values()[i] * c.values()[i]);
        plus[i] = 0.5 * ((ai + di) + root);
        minus[i] = 0.5 * ((ai + di) - root);
    }
    return QPair{Field(a.grid(), std::move(plus)), Field(a.grid(), std::move(minus))};
}

SymbolExpansion leading_symbol(const CoefficientSet& coeffs, SymbolMode mode) {
    QPair q = q_pm(coeffs);
    const GridSpec& grid = coeffs.grid();
    return SymbolExpansion{Field::zeros(grid), mode == SymbolMode::plus ? q.plus : q.minus,
                           Field::zeros(grid), mode};
}

MatchingResiduals matching_residuals(const Discretization& disc, const CoefficientSet& coeffs,
                                     const SymbolExpansion& sym) {
    const GridSpec& grid = disc.grid();
    require_same_grid(grid, coeffs.grid(), "matching_residuals");
    require_same_grid(grid, sym.p.grid(), "matching_residuals");
    require_same_grid(grid, sym.q.grid(), "matching_residuals");
    require_same_grid(grid, sym.r.grid(), "matching_residuals");

    const Field& a = coeffs.a();
    const Field& c = coeffs.c();
    const Field& d = coeffs.d();
    const Field& p = sym.p;
    const Field& q = sym.q;
    const Field& r = sym.r;
    const Field binv = Field::constant(grid, 1.0) / coeffs.b();
    auto prime = [&](const Field& f) { return disc.differentiate(f); };

    Field res0 = -(p * binv * q) + p * prime(binv * r) - q * binv * p + p * binv * a -
                 r * prime(binv * p) + d * binv * a;

    Field res1 = -(p * binv * r) - q * binv * q + r * binv * p - r * prime(binv * q) + q * binv * a +
                 r * prime(binv * a) + d * binv * q + c - d * binv * q;

    Field res2 = -(q * binv * r) - r * binv * q - r * prime(binv * r) + r * binv * a + d * binv * r;

    return MatchingResiduals{std::move(res0), std::move(res1), std::move(res2)};
}

Field diag_obstruction(const Discretization& disc, const CoefficientSet& coeffs) {
    require_same_grid(disc.grid(), coeffs.grid(), "diag_obstruction");
    if (!coeffs.is_particular(1e-14)) {
        throw Error(ErrorCode::WrongRegime, "diagonalization obstruction requires a = d = 0");
    }
    const Field& b = coeffs.b();
    const Field& c = coeffs.c();
    if ((b * c).min() <= 0.0) {
        throw Error(ErrorCode::NonPositiveBC, "bc must be positive everywhere");
    }
    const Field bp = disc.differentiate(b);
    const Field cp = disc.differentiate(c);
    return 0.5 * disc.antidifferentiate(cp - (bp / b) * c);
}

} // namespace wavesplit
