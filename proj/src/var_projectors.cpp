#include "wavesplit/var_projectors.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

namespace wavesplit {

BlockOperator::BlockOperator(OperatorMatrix b00, OperatorMatrix b01, OperatorMatrix b10, OperatorMatrix b11)
    : blocks_{std::move(b00), std::move(b01), std::move(b10), std::move(b11)} {
    for (std::size_t i = 1; i < 4; ++i) {
        require_same_grid(blocks_[0].grid(), blocks_[i].grid(), "block operator");
    }
}

BlockOperator BlockOperator::identity(const GridSpec& grid) {
    return diagonal(OperatorMatrix::identity(grid));
}

BlockOperator BlockOperator::diagonal(const OperatorMatrix& op) {
    const OperatorMatrix z = OperatorMatrix::zero(op.grid());
    return BlockOperator(op, z, z, op);
}

Eigen::MatrixXd BlockOperator::dense() const {
    const auto n = static_cast<Eigen::Index>(grid().n_points());
    Eigen::MatrixXd m(2 * n, 2 * n);
    m.topLeftCorner(n, n) = block(0, 0).matrix();
    m.topRightCorner(n, n) = block(0, 1).matrix();
    m.bottomLeftCorner(n, n) = block(1, 0).matrix();
    m.bottomRightCorner(n, n) = block(1, 1).matrix();
    return m;
}

StateVec BlockOperator::apply(const StateVec& s) const {
    require_same_grid(grid(), s.grid(), "block apply");
    return StateVec(block(0, 0).apply(s.u) + block(0, 1).apply(s.v),
                    block(1, 0).apply(s.u) + block(1, 1).apply(s.v));
}

BlockOperator operator*(const BlockOperator& x, const BlockOperator& y) {
    require_same_grid(x.grid(), y.grid(), "block compose");
    auto entry = [&](std::size_t r, std::size_t c) {
        return x.block(r, 0) * y.block(0, c) + x.block(r, 1) * y.block(1, c);
    };
    return BlockOperator(entry(0, 0), entry(0, 1), entry(1, 0), entry(1, 1));
}

BlockOperator operator+(const BlockOperator& x, const BlockOperator& y) {
    return BlockOperator(x.block(0, 0) + y.block(0, 0), x.block(0, 1) + y.block(0, 1),
                         x.block(1, 0) + y.block(1, 0), x.block(1, 1) + y.block(1, 1));
}

BlockOperator operator-(const BlockOperator& x, const BlockOperator& y) {
    return BlockOperator(x.block(0, 0) - y.block(0, 0), x.block(0, 1) - y.block(0, 1),
                         x.block(1, 0) - y.block(1, 0), x.block(1, 1) - y.block(1, 1));
}

BlockOperator operator*(double s, const BlockOperator& x) {
    return BlockOperator(s * x.block(0, 0), s * x.block(0, 1), s * x.block(1, 0), s * x.block(1, 1));
}

BlockOperator compress(const BlockOperator& x, const OperatorMatrix& s) {
    return BlockOperator(s * x.block(0, 0) * s, s * x.block(0, 1) * s, s * x.block(1, 0) * s,
                         s * x.block(1, 1) * s);
}

double op_norm(const BlockOperator& op) {
    double worst = 0.0;
    for (std::size_t r = 0; r < 2; ++r) {
        const Eigen::VectorXd rows = op.block(r, 0).matrix().cwiseAbs().rowwise().sum() +
                                     op.block(r, 1).matrix().cwiseAbs().rowwise().sum();
        worst = std::max(worst, rows.maxCoeff());
    }
    return worst;
}

BlockOperator build_evolution_operator(const Discretization& disc, const CoefficientSet& coeffs) {
    require_same_grid(disc.grid(), coeffs.grid(), "build_evolution_operator");
    const OperatorMatrix& d = disc.derivative();
    return BlockOperator(build_multiplier(coeffs.a()) * d, build_multiplier(coeffs.b()) * d,
                         build_multiplier(coeffs.c()) * d, build_multiplier(coeffs.d()) * d);
}

namespace {

void require_particular(const CoefficientSet& coeffs) {
    if (!coeffs.is_particular(1e-14)) {
        throw Error(ErrorCode::WrongRegime, "split projectors require a = d = 0");
    }
    if ((coeffs.b() * coeffs.c()).min() <= 0.0) {
        throw Error(ErrorCode::NonPositiveBC, "bc must be positive everywhere");
    }
}

} // namespace

SplitProjectors build_split_projectors(const Discretization& disc, const CoefficientSet& coeffs) {
    require_same_grid(disc.grid(), coeffs.grid(), "build_split_projectors");
    require_particular(coeffs);
    const GridSpec& grid = disc.grid();

    Field f = (coeffs.c() / coeffs.b()).map([](double x) { return std::sqrt(x); });
    const Field fp = disc.differentiate(f);
    OperatorMatrix lower = build_multiplier(f) - disc.antiderivative() * build_multiplier(fp);

    Eigen::PartialPivLU<Eigen::MatrixXd> lu(lower.matrix());
    if (!(lu.rcond() > 1e-12)) {
        throw Error(ErrorCode::SingularFactorization, "f - D^-1 f' is numerically singular");
    }
    OperatorMatrix upper(grid, lu.inverse());

    const OperatorMatrix id = OperatorMatrix::identity(grid);
    BlockOperator p1(0.5 * id, 0.5 * upper, 0.5 * lower, 0.5 * id);
    BlockOperator p2(0.5 * id, -0.5 * upper, -0.5 * lower, 0.5 * id);
    return SplitProjectors{std::move(p1), std::move(p2), std::move(lower), std::move(upper), std::move(f)};
}

ModePair project_modes(const SplitProjectors& proj, const StateVec& state) {
    const Field w = proj.upper.apply(state.v);
    return ModePair(0.5 * (state.u + w), 0.5 * (state.u - w));
}

StateVec recombine_modes(const SplitProjectors& proj, const ModePair& modes) {
    return StateVec(modes.pi + modes.lambda, proj.lower.apply(modes.pi - modes.lambda));
}

StateVec pure_mode_state(const SplitProjectors& proj, const Field& profile, ModeKind which) {
    const Field v = proj.lower.apply(profile);
    return StateVec(profile, which == ModeKind::pi ? v : -v);
}

BlockOperator idempotent_from_blocks(const OperatorMatrix& p, const OperatorMatrix& pi) {
    require_same_grid(p.grid(), pi.grid(), "idempotent_from_blocks");
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(pi.matrix());
    const double rcond = lu.rcond();
    if (!(rcond > 0.0) || 1.0 / rcond > 1e12) {
        throw Error(ErrorCode::SingularPi, "pi is numerically singular (condition estimate > 1e12)");
    }
    const OperatorMatrix pi_inv(pi.grid(), lu.inverse());
    const OperatorMatrix id = OperatorMatrix::identity(p.grid());
    return BlockOperator(p, pi, pi_inv * (p - p * p), id - pi_inv * p * pi);
}

SplitDiagnostics commutator_diagnostics(const Discretization& disc, const CoefficientSet& coeffs) {
    const SplitProjectors proj = build_split_projectors(disc, coeffs);
    const BlockOperator l = build_evolution_operator(disc, coeffs);
    const GridSpec& grid = disc.grid();
    const OperatorMatrix s = resolved_projector(grid);
    const BlockOperator id = BlockOperator::identity(grid);
    auto restricted = [&](const BlockOperator& x) { return op_norm(compress(x, s)); };

    SplitDiagnostics diag;
    diag.idempotency_defect =
        std::max(restricted(proj.p1 * proj.p1 - proj.p1), restricted(proj.p2 * proj.p2 - proj.p2));
    diag.completeness_defect = restricted(proj.p1 + proj.p2 - id);
    diag.orthogonality_defect = std::max(restricted(proj.p1 * proj.p2), restricted(proj.p2 * proj.p1));
    diag.commutator_norm = restricted(proj.p1 * l - l * proj.p1);
    diag.obstruction_norm = field_norm(diag_obstruction(disc, coeffs), NormKind::linf);

    const OperatorMatrix& d = disc.derivative();
    const OperatorMatrix& dinv = disc.antiderivative();
    const OperatorMatrix via_f = dinv * build_multiplier(proj.f) * d;
    const Field finv = Field::constant(grid, 1.0) / proj.f;
    const OperatorMatrix via_finv = dinv * build_multiplier(finv) * d;
    diag.identity_defect = op_norm(s * (proj.lower - via_f) * s);
    diag.inverse_identity_defect = op_norm(s * (proj.upper - via_finv) * s);
    diag.evolution_norm = op_norm(l);
    return diag;
}

} // namespace wavesplit
