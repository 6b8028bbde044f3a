#pragma once

#include <array>

#include "wavesplit/const_coeff.hpp"
#include "wavesplit/grid.hpp"
#include "wavesplit/symbol_calculus.hpp"

namespace wavesplit {

/// 2x2 matrix of operators on one grid, acting on (u, v).
class BlockOperator {
public:
    BlockOperator(OperatorMatrix b00, OperatorMatrix b01, OperatorMatrix b10, OperatorMatrix b11);

    static BlockOperator identity(const GridSpec& grid);
    static BlockOperator diagonal(const OperatorMatrix& op);

    const GridSpec& grid() const { return blocks_[0].grid(); }
    const OperatorMatrix& block(std::size_t row, std::size_t col) const { return blocks_[2 * row + col]; }

    /// The 2N x 2N matrix [[b00, b01], [b10, b11]].
    Eigen::MatrixXd dense() const;

    StateVec apply(const StateVec& s) const;

private:
    std::array<OperatorMatrix, 4> blocks_;
};

BlockOperator operator*(const BlockOperator& lhs, const BlockOperator& rhs);
BlockOperator operator+(const BlockOperator& lhs, const BlockOperator& rhs);
BlockOperator operator-(const BlockOperator& lhs, const BlockOperator& rhs);
BlockOperator operator*(double s, const BlockOperator& op);

/// diag(s, s) * x * diag(s, s)
BlockOperator compress(const BlockOperator& x, const OperatorMatrix& s);

double op_norm(const BlockOperator& op);

/// L = [[a D, b D], [c D, d D]] with pointwise multipliers.
BlockOperator build_evolution_operator(const Discretization& disc, const CoefficientSet& coeffs);

/// Projectors for the a = d = 0 system with f = sqrt(c/b):
///
///   P1,2 = 1/2 [[ I, +-F^-1 ], [ +-F, I ]],   F = f - D^-1 f'
///
/// F is nonsingular (it is a small perturbation of the multiplier f), and F^-1
/// is its LU inverse, so P1, P2 are exact complementary idempotents on the
/// whole grid space. On the resolved zero-mean band F agrees with D^-1 f D and
/// F^-1 with D^-1 f^-1 D to first order in the inhomogeneity.
struct SplitProjectors {
    BlockOperator p1;
    BlockOperator p2;
    OperatorMatrix lower;  // F = f - D^-1 f'
    OperatorMatrix upper;  // F^-1
    Field f;
};

/// Throws WrongRegime unless a = d = 0, NonPositiveBC unless bc > 0 everywhere,
/// SingularFactorization if F is numerically singular.
SplitProjectors build_split_projectors(const Discretization& disc, const CoefficientSet& coeffs);

/// Mode amplitudes Pi = (P1 psi)_1 = (u + F^-1 v)/2, Lambda = (P2 psi)_1 = (u - F^-1 v)/2.
ModePair project_modes(const SplitProjectors& proj, const StateVec& state);

/// Inverse of project_modes: u = Pi + Lambda, v = F (Pi - Lambda).
StateVec recombine_modes(const SplitProjectors& proj, const ModePair& modes);

enum class ModeKind { pi, lambda };

/// State whose opposite-mode amplitude vanishes: (phi, F phi) for Pi, (phi, -F phi) for Lambda.
StateVec pure_mode_state(const SplitProjectors& proj, const Field& profile, ModeKind which);

/// Idempotent block operator parametrized by its first row:
///   [[p, pi], [pi^-1 (p - p^2), I - pi^-1 p pi]].
/// Throws SingularPi if the condition estimate of pi exceeds 1e12.
BlockOperator idempotent_from_blocks(const OperatorMatrix& p, const OperatorMatrix& pi);

/// Defect norms of the split projectors. The operator defects are infinity norms
/// of diag(S,S) X diag(S,S) with S = resolved_projector(grid).
struct SplitDiagnostics {
    double idempotency_defect = 0.0;      // max_i |P_i^2 - P_i|
    double completeness_defect = 0.0;     // |P1 + P2 - I|
    double orthogonality_defect = 0.0;    // max(|P1 P2|, |P2 P1|)
    double commutator_norm = 0.0;         // |[P1, L]|
    double obstruction_norm = 0.0;        // max |diag_obstruction|
    double identity_defect = 0.0;         // |S (F - D^-1 f D) S|
    double inverse_identity_defect = 0.0; // |S (F^-1 - D^-1 f^-1 D) S|
    double evolution_norm = 0.0;          // |L| on the full space
};

SplitDiagnostics commutator_diagnostics(const Discretization& disc, const CoefficientSet& coeffs);

} // namespace wavesplit
