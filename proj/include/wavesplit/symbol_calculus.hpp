#pragma once

#include "wavesplit/grid.hpp"

namespace wavesplit {

/// Variable coefficients of u_t = a u_x + b v_x, v_t = c u_x + d v_x.
/// Construction enforces b != 0 and (a-d)^2 + 4bc > 0 at every node.
class CoefficientSet {
public:
    static CoefficientSet create(Field a, Field b, Field c, Field d, double epsilon_hint = 0.0);

    /// a = d = 0 case.
    static CoefficientSet particular(Field b, Field c, double epsilon_hint = 0.0);

    const GridSpec& grid() const { return a_.grid(); }
    const Field& a() const { return a_; }
    const Field& b() const { return b_; }
    const Field& c() const { return c_; }
    const Field& d() const { return d_; }
    double epsilon_hint() const { return epsilon_hint_; }

    /// True when a and d vanish to within `tol` everywhere.
    bool is_particular(double tol = 1e-14) const;

    /// Largest characteristic speed magnitude max_x max(|q+|, |q-|).
    double max_speed() const;

private:
    CoefficientSet(Field a, Field b, Field c, Field d, double eps)
        : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), d_(std::move(d)), epsilon_hint_(eps) {}

    Field a_;
    Field b_;
    Field c_;
    Field d_;
    double epsilon_hint_;
};

enum class SymbolMode { plus, minus };

/// Three-term symbol lambda = p + q D + r D^2 of one mode.
struct SymbolExpansion {
    Field p;
    Field q;
    Field r;
    SymbolMode mode = SymbolMode::plus;
};

struct QPair {
    Field plus;
    Field minus;
};

/// q+- = ((a+d) +- sqrt((a-d)^2 + 4bc)) / 2 pointwise.
/// Throws NotHyperbolicAt with the first failing index.
QPair q_pm(const CoefficientSet& coeffs);

/// Leading-order symbol (0, q, 0) for the requested mode.
SymbolExpansion leading_symbol(const CoefficientSet& coeffs, SymbolMode mode);

struct MatchingResiduals {
    Field res0;
    Field res1;
    Field res2;
};

/// Evaluates the D^0, D^1, D^2 order-matching expressions term by term, exactly
/// as they are written (including the d b^-1 q pair that cancels in D^1).
/// Primes are x-derivatives of pointwise products taken with the
/// discretization's derivative.
MatchingResiduals matching_residuals(const Discretization& disc, const CoefficientSet& coeffs,
                                     const SymbolExpansion& sym);

/// 1/2 D^-1 (c' - (b'/b) c). Vanishes identically exactly when c = kappa * b.
/// Throws WrongRegime unless a, d vanish within 1e-14, NonPositiveBC unless bc > 0.
Field diag_obstruction(const Discretization& disc, const CoefficientSet& coeffs);

} // namespace wavesplit
