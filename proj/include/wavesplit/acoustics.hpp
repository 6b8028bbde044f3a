#pragma once

#include "wavesplit/grid.hpp"
#include "wavesplit/symbol_calculus.hpp"

namespace wavesplit {

/// Background state of a 1D adiabatic gas: density rho0(x), pressure p0(x), and
/// adiabatic exponent gamma. No hydrostatic balance is imposed on (rho0, p0).
class AcousticMedium {
public:
    /// Throws NonPhysicalMedium unless rho0, p0 > 0 everywhere and gamma > 1.
    static AcousticMedium create(Field rho0, Field p0, double gamma);

    const GridSpec& grid() const { return rho0_.grid(); }
    const Field& rho0() const { return rho0_; }
    const Field& p0() const { return p0_; }
    double gamma() const { return gamma_; }

    /// gamma p0 / rho0
    Field sound_speed_squared() const;
    Field sound_speed() const;

private:
    AcousticMedium(Field rho0, Field p0, double gamma)
        : rho0_(std::move(rho0)), p0_(std::move(p0)), gamma_(gamma) {}

    Field rho0_;
    Field p0_;
    double gamma_;
};

/// Linearized adiabatic acoustics
///
///   (rho0 v')_t + c rho'_x = 0,   rho'_t + (rho0 v')_x = 0,   c = gamma p0 / rho0,
///
/// written as u_t = b v_x, v_t = c u_x with u = rho', v = -rho0 v', a = d = 0, b = 1.
CoefficientSet to_canonical(const AcousticMedium& medium, double epsilon_hint = 0.0);

struct PhysicalFields {
    Field rho_prime;
    Field v_prime;
    Field p_prime;
};

/// rho' = u, v' = -v / rho0, p' = (gamma p0 / rho0) rho'.
PhysicalFields physical_fields(const StateVec& state, const AcousticMedium& medium);

/// Inverse of physical_fields for (rho', v').
StateVec canonical_state(const Field& rho_prime, const Field& v_prime, const AcousticMedium& medium);

/// Residuals of the linearized equations at the middle of three snapshots spaced
/// `dt` apart, using centered time differences and the discretization's derivative.
struct AcousticResiduals {
    double momentum = 0.0;          // |(rho0 v')_t + c rho'_x|_2, the closed system
    double momentum_pressure = 0.0; // |rho0 v'_t + p'_x|_2, equals momentum when c is uniform
    double continuity = 0.0;        // |rho'_t + (rho0 v')_x|_2
};

AcousticResiduals acoustic_residuals(const Discretization& disc, const AcousticMedium& medium,
                                     const StateVec& before, const StateVec& at, const StateVec& after,
                                     double dt);

/// Integral of c u^2 + b v^2 over the period; conserved when b, c are constant and a = d = 0.
double quadratic_energy(const CoefficientSet& coeffs, const StateVec& state);

} // namespace wavesplit
