#include "wavesplit/acoustics.hpp"

#include <cmath>

namespace wavesplit {

AcousticMedium AcousticMedium::create(Field rho0, Field p0, double gamma) {
    require_same_grid(rho0.grid(), p0.grid(), "acoustic medium");
    if (!(gamma > 1.0) || !std::isfinite(gamma)) {
        throw Error(ErrorCode::NonPhysicalMedium, "adiabatic exponent must exceed 1");
    }
    if (rho0.min() <= 0.0) throw Error(ErrorCode::NonPhysicalMedium, "background density must be positive");
    if (p0.min() <= 0.0) throw Error(ErrorCode::NonPhysicalMedium, "background pressure must be positive");
    return AcousticMedium(std::move(rho0), std::move(p0), gamma);
}

Field AcousticMedium::sound_speed_squared() const { return gamma_ * (p0_ / rho0_); }

Field AcousticMedium::sound_speed() const {
    return sound_speed_squared().map([](double x) { return std::sqrt(x); });
}

CoefficientSet to_canonical(const AcousticMedium& medium, double epsilon_hint) {
    return CoefficientSet::particular(Field::constant(medium.grid(), 1.0), medium.sound_speed_squared(),
                                      epsilon_hint);
}

PhysicalFields physical_fields(const StateVec& state, const AcousticMedium& medium) {
    require_same_grid(state.grid(), medium.grid(), "physical_fields");
    return PhysicalFields{state.u, -(state.v / medium.rho0()), medium.sound_speed_squared() * state.u};
}

StateVec canonical_state(const Field& rho_prime, const Field& v_prime, const AcousticMedium& medium) {
    return StateVec(rho_prime, -(medium.rho0() * v_prime));
}

AcousticResiduals acoustic_residuals(const Discretization& disc, const AcousticMedium& medium,
                                     const StateVec& before, const StateVec& at, const StateVec& after,
                                     double dt) {
    const PhysicalFields prev = physical_fields(before, medium);
    const PhysicalFields mid = physical_fields(at, medium);
    const PhysicalFields next = physical_fields(after, medium);
    const double inv = 1.0 / (2.0 * dt);

    const Field rho_t = inv * (next.rho_prime - prev.rho_prime);
    const Field v_t = inv * (next.v_prime - prev.v_prime);
    const Field& rho0 = medium.rho0();

    AcousticResiduals r;
    r.momentum = field_norm(rho0 * v_t + medium.sound_speed_squared() * disc.differentiate(mid.rho_prime),
                            NormKind::l2);
    r.momentum_pressure = field_norm(rho0 * v_t + disc.differentiate(mid.p_prime), NormKind::l2);
    r.continuity = field_norm(rho_t + disc.differentiate(rho0 * mid.v_prime), NormKind::l2);
    return r;
}

double quadratic_energy(const CoefficientSet& coeffs, const StateVec& state) {
    const Field density = coeffs.c() * state.u * state.u + coeffs.b() * state.v * state.v;
    return state.grid().dx() * density.values().sum();
}

} // namespace wavesplit
