#pragma once

#include <optional>
#include <vector>

#include "wavesplit/const_coeff.hpp"
#include "wavesplit/symbol_calculus.hpp"
#include "wavesplit/var_projectors.hpp"

namespace wavesplit {

/// Courant number bound of the reference solver: dt <= kCflLimit * dx / max_speed.
inline constexpr double kCflLimit = 0.5;

struct CauchyData {
    CauchyData(Field u0_, Field v0_);

    StateVec state() const { return StateVec(u0, v0); }

    Field u0;
    Field v0;
};

struct EvolutionOptions {
    double t_end = 0.0;
    double dt = 1e-3;
    /// Missing means 11 equally spaced times. 0 and t_end are always included.
    std::optional<std::vector<double>> output_times;
};

/// Sorted output times in [0, t_end], always starting at 0 and ending at t_end.
/// Throws InvalidArgument for an empty request or times outside [0, t_end].
std::vector<double> output_schedule(double t_end, const std::optional<std::vector<double>>& requested);

enum class EvolutionMethod { reference, characteristics };

struct EvolutionResult {
    std::vector<double> times;
    std::vector<StateVec> states;
    EvolutionMethod method = EvolutionMethod::reference;
    /// Set when compactly supported data may wrap around the periodic box before t_end.
    bool wrap_hazard = false;
};

/// Extent of the smallest periodic arc holding all nodes where |u| or |v|
/// exceeds `rel_tol` times the peak. Returns the domain length when the data is
/// not compactly supported (no quiet stretch of at least four nodes).
double support_width(const StateVec& state, double rel_tol = 1e-8);

/// Integrates u_t = a u_x + b v_x, v_t = c u_x + d v_x with classical RK4 and
/// the discretization's derivative. The step is shrunk so that every output
/// time is hit exactly. Throws CflViolation if dt exceeds the stability bound.
EvolutionResult reference_evolve(const Discretization& disc, const CoefficientSet& coeffs,
                                 const CauchyData& data, const EvolutionOptions& options);

/// Integrates dX/dtau = direction * s(X) for tau in [0, duration] from each start
/// point, with s the periodic spline of `speed`. Adaptive embedded Runge-Kutta;
/// throws OdeStepFailure if step control breaks down. Positions are not wrapped.
Eigen::VectorXd trace_characteristics(const Field& speed, const Eigen::VectorXd& start, double duration,
                                      double direction);

/// Solves Pi_t = s Pi_x and Lambda_t = -s Lambda_x, s = sqrt(bc), by tracing the
/// characteristic through every node back to t = 0 and interpolating the initial
/// profile there with a periodic cubic spline. Requires a = d = 0.
ModePair characteristics_evolve(const CoefficientSet& coeffs, const ModePair& modes, double t_end);

/// Same, returning the modes at each time of `times` (which must be ascending and >= 0).
std::vector<ModePair> characteristics_evolve(const CoefficientSet& coeffs, const ModePair& modes,
                                             const std::vector<double>& times);

struct LeakageReport {
    double epsilon = 0.0;
    std::vector<double> times;
    std::vector<double> leakage;     // |Lambda|_2 / |Pi|_2 of the reference solution
    std::vector<double> split_error; // |u_split - u_ref|_2; empty for mode_leakage
};

struct SplitSolution {
    EvolutionResult split;
    EvolutionResult reference;
    std::vector<ModePair> modes;
    LeakageReport report;

    const StateVec& final_state() const { return split.states.back(); }
};

/// Projects the data onto the two modes, transports each along its
/// characteristics, recombines through u = Pi + Lambda, v = F (Pi - Lambda), and
/// compares against reference_evolve at the same output times.
SplitSolution split_solve(const Discretization& disc, const CoefficientSet& coeffs, const CauchyData& data,
                          const EvolutionOptions& options);

/// Evolves Pi-pure data with the reference solver and reports the relative
/// Lambda content over time. Throws NotPureMode if |P2 psi| > 1e-10 |psi| initially.
LeakageReport mode_leakage(const Discretization& disc, const CoefficientSet& coeffs, const CauchyData& data,
                           const EvolutionOptions& options);

} // namespace wavesplit
