#include "wavesplit/wave_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/numeric/odeint.hpp>

#include "periodic_spline.hpp"

namespace wavesplit {

CauchyData::CauchyData(Field u0_, Field v0_) : u0(std::move(u0_)), v0(std::move(v0_)) {
    require_same_grid(u0.grid(), v0.grid(), "Cauchy data");
}

std::vector<double> output_schedule(double t_end, const std::optional<std::vector<double>>& requested) {
    if (!(t_end >= 0.0) || !std::isfinite(t_end)) {
        throw Error(ErrorCode::InvalidArgument, "t_end must be finite and nonnegative");
    }
    std::vector<double> times;
    if (!requested) {
        for (int k = 0; k <= 10; ++k) times.push_back(t_end * k / 10.0);
        times.back() = t_end;
    } else {
        if (requested->empty()) {
            throw Error(ErrorCode::InvalidArgument, "output time list is empty");
        }
        const double slack = 1e-12 * std::max(1.0, t_end);
        for (double t : *requested) {
            if (!std::isfinite(t) || t < -slack || t > t_end + slack) {
                throw Error(ErrorCode::InvalidArgument,
                            "output time " + std::to_string(t) + " outside [0, t_end]");
            }
            times.push_back(std::clamp(t, 0.0, t_end));
        }
        times.push_back(0.0);
        times.push_back(t_end);
    }
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    return times;
}

namespace {
constexpr std::size_t kMinSupportGap = 4;
}

double support_width(const StateVec& state, double rel_tol) {
    const GridSpec& grid = state.grid();
    const std::size_t n = grid.n_points();
    const Eigen::VectorXd mag = state.u.values().cwiseAbs().cwiseMax(state.v.values().cwiseAbs());
    const double peak = mag.maxCoeff();
    if (peak == 0.0) return 0.0;

    std::vector<bool> active(n);
    for (std::size_t i = 0; i < n; ++i) active[i] = mag[static_cast<Eigen::Index>(i)] > rel_tol * peak;
    if (std::all_of(active.begin(), active.end(), [](bool a) { return a; })) return grid.domain_length();

    // Longest circular run of inactive nodes.
    std::size_t best = 0;
    std::size_t run = 0;
    for (std::size_t k = 0; k < 2 * n; ++k) {
        run = active[k % n] ? 0 : run + 1;
        best = std::max(best, std::min(run, n));
    }
    // Isolated zeros (sign changes landing on a node) are not a support gap.
    if (best < kMinSupportGap) return grid.domain_length();
    return static_cast<double>(n - best) * grid.dx();
}

EvolutionResult reference_evolve(const Discretization& disc, const CoefficientSet& coeffs,
                                 const CauchyData& data, const EvolutionOptions& options) {
    const GridSpec& grid = disc.grid();
    require_same_grid(grid, coeffs.grid(), "reference_evolve");
    require_same_grid(grid, data.u0.grid(), "reference_evolve");

    const std::vector<double> times = output_schedule(options.t_end, options.output_times);
    const double max_speed = coeffs.max_speed();
    const double dt_limit = kCflLimit * grid.dx() / max_speed;
    if (!(options.dt > 0.0) || options.dt > dt_limit) {
        throw Error(ErrorCode::CflViolation, "dt = " + std::to_string(options.dt) +
                                                 " violates the stability bound " + std::to_string(dt_limit));
    }

    EvolutionResult result;
    result.method = EvolutionMethod::reference;
    const double width = support_width(data.state());
    if (width < grid.domain_length()) {
        result.wrap_hazard = options.t_end > (grid.domain_length() - width) / max_speed;
    }

    const Eigen::MatrixXd& d = disc.derivative().matrix();
    const Eigen::VectorXd& a = coeffs.a().values();
    const Eigen::VectorXd& b = coeffs.b().values();
    const Eigen::VectorXd& c = coeffs.c().values();
    const Eigen::VectorXd& dd = coeffs.d().values();
    const bool particular = coeffs.is_particular(0.0);

    const Eigen::Index n = static_cast<Eigen::Index>(grid.n_points());
    Eigen::VectorXd ux(n), vx(n);
    auto rhs = [&](const Eigen::VectorXd& u, const Eigen::VectorXd& v, Eigen::VectorXd& du, Eigen::VectorXd& dv) {
        ux.noalias() = d * u;
        vx.noalias() = d * v;
        if (particular) {
            du = b.cwiseProduct(vx);
            dv = c.cwiseProduct(ux);
        } else {
            du = a.cwiseProduct(ux) + b.cwiseProduct(vx);
            dv = c.cwiseProduct(ux) + dd.cwiseProduct(vx);
        }
    };

    Eigen::VectorXd u = data.u0.values();
    Eigen::VectorXd v = data.v0.values();
    Eigen::VectorXd k1u(n), k1v(n), k2u(n), k2v(n), k3u(n), k3v(n), k4u(n), k4v(n);

    result.times.push_back(times.front());
    result.states.push_back(data.state());
    for (std::size_t m = 1; m < times.size(); ++m) {
        const double span = times[m] - times[m - 1];
        const auto steps = static_cast<long>(std::ceil(span / options.dt - 1e-9));
        const double h = span / static_cast<double>(std::max(steps, 1L));
        for (long s = 0; s < steps; ++s) {
            rhs(u, v, k1u, k1v);
            rhs(u + 0.5 * h * k1u, v + 0.5 * h * k1v, k2u, k2v);
            rhs(u + 0.5 * h * k2u, v + 0.5 * h * k2v, k3u, k3v);
            rhs(u + h * k3u, v + h * k3v, k4u, k4v);
            u += (h / 6.0) * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        }
        result.times.push_back(times[m]);
        result.states.emplace_back(Field(grid, u), Field(grid, v));
    }
    return result;
}

Eigen::VectorXd trace_characteristics(const Field& speed, const Eigen::VectorXd& start, double duration,
                                      double direction) {
    namespace odeint = boost::numeric::odeint;
    using State = std::vector<double>;

    if (!(duration >= 0.0) || !std::isfinite(duration)) {
        throw Error(ErrorCode::InvalidArgument, "trace duration must be finite and nonnegative");
    }
    if (duration == 0.0) return start;

    const detail::PeriodicSpline s(speed);
    const double smax = std::max(speed.values().cwiseAbs().maxCoeff(), 1e-300);
    auto system = [&](const State& x, State& dxdt, double /*tau*/) {
        for (std::size_t i = 0; i < x.size(); ++i) dxdt[i] = direction * s(x[i]);
    };

    State x(start.data(), start.data() + start.size());
    const double dt0 = std::min(duration, 0.25 * speed.grid().dx() / smax);
    try {
        auto stepper = odeint::make_controlled(1e-12, 1e-12, odeint::runge_kutta_cash_karp54<State>());
        odeint::integrate_adaptive(stepper, system, x, 0.0, duration, dt0);
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw Error(ErrorCode::OdeStepFailure, std::string("characteristic tracer failed: ") + e.what());
    }
    return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

namespace {

Field characteristic_speed(const CoefficientSet& coeffs) {
    if (!coeffs.is_particular(1e-14)) {
        throw Error(ErrorCode::WrongRegime, "characteristic transport requires a = d = 0");
    }
    const Field bc = coeffs.b() * coeffs.c();
    if (bc.min() <= 0.0) {
        throw Error(ErrorCode::NonPositiveBC, "bc must be positive everywhere");
    }
    return bc.map([](double x) { return std::sqrt(x); });
}

Field sample_spline(const GridSpec& grid, const detail::PeriodicSpline& spline, const Eigen::VectorXd& at) {
    Eigen::VectorXd v(at.size());
    for (Eigen::Index i = 0; i < at.size(); ++i) v[i] = spline(at[i]);
    return Field(grid, std::move(v));
}

double state_norm(const StateVec& s) {
    const double nu = field_norm(s.u, NormKind::l2);
    const double nv = field_norm(s.v, NormKind::l2);
    return std::sqrt(nu * nu + nv * nv);
}

double mode_ratio(const ModePair& m) {
    const double pi = field_norm(m.pi, NormKind::l2);
    const double lambda = field_norm(m.lambda, NormKind::l2);
    return lambda / std::max(pi, 1e-300);
}

} // namespace

std::vector<ModePair> characteristics_evolve(const CoefficientSet& coeffs, const ModePair& modes,
                                             const std::vector<double>& times) {
    require_same_grid(coeffs.grid(), modes.grid(), "characteristics_evolve");
    const Field speed = characteristic_speed(coeffs);
    const GridSpec& grid = coeffs.grid();
    const detail::PeriodicSpline pi0(modes.pi);
    const detail::PeriodicSpline lambda0(modes.lambda);

    // Pi_t = s Pi_x is constant along dx/dt = -s, so the foot of the
    // characteristic through (x, t) is reached by dX/dtau = +s over tau in [0, t].
    Eigen::VectorXd pi_feet = grid.nodes();
    Eigen::VectorXd lambda_feet = grid.nodes();
    double elapsed = 0.0;
    std::vector<ModePair> out;
    out.reserve(times.size());
    for (double t : times) {
        if (!(t >= elapsed)) {
            throw Error(ErrorCode::InvalidArgument, "characteristic output times must be ascending and >= 0");
        }
        if (t == 0.0) {
            out.push_back(modes);
            continue;
        }
        pi_feet = trace_characteristics(speed, pi_feet, t - elapsed, +1.0);
        lambda_feet = trace_characteristics(speed, lambda_feet, t - elapsed, -1.0);
        elapsed = t;
        out.emplace_back(sample_spline(grid, pi0, pi_feet), sample_spline(grid, lambda0, lambda_feet));
    }
    return out;
}

ModePair characteristics_evolve(const CoefficientSet& coeffs, const ModePair& modes, double t_end) {
    return characteristics_evolve(coeffs, modes, std::vector<double>{t_end}).front();
}

SplitSolution split_solve(const Discretization& disc, const CoefficientSet& coeffs, const CauchyData& data,
                          const EvolutionOptions& options) {
    const std::vector<double> times = output_schedule(options.t_end, options.output_times);
    EvolutionOptions fixed = options;
    fixed.output_times = times;

    const SplitProjectors proj = build_split_projectors(disc, coeffs);
    const ModePair initial = project_modes(proj, data.state());

    SplitSolution sol;
    sol.modes = characteristics_evolve(coeffs, initial, times);
    sol.reference = reference_evolve(disc, coeffs, data, fixed);
    sol.split.method = EvolutionMethod::characteristics;
    sol.split.times = times;
    sol.split.wrap_hazard = sol.reference.wrap_hazard;
    for (const ModePair& m : sol.modes) sol.split.states.push_back(recombine_modes(proj, m));

    sol.report.epsilon = coeffs.epsilon_hint();
    sol.report.times = times;
    for (std::size_t k = 0; k < times.size(); ++k) {
        const StateVec& ref = sol.reference.states[k];
        sol.report.leakage.push_back(mode_ratio(project_modes(proj, ref)));
        sol.report.split_error.push_back(field_norm(sol.split.states[k].u - ref.u, NormKind::l2));
    }
    return sol;
}

LeakageReport mode_leakage(const Discretization& disc, const CoefficientSet& coeffs, const CauchyData& data,
                           const EvolutionOptions& options) {
    const SplitProjectors proj = build_split_projectors(disc, coeffs);
    const StateVec psi = data.state();
    const double opposite = state_norm(proj.p2.apply(psi));
    if (opposite > 1e-10 * state_norm(psi)) {
        throw Error(ErrorCode::NotPureMode, "initial data has relative Lambda content " +
                                                std::to_string(opposite / std::max(state_norm(psi), 1e-300)));
    }

    const EvolutionResult ref = reference_evolve(disc, coeffs, data, options);
    LeakageReport report;
    report.epsilon = coeffs.epsilon_hint();
    report.times = ref.times;
    for (const StateVec& s : ref.states) report.leakage.push_back(mode_ratio(project_modes(proj, s)));
    return report;
}

} // namespace wavesplit
