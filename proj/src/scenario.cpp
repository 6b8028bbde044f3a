#include "wavesplit/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace wavesplit {

using nlohmann::json;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------------------
// registry

const std::vector<ProfileSchema>& registry_storage() {
    static const std::vector<ProfileSchema> reg = {
        {"constant", ProfileKind::coefficients, "b(x) = b, c(x) = c", {{"b", 1.0, "b"}, {"c", 1.0, "c"}}},
        {"linear_ramp",
         ProfileKind::coefficients,
         "b(x) = b, c(x) = c0 (1 + epsilon r(x)); r rises linearly from 0 to 1 over ramp_fraction of the "
         "domain and returns along a cubic Hermite arc with matching slopes (which overshoots [0, 1])",
         {{"b", 1.0, "b"},
          {"c0", 1.0, "background c"},
          {"epsilon", 0.1, "relative ramp height"},
          {"ramp_fraction", 0.5, "rising fraction of the domain, in (0, 1)"}}},
        {"sine_perturbation",
         ProfileKind::coefficients,
         "b(x) = b, c(x) = c0 (1 + epsilon sin(2 pi m x / L))",
         {{"b", 1.0, "b"},
          {"c0", 1.0, "background c"},
          {"epsilon", 0.1, "relative amplitude"},
          {"wavenumber", 1.0, "integer mode number m"}}},
        {"kappa_family",
         ProfileKind::coefficients,
         "b(x) = b0 (1 + epsilon sin(2 pi m x / L)), c(x) = kappa b(x)",
         {{"kappa", 2.5, "ratio c / b"},
          {"b0", 1.0, "background b"},
          {"epsilon", 0.2, "relative amplitude"},
          {"wavenumber", 1.0, "integer mode number m"}}},
        {"acoustic_isothermal",
         ProfileKind::coefficients,
         "gas with rho0(x) = rho0 (1 + epsilon sin(2 pi m x / L)) and p0(x) proportional to rho0(x); "
         "b = 1, c = gamma p0 / rho0 is uniform",
         {{"gamma", 1.4, "adiabatic exponent"},
          {"p0", 1.0, "background pressure scale"},
          {"rho0", 1.4, "background density scale"},
          {"epsilon", 0.1, "relative amplitude"},
          {"wavenumber", 1.0, "integer mode number m"}}},
        {"acoustic_isobaric",
         ProfileKind::coefficients,
         "gas with rho0(x) = rho0 (1 + epsilon sin(2 pi m x / L)) and uniform p0; b = 1, c = gamma p0 / rho0(x)",
         {{"gamma", 1.4, "adiabatic exponent"},
          {"p0", 1.0, "background pressure"},
          {"rho0", 1.4, "background density scale"},
          {"epsilon", 0.1, "relative amplitude"},
          {"wavenumber", 1.0, "integer mode number m"}}},
        {"gaussian",
         ProfileKind::pulse,
         "amplitude exp(-(x - center)^2 / (2 width^2)), distance taken periodically",
         {{"center", std::nullopt, "pulse center"},
          {"width", 1.0, "standard deviation"},
          {"amplitude", 1.0, "peak value"}}},
        {"sine", ProfileKind::pulse, "amplitude sin(2 pi m x / L)",
         {{"wavenumber", 1.0, "integer mode number m"}, {"amplitude", 1.0, "amplitude"}}},
        {"pure_mode",
         ProfileKind::pulse,
         "single-mode data (phi, F phi) or (phi, -F phi) with phi a nested pulse; keys: which = pi | lambda, "
         "pulse = {profile, params}",
         {}},
    };
    return reg;
}

const ProfileSchema* find_profile(const std::string& name, ProfileKind kind) {
    for (const ProfileSchema& p : registry_storage()) {
        if (p.name == name && p.kind == kind) return &p;
    }
    return nullptr;
}

bool has_param(const ProfileSchema& schema, const std::string& name) {
    return std::any_of(schema.params.begin(), schema.params.end(),
                       [&](const ParamSchema& p) { return p.name == name; });
}

// Parameter lookup with defaults filled in; `path` prefixes error messages.
class Params {
public:
    Params(const ProfileSchema& schema, const std::map<std::string, double>& given, std::string path)
        : schema_(schema), given_(given), path_(std::move(path)) {}

    double get(const std::string& name) const {
        if (auto it = given_.find(name); it != given_.end()) return it->second;
        for (const ParamSchema& p : schema_.params) {
            if (p.name == name && p.default_value) return *p.default_value;
        }
        throw ConfigError(path_ + "." + name, "required parameter is missing");
    }

    int mode_number(const std::string& name) const {
        const double m = get(name);
        if (m < 1.0 || m != std::floor(m) || m > 1e6) {
            throw ConfigError(path_ + "." + name, "must be a positive integer");
        }
        return static_cast<int>(m);
    }

    double positive(const std::string& name) const {
        const double v = get(name);
        if (!(v > 0.0)) throw ConfigError(path_ + "." + name, "must be positive");
        return v;
    }

private:
    const ProfileSchema& schema_;
    const std::map<std::string, double>& given_;
    std::string path_;
};

void validate_params(const ProfileSchema& schema, const std::map<std::string, double>& given,
                     const std::string& path) {
    for (const auto& [key, value] : given) {
        if (!has_param(schema, key)) {
            throw ConfigError(path + "." + key, "unknown parameter for profile '" + schema.name + "'");
        }
    }
    for (const ParamSchema& p : schema.params) {
        if (!p.default_value && !given.count(p.name)) {
            throw ConfigError(path + "." + p.name, "required parameter is missing");
        }
    }
}

// Periodic ramp: linear rise over [0, f L], cubic Hermite return over [f L, L]
// with matching end slopes, so r is C^1 on the circle.
double ramp(double x, double length, double fraction) {
    const double rise = fraction * length;
    const double slope = 1.0 / rise;
    if (x < rise) return x * slope;
    const double h = length - rise;
    const double s = (x - rise) / h;
    const double h00 = 2 * s * s * s - 3 * s * s + 1;
    const double h10 = s * s * s - 2 * s * s + s;
    const double h01 = -2 * s * s * s + 3 * s * s;
    const double h11 = s * s * s - s * s;
    return h00 * 1.0 + h10 * h * slope + h01 * 0.0 + h11 * h * slope;
}

Field sine_modulation(const GridSpec& grid, double eps, int m) {
    const double k = kTwoPi * m / grid.domain_length();
    return Field::sample(grid, [=](double x) { return 1.0 + eps * std::sin(k * x); });
}

std::map<std::string, double> with_epsilon(const ProfileSpec& spec, std::optional<double> epsilon,
                                           const ProfileSchema& schema) {
    std::map<std::string, double> params = spec.params;
    if (epsilon) {
        if (!has_param(schema, "epsilon")) {
            throw ConfigError("coefficients.profile",
                              "profile '" + schema.name + "' has no epsilon parameter to sweep");
        }
        params["epsilon"] = *epsilon;
    }
    return params;
}

const ProfileSchema& coefficient_schema(const ProfileSpec& spec) {
    const ProfileSchema* schema = find_profile(spec.profile, ProfileKind::coefficients);
    if (!schema) throw ConfigError("coefficients.profile", "unknown coefficient profile '" + spec.profile + "'");
    return *schema;
}

// ---------------------------------------------------------------------------
// JSON parsing helpers

std::string join(const std::string& a, const std::string& b) { return a.empty() ? b : a + "." + b; }

void reject_unknown_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> known) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
            throw ConfigError(join(path, it.key()), "unknown key");
        }
    }
}

const json& require_object(const json& parent, const std::string& key, const std::string& path) {
    const std::string here = join(path, key);
    if (!parent.contains(key)) throw ConfigError(here, "missing section");
    const json& v = parent.at(key);
    if (!v.is_object()) throw ConfigError(here, "expected an object");
    return v;
}

double number_at(const json& v, const std::string& path) {
    if (!v.is_number()) throw ConfigError(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(path, "must be finite");
    return x;
}

double require_number(const json& parent, const std::string& key, const std::string& path) {
    if (!parent.contains(key)) throw ConfigError(join(path, key), "missing value");
    return number_at(parent.at(key), join(path, key));
}

std::string require_string(const json& parent, const std::string& key, const std::string& path) {
    if (!parent.contains(key)) throw ConfigError(join(path, key), "missing value");
    const json& v = parent.at(key);
    if (!v.is_string()) throw ConfigError(join(path, key), "expected a string");
    return v.get<std::string>();
}

std::vector<double> number_list(const json& v, const std::string& path) {
    if (!v.is_array()) throw ConfigError(path, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number_at(v[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

ProfileSpec parse_profile(const json& obj, const std::string& path, ProfileKind kind,
                          std::initializer_list<std::string_view> extra_keys = {}) {
    std::vector<std::string_view> known{"profile", "params"};
    known.insert(known.end(), extra_keys.begin(), extra_keys.end());
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (std::find(known.begin(), known.end(), it.key()) == known.end()) {
            throw ConfigError(join(path, it.key()), "unknown key");
        }
    }

    ProfileSpec spec;
    spec.profile = require_string(obj, "profile", path);
    const ProfileSchema* schema = find_profile(spec.profile, kind);
    if (!schema) throw ConfigError(join(path, "profile"), "unknown profile '" + spec.profile + "'");
    if (obj.contains("params")) {
        const json& params = obj.at("params");
        if (!params.is_object()) throw ConfigError(join(path, "params"), "expected an object");
        for (auto it = params.begin(); it != params.end(); ++it) {
            spec.params[it.key()] = number_at(it.value(), join(join(path, "params"), it.key()));
        }
    }
    validate_params(*schema, spec.params, join(path, "params"));
    return spec;
}

// ---------------------------------------------------------------------------
// running

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

/// Direction of travel of |m|^2 between two snapshots from the phase of its
/// first circular moment; "undetermined" when that moment vanishes.
std::string measured_direction(const Field& before, const Field& after) {
    const GridSpec& g = before.grid();
    auto moment = [&](const Field& f) {
        std::complex<double> z = 0.0;
        double total = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            const double w = f[i] * f[i];
            z += w * std::polar(1.0, kTwoPi * g.x(i) / g.domain_length());
            total += w;
        }
        return total > 0.0 ? z / total : std::complex<double>(0.0);
    };
    const std::complex<double> a = moment(before);
    const std::complex<double> b = moment(after);
    if (std::abs(a) < 1e-6 || std::abs(b) < 1e-6) return "undetermined";
    const double shift = std::arg(b / a) * g.domain_length() / kTwoPi;
    if (std::abs(shift) < 0.5 * g.dx()) return "stationary";
    return shift > 0.0 ? "right" : "left";
}

double energy_drift(const CoefficientSet& coeffs, const EvolutionResult& r) {
    const double e0 = quadratic_energy(coeffs, r.states.front());
    double worst = 0.0;
    for (const StateVec& s : r.states) worst = std::max(worst, std::abs(quadratic_energy(coeffs, s) - e0));
    return e0 > 0.0 ? worst / e0 : worst;
}

SweepPoint run_sweep_point(const Discretization& disc, const ScenarioConfig& cfg, double eps) {
    const GridSpec& grid = disc.grid();
    const CoefficientSet coeffs = build_coefficients(grid, cfg.coefficients, eps);
    const SplitDiagnostics diag = commutator_diagnostics(disc, coeffs);

    EvolutionOptions at_end = cfg.evolution;
    at_end.output_times = std::vector<double>{cfg.evolution.t_end};

    const CauchyData data = build_initial_data(disc, coeffs, cfg.initial_data);
    const SplitSolution sol = split_solve(disc, coeffs, data, at_end);

    const SplitProjectors proj = build_split_projectors(disc, coeffs);
    const StateVec pure = pure_mode_state(proj, build_pulse(grid, cfg.initial_data.pulse), ModeKind::pi);
    const LeakageReport leak = mode_leakage(disc, coeffs, CauchyData(pure.u, pure.v), at_end);

    return SweepPoint{eps, diag.commutator_norm, diag.obstruction_norm, leak.leakage.back(),
                      sol.report.split_error.back()};
}

std::vector<SweepPoint> run_sweep(const Discretization& disc, const ScenarioConfig& cfg, std::size_t threads) {
    const std::size_t n = cfg.sweep_epsilons.size();
    std::vector<SweepPoint> points(n);
    std::vector<std::exception_ptr> failures(n);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                points[i] = run_sweep_point(disc, cfg, cfg.sweep_epsilons[i]);
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(n, 1));
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& f : failures) {
        if (f) std::rethrow_exception(f);
    }
    return points;
}

std::vector<ConvergenceRow> convergence_table(const Discretization& disc, const CoefficientSet& coeffs,
                                              const CauchyData& data, double t_end) {
    if (t_end <= 0.0) return {};
    const double h = kCflLimit * disc.grid().dx() / coeffs.max_speed();
    auto run = [&](double dt) {
        return reference_evolve(disc, coeffs, data, {t_end, dt, std::vector<double>{t_end}}).states.back().u;
    };
    const Field finest = run(h / 16.0);
    std::vector<ConvergenceRow> rows;
    for (double dt : {h, h / 2.0, h / 4.0}) {
        ConvergenceRow row{dt, field_norm(run(dt) - finest, NormKind::l2), 0.0};
        if (!rows.empty() && row.error > 0.0) row.ratio = rows.back().error / row.error;
        rows.push_back(row);
    }
    return rows;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string short_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << contents;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::string states_csv(const RunReport& r) {
    const SplitSolution& sol = r.solution;
    std::string out = "time,x,u,v,pi,lambda,u_ref,v_ref\n";
    const GridSpec& g = sol.split.states.front().grid();
    for (std::size_t k = 0; k < sol.split.times.size(); ++k) {
        const StateVec& s = sol.split.states[k];
        const StateVec& ref = sol.reference.states[k];
        const ModePair& m = sol.modes[k];
        for (std::size_t i = 0; i < g.n_points(); ++i) {
            for (double v : {sol.split.times[k], g.x(i), s.u[i], s.v[i], m.pi[i], m.lambda[i], ref.u[i], ref.v[i]}) {
                out += format_double(v);
                out += ',';
            }
            out.back() = '\n';
        }
    }
    return out;
}

const char* mode_name(ModeKind k) { return k == ModeKind::pi ? "pi" : "lambda"; }

std::string diagnostics_json(const RunReport& r) {
    const ScenarioConfig& c = r.config;
    const SplitDiagnostics& d = r.diagnostics;
    const SplitSolution& sol = r.solution;
    json j;
    j["name"] = c.name;
    j["version"] = std::string(kVersion);
    j["n_points"] = c.n_points;
    j["domain_length"] = c.domain_length;
    j["dx"] = GridSpec::create(c.n_points, c.domain_length).dx();
    j["backend"] = std::string(to_string(c.backend));
    j["coefficient_profile"] = c.coefficients.profile;
    j["initial_profile"] = c.initial_data.pulse.profile;
    j["pure_mode"] = c.initial_data.pure_mode ? json(mode_name(*c.initial_data.pure_mode)) : json(nullptr);
    j["t_end"] = c.evolution.t_end;
    j["dt"] = c.evolution.dt;
    j["max_speed"] = r.max_speed;
    j["wrap_hazard"] = sol.reference.wrap_hazard;

    j["idempotency_defect"] = d.idempotency_defect;
    j["completeness_defect"] = d.completeness_defect;
    j["orthogonality_defect"] = d.orthogonality_defect;
    j["commutator_norm"] = d.commutator_norm;
    j["obstruction_norm"] = d.obstruction_norm;
    j["identity_defect"] = d.identity_defect;
    j["inverse_identity_defect"] = d.inverse_identity_defect;
    j["evolution_norm"] = d.evolution_norm;
    j["matching_residual_plus"] = r.matching_residual_plus;
    j["matching_residual_minus"] = r.matching_residual_minus;

    j["times"] = sol.report.times;
    j["leakage"] = sol.report.leakage;
    j["split_error"] = sol.report.split_error;
    j["energy_drift"] = energy_drift(build_coefficients(sol.split.states.front().grid(), c.coefficients),
                                     sol.reference);
    j["pi_direction"] = measured_direction(sol.modes.front().pi, sol.modes.back().pi);
    j["lambda_direction"] = measured_direction(sol.modes.front().lambda, sol.modes.back().lambda);
    if (r.leakage) j["mode_leakage"] = r.leakage->leakage;

    if (!r.sweep.empty()) {
        std::vector<double> eps, comm, obst, leak, err;
        for (const SweepPoint& p : r.sweep) {
            eps.push_back(p.epsilon);
            comm.push_back(p.commutator_norm);
            obst.push_back(p.obstruction_norm);
            leak.push_back(p.leakage);
            err.push_back(p.split_error);
        }
        j["sweep_epsilon"] = eps;
        j["sweep_commutator_norm"] = comm;
        j["sweep_obstruction_norm"] = obst;
        j["sweep_leakage"] = leak;
        j["sweep_split_error"] = err;
        for (const auto& [key, slope] : r.sweep_slopes) j["sweep_slope_" + key] = slope;
    }

    std::vector<double> cdt, cerr, cratio;
    for (const ConvergenceRow& row : r.convergence) {
        cdt.push_back(row.dt);
        cerr.push_back(row.error);
        cratio.push_back(row.ratio);
    }
    j["convergence_dt"] = cdt;
    j["convergence_error"] = cerr;
    j["convergence_ratio"] = cratio;
    return j.dump(2) + "\n";
}

std::string report_text(const RunReport& r) {
    const ScenarioConfig& c = r.config;
    const SplitDiagnostics& d = r.diagnostics;
    const SplitSolution& sol = r.solution;
    std::ostringstream o;
    o << "scenario      " << c.name << "\n"
      << "grid          N = " << c.n_points << ", L = " << short_double(c.domain_length)
      << ", backend = " << to_string(c.backend) << "\n"
      << "coefficients  " << c.coefficients.profile;
    for (const auto& [k, v] : c.coefficients.params) o << " " << k << "=" << short_double(v);
    o << "\ninitial data  ";
    if (c.initial_data.pure_mode) o << "pure_mode(" << mode_name(*c.initial_data.pure_mode) << ") of ";
    o << c.initial_data.pulse.profile;
    for (const auto& [k, v] : c.initial_data.pulse.params) o << " " << k << "=" << short_double(v);
    o << "\nevolution     t_end = " << short_double(c.evolution.t_end) << ", dt = " << short_double(c.evolution.dt)
      << ", max speed = " << short_double(r.max_speed) << "\n";
    if (sol.reference.wrap_hazard) o << "WARNING       data may wrap around the periodic box before t_end\n";

    o << "\nprojector diagnostics (resolved band)\n"
      << "  idempotency       " << short_double(d.idempotency_defect) << "\n"
      << "  completeness      " << short_double(d.completeness_defect) << "\n"
      << "  orthogonality     " << short_double(d.orthogonality_defect) << "\n"
      << "  commutator        " << short_double(d.commutator_norm) << "  (|L| = " << short_double(d.evolution_norm)
      << ")\n"
      << "  obstruction       " << short_double(d.obstruction_norm) << "\n"
      << "  F identity        " << short_double(d.identity_defect) << "\n"
      << "  F^-1 identity     " << short_double(d.inverse_identity_defect) << "\n"
      << "  D^1 residual      q+ " << short_double(r.matching_residual_plus) << ", q- "
      << short_double(r.matching_residual_minus) << "\n";

    o << "\nmeasured directions: pi " << measured_direction(sol.modes.front().pi, sol.modes.back().pi)
      << ", lambda " << measured_direction(sol.modes.front().lambda, sol.modes.back().lambda) << "\n";

    o << "\n  time          split_error   leakage";
    if (r.leakage) o << "       mode_leakage";
    o << "\n";
    for (std::size_t k = 0; k < sol.report.times.size(); ++k) {
        char line[128];
        std::snprintf(line, sizeof line, "  %-12.6g  %-12.6g  %-12.6g", sol.report.times[k], sol.report.split_error[k],
                      sol.report.leakage[k]);
        o << line;
        if (r.leakage) o << "  " << short_double(r.leakage->leakage[k]);
        o << "\n";
    }

    if (!r.sweep.empty()) {
        o << "\nepsilon sweep\n  epsilon       commutator    obstruction   leakage       split_error\n";
        for (const SweepPoint& p : r.sweep) {
            char line[160];
            std::snprintf(line, sizeof line, "  %-12.6g  %-12.6g  %-12.6g  %-12.6g  %-12.6g\n", p.epsilon,
                          p.commutator_norm, p.obstruction_norm, p.leakage, p.split_error);
            o << line;
        }
        for (const auto& [key, slope] : r.sweep_slopes) o << "  slope " << key << " = " << short_double(slope) << "\n";
    }

    if (!r.convergence.empty()) {
        o << "\nreference solver, dt halving at t_end\n  dt            error         ratio\n";
        for (const ConvergenceRow& row : r.convergence) {
            char line[128];
            std::snprintf(line, sizeof line, "  %-12.6g  %-12.6g  %-12.6g\n", row.dt, row.error, row.ratio);
            o << line;
        }
    }

    o << "\ntimings (s)\n";
    for (const auto& [key, t] : r.timings) o << "  " << key << " " << short_double(t) << "\n";
    return o.str();
}

std::string sweep_csv(const RunReport& r) {
    std::string out = "epsilon,commutator_norm,obstruction_norm,leakage,split_error\n";
    for (const SweepPoint& p : r.sweep) {
        for (double v : {p.epsilon, p.commutator_norm, p.obstruction_norm, p.leakage, p.split_error}) {
            out += format_double(v);
            out += ',';
        }
        out.back() = '\n';
    }
    return out;
}

} // namespace

// ---------------------------------------------------------------------------

const std::vector<ProfileSchema>& profile_registry() { return registry_storage(); }

std::string list_profiles() {
    std::ostringstream o;
    for (ProfileKind kind : {ProfileKind::coefficients, ProfileKind::pulse}) {
        o << (kind == ProfileKind::coefficients ? "coefficient profiles\n" : "\npulse profiles\n");
        for (const ProfileSchema& p : registry_storage()) {
            if (p.kind != kind) continue;
            o << "  " << p.name << "\n      " << p.description << "\n";
            for (const ParamSchema& param : p.params) {
                o << "      " << param.name << " = "
                  << (param.default_value ? short_double(*param.default_value) : std::string("(required)")) << "  "
                  << param.description << "\n";
            }
        }
    }
    return o.str();
}

ScenarioConfig parse_scenario(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::exception& e) {
        throw ConfigError("<document>", std::string("not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("<document>", "expected a JSON object");
    reject_unknown_keys(root, "", {"name", "grid", "coefficients", "initial_data", "evolution", "sweeps", "outputs"});

    ScenarioConfig cfg;
    cfg.name = require_string(root, "name", "");
    if (cfg.name.empty()) throw ConfigError("name", "must not be empty");

    const json& grid = require_object(root, "grid", "");
    reject_unknown_keys(grid, "grid", {"n_points", "domain_length", "backend"});
    const double n = require_number(grid, "n_points", "grid");
    if (n < 8 || n > 4096 || n != std::floor(n) || static_cast<long>(n) % 2 != 0) {
        throw ConfigError("grid.n_points", "must be an even integer between 8 and 4096");
    }
    cfg.n_points = static_cast<std::size_t>(n);
    cfg.domain_length = require_number(grid, "domain_length", "grid");
    if (!(cfg.domain_length > 0.0)) throw ConfigError("grid.domain_length", "must be positive");
    if (grid.contains("backend")) {
        try {
            cfg.backend = parse_backend(require_string(grid, "backend", "grid"));
        } catch (const ConfigError&) {
            throw;
        } catch (const Error&) {
            throw ConfigError("grid.backend", "expected spectral or fd4");
        }
    }

    cfg.coefficients = parse_profile(require_object(root, "coefficients", ""), "coefficients",
                                     ProfileKind::coefficients);

    const json& init = require_object(root, "initial_data", "");
    if (require_string(init, "profile", "initial_data") == "pure_mode") {
        reject_unknown_keys(init, "initial_data", {"profile", "which", "pulse"});
        const std::string which = require_string(init, "which", "initial_data");
        if (which == "pi") {
            cfg.initial_data.pure_mode = ModeKind::pi;
        } else if (which == "lambda") {
            cfg.initial_data.pure_mode = ModeKind::lambda;
        } else {
            throw ConfigError("initial_data.which", "expected pi or lambda");
        }
        cfg.initial_data.pulse =
            parse_profile(require_object(init, "pulse", "initial_data"), "initial_data.pulse", ProfileKind::pulse);
        if (cfg.initial_data.pulse.profile == "pure_mode") {
            throw ConfigError("initial_data.pulse.profile", "pure_mode cannot be nested");
        }
    } else {
        cfg.initial_data.pulse = parse_profile(init, "initial_data", ProfileKind::pulse);
    }

    const json& evo = require_object(root, "evolution", "");
    reject_unknown_keys(evo, "evolution", {"t_end", "dt", "output_times"});
    cfg.evolution.t_end = require_number(evo, "t_end", "evolution");
    if (cfg.evolution.t_end < 0.0) throw ConfigError("evolution.t_end", "must be nonnegative");
    if (evo.contains("dt")) cfg.evolution.dt = require_number(evo, "dt", "evolution");
    if (!(cfg.evolution.dt > 0.0)) throw ConfigError("evolution.dt", "must be positive");
    if (evo.contains("output_times")) {
        std::vector<double> times = number_list(evo.at("output_times"), "evolution.output_times");
        if (times.empty()) throw ConfigError("evolution.output_times", "list must not be empty");
        for (double t : times) {
            if (t < 0.0 || t > cfg.evolution.t_end) {
                throw ConfigError("evolution.output_times", "times must lie in [0, t_end]");
            }
        }
        cfg.evolution.output_times = std::move(times);
    }

    if (root.contains("sweeps")) {
        const json& sweeps = require_object(root, "sweeps", "");
        reject_unknown_keys(sweeps, "sweeps", {"epsilon"});
        if (sweeps.contains("epsilon")) {
            cfg.sweep_epsilons = number_list(sweeps.at("epsilon"), "sweeps.epsilon");
            if (!cfg.sweep_epsilons.empty() && !has_param(coefficient_schema(cfg.coefficients), "epsilon")) {
                throw ConfigError("sweeps.epsilon",
                                  "profile '" + cfg.coefficients.profile + "' has no epsilon parameter");
            }
        }
    }

    if (root.contains("outputs")) {
        const json& outputs = require_object(root, "outputs", "");
        reject_unknown_keys(outputs, "outputs", {"directory", "formats"});
        if (outputs.contains("directory")) cfg.output_directory = require_string(outputs, "directory", "outputs");
        if (outputs.contains("formats")) {
            const json& formats = outputs.at("formats");
            if (!formats.is_array()) throw ConfigError("outputs.formats", "expected a list of strings");
            for (std::size_t i = 0; i < formats.size(); ++i) {
                const std::string here = "outputs.formats[" + std::to_string(i) + "]";
                if (!formats[i].is_string()) throw ConfigError(here, "expected a string");
                const std::string f = formats[i].get<std::string>();
                if (f != "sweep_csv") throw ConfigError(here, "unknown format '" + f + "'");
                cfg.formats.push_back(f);
            }
        }
    }
    return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("<document>", "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

CoefficientSet build_coefficients(const GridSpec& grid, const ProfileSpec& spec, std::optional<double> epsilon) {
    const ProfileSchema& schema = coefficient_schema(spec);
    const std::map<std::string, double> given = with_epsilon(spec, epsilon, schema);
    validate_params(schema, given, "coefficients.params");
    const Params p(schema, given, "coefficients.params");
    const double eps = has_param(schema, "epsilon") ? p.get("epsilon") : 0.0;

    if (auto medium = build_medium(grid, spec, epsilon)) return to_canonical(*medium, eps);

    if (spec.profile == "constant") {
        return CoefficientSet::particular(Field::constant(grid, p.get("b")), Field::constant(grid, p.get("c")));
    }
    if (spec.profile == "linear_ramp") {
        const double fraction = p.get("ramp_fraction");
        if (!(fraction > 0.0 && fraction < 1.0)) {
            throw ConfigError("coefficients.params.ramp_fraction", "must lie in (0, 1)");
        }
        const double c0 = p.get("c0");
        const double L = grid.domain_length();
        return CoefficientSet::particular(
            Field::constant(grid, p.get("b")),
            Field::sample(grid, [&](double x) { return c0 * (1.0 + eps * ramp(x, L, fraction)); }), eps);
    }
    if (spec.profile == "sine_perturbation") {
        return CoefficientSet::particular(Field::constant(grid, p.get("b")),
                                          p.get("c0") * sine_modulation(grid, eps, p.mode_number("wavenumber")), eps);
    }
    if (spec.profile == "kappa_family") {
        const Field b = p.get("b0") * sine_modulation(grid, eps, p.mode_number("wavenumber"));
        return CoefficientSet::particular(b, p.get("kappa") * b, eps);
    }
    throw ConfigError("coefficients.profile", "profile '" + spec.profile + "' has no builder");
}

std::optional<AcousticMedium> build_medium(const GridSpec& grid, const ProfileSpec& spec,
                                           std::optional<double> epsilon) {
    const bool isothermal = spec.profile == "acoustic_isothermal";
    if (!isothermal && spec.profile != "acoustic_isobaric") return std::nullopt;
    const ProfileSchema& schema = coefficient_schema(spec);
    const std::map<std::string, double> given = with_epsilon(spec, epsilon, schema);
    const Params p(schema, given, "coefficients.params");

    const Field shape = sine_modulation(grid, p.get("epsilon"), p.mode_number("wavenumber"));
    const Field rho0 = p.positive("rho0") * shape;
    const Field p0 = isothermal ? p.positive("p0") * shape : Field::constant(grid, p.positive("p0"));
    return AcousticMedium::create(rho0, p0, p.get("gamma"));
}

Field build_pulse(const GridSpec& grid, const ProfileSpec& spec) {
    const ProfileSchema* schema = find_profile(spec.profile, ProfileKind::pulse);
    if (!schema || spec.profile == "pure_mode") {
        throw ConfigError("initial_data.profile", "unknown pulse profile '" + spec.profile + "'");
    }
    const Params p(*schema, spec.params, "initial_data.params");
    const double L = grid.domain_length();
    if (spec.profile == "gaussian") {
        const double center = p.get("center");
        const double width = p.positive("width");
        const double amplitude = p.get("amplitude");
        return Field::sample(grid, [=](double x) {
            const double z = std::remainder(x - center, L) / width;
            return amplitude * std::exp(-0.5 * z * z);
        });
    }
    const double k = kTwoPi * p.mode_number("wavenumber") / L;
    const double amplitude = p.get("amplitude");
    return Field::sample(grid, [=](double x) { return amplitude * std::sin(k * x); });
}

CauchyData build_initial_data(const Discretization& disc, const CoefficientSet& coeffs, const InitialDataSpec& spec) {
    const Field pulse = build_pulse(disc.grid(), spec.pulse);
    if (!spec.pure_mode) return CauchyData(pulse, Field::zeros(disc.grid()));
    const SplitProjectors proj = build_split_projectors(disc, coeffs);
    StateVec s = pure_mode_state(proj, pulse, *spec.pure_mode);
    return CauchyData(std::move(s.u), std::move(s.v));
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
        if (x[i] > 0.0 && y[i] > 0.0) pts.emplace_back(std::log(x[i]), std::log(y[i]));
    }
    if (pts.size() < 2) return std::nan("");
    double mx = 0.0, my = 0.0;
    for (const auto& [a, b] : pts) {
        mx += a;
        my += b;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double num = 0.0, den = 0.0;
    for (const auto& [a, b] : pts) {
        num += (a - mx) * (b - my);
        den += (a - mx) * (a - mx);
    }
    return den > 0.0 ? num / den : std::nan("");
}

RunReport run_scenario(const ScenarioConfig& config, const RunOptions& options) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    RunReport report;
    report.config = config;
    try {
        const GridSpec grid = GridSpec::create(config.n_points, config.domain_length);
        auto t = clock::now();
        const Discretization disc = Discretization::build(grid, config.backend);
        report.timings["operators"] = seconds_since(t);

        const CoefficientSet coeffs = build_coefficients(grid, config.coefficients);
        const CauchyData data = build_initial_data(disc, coeffs, config.initial_data);
        report.max_speed = coeffs.max_speed();

        t = clock::now();
        report.diagnostics = commutator_diagnostics(disc, coeffs);
        for (SymbolMode mode : {SymbolMode::plus, SymbolMode::minus}) {
            const MatchingResiduals res = matching_residuals(disc, coeffs, leading_symbol(coeffs, mode));
            (mode == SymbolMode::plus ? report.matching_residual_plus : report.matching_residual_minus) =
                field_norm(res.res1, NormKind::linf);
        }
        report.timings["diagnostics"] = seconds_since(t);

        t = clock::now();
        report.solution = split_solve(disc, coeffs, data, config.evolution);
        if (config.initial_data.pure_mode == ModeKind::pi) {
            report.leakage = mode_leakage(disc, coeffs, data, config.evolution);
        }
        report.timings["evolution"] = seconds_since(t);

        t = clock::now();
        if (!config.sweep_epsilons.empty()) {
            report.sweep = run_sweep(disc, config, options.threads);
            std::vector<double> eps, comm, leak, err;
            for (const SweepPoint& p : report.sweep) {
                eps.push_back(p.epsilon);
                comm.push_back(p.commutator_norm);
                leak.push_back(p.leakage);
                err.push_back(p.split_error);
            }
            for (auto [key, ys] : {std::pair{"commutator_norm", &comm}, std::pair{"leakage", &leak},
                                   std::pair{"split_error", &err}}) {
                const double slope = loglog_slope(eps, *ys);
                if (std::isfinite(slope)) report.sweep_slopes[key] = slope;
            }
        }
        report.timings["sweep"] = seconds_since(t);

        t = clock::now();
        report.convergence = convergence_table(disc, coeffs, data, config.evolution.t_end);
        report.timings["convergence"] = seconds_since(t);
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw Error(e.code(), "scenario '" + config.name + "': " + e.what());
    }
    report.timings["total"] = seconds_since(start);
    return report;
}

void write_outputs(const RunReport& report, const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory);
    write_file(directory / "states.csv", states_csv(report));
    write_file(directory / "diagnostics.json", diagnostics_json(report));
    write_file(directory / "report.txt", report_text(report));
    if (std::find(report.config.formats.begin(), report.config.formats.end(), "sweep_csv") !=
        report.config.formats.end()) {
        write_file(directory / "sweep.csv", sweep_csv(report));
    }
}

} // namespace wavesplit
