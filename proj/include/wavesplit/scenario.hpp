#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wavesplit/acoustics.hpp"
#include "wavesplit/wave_solvers.hpp"

namespace wavesplit {

inline constexpr std::string_view kVersion = "0.1.0";

/// Named profile with numeric parameters, e.g. {"sine_perturbation", {b: 1, c0: 1, epsilon: 0.1}}.
struct ProfileSpec {
    std::string profile;
    std::map<std::string, double> params;
};

/// Initial data: a pulse profile, or a pure mode built from a nested pulse.
struct InitialDataSpec {
    ProfileSpec pulse;
    std::optional<ModeKind> pure_mode;
};

struct ScenarioConfig {
    std::string name;
    std::size_t n_points = 0;
    double domain_length = 0.0;
    Backend backend = Backend::spectral;
    ProfileSpec coefficients;
    InitialDataSpec initial_data;
    EvolutionOptions evolution;
    std::vector<double> sweep_epsilons;
    std::filesystem::path output_directory = "out";
    std::vector<std::string> formats;
};

/// Parses a JSON scenario. Throws ConfigError naming the offending field.
ScenarioConfig parse_scenario(std::string_view text);
ScenarioConfig load_scenario(const std::filesystem::path& path);

enum class ProfileKind { coefficients, pulse };

struct ParamSchema {
    std::string name;
    std::optional<double> default_value; // missing means required
    std::string description;
};

struct ProfileSchema {
    std::string name;
    ProfileKind kind;
    std::string description;
    std::vector<ParamSchema> params;
};

/// Registered profiles in listing order.
const std::vector<ProfileSchema>& profile_registry();

/// Human-readable listing of every profile and its parameters.
std::string list_profiles();

/// Coefficients of a profile on `grid`; `epsilon` overrides the profile's epsilon parameter.
/// Throws ConfigError for unknown profiles, parameters, or an override on a profile without epsilon.
CoefficientSet build_coefficients(const GridSpec& grid, const ProfileSpec& spec,
                                  std::optional<double> epsilon = std::nullopt);

/// Background medium of the acoustic profiles; nullopt for the others.
std::optional<AcousticMedium> build_medium(const GridSpec& grid, const ProfileSpec& spec,
                                           std::optional<double> epsilon = std::nullopt);

/// Pulse profile sampled on the grid.
Field build_pulse(const GridSpec& grid, const ProfileSpec& spec);

/// (u0, v0) for a scenario: (pulse, 0), or a pure mode of the split projectors.
CauchyData build_initial_data(const Discretization& disc, const CoefficientSet& coeffs, const InitialDataSpec& spec);

struct SweepPoint {
    double epsilon = 0.0;
    double commutator_norm = 0.0;
    double obstruction_norm = 0.0;
    double leakage = 0.0;     // at t_end, Pi-pure version of the pulse
    double split_error = 0.0; // at t_end, the scenario's initial data
};

struct ConvergenceRow {
    double dt = 0.0;
    double error = 0.0; // L2 distance of u(t_end) to the finest run
    double ratio = 0.0; // previous error / this error; 0 for the first row
};

struct RunReport {
    ScenarioConfig config;
    SplitDiagnostics diagnostics;
    SplitSolution solution;
    std::optional<LeakageReport> leakage;
    double matching_residual_plus = 0.0;  // |D^1 line| for (0, q+, 0)
    double matching_residual_minus = 0.0; // |D^1 line| for (0, q-, 0)
    double max_speed = 0.0;
    std::vector<SweepPoint> sweep;
    std::map<std::string, double> sweep_slopes;
    std::vector<ConvergenceRow> convergence;
    std::map<std::string, double> timings; // seconds, report.txt only
};

struct RunOptions {
    std::size_t threads = 1;
};

/// Runs the split solver, the diagnostics, the leakage measurement for
/// pure-mode data, the epsilon sweep and the dt-halving table. Deterministic
/// for a given config. Numeric failures are rethrown with the scenario name.
RunReport run_scenario(const ScenarioConfig& config, const RunOptions& options = {});

/// Writes states.csv, diagnostics.json, report.txt (and sweep.csv when
/// requested) into `directory`, creating it if needed.
void write_outputs(const RunReport& report, const std::filesystem::path& directory);

/// Least-squares slope of log(y) against log(x). Nonpositive entries are skipped.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

} // namespace wavesplit
