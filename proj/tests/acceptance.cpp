// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wavesplit/acoustics.hpp"
#include "wavesplit/const_coeff.hpp"
#include "wavesplit/scenario.hpp"
#include "wavesplit/symbol_calculus.hpp"
#include "wavesplit/var_projectors.hpp"
#include "wavesplit/wave_solvers.hpp"

using namespace wavesplit;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    // Records `value` against a bound and keeps a short trace for the summary line.
    void at_most(const char* what, double value, double bound) {
        const bool ok = std::isfinite(value) && value <= bound;
        pass = pass && ok;
        note(what, value, ok);
    }
    void within(const char* what, double value, double target, double tol) {
        const bool ok = std::isfinite(value) && std::abs(value - target) <= tol;
        pass = pass && ok;
        note(what, value, ok);
    }
    void holds(const char* what, bool ok) {
        pass = pass && ok;
        detail << (detail.tellp() > 0 ? ", " : "") << what << (ok ? "" : " [violated]");
    }

private:
    void note(const char* what, double value, bool ok) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.4g", value);
        detail << (detail.tellp() > 0 ? ", " : "") << what << "=" << buf << (ok ? "" : " [violated]");
    }
};

double l2(const Field& a, const Field& b) { return field_norm(a - b, NormKind::l2); }

Field sample(const GridSpec& g, std::function<double(double)> fn) { return Field::sample(g, fn); }

Field gaussian(const GridSpec& g, double center, double width) {
    const double L = g.domain_length();
    return sample(g, [=](double x) {
        const double z = std::remainder(x - center, L) / width;
        return std::exp(-0.5 * z * z);
    });
}

Field sine_bump(const GridSpec& g, double amplitude) {
    return sample(g, [=](double x) { return 1.0 + amplitude * std::sin(x); });
}

double slope(const std::vector<double>& x, const std::vector<double>& y) { return loglog_slope(x, y); }

// induced infinity norm (max absolute row sum)
template <class M>
double inf_norm(const M& m) {
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

// 1. d'Alembert recovery through project -> translate -> reconstruct
Outcome constant_coefficients() {
    Outcome out;
    const ConstCoeffs k{0.0, 1.0, 1.0, 0.0};
    const EigenBasis e = eigen_basis(k);
    struct Case {
        const char* name;
        double length;
        std::function<double(double)> u0;
    };
    const std::vector<Case> cases{
        {"sine", kTwoPi, [](double x) { return std::sin(x); }},
        {"gaussian", 20.0, [](double x) { return std::exp(-0.5 * (x - 10.0) * (x - 10.0)); }},
    };
    for (const Case& c : cases) {
        const GridSpec g = GridSpec::create(128, c.length);
        const Discretization disc = Discretization::build(g, Backend::spectral);
        const CoefficientSet cs = CoefficientSet::particular(Field::constant(g, 1.0), Field::constant(g, 1.0));
        const CauchyData data(sample(g, c.u0), Field::zeros(g));
        const EvolutionResult ref = reference_evolve(disc, cs, data, {2.0, 1e-3, std::vector<double>{2.0}});
        const StateVec split = reconstruct(evolve_modes(split_cauchy(data.state(), e), e, 2.0), e);
        const double err = std::max(l2(split.u, ref.states.back().u), l2(split.v, ref.states.back().v));
        out.at_most(c.name, err, 1e-6);
    }
    return out;
}

// 2. constant-coefficient projector algebra, 20 random systems
Outcome projector_algebra() {
    Outcome out;
    std::mt19937 rng(20240601);
    std::uniform_real_distribution<double> any(-3.0, 3.0);
    std::uniform_real_distribution<double> mag(0.2, 3.0);
    double worst_alg = 0.0, worst_comm = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        ConstCoeffs k;
        do {
            k = {any(rng), mag(rng), mag(rng), any(rng)};
            if (rng() % 2) {
                k.b = -k.b;
                k.c = -k.c;
            }
        } while (k.discriminant() <= 0.1);
        const ConstProjectors p = projectors(eigen_basis(k));
        const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
        worst_alg = std::max({worst_alg, inf_norm(p.p1 * p.p1 - p.p1), inf_norm(p.p2 * p.p2 - p.p2),
                              inf_norm(p.p1 + p.p2 - id), inf_norm(p.p1 * p.p2)});
        Eigen::Matrix2d a;
        a << k.a, k.b, k.c, k.d;
        for (double wave : {1.0, 5.0, 17.0}) {
            // symbol of the evolution operator at wavenumber k: i k A
            const Eigen::Matrix2cd l = std::complex<double>(0.0, wave) * a.cast<std::complex<double>>();
            for (const Eigen::Matrix2d* pi : {&p.p1, &p.p2}) {
                const Eigen::Matrix2cd pc = pi->cast<std::complex<double>>();
                worst_comm = std::max(worst_comm, inf_norm(pc * l - l * pc) / wave);
            }
        }
    }
    out.at_most("algebra", worst_alg, 1e-13);
    out.at_most("commutator/|k|", worst_comm, 1e-12);
    return out;
}

// 3. variable-coefficient identities on the resolved band
Outcome variable_projectors() {
    Outcome out;
    const GridSpec g = GridSpec::create(256, kTwoPi);
    const Discretization disc = Discretization::build(g, Backend::spectral);
    const CoefficientSet cs = CoefficientSet::particular(Field::constant(g, 1.0), sine_bump(g, 0.1));
    const SplitProjectors p = build_split_projectors(disc, cs);
    const OperatorMatrix s = resolved_projector(g);
    auto defect = [&](const BlockOperator& x) { return inf_norm(compress(x, s).dense()); };
    out.at_most("idempotency", std::max(defect(p.p1 * p.p1 - p.p1), defect(p.p2 * p.p2 - p.p2)), 1e-8);
    out.at_most("orthogonality", std::max(defect(p.p1 * p.p2), defect(p.p2 * p.p1)), 1e-8);
    const OperatorMatrix dfd = disc.antiderivative() * build_multiplier(p.f) * disc.derivative();
    out.at_most("f-D^-1f'", inf_norm((s * (p.lower - dfd) * s).matrix()), 1e-9);
    return out;
}

// 4. exact diagonalization for c = kappa b
Outcome diagonalization_family() {
    Outcome out;
    const GridSpec g = GridSpec::create(256, kTwoPi);
    const Discretization disc = Discretization::build(g, Backend::spectral);
    const Field b = sine_bump(g, 0.2);
    const CauchyData data(gaussian(g, kPi, 0.5), Field::zeros(g));
    double obstruction = 0.0, commutator = 0.0, split_error = 0.0;
    for (double kappa : {0.5, 2.5}) {
        const CoefficientSet cs = CoefficientSet::particular(b, kappa * b);
        obstruction = std::max(obstruction, field_norm(diag_obstruction(disc, cs), NormKind::linf));
        commutator = std::max(commutator, commutator_diagnostics(disc, cs).commutator_norm);
        const SplitSolution sol = split_solve(disc, cs, data, {1.0, 1e-3, std::nullopt});
        for (double err : sol.report.split_error) split_error = std::max(split_error, err);
    }
    out.at_most("obstruction", obstruction, 1e-8);
    out.at_most("commutator", commutator, 1e-8);
    out.at_most("split_error", split_error, 1e-5);
    return out;
}

// 5. linear scaling in the inhomogeneity
Outcome epsilon_scaling() {
    Outcome out;
    const GridSpec g = GridSpec::create(256, kTwoPi);
    const Discretization disc = Discretization::build(g, Backend::spectral);
    const Field one = Field::constant(g, 1.0);
    const Field pulse = gaussian(g, kPi, 0.5);
    const std::vector<double> eps{0.01, 0.02, 0.04};
    std::vector<double> comm, leak, err;
    for (double e : eps) {
        const CoefficientSet cs = CoefficientSet::particular(one, sine_bump(g, e), e);
        comm.push_back(commutator_diagnostics(disc, cs).commutator_norm);
        const SplitSolution sol = split_solve(disc, cs, CauchyData(pulse, Field::zeros(g)), {1.0, 1e-3, std::nullopt});
        err.push_back(sol.report.split_error.back());
        const StateVec pure = pure_mode_state(build_split_projectors(disc, cs), pulse, ModeKind::pi);
        leak.push_back(
            mode_leakage(disc, cs, CauchyData(pure.u, pure.v), {1.0, 1e-3, std::vector<double>{1.0}}).leakage.back());
    }
    out.within("commutator slope", slope(eps, comm), 1.0, 0.2);
    out.within("leakage slope", slope(eps, leak), 1.0, 0.2);
    out.within("split ratio 1", err[1] / err[0], 2.0, 0.4);
    out.within("split ratio 2", err[2] / err[1], 2.0, 0.4);
    return out;
}

// 6. leading symbol against eigen-speeds and the D^1 matching line
Outcome symbol_consistency() {
    Outcome out;
    const GridSpec g = GridSpec::create(64, kTwoPi);
    std::mt19937 rng(777);
    std::uniform_real_distribution<double> any(-2.0, 2.0);
    std::uniform_real_distribution<double> mag(0.3, 2.0);
    double speed_gap = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        ConstCoeffs k{any(rng), mag(rng), mag(rng), any(rng)};
        const EigenBasis e = eigen_basis(k);
        const QPair q = q_pm(CoefficientSet::create(Field::constant(g, k.a), Field::constant(g, k.b),
                                                    Field::constant(g, k.c), Field::constant(g, k.d)));
        speed_gap = std::max({speed_gap, field_norm(q.plus - Field::constant(g, e.speed1), NormKind::linf),
                              field_norm(q.minus - Field::constant(g, e.speed2), NormKind::linf)});
    }
    out.at_most("q vs speeds", speed_gap, 1e-13);

    double residual = 0.0;
    const Field b = sine_bump(g, 0.3);
    const Field c = sample(g, [](double x) { return 2.0 + 0.5 * std::cos(2 * x); });
    for (Backend backend : {Backend::spectral, Backend::fd4}) {
        const Discretization disc = Discretization::build(g, backend);
        const CoefficientSet cs = CoefficientSet::particular(b, c);
        for (SymbolMode mode : {SymbolMode::plus, SymbolMode::minus}) {
            const MatchingResiduals r = matching_residuals(disc, cs, leading_symbol(cs, mode));
            residual = std::max(residual, field_norm(r.res1, NormKind::linf));
        }
    }
    out.at_most("D^1 residual", residual, 1e-12);
    return out;
}

// 7. acoustics: front speed, residuals, energy
Outcome acoustics() {
    Outcome out;
    {
        const GridSpec g = GridSpec::create(256, 40.0);
        const Discretization disc = Discretization::build(g, Backend::spectral);
        const AcousticMedium air = AcousticMedium::create(Field::constant(g, 1.4), Field::constant(g, 1.0), 1.4);
        const CauchyData data(gaussian(g, 20.0, 1.0), Field::zeros(g));
        const EvolutionResult r =
            reference_evolve(disc, to_canonical(air), data, {8.0, 1e-2, std::vector<double>{4.0, 8.0}});
        // centroid of the right-going half
        auto front = [&](const StateVec& s) {
            const Field rho = physical_fields(s, air).rho_prime;
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i < g.n_points(); ++i) {
                if (g.x(i) < 20.0) continue;
                num += g.x(i) * rho[i] * rho[i];
                den += rho[i] * rho[i];
            }
            return num / den;
        };
        const double speed = (front(r.states[2]) - front(r.states[1])) / 4.0;
        out.within("front speed", speed, 1.0, 0.01);
    }
    {
        const GridSpec g = GridSpec::create(256, 20.0);
        const Discretization disc = Discretization::build(g, Backend::spectral);
        const double dt = 1e-3;
        double worst = 0.0;
        for (double eps : {0.0, 0.1}) {
            const double k = kTwoPi / g.domain_length();
            const AcousticMedium medium = AcousticMedium::create(
                sample(g, [=](double x) { return 1.4 * (1.0 + eps * std::sin(k * x)); }), Field::constant(g, 1.0), 1.4);
            const CauchyData data(gaussian(g, 10.0, 1.0), Field::zeros(g));
            const EvolutionResult r = reference_evolve(disc, to_canonical(medium), data,
                                                       {1.0 + dt, dt, std::vector<double>{1.0 - dt, 1.0, 1.0 + dt}});
            const AcousticResiduals res = acoustic_residuals(disc, medium, r.states[1], r.states[2], r.states[3], dt);
            worst = std::max({worst, res.momentum, res.continuity});
            if (eps == 0.0) worst = std::max(worst, res.momentum_pressure);
        }
        out.at_most("residual", worst, 1e-6);
    }
    {
        const GridSpec g = GridSpec::create(128, 40.0);
        const Discretization disc = Discretization::build(g, Backend::spectral);
        const CoefficientSet cs =
            to_canonical(AcousticMedium::create(Field::constant(g, 1.4), Field::constant(g, 1.0), 1.4));
        const CauchyData data(gaussian(g, 20.0, 1.5), 0.3 * gaussian(g, 18.0, 1.0));
        const EvolutionResult r = reference_evolve(disc, cs, data, {10.0, 1e-2, std::nullopt});
        const double e0 = quadratic_energy(cs, r.states.front());
        double drift = 0.0;
        for (const StateVec& s : r.states) drift = std::max(drift, std::abs(quadratic_energy(cs, s) - e0) / e0);
        out.at_most("energy drift", drift, 1e-6);
    }
    return out;
}

// 8. convergence orders
Outcome convergence() {
    Outcome out;
    {
        const GridSpec g = GridSpec::create(16, kTwoPi);
        const Discretization disc = Discretization::build(g, Backend::spectral);
        const CoefficientSet cs = CoefficientSet::particular(Field::constant(g, 1.0), Field::constant(g, 1.0));
        const CauchyData data(sample(g, [](double x) { return std::sin(x); }), Field::zeros(g));
        const Field exact = sample(g, [](double x) { return std::sin(x) * std::cos(1.0); });
        std::vector<double> errors;
        for (double dt : {0.125, 0.0625, 0.03125}) {
            errors.push_back(l2(reference_evolve(disc, cs, data, {1.0, dt, std::vector<double>{1.0}}).states.back().u,
                                exact));
        }
        out.within("rk4 ratio 1", errors[0] / errors[1], 16.0, 4.0);
        out.within("rk4 ratio 2", errors[1] / errors[2], 16.0, 4.0);
    }
    {
        std::vector<double> errors;
        for (std::size_t n : {32, 64, 128}) {
            const GridSpec g = GridSpec::create(n, kTwoPi);
            const Field f = sample(g, [](double x) { return std::exp(std::sin(x)); });
            const Field df = sample(g, [](double x) { return std::cos(x) * std::exp(std::sin(x)); });
            errors.push_back(field_norm(Discretization::build(g, Backend::fd4).differentiate(f) - df, NormKind::linf));
        }
        out.within("fd4 ratio 1", errors[0] / errors[1], 16.0, 4.0);
        out.within("fd4 ratio 2", errors[1] / errors[2], 16.0, 4.0);
    }
    {
        const GridSpec g = GridSpec::create(64, kTwoPi);
        const Discretization disc = Discretization::build(g, Backend::spectral);
        double worst = 0.0;
        for (int k = 1; k < 32; ++k) {
            const Field f = sample(g, [=](double x) { return std::sin(k * x + 0.3); });
            const Field df = sample(g, [=](double x) { return k * std::cos(k * x + 0.3); });
            worst = std::max(worst, field_norm(disc.differentiate(f) - df, NormKind::linf) / k);
        }
        out.at_most("spectral rel error", worst, 1e-10);
    }
    return out;
}

// 9. CLI determinism over every bundled scenario
std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

int run_cli(const std::string& args) {
    const std::string cmd = "\"" WAVESPLIT_CLI_PATH "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism() {
    Outcome out;
    const fs::path scratch = fs::temp_directory_path() / "wavesplit_acceptance";
    fs::remove_all(scratch);
    std::vector<fs::path> configs;
    for (const auto& entry : fs::directory_iterator(WAVESPLIT_SCENARIO_DIR)) {
        if (entry.path().extension() == ".json") configs.push_back(entry.path());
    }
    std::sort(configs.begin(), configs.end());
    out.holds((std::to_string(configs.size()) + " scenarios").c_str(), !configs.empty());
    for (const fs::path& cfg : configs) {
        const std::string name = cfg.stem().string();
        const fs::path a = scratch / (name + "_a");
        const fs::path b = scratch / (name + "_b");
        const bool ran = run_cli("run \"" + cfg.string() + "\" --output-dir \"" + a.string() + "\"") == 0 &&
                         run_cli("run \"" + cfg.string() + "\" --threads 2 --output-dir \"" + b.string() + "\"") == 0;
        const bool same = ran && fs::exists(a / "states.csv") && slurp(a / "states.csv") == slurp(b / "states.csv") &&
                          slurp(a / "diagnostics.json") == slurp(b / "diagnostics.json");
        out.holds(name.c_str(), ran && same);
    }
    fs::remove_all(scratch);
    return out;
}

} // namespace

int main() {
    const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
        {"constant-coefficient exactness", constant_coefficients},
        {"projector algebra", projector_algebra},
        {"variable-coefficient projector identities", variable_projectors},
        {"diagonalization family", diagonalization_family},
        {"epsilon scaling", epsilon_scaling},
        {"symbol consistency", symbol_consistency},
        {"acoustics", acoustics},
        {"convergence orders", convergence},
        {"determinism and bundled scenarios", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "threw: " << e.what();
        }
        std::printf("criterion %zu: %s  %s (%s)\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                    o.detail.str().c_str());
        std::fflush(stdout);
        failed += o.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
