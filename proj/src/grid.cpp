#include "wavesplit/grid.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/SVD>
#include <unsupported/Eigen/FFT>

namespace wavesplit {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::SingularFactorization: return "SingularFactorization";
    case ErrorCode::NotHyperbolic: return "NotHyperbolic";
    case ErrorCode::DegenerateB: return "DegenerateB";
    case ErrorCode::DegenerateEigenbasis: return "DegenerateEigenbasis";
    case ErrorCode::WrongRegime: return "WrongRegime";
    case ErrorCode::NonPositiveBC: return "NonPositiveBC";
    case ErrorCode::SingularPi: return "SingularPi";
    case ErrorCode::CflViolation: return "CflViolation";
    case ErrorCode::OdeStepFailure: return "OdeStepFailure";
    case ErrorCode::NotPureMode: return "NotPureMode";
    case ErrorCode::NonPhysicalMedium: return "NonPhysicalMedium";
    case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

std::string_view to_string(Backend backend) {
    return backend == Backend::spectral ? "spectral" : "fd4";
}

Backend parse_backend(std::string_view name) {
    if (name == "spectral") return Backend::spectral;
    if (name == "fd4") return Backend::fd4;
    throw Error(ErrorCode::InvalidArgument, "unknown backend '" + std::string(name) + "'");
}

GridSpec GridSpec::create(std::size_t n_points, double domain_length) {
    if (n_points < 8 || n_points % 2 != 0) {
        throw Error(ErrorCode::InvalidArgument,
                    "n_points must be even and >= 8, got " + std::to_string(n_points));
    }
    if (!(domain_length > 0.0) || !std::isfinite(domain_length)) {
        throw Error(ErrorCode::InvalidArgument, "domain_length must be positive and finite");
    }
    return GridSpec(n_points, domain_length);
}

Eigen::VectorXd GridSpec::nodes() const {
    Eigen::VectorXd x(static_cast<Eigen::Index>(n_points_));
    for (std::size_t i = 0; i < n_points_; ++i) x[static_cast<Eigen::Index>(i)] = this->x(i);
    return x;
}

void require_same_grid(const GridSpec& a, const GridSpec& b, std::string_view context) {
    if (!(a == b)) {
        throw Error(ErrorCode::GridMismatch,
                    std::string(context) + ": operands live on different grids (N=" +
                        std::to_string(a.n_points()) + " vs N=" + std::to_string(b.n_points()) + ")");
    }
}

// ---------------------------------------------------------------------------
// Field

Field::Field(GridSpec grid, Eigen::VectorXd values) : grid_(grid), values_(std::move(values)) {
    if (static_cast<std::size_t>(values_.size()) != grid_.n_points()) {
        throw Error(ErrorCode::InvalidArgument, "field length " + std::to_string(values_.size()) +
                                                    " does not match grid size " +
                                                    std::to_string(grid_.n_points()));
    }
    if (!values_.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, "field contains non-finite entries");
    }
}

Field Field::zeros(const GridSpec& grid) {
    return Field(grid, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.n_points())));
}

Field Field::constant(const GridSpec& grid, double value) {
    return Field(grid, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(grid.n_points()), value));
}

Field operator+(const Field& lhs, const Field& rhs) {
    require_same_grid(lhs.grid(), rhs.grid(), "field +");
    return Field(lhs.grid(), lhs.values() + rhs.values());
}

Field operator-(const Field& lhs, const Field& rhs) {
    require_same_grid(lhs.grid(), rhs.grid(), "field -");
    return Field(lhs.grid(), lhs.values() - rhs.values());
}

Field operator-(const Field& f) { return Field(f.grid(), -f.values()); }

Field operator*(const Field& lhs, const Field& rhs) {
    require_same_grid(lhs.grid(), rhs.grid(), "field *");
    return Field(lhs.grid(), lhs.values().cwiseProduct(rhs.values()));
}

Field operator/(const Field& lhs, const Field& rhs) {
    require_same_grid(lhs.grid(), rhs.grid(), "field /");
    return Field(lhs.grid(), lhs.values().cwiseQuotient(rhs.values()));
}

Field operator*(double s, const Field& f) { return Field(f.grid(), s * f.values()); }
Field operator*(const Field& f, double s) { return s * f; }

// ---------------------------------------------------------------------------
// OperatorMatrix

OperatorMatrix::OperatorMatrix(GridSpec grid, Eigen::MatrixXd entries)
    : grid_(grid), entries_(std::move(entries)) {
    const auto n = static_cast<Eigen::Index>(grid_.n_points());
    if (entries_.rows() != n || entries_.cols() != n) {
        throw Error(ErrorCode::InvalidArgument, "operator matrix must be " + std::to_string(n) +
                                                    "x" + std::to_string(n));
    }
    if (!entries_.allFinite()) {
        throw Error(ErrorCode::InvalidArgument, "operator matrix contains non-finite entries");
    }
}

OperatorMatrix OperatorMatrix::identity(const GridSpec& grid) {
    const auto n = static_cast<Eigen::Index>(grid.n_points());
    return OperatorMatrix(grid, Eigen::MatrixXd::Identity(n, n));
}

OperatorMatrix OperatorMatrix::zero(const GridSpec& grid) {
    const auto n = static_cast<Eigen::Index>(grid.n_points());
    return OperatorMatrix(grid, Eigen::MatrixXd::Zero(n, n));
}

Field OperatorMatrix::apply(const Field& f) const {
    require_same_grid(grid_, f.grid(), "operator apply");
    return Field(grid_, entries_ * f.values());
}

OperatorMatrix operator*(const OperatorMatrix& lhs, const OperatorMatrix& rhs) {
    require_same_grid(lhs.grid(), rhs.grid(), "compose");
    return OperatorMatrix(lhs.grid(), lhs.matrix() * rhs.matrix());
}

OperatorMatrix operator+(const OperatorMatrix& lhs, const OperatorMatrix& rhs) {
    require_same_grid(lhs.grid(), rhs.grid(), "operator +");
    return OperatorMatrix(lhs.grid(), lhs.matrix() + rhs.matrix());
}

OperatorMatrix operator-(const OperatorMatrix& lhs, const OperatorMatrix& rhs) {
    require_same_grid(lhs.grid(), rhs.grid(), "operator -");
    return OperatorMatrix(lhs.grid(), lhs.matrix() - rhs.matrix());
}

OperatorMatrix operator*(double s, const OperatorMatrix& op) {
    return OperatorMatrix(op.grid(), s * op.matrix());
}

StateVec::StateVec(Field u_, Field v_) : u(std::move(u_)), v(std::move(v_)) {
    require_same_grid(u.grid(), v.grid(), "state");
}

// ---------------------------------------------------------------------------
// Derivatives

namespace {

// Circulant matrix with first-row generator c: A(i, j) = c[(j - i) mod N].
Eigen::MatrixXd circulant(const std::vector<double>& c) {
    const auto n = static_cast<Eigen::Index>(c.size());
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            a(i, j) = c[static_cast<std::size_t>((j - i + n) % n)];
        }
    }
    return a;
}

} // namespace

OperatorMatrix build_derivative(const GridSpec& grid, Backend backend) {
    const std::size_t n = grid.n_points();
    std::vector<double> row(n, 0.0);
    if (backend == Backend::spectral) {
        // Entry for offset m = j - i: -(pi/L) (-1)^m cot(pi m / N); the Nyquist
        // offset m = N/2 is exactly zero and pairs m, N-m are exact negatives.
        const double scale = std::numbers::pi / grid.domain_length();
        for (std::size_t m = 1; m < n / 2; ++m) {
            const double sign = (m % 2 == 0) ? 1.0 : -1.0;
            const double value =
                -scale * sign / std::tan(std::numbers::pi * static_cast<double>(m) / static_cast<double>(n));
            row[m] = value;
            row[n - m] = -value;
        }
    } else {
        const double h = grid.dx();
        row[1] = 8.0 / (12.0 * h);
        row[n - 1] = -8.0 / (12.0 * h);
        row[2] = -1.0 / (12.0 * h);
        row[n - 2] = 1.0 / (12.0 * h);
    }
    return OperatorMatrix(grid, circulant(row));
}

OperatorMatrix build_antiderivative(const GridSpec& grid, const OperatorMatrix& d) {
    require_same_grid(grid, d.grid(), "build_antiderivative");
    Eigen::BDCSVD<Eigen::MatrixXd> svd(d.matrix(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (svd.info() != Eigen::Success) {
        throw Error(ErrorCode::SingularFactorization, "SVD of the derivative did not converge");
    }
    const Eigen::VectorXd& sigma = svd.singularValues();
    const double cutoff = 1e-10 * sigma[0];
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(sigma.size());
    for (Eigen::Index k = 0; k < sigma.size(); ++k) {
        if (sigma[k] > cutoff) inv[k] = 1.0 / sigma[k];
    }
    Eigen::MatrixXd pinv = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
    return OperatorMatrix(grid, std::move(pinv));
}

OperatorMatrix build_multiplier(const Field& field) {
    return OperatorMatrix(field.grid(), field.values().asDiagonal().toDenseMatrix());
}

OperatorMatrix compose(std::span<const OperatorMatrix> ops) {
    if (ops.empty()) {
        throw Error(ErrorCode::InvalidArgument, "compose needs at least one operator");
    }
    Eigen::MatrixXd acc = ops.front().matrix();
    for (std::size_t i = 1; i < ops.size(); ++i) {
        require_same_grid(ops.front().grid(), ops[i].grid(), "compose");
        acc = acc * ops[i].matrix();
    }
    return OperatorMatrix(ops.front().grid(), std::move(acc));
}

double op_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

double op_norm(const OperatorMatrix& op) { return op_norm(op.matrix()); }

double field_norm(const Field& f, NormKind kind) {
    if (kind == NormKind::linf) return f.values().cwiseAbs().maxCoeff();
    return std::sqrt(f.grid().dx() * f.values().squaredNorm());
}

OperatorMatrix mean_projector(const GridSpec& grid) {
    const auto n = static_cast<Eigen::Index>(grid.n_points());
    return OperatorMatrix(grid, Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n)));
}

OperatorMatrix nyquist_projector(const GridSpec& grid) {
    const auto n = static_cast<Eigen::Index>(grid.n_points());
    Eigen::VectorXd mode(n);
    for (Eigen::Index i = 0; i < n; ++i) mode[i] = (i % 2 == 0) ? 1.0 : -1.0;
    return OperatorMatrix(grid, mode * mode.transpose() / static_cast<double>(n));
}

OperatorMatrix mean_free_projector(const GridSpec& grid) {
    return OperatorMatrix::identity(grid) - mean_projector(grid) - nyquist_projector(grid);
}

std::size_t resolved_band_limit(const GridSpec& grid) { return grid.n_points() / 3; }

OperatorMatrix resolved_projector(const GridSpec& grid) {
    const std::size_t n = grid.n_points();
    const std::size_t band = resolved_band_limit(grid);
    std::vector<double> row(n, 0.0);
    for (std::size_t m = 0; m < n; ++m) {
        double s = 0.0;
        for (std::size_t k = 1; k <= band; ++k) {
            s += std::cos(2.0 * std::numbers::pi * static_cast<double>(k * m % n) / static_cast<double>(n));
        }
        row[m] = 2.0 * s / static_cast<double>(n);
    }
    return OperatorMatrix(grid, circulant(row));
}

Field spectral_shift(const Field& f, double shift) {
    const std::size_t n = f.size();
    const double base = 2.0 * std::numbers::pi / f.grid().domain_length();
    std::vector<std::complex<double>> in(n), spec(n), out(n);
    for (std::size_t i = 0; i < n; ++i) in[i] = f[i];

    Eigen::FFT<double> fft;
    fft.fwd(spec, in);
    for (std::size_t j = 0; j < n; ++j) {
        if (j == n / 2) {
            spec[j] *= std::cos(base * static_cast<double>(j) * shift);
            continue;
        }
        const double k = (j < n / 2) ? static_cast<double>(j) : static_cast<double>(j) - static_cast<double>(n);
        spec[j] *= std::polar(1.0, base * k * shift);
    }
    fft.inv(out, spec);

    Eigen::VectorXd v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = out[i].real();
    return Field(f.grid(), std::move(v));
}

Discretization Discretization::build(const GridSpec& grid, Backend backend) {
    auto d = std::make_shared<const OperatorMatrix>(build_derivative(grid, backend));
    auto dinv = std::make_shared<const OperatorMatrix>(build_antiderivative(grid, *d));
    return Discretization(grid, backend, std::move(d), std::move(dinv));
}

} // namespace wavesplit
