#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "wavesplit/error.hpp"

namespace wavesplit {

/// Spatial derivative realization.
///   spectral: FFT-diagonalized ik multiplier, Nyquist mode zeroed
///   fd4:      4th-order centered difference with periodic wrap
enum class Backend { spectral, fd4 };

std::string_view to_string(Backend backend);
Backend parse_backend(std::string_view name);

/// Uniform periodic grid on [0, L) with nodes x_i = i*dx.
class GridSpec {
public:
    /// Throws InvalidArgument unless n_points >= 8, even, and domain_length > 0.
    static GridSpec create(std::size_t n_points, double domain_length);

    std::size_t n_points() const { return n_points_; }
    double domain_length() const { return domain_length_; }
    double dx() const { return dx_; }
    double x(std::size_t i) const { return static_cast<double>(i) * dx_; }
    Eigen::VectorXd nodes() const;

    bool operator==(const GridSpec&) const = default;

private:
    GridSpec(std::size_t n_points, double domain_length)
        : n_points_(n_points), domain_length_(domain_length),
          dx_(domain_length / static_cast<double>(n_points)) {}

    std::size_t n_points_;
    double domain_length_;
    double dx_;
};

/// Real function sampled on a grid. Entries are always finite.
class Field {
public:
    Field(GridSpec grid, Eigen::VectorXd values);

    static Field zeros(const GridSpec& grid);
    static Field constant(const GridSpec& grid, double value);

    template <typename Fn>
    static Field sample(const GridSpec& grid, Fn&& fn) {
        Eigen::VectorXd v(static_cast<Eigen::Index>(grid.n_points()));
        for (std::size_t i = 0; i < grid.n_points(); ++i) {
            v[static_cast<Eigen::Index>(i)] = fn(grid.x(i));
        }
        return Field(grid, std::move(v));
    }

    const GridSpec& grid() const { return grid_; }
    const Eigen::VectorXd& values() const { return values_; }
    std::size_t size() const { return grid_.n_points(); }
    double operator[](std::size_t i) const { return values_[static_cast<Eigen::Index>(i)]; }

    double min() const { return values_.minCoeff(); }
    double max() const { return values_.maxCoeff(); }
    double mean() const { return values_.mean(); }

    template <typename Fn>
    Field map(Fn&& fn) const {
        Eigen::VectorXd v = values_.unaryExpr(std::forward<Fn>(fn));
        return Field(grid_, std::move(v));
    }

private:
    GridSpec grid_;
    Eigen::VectorXd values_;
};

// Arithmetic on fields is pointwise. Binary operations throw GridMismatch.
Field operator+(const Field& lhs, const Field& rhs);
Field operator-(const Field& lhs, const Field& rhs);
Field operator-(const Field& f);
Field operator*(const Field& lhs, const Field& rhs);
Field operator/(const Field& lhs, const Field& rhs);
Field operator*(double s, const Field& f);
Field operator*(const Field& f, double s);

/// Dense N x N matrix acting on fields of one grid.
class OperatorMatrix {
public:
    OperatorMatrix(GridSpec grid, Eigen::MatrixXd entries);

    static OperatorMatrix identity(const GridSpec& grid);
    static OperatorMatrix zero(const GridSpec& grid);

    const GridSpec& grid() const { return grid_; }
    const Eigen::MatrixXd& matrix() const { return entries_; }
    std::size_t dim() const { return grid_.n_points(); }

    Field apply(const Field& f) const;

private:
    GridSpec grid_;
    Eigen::MatrixXd entries_;
};

// Operator algebra; `a * b` applies b first. Throws GridMismatch.
OperatorMatrix operator*(const OperatorMatrix& lhs, const OperatorMatrix& rhs);
OperatorMatrix operator+(const OperatorMatrix& lhs, const OperatorMatrix& rhs);
OperatorMatrix operator-(const OperatorMatrix& lhs, const OperatorMatrix& rhs);
OperatorMatrix operator*(double s, const OperatorMatrix& op);

/// The pair (u, v).
struct StateVec {
    StateVec(Field u_, Field v_);

    const GridSpec& grid() const { return u.grid(); }

    Field u;
    Field v;
};

OperatorMatrix build_derivative(const GridSpec& grid, Backend backend);

/// Moore-Penrose pseudoinverse of a derivative matrix. The kernel of every
/// centered periodic derivative is spanned by the constant and Nyquist modes,
/// so D*Dinv = Dinv*D = mean_free_projector(grid).
/// Throws SingularFactorization if the SVD fails to converge.
OperatorMatrix build_antiderivative(const GridSpec& grid, const OperatorMatrix& d);

/// Diagonal matrix with the field values on the diagonal.
OperatorMatrix build_multiplier(const Field& field);

/// Product of `ops` in the given order: compose({A, B, C}) = A*B*C, so the
/// rightmost operator is applied first.
OperatorMatrix compose(std::span<const OperatorMatrix> ops);

/// Induced infinity norm (max absolute row sum).
double op_norm(const OperatorMatrix& op);
double op_norm(const Eigen::MatrixXd& m);

enum class NormKind { l2, linf };

/// l2 is the grid-weighted sqrt(dx * sum v_i^2); linf is max |v_i|.
double field_norm(const Field& f, NormKind kind);

/// Rank-one grid-mean projector M (all entries 1/N).
OperatorMatrix mean_projector(const GridSpec& grid);

/// Rank-one projector onto the Nyquist mode (-1)^i.
OperatorMatrix nyquist_projector(const GridSpec& grid);

/// I - M - M_nyq: orthogonal projector onto the range of the derivative.
OperatorMatrix mean_free_projector(const GridSpec& grid);

/// Orthogonal projector onto the resolved zero-mean band, Fourier modes
/// 0 < |k| <= N/3. On this band products with smooth coefficients do not alias,
/// so discrete operator identities hold to roundoff.
OperatorMatrix resolved_projector(const GridSpec& grid);

/// Highest wavenumber index kept by resolved_projector.
std::size_t resolved_band_limit(const GridSpec& grid);

/// Returns g with g(x) = f(x + shift), by phase shift of the discrete Fourier
/// series. The Nyquist coefficient is multiplied by cos(k_nyq * shift).
Field spectral_shift(const Field& f, double shift);

/// A grid together with its derivative and antiderivative matrices. Building
/// the antiderivative costs one SVD, so this is created once per run and
/// shared; all members are immutable.
class Discretization {
public:
    static Discretization build(const GridSpec& grid, Backend backend);

    const GridSpec& grid() const { return grid_; }
    Backend backend() const { return backend_; }
    const OperatorMatrix& derivative() const { return *derivative_; }
    const OperatorMatrix& antiderivative() const { return *antiderivative_; }

    Field differentiate(const Field& f) const { return derivative_->apply(f); }
    Field antidifferentiate(const Field& f) const { return antiderivative_->apply(f); }

private:
    Discretization(GridSpec grid, Backend backend,
                   std::shared_ptr<const OperatorMatrix> d,
                   std::shared_ptr<const OperatorMatrix> dinv)
        : grid_(grid), backend_(backend), derivative_(std::move(d)), antiderivative_(std::move(dinv)) {}

    GridSpec grid_;
    Backend backend_;
    std::shared_ptr<const OperatorMatrix> derivative_;
    std::shared_ptr<const OperatorMatrix> antiderivative_;
};

void require_same_grid(const GridSpec& a, const GridSpec& b, std::string_view context);

} // namespace wavesplit
