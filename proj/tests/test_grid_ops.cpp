#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "test_support.hpp"
#include "wavesplit/grid.hpp"

using namespace wavesplit;
using namespace wavesplit::testing;

TEST_SUITE("grid_ops") {

TEST_CASE("grid validation") {
    CHECK_NOTHROW(GridSpec::create(8, 1.0));
    CHECK_THROWS_AS(GridSpec::create(6, 1.0), Error);
    CHECK_THROWS_AS(GridSpec::create(9, 1.0), Error);
    CHECK_THROWS_AS(GridSpec::create(16, 0.0), Error);
    CHECK_THROWS_AS(GridSpec::create(16, -2.0), Error);

    const GridSpec g = GridSpec::create(64, kTwoPi);
    CHECK(g.dx() * 64.0 == doctest::Approx(kTwoPi).epsilon(1e-15));
    CHECK(g.x(0) == 0.0);
}

TEST_CASE("field invariants") {
    const GridSpec g = GridSpec::create(8, 1.0);
    Eigen::VectorXd bad = Eigen::VectorXd::Zero(8);
    bad[3] = std::nan("");
    CHECK_THROWS_AS(Field(g, bad), Error);
    CHECK_THROWS_AS(Field(g, Eigen::VectorXd::Zero(7)), Error);

    const GridSpec other = GridSpec::create(16, 1.0);
    try {
        (void)(Field::zeros(g) + Field::zeros(other));
        FAIL("expected GridMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::GridMismatch);
    }
}

TEST_CASE("spectral derivative is exact on band-limited data") {
    const GridSpec g = GridSpec::create(64, kTwoPi);
    const OperatorMatrix d = build_derivative(g, Backend::spectral);
    const Field s = Field::sample(g, [](double x) { return std::sin(x); });
    const Field c = Field::sample(g, [](double x) { return std::cos(x); });
    CHECK(max_abs_diff(d.apply(s), c) <= 1e-12);

    // Every mode below Nyquist scales by k: D cos(kx) = -k sin(kx), D sin(kx) = k cos(kx).
    for (int k = 1; k < 32; ++k) {
        const Field ck = Field::sample(g, [k](double x) { return std::cos(k * x); });
        const Field sk = Field::sample(g, [k](double x) { return std::sin(k * x); });
        const double rel_c = max_abs_diff(d.apply(ck), -static_cast<double>(k) * sk) / k;
        const double rel_s = max_abs_diff(d.apply(sk), static_cast<double>(k) * ck) / k;
        CHECK(rel_c <= 1e-10);
        CHECK(rel_s <= 1e-10);
    }
}

TEST_CASE("derivative annihilates constants for both backends") {
    for (std::size_t n : {8u, 16u, 64u, 128u, 256u}) {
        for (Backend b : {Backend::spectral, Backend::fd4}) {
            const GridSpec g = GridSpec::create(n, 3.7);
            const OperatorMatrix d = build_derivative(g, b);
            CHECK(field_norm(d.apply(Field::constant(g, 1.0)), NormKind::linf) <= 1e-12);
        }
    }
}

TEST_CASE("fd4 derivative converges at fourth order") {
    auto error_at = [](std::size_t n) {
        const GridSpec g = GridSpec::create(n, kTwoPi);
        const OperatorMatrix d = build_derivative(g, Backend::fd4);
        const Field s = Field::sample(g, [](double x) { return std::sin(x); });
        const Field c = Field::sample(g, [](double x) { return std::cos(x); });
        return max_abs_diff(d.apply(s), c);
    };
    const double e64 = error_at(64);
    const double e128 = error_at(128);
    const GridSpec g = GridSpec::create(64, kTwoPi);
    // C * dx^4 with C = 1/30 (leading truncation term of the five-point stencil)
    CHECK(e64 <= std::pow(g.dx(), 4) / 30.0 * 1.01);
    CHECK(e64 / e128 == doctest::Approx(16.0).epsilon(0.2));
}

TEST_CASE("pseudoinverse of the derivative") {
    const GridSpec g = GridSpec::create(64, kTwoPi);
    const OperatorMatrix d = build_derivative(g, Backend::spectral);
    const OperatorMatrix dinv = build_antiderivative(g, d);

    const Field s = Field::sample(g, [](double x) { return std::sin(x); });
    const Field c = Field::sample(g, [](double x) { return std::cos(x); });
    CHECK(max_abs_diff(dinv.apply(c), s) <= 1e-10);
    CHECK(field_norm(dinv.apply(Field::constant(g, 1.0)), NormKind::linf) <= 1e-12);

    const OperatorMatrix q = mean_free_projector(g);
    CHECK(op_norm(d * dinv - q) <= 1e-10);
    CHECK(op_norm(dinv * d - q) <= 1e-10);
    const std::vector<OperatorMatrix> chain{d, dinv};
    CHECK(op_norm(compose(chain) - q) <= 1e-10);
}

TEST_CASE("pseudoinverse identities hold across sizes and backends") {
    for (std::size_t n : {8u, 32u, 128u, 512u}) {
        for (Backend b : {Backend::spectral, Backend::fd4}) {
            if (n == 512 && b == Backend::fd4) continue;
            const GridSpec g = GridSpec::create(n, 5.0);
            const Discretization disc = Discretization::build(g, b);
            const OperatorMatrix q = mean_free_projector(g);
            INFO("N = " << n << " backend = " << to_string(b));
            CHECK(op_norm(disc.derivative() * disc.antiderivative() - q) <= 1e-9);
            CHECK(op_norm(disc.antiderivative() * disc.derivative() - q) <= 1e-9);
        }
    }
}

TEST_CASE("kernel of the derivative is constants plus the Nyquist mode") {
    const GridSpec g = GridSpec::create(16, 1.0);
    const Field nyq = Field::sample(g, [&](double x) {
        const auto i = static_cast<long>(std::lround(x / g.dx()));
        return i % 2 == 0 ? 1.0 : -1.0;
    });
    for (Backend b : {Backend::spectral, Backend::fd4}) {
        CHECK(field_norm(build_derivative(g, b).apply(nyq), NormKind::linf) <= 1e-12);
    }
}

TEST_CASE("multipliers") {
    const GridSpec g = GridSpec::create(16, kTwoPi);
    CHECK(op_norm(build_multiplier(Field::constant(g, 1.0)) - OperatorMatrix::identity(g)) == 0.0);

    const Field f = Field::sample(g, [](double x) { return 1.0 + std::sin(x); });
    const Field h = Field::sample(g, [](double x) { return std::cos(2 * x); });
    CHECK(op_norm(build_multiplier(f) * build_multiplier(h) - build_multiplier(f * h)) == 0.0);
    CHECK(max_abs_diff(build_multiplier(f).apply(h), f * h) == 0.0);

    const std::vector<OperatorMatrix> pair{build_multiplier(f), build_multiplier(h)};
    CHECK(op_norm(compose(pair) - build_multiplier(f * h)) == 0.0);
    const std::vector<OperatorMatrix> single{OperatorMatrix::identity(g)};
    CHECK(op_norm(compose(single) - OperatorMatrix::identity(g)) == 0.0);
}

TEST_CASE("compose checks grids and is associative") {
    const GridSpec g = GridSpec::create(32, 1.0);
    const GridSpec other = GridSpec::create(32, 2.0);
    const std::vector<OperatorMatrix> mixed{OperatorMatrix::identity(g), OperatorMatrix::identity(other)};
    try {
        (void)compose(mixed);
        FAIL("expected GridMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::GridMismatch);
    }

    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        auto random_op = [&] {
            Eigen::MatrixXd m(32, 32);
            for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng) * 10.0;
            return OperatorMatrix(g, m);
        };
        const OperatorMatrix a = random_op();
        const OperatorMatrix b = random_op();
        const OperatorMatrix c = random_op();
        const double defect = op_norm((a * b) * c - a * (b * c));
        CHECK(defect <= 1e-8 * op_norm(a) * op_norm(b) * op_norm(c));
    }
}

TEST_CASE("norms") {
    const GridSpec g = GridSpec::create(64, kTwoPi);
    CHECK(op_norm(OperatorMatrix::identity(g)) == 1.0);
    CHECK(op_norm(OperatorMatrix::zero(g)) == 0.0);
    const Field s = Field::sample(g, [](double x) { return std::sin(x); });
    CHECK(std::abs(field_norm(s, NormKind::l2) - std::sqrt(std::numbers::pi)) <= 1e-10);
    CHECK(field_norm(-2.0 * Field::constant(g, 1.0), NormKind::linf) == 2.0);
}

TEST_CASE("projectors onto the range and the resolved band") {
    const GridSpec g = GridSpec::create(48, 2.0);
    const OperatorMatrix q = mean_free_projector(g);
    const OperatorMatrix s = resolved_projector(g);
    CHECK(op_norm(q * q - q) <= 1e-13);
    CHECK(op_norm(s * s - s) <= 1e-12);
    CHECK(op_norm(q * s - s) <= 1e-12);
    CHECK((s.matrix() - s.matrix().transpose()).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK(s.matrix().trace() == doctest::Approx(2.0 * resolved_band_limit(g)));

    const double L = g.domain_length();
    const Field low = Field::sample(g, [L](double x) { return std::sin(kTwoPi * 5 * x / L); });
    const Field high = Field::sample(g, [L](double x) { return std::sin(kTwoPi * 20 * x / L); });
    CHECK(max_abs_diff(s.apply(low), low) <= 1e-12);
    CHECK(field_norm(s.apply(high), NormKind::linf) <= 1e-12);
}

TEST_CASE("spectral shift translates band-limited fields") {
    const GridSpec g = GridSpec::create(64, kTwoPi);
    const Field s = Field::sample(g, [](double x) { return std::sin(x); });
    const Field c = Field::sample(g, [](double x) { return std::cos(x); });
    CHECK(max_abs_diff(spectral_shift(s, std::numbers::pi / 2), c) <= 1e-12);

    std::mt19937 rng(3);
    const Field r = random_smooth(g, rng, 6);
    CHECK(max_abs_diff(spectral_shift(spectral_shift(r, 0.731), -0.731), r) <= 1e-12);
}

TEST_CASE("backend names round trip") {
    CHECK(parse_backend("spectral") == Backend::spectral);
    CHECK(parse_backend(to_string(Backend::fd4)) == Backend::fd4);
    CHECK_THROWS_AS(parse_backend("chebyshev"), Error);
}

}
