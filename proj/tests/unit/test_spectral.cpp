#include "impulse/error.hpp"
#include "impulse/spectral.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace impulse;

namespace {

SpectralVector random_vector(std::size_t K, std::mt19937_64& rng, double decay = 1.0) {
    std::normal_distribution<double> g;
    SpectralVector u(K);
    for (std::size_t i = 0; i < K; ++i) u[i] = g(rng) / std::pow(1.0 + static_cast<double>(i), decay);
    return u;
}

double max_abs_diff(const SpectralVector& a, const SpectralVector& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_SUITE("spectral") {

TEST_CASE("alpha_norm") {
    const SpectralVector u({3.0, 4.0});
    CHECK(alpha_norm(u, 0.0) == doctest::Approx(5.0));
    CHECK(alpha_norm(SpectralVector::unit(8, 2), 0.5) == doctest::Approx(2.0));
    CHECK(alpha_norm(SpectralVector::unit(8, 3), 1.0) == doctest::Approx(9.0));
    CHECK(l2_function_norm(SpectralVector::unit(8, 1)) == doctest::Approx(std::sqrt(std::numbers::pi / 2.0)));
}

TEST_CASE("frac_power") {
    std::mt19937_64 rng(1);
    const SpectralVector u = random_vector(10, rng);
    CHECK(frac_power(u, 0.0) == u);
    const SpectralVector e2 = SpectralVector::unit(6, 2);
    CHECK(max_abs_diff(frac_power(e2, 0.5), 2.0 * e2) < 1e-15);
    CHECK(max_abs_diff(frac_power(e2, -1.0), 0.25 * e2) < 1e-15);
}

TEST_CASE("semigroup") {
    std::mt19937_64 rng(2);
    const SpectralVector u = random_vector(12, rng);
    CHECK(semigroup(u, 0.0) == u);
    CHECK(semigroup(SpectralVector::unit(4, 1), 0.5).mode(1) == doctest::Approx(0.60653065971263342).epsilon(1e-14));
    CHECK_THROWS_AS(semigroup(u, -0.1), Error);
}

TEST_CASE("semigroup law and commutation with fractional powers") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 20; ++trial) {
        const SpectralVector u = random_vector(32, rng);
        const double s = 0.01 + 0.1 * trial;
        const double t = 0.3 + 0.05 * trial;
        const SpectralVector a = semigroup(semigroup(u, s), t);
        const SpectralVector b = semigroup(u, s + t);
        CHECK(alpha_norm(a - b, 0.0) <= 1e-12 * alpha_norm(b, 0.0));
        for (double al : {0.25, 0.5, -0.5}) {
            const SpectralVector x = frac_power(semigroup(u, t), al);
            const SpectralVector y = semigroup(frac_power(u, al), t);
            for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(x[i] - y[i]) <= 4e-16 * std::abs(y[i]) + 1e-300);
        }
    }
}

TEST_CASE("smoothing bound samples") {
    std::mt19937_64 rng(4);
    for (double al : {0.25, 0.5, 0.75}) {
        for (double t : {0.01, 0.05, 0.1, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0}) {
            for (int trial = 0; trial < 10; ++trial) {
                SpectralVector u = random_vector(64, rng, 0.0);
                u *= 1.0 / alpha_norm(u, 0.0);
                const double lhs = alpha_norm(semigroup(u, t), al);
                const double rhs = t <= al ? std::pow(t * std::exp(1.0) / al, -al) : std::exp(-t);
                CHECK(lhs <= rhs * (1.0 + 1e-12));
                CHECK(smoothing_bound(al, t) == doctest::Approx(rhs));
            }
        }
    }
    const auto rep = smoothing_check(64, {0.25, 0.5, 0.75}, {0.01, 0.1, 1.0, 2.0}, 20, 9);
    CHECK(rep.violations == 0);
    CHECK(rep.samples == 3 * 4 * (64 + 20));
}

TEST_CASE("shift operators") {
    CHECK(alpha_norm(shift_R(SpectralVector::unit(5, 1)), 0.0) == 0.0);
    CHECK(shift_L(SpectralVector::unit(5, 1)) == SpectralVector::unit(5, 2));
    CHECK(alpha_norm(shift_L(SpectralVector::unit(5, 5)), 0.0) == 0.0);
    const SpectralVector expected = 0.5 * (SpectralVector::unit(5, 1) - SpectralVector::unit(5, 3));
    CHECK(max_abs_diff(T_op(SpectralVector::unit(5, 2)), expected) < 1e-16);
}

TEST_CASE("T has unit norm up to truncation") {
    const std::size_t K = 64;
    Eigen::MatrixXd T(K, K);
    for (std::size_t k = 1; k <= K; ++k) {
        const SpectralVector col = T_op(SpectralVector::unit(K, static_cast<int>(k)));
        for (std::size_t i = 0; i < K; ++i) T(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k - 1)) = col[i];
    }
    const double norm = Eigen::JacobiSVD<Eigen::MatrixXd>(T).singularValues()(0);
    CHECK(norm <= 1.0 + 1e-14);
    CHECK(norm >= std::cos(std::numbers::pi / static_cast<double>(K + 1)) - 1e-12);
}

TEST_CASE("shift smoothing inequality samples") {
    const auto rep = shift_smoothing_check(48, {0.0, 0.25, 0.5}, {0.0, 0.25, 0.5}, {0.1, 0.5, 1.0}, 20, 5);
    CHECK(rep.violations == 0);
    CHECK(rep.worst_ratio <= 1.0);
}

TEST_CASE("jump_apply") {
    std::mt19937_64 rng(5);
    const SpectralVector u = random_vector(8, rng);
    const JumpOperator scalar(ScalarJump{TrigSeries(-0.1)});
    CHECK(max_abs_diff(jump_apply(scalar, 3, u), -0.1 * u) < 1e-16);

    const JumpOperator shift(ShiftJump{TrigSeries(0.3)});
    const SpectralVector e2 = SpectralVector::unit(8, 2);
    const SpectralVector want = 0.3 * (SpectralVector::unit(8, 1) - SpectralVector::unit(8, 3));
    CHECK(max_abs_diff(jump_apply(shift, 0, e2), want) < 1e-15);
    CHECK(alpha_norm(jump_apply(shift, 0, SpectralVector(8)), 0.0) == 0.0);

    const JumpOperator diag(DiagonalJump{{0.5, -0.25}, TrigSeries(2.0)});
    const SpectralVector d = jump_apply(diag, 1, SpectralVector({1.0, 1.0, 1.0}));
    CHECK(d.mode(1) == doctest::Approx(1.0));
    CHECK(d.mode(2) == doctest::Approx(-0.5));
    CHECK(d.mode(3) == 0.0);
    CHECK(diag.is_diagonal());
    CHECK_FALSE(shift.is_diagonal());
}

TEST_CASE("jump operator bounds") {
    std::mt19937_64 rng(6);
    const JumpOperator scalar(ScalarJump{TrigSeries(0.1, {{0.05, 1.0, 0.0}})});
    const JumpOperator shift(ShiftJump{TrigSeries(0.3, {{0.05, 2.0, 0.0}})});
    for (int trial = 0; trial < 50; ++trial) {
        const SpectralVector u = random_vector(24, rng);
        for (long j = 0; j < 5; ++j) {
            CHECK(alpha_norm(scalar.apply(j, u), 0.5) <= scalar.bound(0.5) * alpha_norm(u, 0.5) * (1 + 1e-12));
            CHECK(alpha_norm(shift.apply(j, u), 0.5) <= shift.bound(0.5) * alpha_norm(u, 1.0) * (1 + 1e-12));
        }
    }
}

TEST_CASE("derivative_project") {
    const SpectralVector d = derivative_project(SpectralVector::unit(8, 1));
    CHECK(d.mode(2) == doctest::Approx(8.0 / (3.0 * std::numbers::pi)).epsilon(1e-14));
    CHECK(d.mode(2) == doctest::Approx(0.84883).epsilon(1e-5));
    CHECK(alpha_norm(derivative_project(SpectralVector(8)), 0.0) == 0.0);
    for (int k = 1; k <= 8; ++k) {
        const SpectralVector dk = derivative_project(SpectralVector::unit(8, k));
        for (int m = 1; m <= 8; ++m) {
            if ((m + k) % 2 == 0) CHECK(dk.mode(m) == 0.0);
        }
    }
}

TEST_CASE("derivative_project matches quadrature of cos kx sin mx") {
    const int n = 4000;
    for (int k = 1; k <= 5; ++k) {
        const SpectralVector dk = derivative_project(SpectralVector::unit(8, k));
        for (int m = 1; m <= 8; ++m) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) {  // midpoint rule on the smooth integrand
                const double x = (i + 0.5) * std::numbers::pi / n;
                s += k * std::cos(k * x) * std::sin(m * x);
            }
            s *= (std::numbers::pi / n) * (2.0 / std::numbers::pi);
            CHECK(dk.mode(m) == doctest::Approx(s).epsilon(1e-6));
        }
    }
}

TEST_CASE("f_eval") {
    std::mt19937_64 rng(7);
    const SpectralVector u = 0.1 * random_vector(8, rng);
    const Nonlinearity zero;
    CHECK(alpha_norm(f_eval(zero, 1.3, u), 0.0) == 0.0);

    const Nonlinearity adv(Advection{TrigSeries(0.0), {TrigSeries(0.5), TrigSeries(0.0, {{1.0, 1.0, 0.0}})}}, 0.5, 2.0);
    const SpectralVector v = f_eval(adv, 0.7, u);
    CHECK(v.mode(1) == doctest::Approx(0.5));
    CHECK(v.mode(2) == doctest::Approx(std::sin(0.7)));
    for (int k = 3; k <= 8; ++k) CHECK(v.mode(k) == 0.0);

    const Nonlinearity toy(LipschitzToy{LipschitzToy::Shape::Sine, 0.2, {2}}, 0.5, 1.0);
    const SpectralVector w = f_eval(toy, 0.0, SpectralVector({0.3, 0.4}));
    CHECK(w.mode(1) == 0.0);
    CHECK(w.mode(2) == doctest::Approx(0.2 * std::sin(0.4)));

    CHECK_THROWS_AS(f_eval(toy, 0.0, SpectralVector({3.0, 0.0})), DomainError);
}

TEST_CASE("advection Lipschitz constant holds on random pairs") {
    std::mt19937_64 rng(8);
    const std::size_t K = 16;
    const Nonlinearity adv(Advection{TrigSeries(0.0, {{0.7, 1.0, 0.0}}), {}}, 0.5, 10.0);
    const double N1 = adv.lipschitz(K);
    CHECK(N1 > 0.0);
    for (int trial = 0; trial < 200; ++trial) {
        const SpectralVector a = 0.3 * random_vector(K, rng);
        const SpectralVector b = 0.3 * random_vector(K, rng);
        const double t = 0.1 * trial;
        const double lhs = alpha_norm(f_eval(adv, t, a) - f_eval(adv, t, b), 0.0);
        CHECK(lhs <= N1 * alpha_norm(a - b, 0.5) * (1.0 + 1e-12));
    }
}

TEST_CASE("parabola profile and reconstruction") {
    const SpectralVector p = parabola_profile(63);
    const auto x = reconstruct(p, 11);
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double xi = std::numbers::pi * static_cast<double>(i) / 10.0;
        CHECK(x[i] == doctest::Approx(xi * (std::numbers::pi - xi)).epsilon(1e-3));
    }
}

}  // TEST_SUITE
