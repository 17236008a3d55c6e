#include "impulse/error.hpp"
#include "impulse/gronwall.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace impulse;

TEST_SUITE("gronwall") {

TEST_CASE("no integral term gives C = 1") {
    CHECK(gronwall_constant(0.0, 0.3, 2.0) == 1.0);
    const auto t = gronwall_grid(1.0, 64);
    std::vector<double> y;
    for (double x : t) y.push_back(0.5 + 0.2 * std::pow(x, -0.4));
    const auto r = gronwall_verify_continuous(0.5, 0.2, 0.0, 0.4, 0.0, 1.0, y);
    CHECK(r.holds);
    CHECK(r.C_tilde == doctest::Approx(1.0));
    CHECK(r.worst_ratio <= 1.0);
}

TEST_CASE("classical limit approaches the exponential") {
    for (double b : {0.5, 1.0, 2.0}) {
        for (double Q : {0.5, 1.0, 2.0}) {
            CHECK(gronwall_constant(b, 0.0, Q) == doctest::Approx(std::exp(b * Q)).epsilon(0.05));
        }
    }
    const auto coarse = gronwall_constant(1.0, 0.0, 1.0, 64);
    const auto fine = gronwall_constant(1.0, 0.0, 1.0, 2048);
    CHECK(std::abs(fine - std::exp(1.0)) < std::abs(coarse - std::exp(1.0)));
}

TEST_CASE("continuous verifier accepts sub-solutions") {
    const auto t = gronwall_grid(1.5, 256);
    std::vector<double> y;
    for (double x : t) y.push_back(0.9 * std::exp(0.8 * x));
    const auto r = gronwall_verify_continuous(1.0, 0.0, 1.0, 0.0, 0.0, 1.5, y);
    CHECK(r.holds);
    CHECK(r.worst_ratio < 1.0);

    const auto z = gronwall_majorant(0.7, 0.1, 0.9, 0.3, 0.4, 1.5, 256);
    const auto rz = gronwall_verify_continuous(0.7, 0.1, 0.9, 0.3, 0.4, 1.5, z);
    CHECK(rz.holds);
    CHECK(rz.worst_ratio <= 1.0 + 1e-12);
}

TEST_CASE("continuous verifier reports the failing node") {
    const auto t = gronwall_grid(1.0, 32);
    std::vector<double> y(t.size(), 1.0);
    y[17] = 50.0;
    try {
        gronwall_verify_continuous(1.0, 0.0, 0.5, 0.0, 0.0, 1.0, y);
        FAIL("expected a hypothesis error");
    } catch (const HypothesisError& e) {
        CHECK(e.node() == 17);
    }
    y[17] = -1.0;
    CHECK_THROWS_AS(gronwall_verify_continuous(1.0, 0.0, 0.5, 0.0, 0.0, 1.0, y), HypothesisError);
}

TEST_CASE("impulsive bound reduces to the continuous bound on one interval") {
    const std::size_t N = 128;
    const auto s = saturate_impulsive(1.3, 0.4, 0.0, 0.25, {0.0, 1.0}, N, 2.0);
    const auto cont = gronwall_majorant(1.3 * 2.0, 0.0, 0.4, 0.0, 0.25, 1.0, N);
    for (std::size_t i = 0; i < N; ++i) CHECK(s.z[i] == doctest::Approx(cont[i]).epsilon(1e-12));
    const auto r = gronwall_verify_impulsive(1.3, 0.4, 0.0, 0.25, s, 2.0);
    CHECK(r.holds);
    CHECK(r.C_tilde == doctest::Approx(gronwall_constant(0.4, 0.25, 1.0, N)));
}

TEST_CASE("saturated samples on three intervals satisfy the bound") {
    const auto s = saturate_impulsive(1.2, 0.3, 0.1, 0.5, {0.0, 0.8, 1.7, 2.6}, 64, 1.0);
    const auto r = gronwall_verify_impulsive(1.2, 0.3, 0.1, 0.5, s, 1.0);
    CHECK(r.holds);
    CHECK(r.worst_ratio < 1.0);
    CHECK(r.Q == doctest::Approx(0.9));
    const double want = 1.0 + 0.3 * r.C_tilde * std::pow(r.Q, 0.5) / 0.5 + 0.1 * r.C_tilde;
    CHECK(r.growth == doctest::Approx(want));
}

TEST_CASE("impulsive bound on random gap sequences") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> gap(0.4, 1.3);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> knots{0.0};
        for (int j = 0; j < 8; ++j) knots.push_back(knots.back() + gap(rng));
        for (double alpha : {0.0, 0.3, 0.6}) {
            const auto s = saturate_impulsive(1.0, 0.2, 0.2, alpha, knots, 64, 0.5);
            CHECK(gronwall_verify_impulsive(1.0, 0.2, 0.2, alpha, s, 0.5).holds);
        }
    }
}

TEST_CASE("impulsive verifier rejects samples above the hypothesis") {
    auto s = saturate_impulsive(1.0, 0.2, 0.2, 0.3, {0.0, 1.0, 2.0}, 32, 1.0);
    s.z[40] *= 1.5;
    CHECK_THROWS_AS(gronwall_verify_impulsive(1.0, 0.2, 0.2, 0.3, s, 1.0), HypothesisError);
}

}  // TEST_SUITE
