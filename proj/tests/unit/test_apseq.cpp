#include "impulse/apseq.hpp"
#include "impulse/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

using namespace impulse;

namespace {

ImpulseTimes integer_times(long j_min, long j_max) {
    APSpec sp;
    sp.a = 1.0;
    return gen_times(sp, j_min, j_max);
}

}  // namespace

TEST_SUITE("apseq") {

TEST_CASE("gen_times without modes gives integer times") {
    const ImpulseTimes t = integer_times(-5, 20);
    CHECK(t.size() == 26);
    for (long j = -5; j <= 20; ++j) CHECK(t[j] == static_cast<double>(j));
    CHECK(t.theta() == doctest::Approx(1.0));
    CHECK(t.big_theta() == doctest::Approx(1.0));
}

TEST_CASE("gen_times evaluates a single harmonic") {
    APSpec sp;
    sp.a = 1.0;
    sp.modes = {{0.2, 1.0, 0.0}};
    sp.clamp = 0.2;
    const ImpulseTimes t = gen_times(sp, 0, 10);
    CHECK(t[3] == doctest::Approx(3.0 + 0.2 * std::sin(3.0)).epsilon(1e-15));
    CHECK(t[3] == doctest::Approx(3.02822).epsilon(1e-5));
}

TEST_CASE("gen_times rejects invalid specs") {
    APSpec sp;
    sp.a = 1.0;
    sp.modes = {{0.3, 1.0, 0.0}};
    sp.clamp = 0.5;  // clamp == a/2
    CHECK_THROWS_AS(gen_times(sp, 0, 10), Error);
    sp.clamp = 0.2;  // Σ|amp| > clamp
    CHECK_THROWS_AS(gen_times(sp, 0, 10), Error);
    sp.clamp = 0.3;
    sp.a = -1.0;
    CHECK_THROWS_AS(gen_times(sp, 0, 10), Error);
    CHECK_THROWS_AS(ImpulseTimes::from_times(0, {0.0, 1.0, 1.0}), Error);
}

TEST_CASE("generated times are separated by at least a - 2 clamp") {
    for (double amp : {0.05, 0.1, 0.24}) {
        APSpec sp;
        sp.a = 0.5 + amp * 3.0;
        sp.modes = {{amp / 2, std::sqrt(2.0), 0.1}, {amp / 2, 2.0 * std::numbers::pi * std::sqrt(3.0), 0.7}};
        sp.clamp = amp;
        const ImpulseTimes t = gen_times(sp, -100, 100);
        CHECK(t.theta() >= sp.a - 2.0 * sp.clamp - 1e-12);
        for (long j = -100; j <= 100; ++j) CHECK(std::abs(t[j] - sp.a * static_cast<double>(j)) <= sp.clamp + 1e-15);
    }
}

TEST_CASE("find_eps_almost_periods on constant and alternating sequences") {
    const std::vector<double> constant(40, 3.0);
    const auto all = find_eps_almost_periods(constant, 1e-9, 5);
    CHECK(all.size() == 11);

    std::vector<double> alt;
    for (int k = 0; k < 40; ++k) alt.push_back(k % 2 == 0 ? 1.0 : -1.0);
    const auto even = find_eps_almost_periods(alt, 0.5, 6);
    CHECK(even == std::vector<int>{-6, -4, -2, 0, 2, 4, 6});

    CHECK_THROWS_AS(find_eps_almost_periods(std::vector<double>(12, 0.0), 0.1, 5), Error);
}

TEST_CASE("find_eps_almost_periods always contains zero and is monotone in eps") {
    std::vector<double> x;
    for (int k = 0; k < 200; ++k) x.push_back(std::sin(std::sqrt(2.0) * k) + 0.5 * std::sin(std::sqrt(5.0) * k));
    std::vector<int> prev;
    for (double eps : {0.05, 0.1, 0.3, 0.8}) {
        const auto cur = find_eps_almost_periods(x, eps, 60);
        CHECK(std::find(cur.begin(), cur.end(), 0) != cur.end());
        CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
        prev = cur;
    }
}

TEST_CASE("common_almost_periods finds unit shifts for integer times") {
    const ImpulseTimes t = integer_times(0, 40);
    const std::vector<double> op(t.size(), 0.3);
    for (double eps : {1e-9, 0.1}) {
        const auto scan = common_almost_periods(t, op, 0.0, eps, 5.0, 10);
        REQUIRE(!scan.pairs.empty());
        CHECK(scan.pairs.front().q == 1);
        CHECK(scan.pairs.front().r == doctest::Approx(1.0));
        CHECK(scan.pairs.size() == 10);
    }
}

TEST_CASE("common_almost_periods agrees with a brute-force scan") {
    APSpec sp;
    sp.a = 1.0;
    sp.modes = {{0.2, 2.0 * std::numbers::pi * std::sqrt(2.0), 0.0}};
    sp.clamp = 0.2;
    const ImpulseTimes t = gen_times(sp, 0, 80);
    const double eps = 0.1;
    const auto scan = common_almost_periods(t, {}, 0.0, eps, 10.0, 40);
    const auto tau = t.values();
    std::vector<int> brute;
    for (int q = 1; q <= 40; ++q) {
        const int m = static_cast<int>(tau.size()) - q;
        double mean = 0.0;
        for (int i = 0; i < m; ++i) mean += tau[i + q] - tau[i];
        mean /= m;
        double dev = 0.0;
        for (int i = 0; i < m; ++i) dev = std::max(dev, std::abs(tau[i + q] - tau[i] - mean));
        if (dev < eps) brute.push_back(q);
    }
    std::vector<int> found;
    for (const auto& p : scan.pairs) found.push_back(p.q);
    CHECK(found == brute);
    CHECK(!found.empty());
}

TEST_CASE("forcing period hint filters candidate shifts") {
    const ImpulseTimes t = integer_times(0, 40);
    const auto scan = common_almost_periods(t, {}, 3.0, 0.01, 10.0, 20);
    for (const auto& p : scan.pairs) CHECK(p.q % 3 == 0);
    CHECK(scan.pairs.size() == 6);
}

TEST_CASE("count_in_interval") {
    const ImpulseTimes t = integer_times(-5, 20);
    CHECK(count_in_interval(t, 0.0, 10.5) == 10);
    CHECK(count_in_interval(t, 2.1, 2.9) == 0);
    CHECK(count_in_interval(t, 0.5, 4.5) + count_in_interval(t, 4.5, 9.5) == count_in_interval(t, 0.5, 9.5));
    CHECK_THROWS_AS(count_in_interval(t, -10.0, 0.0), Error);
    CHECK_THROWS_AS(count_in_interval(t, 3.0, 3.0), Error);
}

TEST_CASE("count_in_interval is additive on generated times") {
    APSpec sp;
    sp.a = 0.8;
    sp.modes = {{0.15, 1.3, 0.2}};
    sp.clamp = 0.15;
    const ImpulseTimes t = gen_times(sp, 0, 100);
    for (double s = 1.05; s < 30.0; s += 2.3) {
        const double mid = s + 7.77;
        const double end = mid + 11.1;
        if (t.distance_to_nearest(mid) < 1e-9) continue;
        CHECK(count_in_interval(t, s, end) == count_in_interval(t, s, mid) + count_in_interval(t, mid, end));
    }
}

TEST_CASE("estimate_density") {
    CHECK(estimate_density(integer_times(0, 60)) == doctest::Approx(1.0));
    APSpec half;
    half.a = 0.5;
    CHECK(estimate_density(gen_times(half, 0, 120)) == doctest::Approx(2.0));
    CHECK_THROWS_AS(estimate_density(integer_times(0, 20)), Error);

    APSpec sp;
    sp.a = 1.3;
    sp.modes = {{0.3, std::sqrt(2.0), 0.0}};
    sp.clamp = 0.3;
    const ImpulseTimes t = gen_times(sp, 0, 150);
    const double T = t.back() - t.front();
    CHECK(std::abs(estimate_density(t) - 1.0 / sp.a) <= 2.0 * sp.clamp / T + 2.0 / T);
}

TEST_CASE("check_uap_differences") {
    CHECK(check_uap_differences(integer_times(0, 60), 1e-12, 3).holds);

    APSpec sp;
    sp.a = 1.0;
    sp.modes = {{0.1, 2.0 * std::numbers::pi / 7.0, 0.0}};
    sp.clamp = 0.1;
    const auto rep = check_uap_differences(gen_times(sp, 0, 80), 1e-9, 3);
    CHECK(rep.holds);
    CHECK(rep.period % 7 == 0);

    std::vector<double> v;
    for (int k = 0; k <= 60; ++k) v.push_back(static_cast<double>(k) + (k > 30 ? 1.0 : 0.0));
    CHECK_FALSE(check_uap_differences(ImpulseTimes::from_times(0, v), 0.1, 3, 20).holds);
}

TEST_CASE("impulse time lookups") {
    const ImpulseTimes t = integer_times(0, 10);
    CHECK(t.first_at_or_after(3.0) == 3);
    CHECK(t.first_after(3.0) == 4);
    CHECK(t.first_after(10.5) == 11);
    CHECK(t.distance_to_nearest(3.3) == doctest::Approx(0.3));
    CHECK_THROWS_AS(t.at(11), Error);
}

}  // TEST_SUITE
