#include "impulse/error.hpp"
#include "impulse/nonfixed.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace impulse;

namespace {

LinearSystem example_system(std::size_t K = 8) {
    APSpec sp;
    sp.a = 1.0;
    sp.modes = {{0.1, 2.0 * std::numbers::pi * std::sqrt(2.0), 0.0}};
    sp.clamp = 0.1;
    LinearSystem sys;
    sys.K = K;
    sys.times = gen_times(sp, -40, 60);
    sys.jumps = JumpOperator(ScalarJump{TrigSeries(-0.2, {{0.05, std::sqrt(3.0), 0.0}})});
    return sys;
}

Forcing example_forcing() {
    Forcing f;
    f.f_terms.push_back({TrigSeries(0.6, {{0.3, 2.0 * std::numbers::pi, 0.0}}), {1.0, 0.0, 0.2}});
    return f;
}

Nonlinearity example_nonlinearity() { return {Advection{TrigSeries(0.0, {{0.05, 1.0, 0.0}}), {}}, 0.5, 2.0}; }

SurfaceSpec surfaces(const LinearSystem& sys, double b) { return {sys.times, TrigSeries(b, {{0.2 * b, std::sqrt(5.0), 0.0}})}; }

}  // namespace

TEST_SUITE("nonfixed") {

TEST_CASE("surface evaluation") {
    const LinearSystem sys = example_system();
    const SurfaceSpec flat{sys.times, TrigSeries(0.0)};
    const SpectralVector u({0.3, -0.2, 0.1});
    CHECK(surface_eval(flat, 4, u) == sys.times[4]);
    const SurfaceSpec sloped{sys.times, TrigSeries(0.05)};
    CHECK(surface_eval(sloped, 4, SpectralVector::unit(3, 1)) == doctest::Approx(sys.times[4] + 0.05 * std::numbers::pi / 2.0));
    CHECK(surface_gap(sloped, 4, 5.0, u) == doctest::Approx(5.0 - surface_eval(sloped, 4, u)));
    CHECK(sloped.separation(1.0) == doctest::Approx(sys.times.theta() - 0.05 * std::numbers::pi));
}

TEST_CASE("surface Lipschitz bound on the ball") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    const LinearSystem sys = example_system();
    const SurfaceSpec spec = surfaces(sys, 0.08);
    const double rho = 1.5;
    for (int trial = 0; trial < 200; ++trial) {
        SpectralVector a(8), b(8);
        for (std::size_t i = 0; i < 8; ++i) {
            a[i] = g(rng) / (1.0 + i * i);
            b[i] = g(rng) / (1.0 + i * i);
        }
        a *= rho * std::abs(std::sin(trial)) / alpha_norm(a, 0.5);
        b *= rho * std::abs(std::cos(trial)) / alpha_norm(b, 0.5);
        const long j = trial % 10;
        CHECK(std::abs(surface_eval(spec, j, a) - surface_eval(spec, j, b)) <=
              spec.lipschitz(rho) * alpha_norm(a - b, 0.0) * (1.0 + 1e-12));
    }
}

TEST_CASE("stepper without source follows the semigroup") {
    const LinearSystem sys = example_system();
    const SourceFn zero = make_source(Nonlinearity{}, Forcing{}, 8);
    SpectralVector u0(8);
    for (int k = 1; k <= 8; ++k) u0.mode(k) = 1.0 / k;
    const DenseSegment seg = step_segment(sys, zero, u0, 0.1, 0.9, 0.01);
    for (std::size_t n = 0; n < seg.t.size(); ++n) {
        const SpectralVector want = semigroup(u0, seg.t[n] - 0.1);
        CHECK(alpha_norm(seg.u[n] - want, 0.0) <= 1e-14);
    }
}

TEST_CASE("stepper reaches the scalar steady state") {
    LinearSystem sys = example_system();
    Forcing f;
    f.f_terms.push_back({TrigSeries(2.0), {0.0, 0.0, 1.0}});
    const DenseSegment seg = step_segment(sys, make_source({}, f, 8), SpectralVector(8), 0.0, 20.0, 0.01);
    CHECK(seg.u.back().mode(3) == doctest::Approx(2.0 / 9.0).epsilon(1e-6));
    CHECK(seg.t.back() == 20.0);
}

TEST_CASE("stepper converges at first order") {
    LinearSystem sys = example_system(2);
    Forcing f;
    f.f_terms.push_back({TrigSeries(0.0, {{1.0, 1.0, 0.0}}), {1.0}});
    const SourceFn src = make_source({}, f, 2);
    const double T = 2.0;
    const double exact = 0.5 * (std::sin(T) - std::cos(T) + std::exp(-T));
    std::vector<double> err;
    for (double h : {0.01, 0.005, 0.0025}) {
        err.push_back(std::abs(step_segment(sys, src, SpectralVector(2), 0.0, T, h).u.back().mode(1) - exact));
    }
    CHECK(err[0] / err[1] == doctest::Approx(2.0).epsilon(0.1));
    CHECK(err[1] / err[2] == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("stepper aborts outside the admissible ball") {
    LinearSystem sys = example_system(2);
    Forcing f;
    f.f_terms.push_back({TrigSeries(5.0), {1.0}});
    StepLimits lim;
    lim.bound = 1.0;
    CHECK_THROWS_AS(step_segment(sys, make_source({}, f, 2), SpectralVector(2), 0.0, 5.0, 0.01, lim), DomainError);
}

TEST_CASE("flat surfaces reproduce the fixed-moment simulation") {
    const LinearSystem sys = example_system();
    const Forcing f = example_forcing();
    const SourceFn src = make_source(example_nonlinearity(), f, 8);
    const ImpulseFn g = make_impulse({}, f, 8);
    const SurfaceSpec flat{sys.times, TrigSeries(0.0)};
    NonfixedOptions opt;
    opt.h = 1e-2;
    const Trajectory a = simulate_nonfixed(sys, src, flat, g, SpectralVector(8), -0.5, 6.5, opt);
    const Trajectory b = simulate_fixed(sys, src, g, SpectralVector(8), -0.5, 6.5, opt.h);
    REQUIRE(a.crossings.size() == b.crossings.size());
    for (std::size_t i = 0; i < a.crossings.size(); ++i) {
        CHECK(a.crossings[i].t == sys.times[a.crossings[i].j]);
        CHECK(a.crossings[i].u_after == b.crossings[i].u_after);
    }
    const auto na = a.nodes();
    const auto nb = b.nodes();
    REQUIRE(na.size() == nb.size());
    for (std::size_t i = 0; i < na.size(); ++i) {
        CHECK(na[i].first == nb[i].first);
        CHECK(na[i].second == nb[i].second);
    }
}

TEST_CASE("crossing of a decaying state is bracketed") {
    LinearSystem sys = example_system();
    sys.jumps = JumpOperator{};
    const SourceFn src = make_source({}, Forcing{}, 8);
    const ImpulseFn g = make_impulse({}, Forcing{}, 8);
    const SurfaceSpec spec{sys.times, TrigSeries(0.05)};
    const SpectralVector u0 = SpectralVector::unit(8, 1);
    NonfixedOptions opt;
    opt.h = 1e-3;
    const double t0 = sys.times[0] + 0.1;
    const Trajectory tr = simulate_nonfixed(sys, src, spec, g, u0, t0, sys.times[1] + 0.3, opt);
    REQUIRE(tr.crossings.size() == 1);
    const Crossing& c = tr.crossings.front();
    CHECK(c.j == 1);
    CHECK(c.t > sys.times[1]);
    CHECK(c.t < sys.times[1] + 0.05 * (std::numbers::pi / 2.0) * alpha_norm(u0, 0.0) * alpha_norm(u0, 0.0));
    CHECK(std::abs(surface_gap(spec, 1, c.t, c.u_before)) <= 1e-10);
}

TEST_CASE("jump at a crossing applies the scalar factor and impulse data") {
    const LinearSystem sys = example_system();
    const Forcing f = example_forcing();
    const SourceFn src = make_source(example_nonlinearity(), f, 8);
    ImpulseMap gm;
    gm.map = LipschitzToy{LipschitzToy::Shape::Sine, 0.05, {1}};
    const ImpulseFn g = make_impulse(gm, f, 8);
    NonfixedOptions opt;
    opt.h = 2e-3;
    const Trajectory tr = simulate_nonfixed(sys, src, surfaces(sys, 0.05), g, SpectralVector(8), -0.5, 5.5, opt);
    REQUIRE(tr.crossings.size() >= 5);
    for (const auto& c : tr.crossings) {
        const SpectralVector want = c.u_before + sys.jumps.apply(c.j, c.u_before) + gm(c.j, c.u_before);
        CHECK(c.u_after == want);
    }
    for (std::size_t i = 1; i < tr.crossings.size(); ++i) CHECK(tr.crossings[i].t > tr.crossings[i - 1].t);
}

TEST_CASE("single crossings, separation and refinement in the small-slope regime") {
    const LinearSystem sys = example_system();
    const Forcing f = example_forcing();
    const Nonlinearity nl = example_nonlinearity();
    const SourceFn src = make_source(nl, f, 8);
    const ImpulseFn g = make_impulse({}, f, 8);
    const SurfaceSpec spec = surfaces(sys, 0.05);
    NonfixedOptions opt;
    opt.h = 2e-3;
    opt.bound = 2.0 * nl.rho();
    opt.forbid_beating = true;
    const Trajectory tr = simulate_nonfixed(sys, src, spec, g, SpectralVector(8), -0.5, 12.5, opt);
    const BeatingReport br = beating_check(tr, spec, src, 1, 10);
    CHECK(br.single);
    CHECK(br.condition);
    for (const auto& [j, n] : br.counts) CHECK(n == 1);
    for (std::size_t i = 1; i < tr.crossings.size(); ++i) {
        CHECK(tr.crossings[i].t - tr.crossings[i - 1].t >= spec.separation(nl.rho()));
    }

    NonfixedOptions half = opt;
    half.h = opt.h / 2.0;
    const Trajectory tr2 = simulate_nonfixed(sys, src, spec, g, SpectralVector(8), -0.5, 12.5, half);
    REQUIRE(tr2.crossings.size() == tr.crossings.size());
    for (std::size_t i = 0; i < tr.crossings.size(); ++i) {
        CHECK(std::abs(tr.crossings[i].t - tr2.crossings[i].t) <= opt.h);
    }
}

TEST_CASE("beating condition is flagged for large slopes") {
    const LinearSystem sys = example_system();
    const Forcing f = example_forcing();
    const SourceFn src = make_source(example_nonlinearity(), f, 8);
    const SurfaceSpec flat{sys.times, TrigSeries(0.0)};
    NonfixedOptions opt;
    opt.h = 5e-3;
    const Trajectory tf = simulate_nonfixed(sys, src, flat, make_impulse({}, f, 8), SpectralVector(8), -0.5, 6.5, opt);
    const BeatingReport bf = beating_check(tf, flat, src, 1, 5);
    CHECK(bf.single);
    CHECK(bf.b == 0.0);

    const SurfaceSpec steep{sys.times, TrigSeries(0.5)};
    const Trajectory ts = simulate_nonfixed(sys, src, steep, make_impulse({}, f, 8), SpectralVector(8), -0.5, 6.5, opt);
    const BeatingReport bs = beating_check(ts, steep, src, 1, 5);
    CHECK_FALSE(bs.condition);
    CHECK(bs.b * bs.M2 * bs.M3 >= 1.0);
    CHECK(bs.counts.size() == 5);
}

TEST_CASE("S-map with flat surfaces is constant after one step") {
    const LinearSystem sys = example_system();
    const SurfaceSpec flat{sys.times, TrigSeries(0.0)};
    const SMapResult res = s_map_solve(sys, example_nonlinearity(), {}, example_forcing(), flat, {0, 8}, {}, {}, {});
    REQUIRE(res.history.size() == 2);
    CHECK(res.history[1] == 0.0);
    for (std::size_t i = 0; i < res.taus.size(); ++i) CHECK(res.taus[i] == sys.times[res.j_min + static_cast<long>(i)]);
}

TEST_CASE("S-map contraction and round trip") {
    const LinearSystem sys = example_system();
    const Nonlinearity nl = example_nonlinearity();
    const Forcing f = example_forcing();
    const SurfaceSpec spec = surfaces(sys, 0.05);
    SMapOptions so;
    so.tol = 1e-9;
    const SMapResult res = s_map_solve(sys, nl, {}, f, spec, {0, 10}, {}, {}, so);
    CHECK(res.factor() < 1.0);
    CHECK(res.residual <= so.tol);
    CHECK(res.history.back() < so.tol);

    NonfixedOptions opt;
    std::vector<double> errors;
    for (double h : {2e-3, 1e-3}) {
        opt.h = h;
        errors.push_back(s_map_round_trip(res, nl, {}, f, spec, 2, 6, opt).max_error);
    }
    CHECK(errors[1] < errors[0]);
    CHECK(errors[1] <= 5e-5);
}

}  // TEST_SUITE
