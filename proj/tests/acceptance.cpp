// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "impulse/commands.hpp"
#include "impulse/discrete.hpp"
#include "impulse/evolution.hpp"
#include "impulse/gronwall.hpp"
#include "impulse/scenario.hpp"
#include "impulse/solver.hpp"
#include "impulse/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <string>
#include <vector>

using namespace impulse;
using nlohmann::json;

namespace {

const std::filesystem::path kScenarios = IMPULSE_SCENARIO_DIR;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

/// Scenario runs shared between criteria; each command runs once here and
/// once more in the determinism check.
struct Runs {
    std::map<std::string, Scenario> scenarios;
    std::map<std::string, CommandResult> results;

    const CommandResult& get(const std::string& command, const std::string& name) {
        const std::string key = command + ":" + name;
        auto it = results.find(key);
        if (it != results.end()) return it->second;
        if (!scenarios.count(name)) scenarios.emplace(name, load_scenario(kScenarios / (name + ".json")));
        return results.emplace(key, run_command(command, scenarios.at(name))).first->second;
    }
};

const std::vector<std::pair<std::string, std::string>> kCommands = {
    {"run_linear", "example2_linear"},   {"run_linear", "zero_forcing"},  {"run_picard", "picard_toy"},
    {"run_robustness", "robustness"},    {"run_stability", "stability"}, {"verify_inequalities", "inequalities"},
    {"run_nonfixed", "example1_nonfixed"},
};

LinearSystem test_system(double c, JumpOperator jumps, long j_min = -40, long j_max = 80) {
    APSpec sp;
    sp.a = 1.0;
    sp.modes = {{0.1, std::sqrt(2.0), 0.3}};
    sp.clamp = 0.1;
    LinearSystem sys;
    sys.K = 16;
    sys.c = c;
    sys.times = gen_times(sp, j_min, j_max);
    sys.jumps = std::move(jumps);
    return sys;
}

// 1. U(t,s)U(s,r) = U(t,r) across impulses; jump identity on constructed solutions.
Outcome cocycle_and_jumps(Runs& runs) {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss;
    const std::vector<LinearSystem> systems = {
        test_system(0.0, JumpOperator(ShiftJump{TrigSeries(0.3, {{0.05, 2.0, 0.0}})})),
        test_system(2.0, JumpOperator(ScalarJump{TrigSeries(0.0, {{0.1, std::sqrt(3.0), 0.0}})})),
        test_system(0.0, JumpOperator(CouplingJump{TrigSeries(0.2)})),
    };
    double worst = 0.0;
    std::size_t samples = 0;
    for (const auto& sys : systems) {
        for (int i = 0; i < 200; ++i) {
            const double r = 10.0 * unif(rng);
            double s = r + 4.0 * unif(rng);
            if (i % 4 == 0) s = sys.times[sys.times.first_after(r)];  // s on an impulse time
            const double t = s + 4.0 * unif(rng);
            SpectralVector u(sys.K);
            for (std::size_t k = 0; k < sys.K; ++k) u[k] = gauss(rng) / (1.0 + static_cast<double>(k));
            const SpectralVector lhs = U_apply(sys, t, s, U_apply(sys, s, r, u));
            const SpectralVector rhs = U_apply(sys, t, r, u);
            worst = std::max(worst, alpha_norm(lhs - rhs, 0.5) / alpha_norm(rhs, 0.5));
            ++samples;
        }
    }
    double jump = 0.0;
    for (const auto& [cmd, name] : std::vector<std::pair<std::string, std::string>>{
             {"run_linear", "example2_linear"}, {"run_linear", "zero_forcing"}, {"run_picard", "picard_toy"}}) {
        jump = std::max(jump, runs.get(cmd, name).report.at("residuals").at("jump").get<double>());
    }
    const bool pass = worst <= 1e-12 && jump <= 1e-12;
    return {pass, "cocycle rel err " + num(worst) + " over " + std::to_string(samples) + " samples (tol 1e-12), jump residual " +
                      num(jump) + " (tol 1e-12)"};
}

// 2. b_α(t) smoothing and the shift-operator inequality.
Outcome smoothing_bounds() {
    const auto s1 = smoothing_check(64, {0.25, 0.5, 0.75}, {0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0}, 50, 1);
    const auto s2 = shift_smoothing_check(64, {0.0, 0.25, 0.5}, {0.0, 0.25, 0.5}, {0.1, 0.5, 1.0}, 50, 1);
    const bool pass = s1.violations == 0 && s2.violations == 0 && s1.samples > 0 && s2.samples > 0;
    return {pass, "smoothing " + std::to_string(s1.violations) + "/" + std::to_string(s1.samples) +
                      " violations, shift inequality " + std::to_string(s2.violations) + "/" +
                      std::to_string(s2.samples) + " violations"};
}

// 3. Dichotomy of the c = 2 system with |b_j| ≤ 0.1.
Outcome dichotomy_certification() {
    const LinearSystem sys = test_system(2.0, JumpOperator(ScalarJump{TrigSeries(0.0, {{0.1, std::sqrt(3.0), 0.0}})}));
    const DichotomyData nominal = nominal_dichotomy(sys);
    MeasureOptions mo;
    mo.t_lo = 0.0;
    mo.t_hi = 30.0;
    mo.samples = 10000;
    const DichotomyFit fit = measure_dichotomy(sys, nominal, mo);
    const auto green = check_green_bound(sys, nominal, fit.M(), fit.beta(), mo);
    const double threshold = 0.8 * (3.0 - std::log(1.1) / sys.times.theta());
    const bool pass = fit.beta_stable >= threshold && green.violations == 0 && green.samples >= 10000;
    return {pass, "beta_stable " + num(fit.beta_stable) + " vs threshold " + num(threshold) + ", Green bound " +
                      std::to_string(green.violations) + "/" + std::to_string(green.samples) +
                      " violations (worst ratio " + num(green.worst_ratio) + ")"};
}

// 4. Closed-form single-mode solutions and second-order residual convergence.
Outcome linear_bounded_solution(Runs& runs) {
    // Resolvent: constant unit forcing on mode 2, no jumps, c = 0.
    LinearSystem heat = test_system(0.0, JumpOperator{}, -40, 40);
    heat.K = 4;
    Forcing f2;
    f2.f_terms.push_back({TrigSeries(1.0), {0.0, 1.0}});
    SolverOptions so;
    const GridSolution steady = bounded_solution_linear(heat, nominal_dichotomy(heat), f2, {0, 10}, so);
    double err_resolvent = 0.0;
    for (const auto& iv : steady.intervals()) {
        for (const auto& u : iv.u) {
            err_resolvent = std::max(err_resolvent, std::abs(u.mode(2) - 0.25));
            for (int k : {1, 3, 4}) err_resolvent = std::max(err_resolvent, std::abs(u.mode(k)));
        }
    }

    // Geometric impulse series: period 1, factor b, impulse data γ on mode 1.
    const double b = 0.2;
    const double gamma = 0.7;
    LinearSystem per;
    per.K = 2;
    std::vector<double> t;
    for (long j = -60; j <= 60; ++j) t.push_back(static_cast<double>(j));
    per.times = ImpulseTimes::from_times(-60, t);
    per.jumps = JumpOperator(ScalarJump{TrigSeries(b)});
    DichotomyData d = nominal_dichotomy(per);
    d.beta = 1.0 - std::log(1.0 + b);  // exact decay rate of the constant-factor product
    Forcing gf;
    gf.g_terms.push_back({TrigSeries(gamma), {1.0}});
    const GridSolution geo = bounded_solution_linear(per, d, gf, {0, 10}, so);
    const double expected = gamma / (1.0 - (1.0 + b) * std::exp(-1.0));
    double err_series = 0.0;
    for (long j = 1; j < 10; ++j) err_series = std::max(err_series, std::abs(geo.after(j).mode(1) - expected));

    // Residual convergence on the shift-jump linear scenario, Chebyshev nodes 33 → 65.
    runs.get("run_linear", "example2_linear");
    const Scenario& sc = runs.scenarios.at("example2_linear");
    const DichotomyData dn = nominal_dichotomy(sc.sys);
    std::vector<double> res;
    for (std::size_t n : {33, 65}) {
        SolverOptions o = sc.solver;
        o.nodes_per_interval = n;
        o.layout = NodeLayout::Chebyshev;
        const GridSolution sol = bounded_solution_linear(sc.sys, dn, sc.forcing, sc.output, o);
        res.push_back(residual_check(sc.sys, sc.forcing, sol).interior);
    }
    const double ratio = res[0] / res[1];
    const bool pass = err_resolvent <= 1e-8 && err_series <= 1e-8 && std::abs(ratio - 4.0) <= 0.5;
    return {pass, "resolvent err " + num(err_resolvent) + ", series err " + num(err_series) + " (tol 1e-8), residual ratio " +
                      num(ratio) + " (4 +- 0.5)"};
}

// 5. Almost-period differences shrink with eps on the shift-jump scenario.
Outcome almost_periodicity(Runs& runs) {
    const json& wap = runs.get("run_linear", "example2_linear").report.at("wap");
    const std::vector<double> eps_expected = {0.1, 0.05, 0.025};
    std::vector<double> maxima;
    bool eps_ok = wap.at("levels").size() == eps_expected.size();
    for (std::size_t i = 0; eps_ok && i < eps_expected.size(); ++i) {
        const json& lvl = wap.at("levels")[i];
        eps_ok = lvl.at("eps").get<double>() == eps_expected[i] && !lvl.at("max_diff").is_null();
        if (eps_ok) maxima.push_back(lvl.at("max_diff").get<double>());
    }
    bool monotone = eps_ok;
    for (std::size_t i = 1; monotone && i < maxima.size(); ++i) monotone = maxima[i] <= 1.1 * maxima[i - 1];
    std::string detail = "max differences";
    for (double m : maxima) detail += " " + num(m);
    return {monotone, detail + " at eps 0.1, 0.05, 0.025 (10% noise allowance)"};
}

// 6. Picard contraction ratios and uniqueness from two starts.
Outcome contraction(Runs& runs) {
    const CommandResult& r = runs.get("run_picard", "picard_toy");
    const Scenario& sc = runs.scenarios.at("picard_toy");
    const json& cc = r.report.at("contraction");
    const auto history = r.report.at("picard").at("history").get<std::vector<double>>();
    const double limit = cc.at("N1").get<double>() * cc.at("M_star").get<double>() + 0.05;
    const bool contractive = cc.at("contractive").get<bool>();
    double worst = 0.0;
    for (std::size_t i = 1; i < history.size(); ++i) {
        if (history[i - 1] <= 10.0 * sc.picard.tol) break;
        worst = std::max(worst, history[i] / history[i - 1]);
    }
    const double agree = r.report.at("second_start").at("max_diff").get<double>();
    const bool pass = contractive && worst <= limit && agree <= 10.0 * sc.picard.tol;
    return {pass, "max ratio " + num(worst) + " vs N1*M_star+0.05 = " + num(limit) + ", two starts differ by " +
                      num(agree) + " (tol " + num(10.0 * sc.picard.tol) + ")"};
}

// 7. Gronwall verifiers.
Outcome gronwall() {
    double worst_rel = 0.0;
    for (double b : {0.5, 1.0, 2.0}) {
        for (double Q : {0.5, 1.0, 2.0}) {
            worst_rel = std::max(worst_rel, std::abs(gronwall_constant(b, 0.0, Q) / std::exp(b * Q) - 1.0));
        }
    }
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> gap(0.5, 1.2);
    int runs = 0;
    int failures = 0;
    for (int s = 0; s < 20; ++s) {
        std::vector<double> knots{0.0};
        for (int j = 0; j < 10; ++j) knots.push_back(knots.back() + gap(rng));
        for (double alpha : {0.0, 0.25, 0.5}) {
            const auto z = saturate_impulsive(1.2, 0.3, 0.1, alpha, knots, 64, 1.0);
            failures += !gronwall_verify_impulsive(1.2, 0.3, 0.1, alpha, z, 1.0).holds;
            ++runs;
        }
    }
    const bool pass = worst_rel <= 0.05 && failures == 0;
    return {pass, "classical C_tilde rel dev " + num(worst_rel) + " (tol 5%), impulsive bound failures " +
                      std::to_string(failures) + "/" + std::to_string(runs)};
}

// 8. Robustness sweep.
Outcome robustness(Runs& runs) {
    const json& sweep = runs.get("run_robustness", "robustness").report.at("sweep");
    bool dich = true;
    bool decreasing = true;
    bool identity = true;
    double prev_gap = INFINITY;
    double prev_eps = INFINITY;
    double worst_res = 0.0;
    std::string gaps;
    for (const json& e : sweep) {
        const double eps = e.at("eps").get<double>();
        const double gap = e.at("proj_gap").get<double>();
        if (eps <= 0.05) dich = dich && e.at("dichotomous").get<bool>();
        decreasing = decreasing && eps < prev_eps && gap < prev_gap;
        prev_eps = eps;
        prev_gap = gap;
        gaps += " " + num(gap);
        const double tail = e.at("tail_bound").get<double>();
        for (double r : e.at("residuals").get<std::vector<double>>()) {
            worst_res = std::max(worst_res, r);
            identity = identity && r <= 1e-10 + tail;
        }
    }
    const bool pass = sweep.size() >= 3 && dich && decreasing && identity;
    return {pass, "projection gaps" + gaps + ", dichotomous for eps<=0.05: " + (dich ? "yes" : "no") +
                      ", Green identity residual " + num(worst_res) + " (tol 1e-10 + tail)"};
}

// 9. Stability of the almost periodic solution.
Outcome stability(Runs& runs) {
    const json& st = runs.get("run_stability", "stability").report.at("stability");
    const double fitted = st.at("fitted_exponent").get<double>();
    const double bound = st.at("beta_hat").get<double>() - st.at("p").get<double>() * std::log(st.at("growth").get<double>());
    const bool pass = fitted >= bound - 0.1;
    return {pass, "fitted exponent " + num(fitted) + " vs bound " + num(bound) + " - 0.1"};
}

// 10. State-dependent impulses: single crossings, S-map contraction, round trip.
Outcome nonfixed(Runs& runs) {
    const json& rep = runs.get("run_nonfixed", "example1_nonfixed").report;
    const json& counts = rep.at("beating").at("counts");
    bool once = counts.size() >= 20;
    for (const auto& [j, c] : counts.items()) once = once && c.get<int>() == 1;
    const double bmm = rep.at("beating").at("bM2M3").get<double>();
    const double factor = rep.at("smap").at("factor").get<double>();
    const double rt = rep.at("roundtrip").at("max_error").get<double>();
    const bool pass = once && bmm < 1.0 && factor < 1.0 && rt <= 1e-6;
    return {pass, std::to_string(counts.size()) + " surfaces crossed once: " + (once ? "yes" : "no") + ", bM2M3 " +
                      num(bmm) + ", outer factor " + num(factor) + ", round trip " + num(rt) + " (tol 1e-6)"};
}

// 11. Same scenario and seed give byte-identical artifacts.
Outcome determinism(Runs& runs) {
    std::size_t same = 0;
    std::string differing;
    for (const auto& [cmd, name] : kCommands) {
        const CommandResult& a = runs.get(cmd, name);
        const CommandResult b = run_command(cmd, runs.scenarios.at(name));
        const bool eq = a.report.dump(2) == b.report.dump(2) && a.solution_csv == b.solution_csv &&
                        a.crossings_csv == b.crossings_csv && a.history_csv == b.history_csv;
        if (eq) {
            ++same;
        } else {
            differing += " " + name;
        }
    }
    const bool pass = same == kCommands.size();
    return {pass, std::to_string(same) + "/" + std::to_string(kCommands.size()) + " scenario runs byte-identical" +
                      (differing.empty() ? "" : " (differ:" + differing + ")")};
}

}  // namespace

int main() {
    Runs runs;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"cocycle and jump exactness", [&] { return cocycle_and_jumps(runs); }},
        {"smoothing bounds", [] { return smoothing_bounds(); }},
        {"dichotomy certification", [] { return dichotomy_certification(); }},
        {"linear bounded solution", [&] { return linear_bounded_solution(runs); }},
        {"almost periodicity", [&] { return almost_periodicity(runs); }},
        {"contraction", [&] { return contraction(runs); }},
        {"gronwall verifiers", [] { return gronwall(); }},
        {"robustness", [&] { return robustness(runs); }},
        {"stability", [&] { return stability(runs); }},
        {"nonfixed surfaces", [&] { return nonfixed(runs); }},
        {"determinism", [&] { return determinism(runs); }},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::printf("%s %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
