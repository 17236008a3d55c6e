#include "impulse/commands.hpp"

#include "impulse/discrete.hpp"
#include "impulse/gronwall.hpp"
#include "impulse/io.hpp"
#include "impulse/stability.hpp"
#include "impulse/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace impulse {

using nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// checks section access

struct Section {
    const json& j;
    std::string path;

    bool has(const std::string& key) const { return j.contains(key); }

    const json& at(const std::string& key) const {
        if (!j.contains(key)) throw ConfigError("config field '" + path + "." + key + "': missing");
        return j.at(key);
    }

    double num(const std::string& key) const {
        const json& v = at(key);
        if (!v.is_number()) throw ConfigError("config field '" + path + "." + key + "': expected a number");
        return v.get<double>();
    }

    double num(const std::string& key, double dflt) const { return has(key) ? num(key) : dflt; }

    long integer(const std::string& key) const {
        const json& v = at(key);
        if (!v.is_number_integer()) throw ConfigError("config field '" + path + "." + key + "': expected an integer");
        return v.get<long>();
    }

    long integer(const std::string& key, long dflt) const { return has(key) ? integer(key) : dflt; }

    bool flag(const std::string& key, bool dflt) const {
        if (!has(key)) return dflt;
        if (!j.at(key).is_boolean()) throw ConfigError("config field '" + path + "." + key + "': expected a boolean");
        return j.at(key).get<bool>();
    }

    std::vector<double> list(const std::string& key) const {
        const json& v = at(key);
        if (!v.is_array() || v.empty()) {
            throw ConfigError("config field '" + path + "." + key + "': expected a nonempty array");
        }
        std::vector<double> out;
        for (const auto& x : v) {
            if (!x.is_number()) throw ConfigError("config field '" + path + "." + key + "': expected numbers");
            out.push_back(x.get<double>());
        }
        return out;
    }

    Section sub(const std::string& key) const { return {at(key), path + "." + key}; }
};

Section section(const Scenario& sc, const std::string& key) { return {sc.section(key), "checks." + key}; }

// ---------------------------------------------------------------------------
// shared pieces

json base_report(const Scenario& sc, const std::string& command) {
    return {{"command", command},
            {"scenario", sc.name},
            {"version", IMPULSE_VERSION},
            {"seed", sc.seed},
            {"config", sc.config}};
}

/// Empirical Hölder quotient max |c·m(t) − c·m(t')|/|t − t'|^exponent of the
/// drift on a uniform grid over the output window.
double drift_holder(const Scenario& sc, double exponent) {
    const double t0 = sc.sys.times[sc.output.j_first];
    const double t1 = sc.sys.times[sc.output.j_last];
    const int n = 400;
    const double h = (t1 - t0) / n;
    std::vector<double> v;
    for (int i = 0; i <= n; ++i) v.push_back(sc.sys.c * (*sc.sys.modulation)(t0 + i * h));
    double q = 0.0;
    for (int i = 0; i <= n; ++i) {
        for (int k = i + 1; k <= std::min(n, i + 40); ++k) q = std::max(q, std::abs(v[k] - v[i]) / std::pow((k - i) * h, exponent));
    }
    return q;
}

DichotomyData prepare_dichotomy(const Scenario& sc, json& rep) {
    DichotomyData d = nominal_dichotomy(sc.sys);
    json info = {{"unstable_modes", d.unstable_modes}, {"nominal_M", d.M}, {"nominal_beta", d.beta}};
    if (sc.measure) {
        MeasureOptions mo;
        mo.t_lo = sc.sys.times[sc.output.j_first];
        mo.t_hi = sc.sys.times[sc.output.j_last];
        mo.seed = sc.seed;
        mo.alpha = sc.alpha;
        const DichotomyFit fit = measure_dichotomy(sc.sys, d, mo);
        if (!(fit.beta() > 0.0)) throw Error("measured dichotomy exponent is not positive");
        d.M = fit.M();
        d.beta = fit.beta();
        d.measured = true;
        info["M_stable"] = fit.M_stable;
        info["beta_stable"] = fit.beta_stable;
        if (fit.M_unstable) {
            info["M_unstable"] = *fit.M_unstable;
            info["beta_unstable"] = *fit.beta_unstable;
        }
    }
    info["M"] = d.M;
    info["beta"] = d.beta;
    info["measured"] = d.measured;
    if (sc.sys.modulation) {
        info["drift_holder"] = {{"exponent_1", drift_holder(sc, 1.0)},
                                {"exponent_half", drift_holder(sc, 0.5)},
                                {"lipschitz_bound", std::abs(sc.sys.c) * sc.sys.modulation->lipschitz()}};
    }
    rep["dichotomy"] = info;
    return d;
}

double jump_tolerance(const GridSolution& sol, double alpha) { return 1e-12 * std::max(1.0, sol.sup_norm(alpha)); }

json residual_json(const Residuals& r, double interior_tol, double jump_tol) {
    return {{"interior", r.interior},
            {"jump", r.jump},
            {"interior_tol", interior_tol},
            {"jump_tol", jump_tol},
            {"pass", r.interior <= interior_tol && r.jump <= jump_tol}};
}

/// sup_x |s(x + r) − s(x)| ≤ Σ|amp|·2|sin(freq·r/2)|.
double shift_bound(const TrigSeries& s, double r) {
    double b = 0.0;
    for (const auto& m : s.modes) b += std::abs(m.amp) * 2.0 * std::abs(std::sin(0.5 * m.freq * r));
    return b;
}

double sequence_shift(const TrigSeries& s, const ImpulseTimes& times, int q) {
    double dev = 0.0;
    for (long j = times.j_min(); j + q <= times.j_max(); ++j) {
        dev = std::max(dev, std::abs(s(static_cast<double>(j + q)) - s(static_cast<double>(j))));
    }
    return dev;
}

std::vector<TrigSeries> index_sequences(const Scenario& sc) {
    std::vector<TrigSeries> out;
    for (const auto& term : sc.sys.jumps.terms()) {
        if (const auto* s = std::get_if<ScalarJump>(&term)) out.push_back(s->factor);
        if (const auto* s = std::get_if<ShiftJump>(&term)) out.push_back(s->b);
        if (const auto* s = std::get_if<CouplingJump>(&term)) out.push_back(s->b);
        if (const auto* s = std::get_if<DiagonalJump>(&term)) {
            double m = 0.0;
            for (double x : s->multipliers) m = std::max(m, std::abs(x));
            TrigSeries scaled = s->scale;
            scaled.mean *= m;
            for (auto& mode : scaled.modes) mode.amp *= m;
            out.push_back(scaled);
        }
    }
    for (const auto& g : sc.forcing.g_terms) {
        const double n = alpha_norm(SpectralVector(g.profile), sc.alpha);
        TrigSeries scaled = g.signal;
        scaled.mean *= n;
        for (auto& mode : scaled.modes) mode.amp *= n;
        out.push_back(scaled);
    }
    return out;
}

/// Bound on sup_t ‖f(t + r) − f(t)‖ plus the drift change c·|m(t + r) − m(t)|.
double forcing_shift(const Scenario& sc, double r) {
    double b = 0.0;
    for (const auto& f : sc.forcing.f_terms) b += shift_bound(f.signal, r) * alpha_norm(SpectralVector(f.profile), 0.0);
    if (sc.sys.modulation) b += std::abs(sc.sys.c) * shift_bound(*sc.sys.modulation, r);
    return b;
}

json wap_section(const Scenario& sc, const GridSolution& sol, const Section& cfg, bool& pass) {
    const std::vector<double> eps_list = cfg.list("eps");
    for (std::size_t i = 1; i < eps_list.size(); ++i) {
        if (!(eps_list[i] < eps_list[i - 1])) throw ConfigError("config field '" + cfg.path + ".eps': must decrease");
    }
    const double interval_len = cfg.num("interval_len");
    const int q_max = static_cast<int>(cfg.integer("q_max"));
    const double gamma_factor = cfg.num("gamma_factor");

    const auto seqs = index_sequences(sc);
    std::vector<double> op_seq;
    if (!seqs.empty()) {
        for (long j = sc.sys.times.j_min(); j <= sc.sys.times.j_max(); ++j) op_seq.push_back(seqs.front()(static_cast<double>(j)));
    }
    const double span = sol.t_end() - sol.t_begin();

    json out = json::array();
    std::vector<double> maxima;
    bool all_pass = true;
    for (double eps : eps_list) {
        const auto ok = [&](double r, int q) {
            for (std::size_t i = 1; i < seqs.size(); ++i) {
                if (!(sequence_shift(seqs[i], sc.sys.times, q) < eps)) return false;
            }
            return forcing_shift(sc, r) < eps;
        };
        const AlmostPeriodScan scan = common_almost_periods(sc.sys.times, op_seq, 0.0, eps, interval_len, q_max, ok);
        std::vector<double> periods;
        json pairs = json::array();
        for (const auto& p : scan.pairs) {
            if (p.r >= span - 1.0) continue;
            periods.push_back(p.r);
            pairs.push_back({{"r", p.r}, {"q", p.q}, {"tau_dev", p.tau_dev}, {"op_dev", p.op_dev}});
        }
        json entry = {{"eps", eps}, {"gamma", gamma_factor * eps}, {"periods", pairs}};
        if (periods.empty()) {
            entry["pass"] = false;
            entry["max_diff"] = nullptr;
            all_pass = false;
            out.push_back(entry);
            maxima.push_back(std::numeric_limits<double>::infinity());
            continue;
        }
        const WapReport rep = wap_verify(sol, sc.sys.times, eps, periods, gamma_factor * eps);
        double m = 0.0;
        json cands = json::array();
        for (const auto& c : rep.candidates) {
            m = std::max(m, c.max_diff);
            cands.push_back({{"r", c.r}, {"max_diff", c.max_diff}, {"nodes", c.nodes}, {"pass", c.pass}});
        }
        entry["candidates"] = cands;
        entry["max_diff"] = m;
        entry["modulus"] = rep.modulus;
        entry["pass"] = rep.pass;
        all_pass = all_pass && rep.pass;
        maxima.push_back(m);
        out.push_back(entry);
    }
    bool monotone = true;
    for (std::size_t i = 1; i < maxima.size(); ++i) monotone = monotone && maxima[i] <= 1.1 * maxima[i - 1];
    pass = all_pass && monotone;
    return {{"levels", out}, {"monotone", monotone}, {"pass", pass}};
}

SpectralVector initial_state(const Section& cfg, std::size_t K, const std::string& key) {
    SpectralVector u(K);
    if (!cfg.has(key)) return u;
    const json& v = cfg.at(key);
    if (!v.is_array() || v.size() > K) throw ConfigError("config field '" + cfg.path + "." + key + "': expected at most K numbers");
    for (std::size_t i = 0; i < v.size(); ++i) u[i] = v[i].get<double>();
    return u;
}

}  // namespace

// ---------------------------------------------------------------------------

CommandResult run_linear(const Scenario& sc) {
    CommandResult res;
    res.report = base_report(sc, "run_linear");
    const Section cfg = section(sc, "linear");
    const DichotomyData d = prepare_dichotomy(sc, res.report);

    const GridSolution sol = bounded_solution_linear(sc.sys, d, sc.forcing, sc.output, sc.solver);
    const Residuals r = residual_check(sc.sys, sc.forcing, sol);
    const double interior_tol = cfg.num("residual_tol");
    const double jump_tol = jump_tolerance(sol, sc.alpha);
    res.report["residuals"] = residual_json(r, interior_tol, jump_tol);
    res.report["tail_error_bound"] = tail_error_bound(sc.sys, d, sc.forcing, sc.solver);
    res.report["sup_norm"] = sol.sup_norm(sc.alpha);

    bool wap_pass = true;
    if (cfg.has("wap")) res.report["wap"] = wap_section(sc, sol, cfg.sub("wap"), wap_pass);

    res.pass = r.interior <= interior_tol && r.jump <= jump_tol && wap_pass;
    res.report["pass"] = res.pass;
    res.solution_csv = io::solution_csv(sol);
    res.crossings_csv = io::impulses_csv(sol);
    res.history_csv = io::history_csv({});
    return res;
}

CommandResult run_picard(const Scenario& sc) {
    CommandResult res;
    res.report = base_report(sc, "run_picard");
    const Section cfg = section(sc, "picard");
    const DichotomyData d = prepare_dichotomy(sc, res.report);

    const double N1 = std::max(sc.nonlin.lipschitz(sc.K), sc.g_map.lipschitz());
    const double M0 = sc.nonlin.bound_at_zero(sc.K) + sc.forcing.f_sup(sc.K);
    const ContractionConstants cc = contraction_constants(d.M, d.beta, sc.sys.times.theta(), smoothing_constant(sc.alpha),
                                                          sc.sys.times.big_theta(), sc.alpha, N1, M0);
    res.report["contraction"] = {{"N1", N1},
                                 {"M0", M0},
                                 {"M_star", cc.M_star},
                                 {"rate_bound", N1 * cc.M_star},
                                 {"rho_min", std::isfinite(cc.rho_min) ? json(cc.rho_min) : json(nullptr)},
                                 {"contractive", cc.contractive}};

    const PicardResult pr = picard_solve(sc.sys, d, sc.nonlin, sc.g_map, sc.forcing, sc.output, sc.solver, sc.picard);
    const double slack = cfg.num("ratio_slack");
    std::vector<double> ratios;
    bool ratios_ok = true;
    for (std::size_t i = 1; i < pr.history.size(); ++i) {
        if (pr.history[i - 1] <= 10.0 * sc.picard.tol) break;
        ratios.push_back(pr.history[i] / pr.history[i - 1]);
        if (cc.contractive && ratios.back() > N1 * cc.M_star + slack) ratios_ok = false;
    }
    res.report["picard"] = {{"iterations", pr.history.size()}, {"history", pr.history}, {"ratios", ratios},
                            {"ratio_limit", N1 * cc.M_star + slack}, {"ratios_ok", ratios_ok}};

    bool agree = true;
    if (!sc.nonlin.is_zero() || !sc.g_map.is_zero()) {
        GridSolution start = pr.full;
        const double amp = cfg.num("second_start");
        for (auto& iv : start.intervals()) {
            for (auto& u : iv.u) {
                u = SpectralVector(sc.K);
                u[0] = amp;
            }
        }
        const PicardResult pr2 =
            picard_solve(sc.sys, d, sc.nonlin, sc.g_map, sc.forcing, sc.output, sc.solver, sc.picard, start);
        const double diff = pr2.solution.max_node_diff(pr.solution, sc.alpha);
        agree = diff <= 10.0 * sc.picard.tol;
        res.report["second_start"] = {{"amplitude", amp}, {"iterations", pr2.history.size()}, {"max_diff", diff},
                                      {"pass", agree}};
    }

    const double interior_tol = cfg.num("residual_tol");
    const double jump_tol = jump_tolerance(pr.solution, sc.alpha);
    res.report["residuals"] = residual_json(pr.residuals, interior_tol, jump_tol);
    res.report["sup_norm"] = pr.solution.sup_norm(sc.alpha);

    res.pass = ratios_ok && agree && pr.residuals.interior <= interior_tol && pr.residuals.jump <= jump_tol;
    res.report["pass"] = res.pass;
    res.solution_csv = io::solution_csv(pr.solution);
    res.crossings_csv = io::impulses_csv(pr.solution);
    res.history_csv = io::history_csv(pr.history);
    return res;
}

CommandResult run_nonfixed(const Scenario& sc) {
    CommandResult res;
    res.report = base_report(sc, "run_nonfixed");
    if (!sc.surfaces) throw ConfigError("config field 'surfaces': missing");
    const SurfaceSpec& spec = *sc.surfaces;
    const Section cfg = section(sc, "nonfixed");

    NonfixedOptions opt;
    opt.h = cfg.num("h");
    opt.alpha = sc.alpha;
    opt.bound = 2.0 * sc.nonlin.rho();
    opt.forbid_beating = cfg.flag("forbid_beating", false);
    const double t0 = cfg.num("t0");
    const double t_end = cfg.num("t_end");
    const long j_from = cfg.integer("j_from");
    const long j_to = cfg.integer("j_to");
    const SpectralVector u0 = initial_state(cfg, sc.K, "u0");

    const SourceFn f = make_source(sc.nonlin, sc.forcing, sc.K);
    const ImpulseFn g = make_impulse(sc.g_map, sc.forcing, sc.K);
    const Trajectory tr = simulate_nonfixed(sc.sys, f, spec, g, u0, t0, t_end, opt);
    NonfixedOptions half = opt;
    half.h = 0.5 * opt.h;
    const Trajectory tr2 = simulate_nonfixed(sc.sys, f, spec, g, u0, t0, t_end, half);
    double refine = 0.0;
    const bool same_count = tr.crossings.size() == tr2.crossings.size();
    for (std::size_t i = 0; i < std::min(tr.crossings.size(), tr2.crossings.size()); ++i) {
        refine = std::max(refine, std::abs(tr.crossings[i].t - tr2.crossings[i].t));
    }

    const BeatingReport br = beating_check(tr, spec, f, j_from, j_to);
    bool all_once = true;
    json counts = json::object();
    for (const auto& [j, c] : br.counts) {
        counts[std::to_string(j)] = c;
        all_once = all_once && c == 1;
    }
    res.report["trajectory"] = {{"h", opt.h}, {"crossings", tr.crossings.size()},
                                {"refinement", {{"h_half_crossings", tr2.crossings.size()},
                                                {"same_count", same_count},
                                                {"max_time_diff", refine},
                                                {"diff_over_h", refine / opt.h}}}};
    res.report["beating"] = {{"counts", counts}, {"all_once", all_once}, {"b", br.b}, {"M2", br.M2}, {"M3", br.M3},
                             {"bM2M3", br.b * br.M2 * br.M3}, {"condition", br.condition}, {"single", br.single}};
    res.report["surfaces"] = {{"separation", spec.separation(sc.nonlin.rho())},
                              {"lipschitz", spec.lipschitz(sc.nonlin.rho())}};

    const Section sm = cfg.sub("smap");
    SMapOptions so;
    so.tol = sm.num("tol");
    so.max_outer = static_cast<std::size_t>(sm.integer("max_outer"));
    const SMapResult smap = s_map_solve(sc.sys, sc.nonlin, sc.g_map, sc.forcing, spec, sc.output, sc.solver, sc.picard, so);

    const Section rtc = cfg.sub("roundtrip");
    NonfixedOptions rt_opt = opt;
    rt_opt.h = rtc.num("h");
    const RoundTrip rt = s_map_round_trip(smap, sc.nonlin, sc.g_map, sc.forcing, spec, rtc.integer("j0"),
                                          rtc.integer("count"), rt_opt);
    const double rt_tol = rtc.num("tol");
    res.report["smap"] = {{"outer_iterations", smap.history.size()}, {"history", smap.history},
                          {"factors", smap.factors}, {"factor", smap.factor()}, {"residual", smap.residual},
                          {"inner_iterations", smap.inner_iterations}};
    res.report["roundtrip"] = {{"j", rt.j}, {"expected", rt.expected}, {"realized", rt.realized},
                               {"max_error", rt.max_error}, {"tol", rt_tol}, {"h", rt_opt.h}};

    res.pass = all_once && br.condition && smap.factor() < 1.0 && rt.max_error <= rt_tol;
    res.report["pass"] = res.pass;
    res.solution_csv = io::trajectory_csv(tr);
    res.crossings_csv = io::crossings_csv(tr, sc.alpha);
    res.history_csv = io::history_csv(smap.history);
    return res;
}

CommandResult run_robustness(const Scenario& sc) {
    CommandResult res;
    res.report = base_report(sc, "run_robustness");
    const Section cfg = section(sc, "robustness");
    const std::vector<double> eps_list = cfg.list("eps");
    for (std::size_t i = 1; i < eps_list.size(); ++i) {
        if (!(eps_list[i] < eps_list[i - 1])) throw ConfigError("config field 'checks.robustness.eps': must decrease");
    }
    RobustnessOptions ro;
    ro.d = cfg.num("d", ro.d);
    ro.steps = cfg.integer("steps", ro.steps);
    ro.burn_in = cfg.integer("burn_in", ro.burn_in);
    ro.alpha = sc.alpha;
    const double dich_max = cfg.num("dichotomous_max_eps");
    const double residual_tol = cfg.num("residual_tol");

    std::ostringstream csv;
    csv << "eps,M_hat,beta_hat,proj_gap,max_residual,tail_bound\n";
    json sweep = json::array();
    bool dich_ok = true;
    bool residual_ok = true;
    bool gaps_ok = true;
    double prev_gap = std::numeric_limits<double>::infinity();
    for (double eps : eps_list) {
        const RobustnessReport r = robustness_experiment(sc.sys, eps, ro);
        double max_res = 0.0;
        for (double x : r.residuals) max_res = std::max(max_res, x);
        if (eps <= dich_max && !r.dichotomous) dich_ok = false;
        if (max_res > residual_tol + r.tail_bound) residual_ok = false;
        if (!(r.proj_gap < prev_gap)) gaps_ok = false;
        prev_gap = r.proj_gap;
        sweep.push_back({{"eps", eps}, {"M_hat", r.M_hat}, {"beta_hat", r.beta_hat}, {"M_hat_base", r.M_hat_base},
                         {"beta_hat_base", r.beta_hat_base}, {"dichotomous", r.dichotomous}, {"proj_gap", r.proj_gap},
                         {"time_shift", r.time_shift}, {"slope_dev", r.slope_dev},
                         {"time_change_bounds", r.time_change_bounds}, {"residuals", r.residuals},
                         {"tail_bound", r.tail_bound}});
        csv << io::fmt(eps) << ',' << io::fmt(r.M_hat) << ',' << io::fmt(r.beta_hat) << ',' << io::fmt(r.proj_gap) << ','
            << io::fmt(max_res) << ',' << io::fmt(r.tail_bound) << '\n';
    }
    res.report["sweep"] = sweep;
    res.report["dichotomous_ok"] = dich_ok;
    res.report["gaps_decreasing"] = gaps_ok;
    res.report["residuals_ok"] = residual_ok;
    res.pass = dich_ok && gaps_ok && residual_ok;
    res.report["pass"] = res.pass;
    res.solution_csv = csv.str();
    res.crossings_csv = "j,t_cross,pre_norm,post_norm\n";
    res.history_csv = io::history_csv({});
    return res;
}

CommandResult run_stability(const Scenario& sc) {
    CommandResult res;
    res.report = base_report(sc, "run_stability");
    const Section cfg = section(sc, "stability");
    const DichotomyData d = prepare_dichotomy(sc, res.report);
    const PicardResult pr = picard_solve(sc.sys, d, sc.nonlin, sc.g_map, sc.forcing, sc.output, sc.solver, sc.picard);

    StabilityOptions so;
    so.delta = cfg.num("delta");
    so.horizon = cfg.num("horizon");
    so.h = cfg.num("h");
    so.fit_skip = cfg.num("fit_skip");
    so.slack = cfg.num("slack");
    so.alpha = sc.alpha;
    so.seed = sc.seed;
    const double t0 = sc.sys.times[sc.output.j_first] + cfg.num("t0_offset");
    const StabilityReport r = stability_experiment(sc.sys, d, sc.nonlin, sc.g_map, sc.forcing, pr.solution, t0, so);

    res.report["stability"] = {{"t0", r.t0}, {"fitted_exponent", r.fitted_exponent}, {"bound", r.bound},
                               {"slack", so.slack}, {"beta_hat", r.beta_hat}, {"M_hat", r.M_hat}, {"p", r.p},
                               {"Q", r.Q}, {"L_Q", r.L_Q}, {"N1", r.N1}, {"M2", r.M2}, {"M3", r.M3},
                               {"C_tilde", r.C_tilde}, {"growth", r.growth}, {"impulses", r.impulses},
                               {"max_diff", r.max_diff}, {"holds", r.holds}};
    res.report["picard_iterations"] = pr.history.size();
    res.pass = r.holds;
    res.report["pass"] = res.pass;

    std::ostringstream csv;
    csv << "dt,norm\n";
    for (const auto& [x, y] : r.decay) csv << io::fmt(x) << ',' << io::fmt(y) << '\n';
    res.solution_csv = csv.str();
    res.crossings_csv = io::impulses_csv(pr.solution);
    res.history_csv = io::history_csv(pr.history);
    return res;
}

CommandResult verify_inequalities(const Scenario& sc) {
    CommandResult res;
    res.report = base_report(sc, "verify_inequalities");
    const Section cfg = section(sc, "inequalities");

    const Section sm = cfg.sub("smoothing");
    const auto s1 = smoothing_check(static_cast<std::size_t>(sm.integer("K")), sm.list("alphas"), sm.list("ts"),
                                    static_cast<std::size_t>(sm.integer("random")), sc.seed);
    const Section sh = cfg.sub("shift");
    const auto s2 = shift_smoothing_check(static_cast<std::size_t>(sh.integer("K")), sh.list("alphas"), sh.list("betas"),
                                          sh.list("ts"), static_cast<std::size_t>(sh.integer("random")), sc.seed + 1);
    res.report["smoothing"] = {{"samples", s1.samples}, {"violations", s1.violations}, {"worst_ratio", s1.worst_ratio}};
    res.report["shift_smoothing"] = {{"samples", s2.samples}, {"violations", s2.violations}, {"worst_ratio", s2.worst_ratio}};
    bool pass = s1.violations == 0 && s2.violations == 0;

    const Section gc = cfg.sub("gronwall_classical");
    const double rel_tol = gc.num("rel_tol");
    json classical = json::array();
    for (double b : gc.list("b")) {
        for (double Q : gc.list("Q")) {
            const double C = gronwall_constant(b, 0.0, Q);
            const double rel = std::abs(C / std::exp(b * Q) - 1.0);
            pass = pass && rel <= rel_tol;
            classical.push_back({{"b", b}, {"Q", Q}, {"C_tilde", C}, {"exp_bQ", std::exp(b * Q)}, {"rel_dev", rel}});
        }
    }
    res.report["gronwall_classical"] = {{"rel_tol", rel_tol}, {"cases", classical}};

    const Section gk = cfg.sub("gronwall_continuous");
    {
        const double a1 = gk.num("a1"), a2 = gk.num("a2"), b = gk.num("b"), al = gk.num("alpha"), be = gk.num("beta");
        const double Q = gk.num("Q"), scale = gk.num("scale");
        const auto N = static_cast<std::size_t>(gk.integer("N"));
        std::vector<double> y = gronwall_majorant(a1, a2, b, al, be, Q, N);
        for (double& v : y) v *= scale;
        const GronwallResult g = gronwall_verify_continuous(a1, a2, b, al, be, Q, y);
        pass = pass && g.holds;
        res.report["gronwall_continuous"] = {{"holds", g.holds}, {"C_tilde", g.C_tilde}, {"worst_ratio", g.worst_ratio}};
    }

    const Section gi = cfg.sub("gronwall_impulsive");
    {
        const double M1 = gi.num("M1"), M2 = gi.num("M2"), M3 = gi.num("M3");
        const double gap_lo = gi.num("gap_lo"), gap_hi = gi.num("gap_hi");
        const long trials = gi.integer("trials"), intervals = gi.integer("intervals");
        const auto N = static_cast<std::size_t>(gi.integer("nodes"));
        std::mt19937_64 rng(sc.seed);
        std::uniform_real_distribution<double> gap(gap_lo, gap_hi);
        std::size_t runs = 0, failures = 0;
        double worst = 0.0;
        for (long t = 0; t < trials; ++t) {
            std::vector<double> knots{0.0};
            for (long m = 0; m < intervals; ++m) knots.push_back(knots.back() + gap(rng));
            for (double al : gi.list("alphas")) {
                const ImpulsiveSamples smp = saturate_impulsive(M1, M2, M3, al, knots, N, 1.0);
                const ImpulsiveGronwallResult r = gronwall_verify_impulsive(M1, M2, M3, al, smp, 1.0);
                ++runs;
                failures += r.holds ? 0 : 1;
                worst = std::max(worst, r.worst_ratio);
            }
        }
        pass = pass && failures == 0;
        res.report["gronwall_impulsive"] = {{"runs", runs}, {"failures", failures}, {"worst_ratio", worst}};
    }

    res.pass = pass;
    res.report["pass"] = pass;
    res.solution_csv = "j,t,k,a_k\n";
    res.crossings_csv = "j,t_cross,pre_norm,post_norm\n";
    res.history_csv = io::history_csv({});
    return res;
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names{"run_linear",     "run_picard",    "run_nonfixed",
                                                "run_robustness", "run_stability", "verify_inequalities"};
    return names;
}

CommandResult run_command(const std::string& name, const Scenario& sc) {
    using Fn = CommandResult (*)(const Scenario&);
    Fn fn = nullptr;
    if (name == "run_linear") fn = run_linear;
    if (name == "run_picard") fn = run_picard;
    if (name == "run_nonfixed") fn = run_nonfixed;
    if (name == "run_robustness") fn = run_robustness;
    if (name == "run_stability") fn = run_stability;
    if (name == "verify_inequalities") fn = verify_inequalities;
    if (!fn) throw ConfigError("unknown command '" + name + "'");
    try {
        return fn(sc);
    } catch (const ConfigError&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    } catch (const Error& e) {
        CommandResult res;
        res.report = base_report(sc, name);
        res.report["error"] = e.what();
        if (const auto* ce = dynamic_cast<const ConvergenceError*>(&e)) res.report["error_history"] = ce->history();
        if (const auto* be = dynamic_cast<const BeatingError*>(&e)) res.report["error_surface"] = be->surface();
        res.report["pass"] = false;
        res.solution_csv = "j,t,k,a_k\n";
        res.crossings_csv = "j,t_cross,pre_norm,post_norm\n";
        res.history_csv = io::history_csv({});
        return res;
    }
}

void write_artifacts(const std::filesystem::path& out, const Scenario& sc, const CommandResult& res) {
    const std::filesystem::path dir = out / sc.name;
    io::write_file(dir / "solution.csv", res.solution_csv);
    io::write_file(dir / "crossings.csv", res.crossings_csv);
    io::write_file(dir / "history.csv", res.history_csv);
    io::write_file(dir / "report.json", res.report.dump(2) + "\n");
}

}  // namespace impulse
