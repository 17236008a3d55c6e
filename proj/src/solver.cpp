#include "impulse/solver.hpp"

#include "impulse/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace impulse {

namespace {

struct Panel {
    double lo;
    double hi;
};

/// Panels on [a, b] whose widths double away from the stiff end.
std::vector<Panel> graded_panels(double a, double b, bool stiff_right, double lambda_max) {
    const double len = b - a;
    if (lambda_max * len <= 4.0) return {{a, b}};
    std::vector<double> widths;
    double w = 1.0 / lambda_max;
    double covered = 0.0;
    while (covered + w < len) {
        widths.push_back(w);
        covered += w;
        w *= 2.0;
    }
    widths.push_back(len - covered);
    std::vector<Panel> panels;
    if (stiff_right) {
        double hi = b;
        for (double wd : widths) {
            panels.push_back({hi - wd, hi});
            hi -= wd;
        }
        panels.back().lo = a;
    } else {
        double lo = a;
        for (double wd : widths) {
            panels.push_back({lo, lo + wd});
            lo += wd;
        }
        panels.back().hi = b;
    }
    return panels;
}

double drift_integral(const LinearSystem& sys, double t, double s) {
    return sys.modulation ? sys.modulation->integral(t) - sys.modulation->integral(s) : t - s;
}

double stiffness(const LinearSystem& sys) {
    const double m = sys.modulation ? sys.modulation->sup_abs() : 1.0;
    const double k = static_cast<double>(sys.K);
    return k * k + std::abs(sys.c) * m;
}

/// Σ over panel nodes σ of w(σ)·e^{log_flow(k, anchor, σ)}·f_k(σ) for the given modes.
void accumulate(const LinearSystem& sys, const IntervalSource& f, long j, double a, double b, bool stiff_right,
                const std::vector<int>& modes, const GaussRule& rule, double lambda_max, SpectralVector& out) {
    const double anchor = stiff_right ? b : a;
    for (const auto& p : graded_panels(a, b, stiff_right, lambda_max)) {
        const double half = 0.5 * (p.hi - p.lo);
        const double mid = 0.5 * (p.hi + p.lo);
        for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
            const double sigma = mid + half * rule.nodes[q];
            const double w = half * rule.weights[q];
            const SpectralVector fv = f(j, sigma);
            const double drift = sys.c * drift_integral(sys, anchor, sigma);
            const double dt = anchor - sigma;
            for (int k : modes) {
                const double kk = static_cast<double>(k) * static_cast<double>(k);
                out.mode(k) += w * std::exp(-kk * dt + drift) * fv.mode(k);
            }
        }
    }
}

/// Flow factor e^{log_flow(k, t, s)} applied to the listed modes only.
void flow_modes(const LinearSystem& sys, double t, double s, const std::vector<int>& modes, SpectralVector& u) {
    const double drift = sys.c * drift_integral(sys, t, s);
    for (int k : modes) {
        const double kk = static_cast<double>(k) * static_cast<double>(k);
        u.mode(k) *= std::exp(-kk * (t - s) + drift);
    }
}

}  // namespace

OutputWindow computational_window(const LinearSystem& sys, const DichotomyData& dich, const OutputWindow& window,
                                  const SolverOptions& opt) {
    const auto& T = sys.times;
    if (!(window.j_first < window.j_last)) throw Error("solver: output window needs j_first < j_last");
    if (!T.contains_index(window.j_first) || !T.contains_index(window.j_last)) {
        throw Error("solver: output window outside the impulse window");
    }
    if (!(dich.beta > 0.0) || !std::isfinite(dich.beta)) throw Error("solver: dichotomy rate must be positive");
    if (!(opt.tail_tol > 0.0 && opt.tail_tol < 1.0)) throw Error("solver: tail_tol must lie in (0, 1)");
    const double margin = std::log(1.0 / opt.tail_tol) / dich.beta;

    OutputWindow cw;
    const double left_target = T[window.j_first] - margin;
    cw.j_first = T.first_after(left_target) - 1;
    if (cw.j_first < T.j_min()) {
        std::ostringstream os;
        os << "window too small for tail_tol: left margin " << margin << " required, "
           << T[window.j_first] - T.front() << " available";
        throw Error(os.str());
    }
    cw.j_last = window.j_last;
    if (!dich.unstable_modes.empty()) {
        const double right_target = T[window.j_last] + margin;
        cw.j_last = T.first_at_or_after(right_target);
        if (cw.j_last > T.j_max()) {
            std::ostringstream os;
            os << "window too small for tail_tol: right margin " << margin << " required, "
               << T.back() - T[window.j_last] << " available";
            throw Error(os.str());
        }
    }
    return cw;
}

GridSolution green_solve(const LinearSystem& sys, const DichotomyData& dich, const IntervalSource& f,
                         const ImpulseData& g, const OutputWindow& window, const SolverOptions& opt) {
    const OutputWindow cw = computational_window(sys, dich, window, opt);
    const std::size_t K = sys.K;
    if (!dich.unstable_modes.empty() && !sys.jumps.is_diagonal()) {
        throw Error("solver: unstable modes require diagonal jumps");
    }
    std::vector<int> stable, unstable = dich.unstable_modes;
    for (int k = 1; k <= static_cast<int>(K); ++k) {
        if (std::find(unstable.begin(), unstable.end(), k) == unstable.end()) stable.push_back(k);
    }
    const GaussRule& rule = gauss_legendre(opt.gauss_order);
    const double lambda_max = stiffness(sys);

    std::vector<GridInterval> ivs;
    for (long j = cw.j_first; j < cw.j_last; ++j) {
        GridInterval iv;
        iv.j = j;
        iv.t = node_layout(opt.layout, sys.times[j], sys.times[j + 1], opt.nodes_per_interval);
        iv.u.assign(iv.t.size(), SpectralVector(K));
        ivs.push_back(std::move(iv));
    }

    // Stable part, forward from the left margin.
    SpectralVector w(K);
    for (auto& iv : ivs) {
        if (&iv != &ivs.front()) w += sys.jumps.apply(iv.j, w);
        if (g) w += dich.complement(g(iv.j));
        iv.u[0] = w;
        for (std::size_t i = 0; i + 1 < iv.t.size(); ++i) {
            const double a = iv.t[i];
            const double b = iv.t[i + 1];
            flow_modes(sys, b, a, stable, w);
            if (f) accumulate(sys, f, iv.j, a, b, true, stable, rule, lambda_max, w);
            iv.u[i + 1] = w;
        }
    }

    // Unstable part, backward from the right margin.
    if (!unstable.empty()) {
        SpectralVector z(K);
        for (auto it = ivs.rbegin(); it != ivs.rend(); ++it) {
            auto& iv = *it;
            const std::size_t n = iv.t.size();
            iv.u[n - 1] += z;
            for (std::size_t i = n - 1; i-- > 0;) {
                const double a = iv.t[i];
                const double b = iv.t[i + 1];
                flow_modes(sys, a, b, unstable, z);
                if (f) {
                    SpectralVector acc(K);
                    accumulate(sys, f, iv.j, a, b, false, unstable, rule, lambda_max, acc);
                    z -= acc;
                }
                iv.u[i] += z;
            }
            // Jump at τ_j: z(τ_j) = (z(τ_j + 0) − P g_j)/(1 + b_j) per unstable mode.
            SpectralVector pg = g ? dich.project(g(iv.j)) : SpectralVector(K);
            for (int k : unstable) {
                const double m = sys.jumps.one_plus_multiplier(iv.j, k);
                if (m == 0.0) throw Error("non-invertible impulse on Im(P)");
                z.mode(k) = (z.mode(k) - pg.mode(k)) / m;
            }
        }
    }

    GridSolution sol(std::move(ivs), opt.alpha);
    sol.tail_tol = opt.tail_tol;
    return sol;
}

GridSolution bounded_solution_linear(const LinearSystem& sys, const DichotomyData& dich, const Forcing& forcing,
                                     const OutputWindow& window, const SolverOptions& opt) {
    const std::size_t K = sys.K;
    IntervalSource f;
    if (!forcing.f_zero()) f = [&forcing, K](long, double t) { return forcing.f(t, K); };
    ImpulseData g;
    if (!forcing.g_zero()) g = [&forcing, K](long j) { return forcing.g(j, K); };
    return green_solve(sys, dich, f, g, window, opt).crop(window.j_first, window.j_last);
}

double tail_error_bound(const LinearSystem& sys, const DichotomyData& dich, const Forcing& forcing,
                        const SolverOptions& opt) {
    const double beta = dich.beta;
    return dich.M * opt.tail_tol *
           (forcing.f_sup(sys.K) / beta + forcing.g_sup(sys.K, opt.alpha) / (1.0 - std::exp(-beta * sys.times.theta())));
}

Residuals residual_check(const LinearSystem& sys, const Forcing& forcing, const GridSolution& sol,
                         const Nonlinearity& nonlin, const ImpulseMap& g_map) {
    const std::size_t K = sys.K;
    Residuals r;
    const auto& ivs = sol.intervals();
    for (const auto& iv : ivs) {
        const std::size_t n = iv.t.size();
        if (n < 8) throw Error("residual_check: fewer than 8 nodes per interval");
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t i0, i1, i2;
            if (i == 0) {
                i0 = 0, i1 = 1, i2 = 2;
            } else if (i + 1 == n) {
                i0 = n - 3, i1 = n - 2, i2 = n - 1;
            } else {
                i0 = i - 1, i1 = i, i2 = i + 1;
            }
            // Derivative at t_i of the quadratic through (i0, i1, i2).
            const double x0 = iv.t[i0], x1 = iv.t[i1], x2 = iv.t[i2], x = iv.t[i];
            const double c0 = ((x - x1) + (x - x2)) / ((x0 - x1) * (x0 - x2));
            const double c1 = ((x - x0) + (x - x2)) / ((x1 - x0) * (x1 - x2));
            const double c2 = ((x - x0) + (x - x1)) / ((x2 - x0) * (x2 - x1));
            SpectralVector res = iv.u[i0] * c0 + iv.u[i1] * c1 + iv.u[i2] * c2;
            const double m = sys.modulation ? (*sys.modulation)(x) : 1.0;
            for (std::size_t k = 0; k < K; ++k) {
                const double kk = static_cast<double>((k + 1) * (k + 1));
                res[k] += (kk - sys.c * m) * iv.u[i][k];
            }
            res -= forcing.f(x, K);
            if (!nonlin.is_zero()) res -= nonlin.eval_unchecked(x, iv.u[i]);
            r.interior = std::max(r.interior, alpha_norm(res, 0.0));
        }
    }
    for (std::size_t q = 1; q < ivs.size(); ++q) {
        const long j = ivs[q].j;
        const SpectralVector& um = ivs[q - 1].u.back();
        SpectralVector res = ivs[q].u.front() - um - sys.jumps.apply(j, um) - forcing.g(j, K);
        if (!g_map.is_zero()) res -= g_map(j, um);
        r.jump = std::max(r.jump, alpha_norm(res, sol.alpha()));
    }
    return r;
}

ContractionConstants contraction_constants(double M1, double beta1, double theta, double C_alpha, double Q,
                                           double alpha, double N1, double M0) {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw Error("contraction_constants: alpha must lie in [0, 1)");
    if (!(theta > 0.0)) throw Error("contraction_constants: theta must be positive");
    ContractionConstants c;
    c.M_star = M1 / (1.0 - std::exp(-beta1 * theta)) * (1.0 + C_alpha * std::pow(Q, 1.0 - alpha) / (1.0 - alpha));
    c.contractive = N1 * c.M_star < 1.0;
    c.rho_min = c.contractive ? M0 * c.M_star / (1.0 - N1 * c.M_star) : std::numeric_limits<double>::infinity();
    return c;
}

double smoothing_constant(double alpha) {
    if (alpha == 0.0) return 1.0;
    return std::pow(alpha / std::numbers::e, alpha);
}

PicardResult picard_solve(const LinearSystem& sys, const DichotomyData& dich, const Nonlinearity& nonlin,
                          const ImpulseMap& g_map, const Forcing& forcing, const OutputWindow& window,
                          const SolverOptions& opt, const PicardOptions& popt,
                          const std::optional<GridSolution>& initial) {
    const std::size_t K = sys.K;
    const OutputWindow cw = computational_window(sys, dich, window, opt);

    GridSolution phi;
    if (initial) {
        phi = *initial;
        if (phi.j_first() != cw.j_first || phi.j_last() != cw.j_last) {
            throw Error("picard_solve: initial iterate must live on the computational window");
        }
    } else {
        phi = green_solve(sys, dich, {}, {}, window, opt);  // zero on the shared grid
    }

    const bool constant_map = nonlin.is_zero() && g_map.is_zero();
    PicardResult res;
    for (std::size_t it = 0; it < popt.max_iter; ++it) {
        const GridSolution& cur = phi;
        IntervalSource f;
        if (!nonlin.is_zero()) {
            f = [&](long j, double t) {
                const auto& iv = cur.intervals()[static_cast<std::size_t>(j - cw.j_first)];
                SpectralVector v = forcing.f(t, K);
                v += nonlin.eval_unchecked(t, iv.interpolate(t));
                return v;
            };
        } else if (!forcing.f_zero()) {
            f = [&](long, double t) { return forcing.f(t, K); };
        }
        ImpulseData g;
        if (!g_map.is_zero()) {
            g = [&](long j) {
                const auto idx = static_cast<std::size_t>(j - cw.j_first);
                const SpectralVector& left = idx == 0 ? cur.intervals()[0].u.front() : cur.intervals()[idx - 1].u.back();
                SpectralVector v = forcing.g(j, K);
                v += g_map(j, left);
                return v;
            };
        } else if (!forcing.g_zero()) {
            g = [&](long j) { return forcing.g(j, K); };
        }

        GridSolution next = green_solve(sys, dich, f, g, window, opt);
        if (!nonlin.is_zero() && next.sup_norm(nonlin.alpha()) > nonlin.rho()) {
            throw DomainError("picard_solve: iterate left U^alpha_rho");
        }
        const double diff = next.max_node_diff(cur, opt.alpha);
        res.history.push_back(diff);
        phi = std::move(next);
        if (diff < popt.tol || constant_map) {
            res.full = phi;
            res.solution = phi.crop(window.j_first, window.j_last);
            res.residuals = residual_check(sys, forcing, res.solution, nonlin, g_map);
            return res;
        }
    }
    throw ConvergenceError("picard_solve: max_iter exceeded", res.history);
}

WapReport wap_verify(const GridSolution& sol, const ImpulseTimes& times, double eps, const std::vector<double>& periods,
                     double gamma) {
    if (!(eps > 0.0)) throw Error("wap_verify: eps must be positive");
    WapReport rep;
    rep.eps = eps;
    rep.gamma = gamma;
    rep.pass = true;
    const double alpha = sol.alpha();
    for (double r : periods) {
        WapCandidate c;
        c.r = r;
        for (const auto& iv : sol.intervals()) {
            for (std::size_t i = 0; i < iv.t.size(); ++i) {
                const double t = iv.t[i];
                if (times.distance_to_nearest(t) < eps) continue;
                if (t + r > sol.t_end() || t + r <= sol.t_begin()) continue;
                c.max_diff = std::max(c.max_diff, alpha_norm(sol.evaluate(t + r) - iv.u[i], alpha));
                ++c.nodes;
            }
        }
        if (c.nodes == 0) throw Error("wap_verify: insufficient coverage for a candidate period");
        c.pass = c.max_diff <= gamma;
        rep.pass = rep.pass && c.pass;
        rep.candidates.push_back(c);
    }
    for (const auto& iv : sol.intervals()) {
        for (std::size_t i = 0; i < iv.t.size(); ++i) {
            for (std::size_t l = i + 1; l < iv.t.size() && iv.t[l] - iv.t[i] <= eps; ++l) {
                rep.modulus = std::max(rep.modulus, alpha_norm(iv.u[l] - iv.u[i], alpha));
            }
        }
    }
    return rep;
}

}  // namespace impulse
