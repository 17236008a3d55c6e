#include "impulse/nonfixed.hpp"

#include "impulse/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace impulse {

double SurfaceSpec::separation(double rho) const {
    return theta.theta() - 2.0 * b() * (std::numbers::pi / 2.0) * rho * rho;
}

double SurfaceSpec::lipschitz(double rho) const { return b() * std::numbers::pi * rho; }

double surface_eval(const SurfaceSpec& spec, long j, const SpectralVector& u) {
    const double bj = spec.slope(static_cast<double>(j));
    if (bj == 0.0) return spec.theta[j];
    double s = 0.0;
    for (double a : u.coeffs()) s += a * a;
    return spec.theta[j] + bj * (std::numbers::pi / 2.0) * s;
}

std::optional<CrossingHit> detect_crossing(const LinearSystem& sys, const SourceFn& f, const SurfaceSpec& spec, long j,
                                           const DenseSegment& seg, double tol) {
    std::optional<CrossingHit> hit;
    std::size_t changes = 0;
    bool prev_neg = surface_gap(spec, j, seg.t.front(), seg.u.front()) < 0.0;
    for (std::size_t i = 1; i < seg.t.size(); ++i) {
        const double psi = surface_gap(spec, j, seg.t[i], seg.u[i]);
        const bool neg = psi < 0.0;
        if (neg != prev_neg) {
            ++changes;
            if (!hit && prev_neg) {
                CrossingHit h;
                h.node = i - 1;
                if (std::abs(psi) <= tol) {
                    h.t = seg.t[i];
                    h.u = seg.u[i];
                } else {
                    const double t_left = seg.t[i - 1];
                    const SpectralVector& u_left = seg.u[i - 1];
                    double lo = 0.0;
                    double hi = seg.t[i] - t_left;
                    SpectralVector u_hi = exp_euler_step(sys, f, u_left, t_left, hi);
                    for (int it = 0; it < 200; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        if (!(mid > lo && mid < hi)) break;
                        SpectralVector u_mid = exp_euler_step(sys, f, u_left, t_left, mid);
                        const double p = surface_gap(spec, j, t_left + mid, u_mid);
                        if (p < 0.0) {
                            lo = mid;
                        } else {
                            hi = mid;
                            u_hi = std::move(u_mid);
                        }
                        if (std::abs(p) <= tol) break;
                    }
                    h.t = t_left + hi;
                    h.u = std::move(u_hi);
                }
                hit = std::move(h);
            }
        }
        prev_neg = neg;
    }
    if (hit) hit->sign_changes = changes;
    return hit;
}

namespace {

void append_nodes(DenseSegment& seg, const DenseSegment& piece, std::size_t last) {
    for (std::size_t i = 1; i <= last && i < piece.t.size(); ++i) {
        seg.t.push_back(piece.t[i]);
        seg.u.push_back(piece.u[i]);
    }
}

}  // namespace

Trajectory simulate_nonfixed(const LinearSystem& sys, const SourceFn& f, const SurfaceSpec& spec, const ImpulseFn& g,
                             const SpectralVector& u0, double t0, double t_end, const NonfixedOptions& opt) {
    if (!(opt.h > 0.0)) throw Error("simulate_nonfixed: h must be positive");
    if (!(t_end > t0)) throw Error("simulate_nonfixed: t_end must exceed t0");
    const StepLimits limits{opt.alpha, opt.bound > 0.0 ? opt.bound : std::numeric_limits<double>::infinity()};
    const ImpulseTimes& th = spec.theta;

    Trajectory tr;
    tr.h = opt.h;
    SpectralVector u = u0;
    double t = t0;
    long j = th.j_min();
    while (j <= th.j_max() && surface_gap(spec, j, t, u) >= 0.0) ++j;
    std::optional<long> last_crossed;

    while (true) {
        DenseSegment seg;
        seg.t.push_back(t);
        seg.u.push_back(u);
        std::optional<CrossingHit> hit;
        while (seg.t.back() < t_end) {
            const double cur_t = seg.t.back();
            double target = t_end;
            if (j <= th.j_max()) {
                target = surface_eval(spec, j, seg.u.back());
                if (seg.t.size() > 1 || target <= cur_t) target = std::max(target, cur_t + opt.h);
                target = std::min(target, t_end);
            }
            const DenseSegment piece = step_segment(sys, f, seg.u.back(), cur_t, target, opt.h, limits);
            if (j <= th.j_max()) hit = detect_crossing(sys, f, spec, j, piece, opt.tol);
            if (hit) {
                append_nodes(seg, piece, hit->node);
                seg.t.push_back(hit->t);
                seg.u.push_back(hit->u);
                break;
            }
            append_nodes(seg, piece, piece.t.size());
        }
        if (last_crossed) {
            const std::size_t end = hit ? seg.t.size() - 1 : seg.t.size();
            for (std::size_t i = 0; i < end; ++i) {
                if (surface_gap(spec, *last_crossed, seg.t[i], seg.u[i]) < 0.0) {
                    if (opt.forbid_beating) {
                        throw BeatingError("simulate_nonfixed: surface " + std::to_string(*last_crossed) +
                                               " met more than once",
                                           *last_crossed);
                    }
                    break;
                }
            }
        }
        tr.segments.push_back(std::move(seg));
        if (!hit) break;

        Crossing c{j, hit->t, hit->u, hit->u};
        c.u_after += sys.jumps.apply(j, hit->u);
        c.u_after += g(j, hit->u);
        t = c.t;
        u = c.u_after;
        tr.crossings.push_back(std::move(c));
        last_crossed = j;
        ++j;
        if (t >= t_end) break;
    }
    return tr;
}

BeatingReport beating_check(const Trajectory& traj, const SurfaceSpec& spec, const SourceFn& f, long j_from,
                            long j_to) {
    if (j_from > j_to) throw Error("beating_check: empty surface range");
    BeatingReport rep;
    rep.b = spec.b();
    const std::size_t n = static_cast<std::size_t>(j_to - j_from + 1);
    std::vector<int> state(n, 0);  // 0 unset, −1 negative, +1 nonnegative
    std::vector<std::size_t> counts(n, 0);
    double f_sup = 0.0;
    double u_sup = 0.0;
    for (const auto& seg : traj.segments) {
        for (std::size_t i = 0; i < seg.t.size(); ++i) {
            const double t = seg.t[i];
            const SpectralVector& u = seg.u[i];
            f_sup = std::max(f_sup, l2_function_norm(f(t, u)));
            u_sup = std::max(u_sup, l2_function_norm(u));
            for (std::size_t q = 0; q < n; ++q) {
                const int s = surface_gap(spec, j_from + static_cast<long>(q), t, u) < 0.0 ? -1 : 1;
                if (state[q] != 0 && s != state[q]) ++counts[q];
                state[q] = s;
            }
        }
    }
    for (std::size_t q = 0; q < n; ++q) rep.counts[j_from + static_cast<long>(q)] = counts[q];
    rep.M2 = 1.2 * f_sup;
    rep.M3 = 1.2 * 2.0 * u_sup;
    rep.condition = rep.b * rep.M2 * rep.M3 < 1.0;
    rep.single = std::all_of(counts.begin(), counts.end(), [](std::size_t c) { return c <= 1; });
    return rep;
}

double SMapResult::factor() const {
    double m = 0.0;
    for (double r : factors) m = std::max(m, r);
    return m;
}

SMapResult s_map_solve(const LinearSystem& sys, const Nonlinearity& nonlin, const ImpulseMap& g_map,
                       const Forcing& forcing, const SurfaceSpec& spec, const OutputWindow& window,
                       const SolverOptions& opt, const PicardOptions& popt, const SMapOptions& sopt) {
    const ImpulseTimes& th = spec.theta;
    const long j_min = th.j_min();
    const std::size_t n = th.size();
    std::vector<SpectralVector> y(n, SpectralVector(sys.K));
    SMapResult res;
    res.j_min = j_min;
    const double noise = 100.0 * popt.tol;

    for (std::size_t outer = 0; outer < sopt.max_outer; ++outer) {
        std::vector<double> taus(n);
        for (std::size_t i = 0; i < n; ++i) taus[i] = surface_eval(spec, j_min + static_cast<long>(i), y[i]);
        LinearSystem frozen = sys;
        frozen.times = ImpulseTimes::from_times(j_min, taus);
        const DichotomyData dich = nominal_dichotomy(frozen);
        PicardResult pic = picard_solve(frozen, dich, nonlin, g_map, forcing, window, opt, popt);
        res.inner_iterations += pic.history.size();

        std::vector<SpectralVector> y_new = y;
        double diff = 0.0;
        for (long j = pic.full.j_first() + 1; j <= pic.full.j_last(); ++j) {
            const auto i = static_cast<std::size_t>(j - j_min);
            y_new[i] = pic.full.evaluate(taus[i]);
            diff = std::max(diff, alpha_norm(y_new[i] - y[i], opt.alpha));
        }
        if (!res.history.empty() && res.history.back() > noise) res.factors.push_back(diff / res.history.back());
        res.history.push_back(diff);

        if (diff < sopt.tol) {
            res.y = std::move(y);
            res.taus = std::move(taus);
            res.picard = std::move(pic);
            res.frozen = std::move(frozen);
            res.residual = diff;
            return res;
        }
        if (res.factors.size() >= 3 &&
            std::all_of(res.factors.end() - 3, res.factors.end(), [](double r) { return r >= 1.0; })) {
            throw ConvergenceError("s_map_solve: outer iteration is not contracting", res.history);
        }
        y = std::move(y_new);
    }
    throw ConvergenceError("s_map_solve: no convergence within max_outer", res.history);
}

RoundTrip s_map_round_trip(const SMapResult& res, const Nonlinearity& nonlin, const ImpulseMap& g_map,
                           const Forcing& forcing, const SurfaceSpec& spec, long j0, long count,
                           const NonfixedOptions& opt) {
    const GridSolution& full = res.picard.full;
    if (j0 <= full.j_first() || j0 + count >= full.j_last()) {
        throw Error("s_map_round_trip: surfaces outside the solved window");
    }
    const std::size_t K = res.frozen.K;
    const SourceFn f = make_source(nonlin, forcing, K);
    const ImpulseFn g = make_impulse(g_map, forcing, K);
    const auto idx = [&](long j) { return static_cast<std::size_t>(j - res.j_min); };
    const double t0 = res.taus[idx(j0)];
    const double t_end = 0.5 * (res.taus[idx(j0 + count)] + res.taus[idx(j0 + count + 1)]);

    const Trajectory tr = simulate_nonfixed(res.frozen, f, spec, g, full.after(j0), t0, t_end, opt);
    RoundTrip rt;
    for (long j = j0 + 1; j <= j0 + count; ++j) {
        const auto it = std::find_if(tr.crossings.begin(), tr.crossings.end(), [j](const Crossing& c) { return c.j == j; });
        if (it == tr.crossings.end()) throw Error("s_map_round_trip: surface " + std::to_string(j) + " not crossed");
        rt.j.push_back(j);
        rt.expected.push_back(res.taus[idx(j)]);
        rt.realized.push_back(it->t);
        rt.max_error = std::max(rt.max_error, std::abs(it->t - res.taus[idx(j)]));
    }
    return rt;
}

}  // namespace impulse
