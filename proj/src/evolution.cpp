#include "impulse/evolution.hpp"

#include "impulse/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace impulse {

namespace {

/// [lo, hi) index range of the jumps crossed between (s, s_side) and (t, t_side).
std::pair<long, long> crossed_jumps(const ImpulseTimes& times, double t, double s, Side t_side, Side s_side) {
    const long lo = s_side == Side::Before ? times.first_at_or_after(s) : times.first_after(s);
    const long hi = t_side == Side::Before ? times.first_at_or_after(t) : times.first_after(t);
    return {lo, std::max(lo, hi)};
}

/// True when (t, t_side) lies strictly before (s, s_side).
bool precedes(double t, Side t_side, double s, Side s_side) {
    return t < s || (t == s && t_side == Side::Before && s_side == Side::After);
}

void require_in_window(const LinearSystem& sys, double t, const char* who) {
    if (t < sys.times.front() || t > sys.times.back()) {
        throw Error(std::string(who) + ": time outside the impulse window");
    }
}

bool is_unstable(const LinearSystem& sys, int k) { return sys.rate(k) < 0.0; }

void require_unstable_support(const LinearSystem& sys, const SpectralVector& u, const char* who) {
    for (std::size_t i = 0; i < u.size(); ++i) {
        const int k = static_cast<int>(i + 1);
        if (!is_unstable(sys, k) && u[i] != 0.0) {
            throw Error(std::string(who) + ": backward flow requested on a stable mode");
        }
    }
}

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw Error("measure_dichotomy: degenerate sample spread");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

struct Event {
    double t;
    Side side;
};

/// Evaluation points on [lo, hi] where piecewise linear log-factors can peak.
std::vector<Event> window_events(const LinearSystem& sys, double lo, double hi) {
    std::vector<Event> ev;
    ev.push_back({lo, Side::Before});
    const int interior = sys.modulation ? 64 : 0;
    double prev = lo;
    auto add_interior = [&](double a, double b) {
        for (int i = 1; i < interior; ++i) ev.push_back({a + (b - a) * i / interior, Side::Before});
    };
    for (long j = sys.times.first_at_or_after(lo); j <= sys.times.j_max() && sys.times[j] <= hi; ++j) {
        const double tau = sys.times[j];
        add_interior(prev, tau);
        if (tau > lo) ev.push_back({tau, Side::Before});
        if (tau < hi) ev.push_back({tau, Side::After});
        prev = tau;
    }
    add_interior(prev, hi);
    if (ev.back().t != hi || ev.back().side != Side::Before) ev.push_back({hi, Side::Before});
    return ev;
}

/// sup over ordered pairs of |factor_k| e^{β·gap}, for stable (forward) or
/// unstable (backward) modes.
double exact_growth_sup(const LinearSystem& sys, const std::vector<int>& modes, double beta, double lo, double hi,
                        bool forward) {
    const auto ev = window_events(sys, lo, hi);
    double best = 0.0;
    for (int k : modes) {
        double extreme = std::numeric_limits<double>::infinity();
        if (!forward) extreme = -extreme;
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& e : ev) {
            const double lf = std::log(std::abs(mode_factor(sys, k, e.t, lo, e.side, Side::Before)));
            if (forward) {
                const double g = lf + beta * e.t;
                extreme = std::min(extreme, g);
                m = std::max(m, g - extreme);
            } else {
                const double h = lf - beta * e.t;
                extreme = std::max(extreme, h);
                m = std::max(m, extreme - h);
            }
        }
        best = std::max(best, m);
    }
    return std::exp(best);
}

SpectralVector random_vector(std::size_t K, std::mt19937_64& rng) {
    std::normal_distribution<double> nd(0.0, 1.0);
    SpectralVector u(K);
    for (std::size_t i = 0; i < K; ++i) u[i] = nd(rng);
    return u;
}

}  // namespace

double LinearSystem::log_flow(int k, double t, double s) const {
    const double kk = static_cast<double>(k) * static_cast<double>(k);
    double drift = t - s;
    if (modulation) drift = modulation->integral(t) - modulation->integral(s);
    return -kk * (t - s) + c * drift;
}

std::vector<int> LinearSystem::unstable_modes() const {
    std::vector<int> out;
    for (int k = 1; k <= static_cast<int>(K); ++k) {
        if (rate(k) < 0.0) out.push_back(k);
    }
    return out;
}

void LinearSystem::validate() const {
    if (K == 0) throw Error("LinearSystem: K must be positive");
    for (int k = 1; k <= static_cast<int>(K); ++k) {
        if (rate(k) == 0.0) throw Error("LinearSystem: zero mode rate (center subspace)");
    }
    const auto unstable = unstable_modes();
    if (unstable.empty() || !jumps.is_diagonal()) return;
    for (long j = times.j_min(); j <= times.j_max(); ++j) {
        for (int k : unstable) {
            if (jumps.one_plus_multiplier(j, k) == 0.0) throw Error("non-invertible impulse on Im(P)");
        }
    }
}

SpectralVector V_apply(const LinearSystem& sys, double t, double s, const SpectralVector& u) {
    if (t < s) require_unstable_support(sys, u, "V_apply");
    SpectralVector out = u;
    if (t == s) return out;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (out[i] != 0.0) out[i] *= std::exp(sys.log_flow(static_cast<int>(i + 1), t, s));
    }
    return out;
}

double mode_factor(const LinearSystem& sys, int k, double t, double s, Side t_side, Side s_side) {
    const auto [lo, hi] = crossed_jumps(sys.times, t, s, t_side, s_side);
    double f = std::exp(sys.log_flow(k, t, s));
    for (long j = lo; j < hi; ++j) f *= sys.jumps.one_plus_multiplier(j, k);
    return f;
}

SpectralVector U_apply(const LinearSystem& sys, double t, double s, const SpectralVector& u, Side t_side,
                       Side s_side) {
    if (precedes(t, t_side, s, s_side)) throw Error("U_apply: requires t >= s");
    require_in_window(sys, s, "U_apply");
    require_in_window(sys, t, "U_apply");
    const auto [lo, hi] = crossed_jumps(sys.times, t, s, t_side, s_side);
    if (sys.jumps.is_diagonal()) {
        SpectralVector out = u;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (out[i] == 0.0) continue;
            const int k = static_cast<int>(i + 1);
            double f = std::exp(sys.log_flow(k, t, s));
            for (long j = lo; j < hi; ++j) f *= sys.jumps.one_plus_multiplier(j, k);
            out[i] *= f;
        }
        return out;
    }
    SpectralVector cur = u;
    double at = s;
    for (long j = lo; j < hi; ++j) {
        const double tau = sys.times[j];
        cur = V_apply(sys, tau, at, cur);
        cur += sys.jumps.apply(j, cur);
        at = tau;
    }
    return V_apply(sys, t, at, cur);
}

SpectralVector U_unstable_inverse(const LinearSystem& sys, double t, double s, const SpectralVector& u,
                                  Side t_side, Side s_side) {
    if (precedes(s, s_side, t, t_side)) throw Error("U_unstable_inverse: requires t <= s");
    if (!sys.jumps.is_diagonal()) throw Error("U_unstable_inverse: requires diagonal jumps");
    require_in_window(sys, s, "U_unstable_inverse");
    require_in_window(sys, t, "U_unstable_inverse");
    require_unstable_support(sys, u, "U_unstable_inverse");
    const auto [lo, hi] = crossed_jumps(sys.times, s, t, s_side, t_side);
    SpectralVector out = u;
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (out[i] == 0.0) continue;
        const int k = static_cast<int>(i + 1);
        double f = std::exp(sys.log_flow(k, s, t));
        for (long j = lo; j < hi; ++j) {
            const double m = sys.jumps.one_plus_multiplier(j, k);
            if (m == 0.0) throw Error("non-invertible impulse on Im(P)");
            f *= m;
        }
        out[i] /= f;
    }
    return out;
}

SpectralVector DichotomyData::project(const SpectralVector& u) const {
    SpectralVector out(u.size());
    for (int k : unstable_modes) {
        if (static_cast<std::size_t>(k) <= u.size()) out.mode(k) = u.mode(k);
    }
    return out;
}

SpectralVector DichotomyData::complement(const SpectralVector& u) const {
    SpectralVector out = u;
    for (int k : unstable_modes) {
        if (static_cast<std::size_t>(k) <= u.size()) out.mode(k) = 0.0;
    }
    return out;
}

DichotomyData nominal_dichotomy(const LinearSystem& sys) {
    DichotomyData d;
    d.unstable_modes = sys.unstable_modes();
    d.beta = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= static_cast<int>(sys.K); ++k) d.beta = std::min(d.beta, std::abs(sys.rate(k)));
    d.M = 1.0;
    return d;
}

SpectralVector green_apply(const LinearSystem& sys, const DichotomyData& dich, double t, double s,
                           const SpectralVector& u, Side t_side, Side s_side) {
    if (!precedes(t, t_side, s, s_side)) return U_apply(sys, t, s, dich.complement(u), t_side, s_side);
    SpectralVector pu = dich.project(u);
    bool zero = std::all_of(pu.coeffs().begin(), pu.coeffs().end(), [](double x) { return x == 0.0; });
    if (zero) return SpectralVector(u.size());
    return -U_unstable_inverse(sys, t, s, pu, t_side, s_side);
}

double DichotomyFit::M() const { return std::max(M_stable, M_unstable.value_or(1.0)); }

double DichotomyFit::beta() const {
    return beta_unstable ? std::min(beta_stable, *beta_unstable) : beta_stable;
}

DichotomyFit measure_dichotomy(const LinearSystem& sys, const DichotomyData& dich, const MeasureOptions& opt) {
    const double lo = std::max(opt.t_lo, sys.times.front());
    const double hi = std::min(opt.t_hi, sys.times.back());
    if (!(hi - lo > opt.dt_min)) throw Error("measure_dichotomy: window shorter than dt_min");
    const double dt_max = opt.dt_max > 0.0 ? std::min(opt.dt_max, hi - lo) : hi - lo;
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    DichotomyFit fit;
    const bool has_unstable = !dich.unstable_modes.empty();
    const bool has_stable = dich.unstable_modes.size() < sys.K;

    std::vector<double> xs, ys, xu, yu;
    for (std::size_t i = 0; i < opt.samples; ++i) {
        const double dt = opt.dt_min + (dt_max - opt.dt_min) * unif(rng);
        const double s = lo + (hi - lo - dt) * unif(rng);
        const SpectralVector u = random_vector(sys.K, rng);
        if (has_stable) {
            const SpectralVector q = dich.complement(u);
            const double n0 = alpha_norm(q, opt.alpha);
            const double n1 = alpha_norm(U_apply(sys, s + dt, s, q), opt.alpha);
            if (n0 > 0.0 && n1 > 0.0) {
                xs.push_back(dt);
                ys.push_back(std::log(n1 / n0));
            }
        }
        if (has_unstable) {
            const SpectralVector p = dich.project(u);
            const double n0 = alpha_norm(p, opt.alpha);
            const double n1 = alpha_norm(U_unstable_inverse(sys, s, s + dt, p), opt.alpha);
            if (n0 > 0.0 && n1 > 0.0) {
                xu.push_back(dt);
                yu.push_back(std::log(n1 / n0));
            }
        }
    }

    auto constant_from_samples = [](const std::vector<double>& x, const std::vector<double>& y, double beta) {
        double m = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, y[i] + beta * x[i]);
        return std::exp(m);
    };

    std::vector<int> stable_modes;
    for (int k = 1; k <= static_cast<int>(sys.K); ++k) {
        if (std::find(dich.unstable_modes.begin(), dich.unstable_modes.end(), k) == dich.unstable_modes.end()) {
            stable_modes.push_back(k);
        }
    }

    if (has_stable) {
        if (xs.size() < 5) throw Error("measure_dichotomy: fewer than 5 usable points");
        const auto lf = least_squares(xs, ys);
        fit.beta_stable = -lf.slope;
        fit.M_fit_stable = std::exp(lf.intercept);
        fit.M_stable = constant_from_samples(xs, ys, fit.beta_stable);
        if (sys.jumps.is_diagonal()) {
            fit.M_stable = std::max(fit.M_stable, exact_growth_sup(sys, stable_modes, fit.beta_stable, lo, hi, true));
        }
        fit.M_stable = std::max(1.0, fit.M_stable);
        fit.points += xs.size();
    }
    if (has_unstable) {
        if (xu.size() < 5) throw Error("measure_dichotomy: fewer than 5 usable points");
        const auto lf = least_squares(xu, yu);
        const double beta = -lf.slope;
        double M = std::max(1.0, constant_from_samples(xu, yu, beta));
        M = std::max(M, exact_growth_sup(sys, dich.unstable_modes, beta, lo, hi, false));
        fit.beta_unstable = beta;
        fit.M_unstable = M;
        fit.points += xu.size();
    }
    return fit;
}

GreenBoundReport check_green_bound(const LinearSystem& sys, const DichotomyData& dich, double M, double beta,
                                   const MeasureOptions& opt) {
    const double lo = std::max(opt.t_lo, sys.times.front());
    const double hi = std::min(opt.t_hi, sys.times.back());
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unif(lo, hi);
    GreenBoundReport rep;
    for (std::size_t i = 0; i < opt.samples; ++i) {
        const double t = unif(rng);
        const double s = unif(rng);
        const SpectralVector u = random_vector(sys.K, rng);
        const double lhs = alpha_norm(green_apply(sys, dich, t, s, u), opt.alpha);
        const double rhs = M * std::exp(-beta * std::abs(t - s)) * alpha_norm(u, opt.alpha);
        const double ratio = lhs / rhs;
        rep.worst_ratio = std::max(rep.worst_ratio, ratio);
        if (ratio > 1.0 + 1e-12) ++rep.violations;
        ++rep.samples;
    }
    return rep;
}

PiecewiseLinearMap::PiecewiseLinearMap(std::vector<double> from, std::vector<double> to)
    : from_(std::move(from)), to_(std::move(to)) {
    if (from_.size() != to_.size() || from_.empty()) throw Error("PiecewiseLinearMap: knot size mismatch");
    for (std::size_t i = 0; i + 1 < from_.size(); ++i) {
        const double dx = from_[i + 1] - from_[i];
        const double dy = to_[i + 1] - to_[i];
        if (!(dx > 0.0) || !(dy > 0.0)) throw Error("PiecewiseLinearMap: knots must increase");
        slopes_.push_back(dy / dx);
    }
}

double PiecewiseLinearMap::operator()(double t) const {
    if (t <= from_.front()) return to_.front() + (t - from_.front());
    if (t >= from_.back()) return to_.back() + (t - from_.back());
    const auto i = static_cast<std::size_t>(std::upper_bound(from_.begin(), from_.end(), t) - from_.begin()) - 1;
    return to_[i] + slopes_[i] * (t - from_[i]);
}

double PiecewiseLinearMap::derivative(double t) const {
    if (t < from_.front() || t >= from_.back()) return 1.0;
    const auto i = static_cast<std::size_t>(std::upper_bound(from_.begin(), from_.end(), t) - from_.begin()) - 1;
    return slopes_[i];
}

double PiecewiseLinearMap::sup_shift() const {
    double m = 0.0;
    for (std::size_t i = 0; i < from_.size(); ++i) m = std::max(m, std::abs(to_[i] - from_[i]));
    return m;
}

double PiecewiseLinearMap::sup_slope_dev() const {
    double m = 0.0;
    for (double s : slopes_) m = std::max(m, std::abs(s - 1.0));
    return m;
}

TimeChange time_change(const ImpulseTimes& times, const ImpulseTimes& tilde_times) {
    if (times.j_min() != tilde_times.j_min() || times.size() != tilde_times.size()) {
        throw Error("time_change: mismatched windows");
    }
    const auto a = times.values();
    const auto b = tilde_times.values();
    double eps = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) eps = std::max(eps, std::abs(a[i] - b[i]));
    TimeChange tc{PiecewiseLinearMap({b.begin(), b.end()}, {a.begin(), a.end()}), eps, tilde_times.theta()};
    tc.shift_bound_holds = tc.map.sup_shift() <= eps * (1.0 + 1e-12);
    const double slope_bound = tilde_times.size() > 1 ? 2.0 * eps / tc.theta_tilde : 0.0;
    tc.slope_bound_holds = tc.map.sup_slope_dev() <= slope_bound * (1.0 + 1e-12) + 1e-15;
    return tc;
}

}  // namespace impulse
