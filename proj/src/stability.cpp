#include "impulse/stability.hpp"

#include "impulse/apseq.hpp"
#include "impulse/error.hpp"
#include "impulse/gronwall.hpp"
#include "impulse/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace impulse {

double smoothing_lq(const LinearSystem& sys, double alpha, double Q) {
    // t^α max_k k^{2α} e^{log_flow}; peaks sit near t = α/k², so a log grid suffices.
    double best = 0.0;
    const double t_min = 1e-6 * std::min(1.0, Q);
    constexpr int kSamples = 4000;
    for (int i = 0; i <= kSamples; ++i) {
        const double t = t_min * std::pow(Q / t_min, static_cast<double>(i) / kSamples);
        double m = 0.0;
        for (int k = 1; k <= static_cast<int>(sys.K); ++k) {
            m = std::max(m, std::pow(static_cast<double>(k), 2.0 * alpha) * std::exp(sys.log_flow(k, t, 0.0)));
        }
        best = std::max(best, std::pow(t, alpha) * m);
    }
    return best;
}

StabilityReport stability_experiment(const LinearSystem& sys, const DichotomyData& dich, const Nonlinearity& nonlin,
                                     const ImpulseMap& g_map, const Forcing& forcing, const GridSolution& u0,
                                     double t0, const StabilityOptions& opt) {
    if (!dich.unstable_modes.empty()) throw Error("stability_experiment: linear part must be stable (P = 0)");
    const std::size_t K = sys.K;
    const double t_end = t0 + opt.horizon;
    if (t_end > u0.t_end()) throw Error("stability_experiment: horizon exceeds the solution window");

    StabilityReport rep;
    rep.t0 = t0;
    rep.beta_hat = dich.beta;
    rep.M_hat = dich.M;
    rep.p = estimate_density(sys.times);
    rep.Q = sys.times.big_theta();
    rep.L_Q = smoothing_lq(sys, opt.alpha, rep.Q);
    rep.N1 = std::max(nonlin.lipschitz(K), g_map.lipschitz());
    rep.M2 = std::exp(rep.beta_hat * rep.Q) * rep.M_hat * rep.L_Q * rep.N1;
    rep.M3 = rep.M_hat * rep.N1;
    rep.C_tilde = gronwall_constant(rep.M2, opt.alpha, rep.Q);
    rep.growth = 1.0 + rep.M2 * rep.C_tilde * std::pow(rep.Q, 1.0 - opt.alpha) / (1.0 - opt.alpha) +
                 rep.M3 * rep.C_tilde;
    rep.bound = rep.beta_hat - rep.p * std::log(rep.growth);

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    SpectralVector v(K);
    for (std::size_t i = 0; i < K; ++i) v[i] = nd(rng);
    v *= 1.0 / alpha_norm(v, opt.alpha);

    const SourceFn f = make_source(nonlin, forcing, K);
    const ImpulseFn g = make_impulse(g_map, forcing, K);
    StepLimits limits{opt.alpha, nonlin.is_zero() ? std::numeric_limits<double>::infinity() : nonlin.rho()};
    const SpectralVector start = u0.evaluate(t0);
    Trajectory ref, pert;
    try {
        ref = simulate_fixed(sys, f, g, start, t0, t_end, opt.h, limits);
        pert = simulate_fixed(sys, f, g, start + v * opt.delta, t0, t_end, opt.h, limits);
    } catch (const DomainError&) {
        throw DomainError("stability_experiment: perturbed solution left U^alpha_rho");
    }
    rep.impulses = static_cast<long>(ref.crossings.size());

    const auto a = ref.nodes();
    const auto b = pert.nodes();
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = alpha_norm(b[i].second - a[i].second, opt.alpha);
        const double x = a[i].first - t0;
        rep.max_diff = std::max(rep.max_diff, d);
        rep.decay.emplace_back(x, d);
        if (x >= opt.fit_skip && d > 0.0) {
            xs.push_back(x);
            ys.push_back(std::log(d));
        }
    }
    if (rep.max_diff == 0.0) {
        rep.fitted_exponent = std::numeric_limits<double>::infinity();
        rep.holds = true;
        return rep;
    }
    if (xs.size() < 5) throw Error("stability_experiment: too few points for the decay fit");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
    }
    rep.fitted_exponent = -sxy / sxx;
    rep.holds = rep.fitted_exponent >= rep.bound - opt.slack;
    return rep;
}

}  // namespace impulse
