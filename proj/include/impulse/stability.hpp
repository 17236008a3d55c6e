#pragma once

#include "impulse/evolution.hpp"
#include "impulse/forcing.hpp"
#include "impulse/grid_solution.hpp"
#include "impulse/spectral.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace impulse {

/// L_Q = sup_{0<t≤Q} t^α ‖V(t, 0)‖_{L(X, X^α)} on the truncated space.
double smoothing_lq(const LinearSystem& sys, double alpha, double Q);

struct StabilityOptions {
    double delta = 1e-3;
    double horizon = 15.0;
    double h = 1e-3;
    double fit_skip = 1.0;  ///< ignore t − t₀ below this in the decay fit
    double alpha = 0.5;
    std::uint64_t seed = 1;
    double slack = 0.1;
};

struct StabilityReport {
    double t0 = 0.0;
    double fitted_exponent = 0.0;
    double max_diff = 0.0;
    double beta_hat = 0.0;
    double M_hat = 1.0;
    double p = 0.0;  ///< impulse density
    double Q = 0.0;  ///< maximal gap
    double L_Q = 0.0;
    double N1 = 0.0;
    double M2 = 0.0;
    double M3 = 0.0;
    double C_tilde = 1.0;
    double growth = 1.0;
    double bound = 0.0;  ///< β̂ − p·ln(growth)
    long impulses = 0;   ///< i(t₀ + horizon, t₀) of the unperturbed run
    bool holds = false;  ///< fitted ≥ bound − slack
    std::vector<std::pair<double, double>> decay;  ///< (t − t₀, ‖u − u₀‖_α)
};

/// Integrates the reference solution from u₀(t₀) and a perturbed one from
/// u₀(t₀) + δv (v a random unit vector in X^α) with the same stepper, fits
/// the decay exponent of their difference and compares it with
/// β̂ − p·ln(1 + M₂C̃Q^{1−α}/(1−α) + M₃C̃), M₂ = e^{β̂Q}M̂L_Q N₁, M₃ = M̂N₁.
StabilityReport stability_experiment(const LinearSystem& sys, const DichotomyData& dich, const Nonlinearity& nonlin,
                                     const ImpulseMap& g_map, const Forcing& forcing, const GridSolution& u0,
                                     double t0, const StabilityOptions& opt);

}  // namespace impulse
