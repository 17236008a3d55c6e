#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace impulse {

/// Uniform grid t_i = i·Q/N, i = 1..N, used by the Gronwall verifiers.
std::vector<double> gronwall_grid(double Q, std::size_t N);

/// Solution z of the discretised equality
///   z(t) = a1 + a2 t^{−α} + b ∫_0^t (t − s)^{−β} z(s) ds
/// by forward substitution (product integration with exact kernel weights,
/// right-endpoint values).
std::vector<double> gronwall_majorant(double a1, double a2, double b, double alpha, double beta, double Q,
                                      std::size_t N);

/// C̃(β, b, Q): sup of the majorant for a1 = 1, a2 = 0.
double gronwall_constant(double b, double beta, double Q, std::size_t N = 512);

struct GronwallResult {
    bool holds = false;
    double C_tilde = 1.0;
    double worst_ratio = 0.0;  ///< max y/(bound)
};

/// Checks y(t) ≤ (a1 + a2/((1−α)t^α))·C̃ for samples y on gronwall_grid(Q, N),
/// after confirming the hypothesis
///   y(t) ≤ a1 + a2 t^{−α} + b ∫_0^t (t − s)^{−β} y(s) ds
/// at every node (HypothesisError otherwise).
GronwallResult gronwall_verify_continuous(double a1, double a2, double b, double alpha, double beta, double Q,
                                          std::span<const double> y_samples);

/// Piecewise samples of z on consecutive intervals (t_j, t_{j+1}].
struct ImpulsiveSamples {
    std::vector<double> knots;           ///< t_0 < t_1 < … < t_n
    std::size_t nodes_per_interval = 0;  ///< N; node i of interval j is t_j + i·(t_{j+1} − t_j)/N, i = 1..N
    std::vector<double> z;               ///< n·N values, interval-major

    double node(std::size_t j, std::size_t i) const;
};

/// z saturating the impulsive hypothesis with equality, by forward substitution.
ImpulsiveSamples saturate_impulsive(double M1, double M2, double M3, double alpha, std::vector<double> knots,
                                    std::size_t N, double z0);

struct ImpulsiveGronwallResult {
    bool holds = false;
    double C_tilde = 1.0;
    double growth = 1.0;  ///< 1 + M₂C̃Q^{1−α}/(1−α) + M₃C̃
    double Q = 0.0;
    double worst_ratio = 0.0;
};

/// Checks z(t) ≤ M₁z₀C̃·growth^m on interval m, with C̃ computed at the
/// samples' resolution (N nodes over the longest interval), after confirming
///   z(t) ≤ M₁z₀ + M₂Σ∫_{t_{j−1}}^{t_j}(t_j − s)^{−α}z + M₂∫_{t_m}^t(t − s)^{−α}z + M₃Σ z(t_j).
ImpulsiveGronwallResult gronwall_verify_impulsive(double M1, double M2, double M3, double alpha,
                                                  const ImpulsiveSamples& samples, double z0);

}  // namespace impulse
