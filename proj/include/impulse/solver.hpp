#pragma once

#include "impulse/apseq.hpp"
#include "impulse/evolution.hpp"
#include "impulse/forcing.hpp"
#include "impulse/grid_solution.hpp"
#include "impulse/quadrature.hpp"
#include "impulse/spectral.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace impulse {

/// Output impulses: the solution is returned on [τ_{j_first}, τ_{j_last}].
struct OutputWindow {
    long j_first = 0;
    long j_last = 0;
};

struct SolverOptions {
    double alpha = 0.5;
    double tail_tol = 1e-10;
    std::size_t nodes_per_interval = 17;
    NodeLayout layout = NodeLayout::Chebyshev;
    std::size_t gauss_order = 16;
};

/// Source evaluated on interval j (the one with left end τ_j) at time t.
using IntervalSource = std::function<SpectralVector(long, double)>;
/// Impulse data g_j.
using ImpulseData = std::function<SpectralVector(long)>;

/// Bounded solution u(t) = ∫G(t,s)f(s)ds + Σ G(t,τ_j+0)g_j on the full
/// computational window (output window plus tail margins).
///
/// The Green integral is evaluated node to node: the stable part is carried
/// forward from the left margin, the unstable part backward from the right
/// margin, each step integrating the flow-weighted source with composite
/// Gauss–Legendre panels graded toward the stiff end.
GridSolution green_solve(const LinearSystem& sys, const DichotomyData& dich, const IntervalSource& f,
                         const ImpulseData& g, const OutputWindow& window, const SolverOptions& opt);

/// Impulse index range [j_from, j_to] of the computational window.
OutputWindow computational_window(const LinearSystem& sys, const DichotomyData& dich, const OutputWindow& window,
                                  const SolverOptions& opt);

/// Bounded solution of the linear problem, cropped to the output window.
GridSolution bounded_solution_linear(const LinearSystem& sys, const DichotomyData& dich, const Forcing& forcing,
                                     const OutputWindow& window, const SolverOptions& opt);

/// Error bound M·tail_tol·(‖f‖/β + sup‖g‖/(1 − e^{−βθ})) of the tail truncation.
double tail_error_bound(const LinearSystem& sys, const DichotomyData& dich, const Forcing& forcing,
                        const SolverOptions& opt);

struct Residuals {
    double interior = 0.0;  ///< max ‖du/dt + (A − c m)u − f(t,u)‖₀ over nodes
    double jump = 0.0;      ///< max ‖u(τ+0) − u(τ) − B u(τ) − g(u(τ))‖_α
};

/// Finite-difference residual of the differential equation and exact
/// residual of the jump condition. Needs ≥ 8 nodes per interval.
Residuals residual_check(const LinearSystem& sys, const Forcing& forcing, const GridSolution& sol,
                         const Nonlinearity& nonlin = {}, const ImpulseMap& g_map = {});

struct ContractionConstants {
    double M_star = 0.0;
    double rho_min = 0.0;
    bool contractive = false;
};

/// M_* = M₁/(1 − e^{−β₁θ})·(1 + C_α Q^{1−α}/(1−α)), ρ_min = M₀M_*/(1 − N₁M_*).
ContractionConstants contraction_constants(double M1, double beta1, double theta, double C_alpha, double Q,
                                           double alpha, double N1, double M0);

/// C_α with ‖A^α e^{−At}‖ ≤ C_α t^{−α}: (α/e)^α.
double smoothing_constant(double alpha);

struct PicardOptions {
    double tol = 1e-10;
    std::size_t max_iter = 60;
};

struct PicardResult {
    GridSolution solution;       ///< cropped to the output window
    GridSolution full;           ///< on the computational window
    std::vector<double> history;  ///< sup_t ‖φ_{n+1} − φ_n‖_α per iteration
    Residuals residuals;
};

/// Fixed point of (Fφ)(t) = ∫G(t,s)[f(s) + N(s,φ(s))]ds + Σ G(t,τ_j+0)[g_j + g(φ(τ_j))].
/// Starts from φ₀ = 0 unless `initial` (on the computational window) is given.
PicardResult picard_solve(const LinearSystem& sys, const DichotomyData& dich, const Nonlinearity& nonlin,
                          const ImpulseMap& g_map, const Forcing& forcing, const OutputWindow& window,
                          const SolverOptions& opt, const PicardOptions& popt,
                          const std::optional<GridSolution>& initial = std::nullopt);

struct WapCandidate {
    double r = 0.0;
    double max_diff = 0.0;
    std::size_t nodes = 0;
    bool pass = false;
};

struct WapReport {
    double eps = 0.0;
    double gamma = 0.0;
    std::vector<WapCandidate> candidates;
    double modulus = 0.0;  ///< max ‖u(t) − u(t')‖_α over same-interval node pairs with |t − t'| ≤ eps
    bool pass = false;
};

/// max over nodes t with dist(t, impulses) ≥ eps of ‖u(t + r) − u(t)‖_α per
/// candidate r, compared with the threshold gamma.
WapReport wap_verify(const GridSolution& sol, const ImpulseTimes& times, double eps, const std::vector<double>& periods,
                     double gamma);

}  // namespace impulse
