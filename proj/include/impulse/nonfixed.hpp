#pragma once

#include "impulse/apseq.hpp"
#include "impulse/evolution.hpp"
#include "impulse/forcing.hpp"
#include "impulse/solver.hpp"
#include "impulse/spectral.hpp"
#include "impulse/stepper.hpp"
#include "impulse/trig_series.hpp"

#include <map>
#include <optional>
#include <vector>

namespace impulse {

/// Impulsive surfaces t = τ_j(u) = θ_j + b_j ∫₀^π u² dx.
struct SurfaceSpec {
    ImpulseTimes theta;
    TrigSeries slope;  ///< b_j as a function of j

    /// sup_j |b_j|.
    double b() const { return slope.sup_abs(); }
    /// Lower bound of τ_{j+1}(u) − τ_j(v) over ‖u‖_α, ‖v‖_α ≤ ρ.
    double separation(double rho) const;
    /// |τ_j(u) − τ_j(v)| ≤ lipschitz(ρ)·‖u − v‖_α on the ρ-ball.
    double lipschitz(double rho) const;
};

/// θ_j + b_j·(π/2)·Σ a_k².
double surface_eval(const SurfaceSpec& spec, long j, const SpectralVector& u);

/// ψ_j(t, u) = t − τ_j(u); negative before the surface is met.
inline double surface_gap(const SurfaceSpec& spec, long j, double t, const SpectralVector& u) {
    return t - surface_eval(spec, j, u);
}

/// Result of locating a crossing inside one stepped segment.
struct CrossingHit {
    std::size_t node = 0;  ///< segment node preceding the crossing
    double t = 0.0;
    SpectralVector u;
    std::size_t sign_changes = 0;  ///< sign changes of ψ over the segment nodes
};

/// First sign change of ψ_j over the segment nodes, refined by bisection
/// on a partial exponential-Euler step from the preceding node until
/// |ψ| ≤ tol. An end node with |ψ| ≤ tol is accepted as is.
std::optional<CrossingHit> detect_crossing(const LinearSystem& sys, const SourceFn& f, const SurfaceSpec& spec, long j,
                                           const DenseSegment& seg, double tol = 1e-10);

struct NonfixedOptions {
    double h = 1e-3;
    double alpha = 0.5;
    double bound = 0.0;  ///< abort when ‖u‖_α exceeds this; 0 disables
    bool forbid_beating = false;
    double tol = 1e-10;
};

/// Trajectory of du/dt + (A − c m)u = f(t,u) with u(τ+0) = u(τ) + B_j u(τ) + g_j(u(τ))
/// at the first time τ with τ = τ_j(u(τ)); surfaces are met in index order.
Trajectory simulate_nonfixed(const LinearSystem& sys, const SourceFn& f, const SurfaceSpec& spec, const ImpulseFn& g,
                             const SpectralVector& u0, double t0, double t_end, const NonfixedOptions& opt);

struct BeatingReport {
    std::map<long, std::size_t> counts;  ///< sign changes of ψ_j along the trajectory
    double b = 0.0;
    double M2 = 0.0;  ///< 1.2·sup ‖f(t, u(t))‖_{L²}
    double M3 = 0.0;  ///< 1.2·2·sup ‖u(t)‖_{L²}
    bool condition = false;  ///< b·M₂·M₃ < 1
    bool single = false;     ///< every count ≤ 1
};

/// Per-surface crossing counts for surfaces j_from..j_to and the sufficient
/// no-beating condition with constants estimated from the run.
BeatingReport beating_check(const Trajectory& traj, const SurfaceSpec& spec, const SourceFn& f, long j_from, long j_to);

struct SMapOptions {
    double tol = 1e-9;
    std::size_t max_outer = 40;
};

struct SMapResult {
    long j_min = 0;
    std::vector<SpectralVector> y;  ///< y_j for j = j_min, ...
    std::vector<double> taus;       ///< τ_j(y_j)
    PicardResult picard;            ///< u*(·, y*) on the frozen times
    LinearSystem frozen;            ///< the system with impulses at τ_j(y_j*)
    std::vector<double> history;    ///< sup_j ‖Δy_j‖_α per outer iteration
    std::vector<double> factors;    ///< successive ratios of history
    double residual = 0.0;          ///< sup_j ‖u*(τ_j(y_j*), y*) − y_j*‖_α
    std::size_t inner_iterations = 0;

    double factor() const;  ///< largest measured outer contraction factor
};

/// Outer iteration y ↦ {u*(τ_j(y_j), y)}: freeze the impulse times at τ_j(y_j),
/// solve the fixed-time problem by Picard iteration, read y_j back at the
/// frozen times. Starts from y = 0.
SMapResult s_map_solve(const LinearSystem& sys, const Nonlinearity& nonlin, const ImpulseMap& g_map,
                       const Forcing& forcing, const SurfaceSpec& spec, const OutputWindow& window,
                       const SolverOptions& opt, const PicardOptions& popt, const SMapOptions& sopt);

struct RoundTrip {
    std::vector<long> j;
    std::vector<double> expected;
    std::vector<double> realized;
    double max_error = 0.0;
};

/// Re-simulates from u*(τ_{j0} + 0) at τ_{j0} and compares the realized
/// crossings of surfaces j0+1..j0+count with the frozen times.
RoundTrip s_map_round_trip(const SMapResult& res, const Nonlinearity& nonlin, const ImpulseMap& g_map,
                           const Forcing& forcing, const SurfaceSpec& spec, long j0, long count,
                           const NonfixedOptions& opt);

}  // namespace impulse
