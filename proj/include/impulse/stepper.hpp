#pragma once

#include "impulse/evolution.hpp"
#include "impulse/forcing.hpp"
#include "impulse/spectral.hpp"

#include <functional>
#include <limits>
#include <vector>

namespace impulse {

/// Right-hand side f(t, u) of du/dt + (A − c·m(t))u = f(t, u).
using SourceFn = std::function<SpectralVector(double, const SpectralVector&)>;

/// f(t, u) = forcing.f(t) + nonlin(t, u), checked on the nonlinearity's ball.
SourceFn make_source(const Nonlinearity& nonlin, const Forcing& forcing, std::size_t K);

/// Dense output of one impulse-free segment.
struct DenseSegment {
    std::vector<double> t;
    std::vector<SpectralVector> u;
};

/// One exponential-Euler step: exact linear flow, source frozen at (t, u).
SpectralVector exp_euler_step(const LinearSystem& sys, const SourceFn& f, const SpectralVector& u, double t, double h);

struct StepLimits {
    double alpha = 0.5;
    double bound = std::numeric_limits<double>::infinity();  ///< abort when ‖u‖_α exceeds this
};

/// Uniform exponential-Euler steps of size ≤ h from t_start to t_end (both
/// included). Throws DomainError when the state leaves the bound.
DenseSegment step_segment(const LinearSystem& sys, const SourceFn& f, const SpectralVector& u_start, double t_start,
                          double t_end, double h, const StepLimits& limits = {});

/// A recorded impulse: u_after = u_before + B_j u_before + g_j(u_before).
struct Crossing {
    long j = 0;
    double t = 0.0;
    SpectralVector u_before;
    SpectralVector u_after;
};

struct Trajectory {
    std::vector<DenseSegment> segments;
    std::vector<Crossing> crossings;
    double h = 0.0;

    /// State at t (left-continuous), linear interpolation between nodes.
    SpectralVector evaluate(double t) const;
    /// All (t, u) nodes in time order; segment ends duplicate crossing times.
    std::vector<std::pair<double, SpectralVector>> nodes() const;
};

/// Impulse term g_j(u) = forcing.g_j + map_j(u).
using ImpulseFn = std::function<SpectralVector(long, const SpectralVector&)>;
ImpulseFn make_impulse(const ImpulseMap& map, const Forcing& forcing, std::size_t K);

/// Trajectory with impulses at the fixed times τ_j in [t0, t_end).
Trajectory simulate_fixed(const LinearSystem& sys, const SourceFn& f, const ImpulseFn& g, const SpectralVector& u0,
                          double t0, double t_end, double h, const StepLimits& limits = {});

}  // namespace impulse
