#pragma once

#include "impulse/spectral.hpp"
#include "impulse/trig_series.hpp"

#include <vector>

namespace impulse {

/// signal(x)·Σ_k profile[k−1] sin kx.
struct SignalTerm {
    TrigSeries signal;
    std::vector<double> profile;  ///< sine coefficients, mode 1 first; shorter than K is zero-padded
};

/// Inhomogeneous data: f(t) = Σ signal(t)·profile and g_j = Σ signal(j)·profile.
struct Forcing {
    std::vector<SignalTerm> f_terms;
    std::vector<SignalTerm> g_terms;

    SpectralVector f(double t, std::size_t K) const;
    SpectralVector g(long j, std::size_t K) const;

    /// Upper bounds for sup_t‖f(t)‖₀ and sup_j‖g_j‖_α.
    double f_sup(std::size_t K) const;
    double g_sup(std::size_t K, double alpha) const;

    bool f_zero() const { return f_terms.empty(); }
    bool g_zero() const { return g_terms.empty(); }
};

}  // namespace impulse
