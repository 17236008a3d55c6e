#pragma once

#include <vector>

namespace impulse {

/// One harmonic amp·sin(freq·x + phase).
struct Mode {
    double amp = 0.0;
    double freq = 0.0;
    double phase = 0.0;
};

/// Finite trigonometric sum  mean + Σ amp·sin(freq·x + phase).
///
/// Used for every almost periodic scalar in the library: sequences are
/// sampled at integer x, time signals at real x.
struct TrigSeries {
    double mean = 0.0;
    std::vector<Mode> modes;

    TrigSeries() = default;
    TrigSeries(double constant) : mean(constant) {}  // NOLINT(implicit)
    TrigSeries(double m, std::vector<Mode> ms) : mean(m), modes(std::move(ms)) {}

    double operator()(double x) const;

    /// Exact antiderivative, normalised to vanish at x = 0.
    double integral(double x) const;

    /// Exact derivative.
    double derivative(double x) const;

    /// |mean| + Σ|amp|, an upper bound for sup|x ↦ value|.
    double sup_abs() const;

    /// Σ|amp·freq|, a Lipschitz constant.
    double lipschitz() const;

    bool is_constant() const { return modes.empty(); }
};

}  // namespace impulse
