#pragma once

#include "impulse/apseq.hpp"
#include "impulse/spectral.hpp"
#include "impulse/trig_series.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace impulse {

/// Which one-sided value a time argument refers to.
///
/// States are left-continuous, u(τ_j) = u(τ_j − 0). `Before` is the stored
/// value u(t); `After` is the right limit u(t + 0), which differs from u(t)
/// only at an impulse time.
enum class Side { Before, After };

/// Linear impulsive system
///   du/dt + (A − c·m(t))u = 0,  t ≠ τ_j,
///   u(τ_j + 0) − u(τ_j) = B_j u(τ_j),
/// truncated to K sine modes. m ≡ 1 unless a modulation is given.
struct LinearSystem {
    std::size_t K = 16;
    double c = 0.0;
    std::optional<TrigSeries> modulation;
    ImpulseTimes times;
    JumpOperator jumps;

    /// Mean drift c·mean(m).
    double mean_drift() const { return c * (modulation ? modulation->mean : 1.0); }

    /// k² − c·mean(m).
    double rate(int k) const { return static_cast<double>(k) * static_cast<double>(k) - mean_drift(); }

    /// log of the continuous flow factor of mode k from s to t.
    double log_flow(int k, double t, double s) const;

    /// Modes with negative rate.
    std::vector<int> unstable_modes() const;

    /// Throws unless every rate is nonzero and, for diagonal jumps, every
    /// multiplier on the unstable modes is nonzero.
    void validate() const;
};

/// Continuous flow without impulses. t < s is allowed only for states
/// supported on unstable modes.
SpectralVector V_apply(const LinearSystem& sys, double t, double s, const SpectralVector& u);

/// Impulsive evolution U(t, s), t ≥ s: continuous flows composed with the
/// jump maps I + B_j for every τ_j in [s, t) (one-sided variants via Side).
SpectralVector U_apply(const LinearSystem& sys, double t, double s, const SpectralVector& u,
                       Side t_side = Side::Before, Side s_side = Side::Before);

/// Scalar factor of U(t, s) on mode k; diagonal jumps only.
double mode_factor(const LinearSystem& sys, int k, double t, double s, Side t_side = Side::Before,
                   Side s_side = Side::Before);

/// Inverse of U(s, t) on the unstable modes, t ≤ s: the state at t that U
/// carries to u at s. Throws "non-invertible impulse on Im(P)" on a zero
/// multiplier.
SpectralVector U_unstable_inverse(const LinearSystem& sys, double t, double s, const SpectralVector& u,
                                  Side t_side = Side::Before, Side s_side = Side::Before);

/// Projection P onto the unstable mode set, with dichotomy constants.
struct DichotomyData {
    std::vector<int> unstable_modes;
    double M = 1.0;
    double beta = 0.0;
    bool measured = false;

    SpectralVector project(const SpectralVector& u) const;     ///< P u
    SpectralVector complement(const SpectralVector& u) const;  ///< (I − P) u
};

/// P from the unstable mode set; β from the slowest continuous rate, M = 1.
DichotomyData nominal_dichotomy(const LinearSystem& sys);

/// Green function: U(t,s)(I − P)u for t ≥ s, −U(t,s)P u for t < s.
SpectralVector green_apply(const LinearSystem& sys, const DichotomyData& dich, double t, double s,
                           const SpectralVector& u, Side t_side = Side::Before, Side s_side = Side::Before);

struct MeasureOptions {
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::size_t samples = 400;
    std::uint64_t seed = 1;
    double alpha = 0.5;
    double dt_min = 0.1;
    double dt_max = 0.0;  ///< 0: the whole window
};

struct DichotomyFit {
    double M_stable = 1.0;
    double beta_stable = 0.0;
    double M_fit_stable = 1.0;  ///< exp(intercept) of the least-squares line
    std::optional<double> M_unstable;
    std::optional<double> beta_unstable;
    std::size_t points = 0;

    /// max of the two M, min of the two β.
    double M() const;
    double beta() const;
};

/// Least-squares fit of log‖U(t,s)(I − P)u‖_α and log‖U(t,s)P u‖_α against
/// |t − s| over random u and sample pairs. M̂ is the smallest constant making
/// the fitted rate a bound on the window (exact supremum for diagonal jumps).
DichotomyFit measure_dichotomy(const LinearSystem& sys, const DichotomyData& dich, const MeasureOptions& opt);

/// Sampled check of ‖G(t,s)u‖_α ≤ M e^{−β|t−s|}‖u‖_α; returns the violation count.
struct GreenBoundReport {
    std::size_t samples = 0;
    std::size_t violations = 0;
    double worst_ratio = 0.0;
};
GreenBoundReport check_green_bound(const LinearSystem& sys, const DichotomyData& dich, double M, double beta,
                                   const MeasureOptions& opt);

/// Piecewise linear ϑ with ϑ(τ̃_j) = τ_j and slope 1 outside the knots.
class PiecewiseLinearMap {
public:
    PiecewiseLinearMap(std::vector<double> from, std::vector<double> to);

    double operator()(double t) const;
    double derivative(double t) const;
    const std::vector<double>& slopes() const { return slopes_; }

    /// sup|ϑ(t') − t'| and sup|ϑ'(t') − 1| (attained at the knots).
    double sup_shift() const;
    double sup_slope_dev() const;

private:
    std::vector<double> from_;
    std::vector<double> to_;
    std::vector<double> slopes_;
};

struct TimeChange {
    PiecewiseLinearMap map;
    double eps = 0.0;          ///< sup_j |τ_j − τ̃_j|
    double theta_tilde = 0.0;  ///< min gap of the perturbed times
    bool shift_bound_holds = false;  ///< sup|ϑ − t'| ≤ eps
    bool slope_bound_holds = false;  ///< sup|ϑ' − 1| ≤ 2 eps/θ̃
};

/// Time change carrying the perturbed impulse times onto the original ones.
TimeChange time_change(const ImpulseTimes& times, const ImpulseTimes& tilde_times);

}  // namespace impulse
