#pragma once

#include "impulse/trig_series.hpp"

#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace impulse {

/// Impulse-time generator τ_k = a·k + c_k with c_k a finite trigonometric sum.
///
/// Valid specs satisfy a > 0 and Σ|amp| ≤ clamp < a/2, so consecutive times
/// are separated by at least a − 2·clamp.
struct APSpec {
    double a = 1.0;
    std::vector<Mode> modes;
    double clamp = 0.0;

    /// c_k = Σ amp·sin(freq·k + phase).
    double offset(long k) const;

    /// Throws impulse::Error naming the violated constraint.
    void validate() const;
};

/// Strictly increasing impulse times τ_j over the index window [j_min, j_max].
class ImpulseTimes {
public:
    ImpulseTimes() = default;

    /// Wraps arbitrary times; throws unless strictly increasing.
    static ImpulseTimes from_times(long j_min, std::vector<double> times,
                                   std::optional<APSpec> spec = std::nullopt);

    long j_min() const { return j_min_; }
    long j_max() const { return j_min_ + static_cast<long>(times_.size()) - 1; }
    std::size_t size() const { return times_.size(); }
    bool contains_index(long j) const { return j >= j_min() && j <= j_max(); }

    /// τ_j; throws for an index outside the window.
    double at(long j) const;
    double operator[](long j) const { return times_[static_cast<std::size_t>(j - j_min_)]; }

    std::span<const double> values() const { return times_; }
    double front() const { return times_.front(); }
    double back() const { return times_.back(); }

    /// Minimum and maximum realised gap.
    double theta() const { return theta_; }
    double big_theta() const { return big_theta_; }

    const std::optional<APSpec>& spec() const { return spec_; }

    /// Smallest j with τ_j ≥ t (j_max + 1 when none).
    long first_at_or_after(double t) const;
    /// Smallest j with τ_j > t (j_max + 1 when none).
    long first_after(double t) const;
    /// Distance from t to the nearest impulse time.
    double distance_to_nearest(double t) const;

private:
    long j_min_ = 0;
    std::vector<double> times_;
    double theta_ = 0.0;
    double big_theta_ = 0.0;
    std::optional<APSpec> spec_;
};

/// τ_j = a·j + c_j for j in [j_min, j_max].
ImpulseTimes gen_times(const APSpec& spec, long j_min, long j_max);

/// All integer shifts p, |p| ≤ p_range, with sup_k |x_{k+p} − x_k| < eps over
/// the overlap of the window with its shift. Always contains 0.
std::vector<int> find_eps_almost_periods(std::span<const double> seq, double eps, int p_range);

struct AlmostPeriodPair {
    double r = 0.0;        ///< real almost period (mean of τ_{i+q} − τ_i)
    int q = 0;             ///< index shift
    double tau_dev = 0.0;  ///< sup_i |τ_{i+q} − τ_i − r|
    double op_dev = 0.0;   ///< sup_i |op_{i+q} − op_i|
};

struct AlmostPeriodInterval {
    double lo = 0.0;
    double hi = 0.0;
    std::optional<AlmostPeriodPair> pair;  ///< best pair with r in [lo, hi); empty if absent
};

struct AlmostPeriodScan {
    std::vector<AlmostPeriodPair> pairs;  ///< every valid pair, sorted by q
    std::vector<AlmostPeriodInterval> intervals;
    int q_max = 0;  ///< scanned shifts 1..q_max
    double eps = 0.0;
};

/// Common almost periods (r, q) of the impulse times, an operator sequence and
/// the forcing.
///
/// A pair is valid when |τ_{i+q} − τ_i − r| < eps and |op_{i+q} − op_i| < eps
/// on the overlap window. The forcing is checked either through `forcing_ok`
/// or, when `forcing_period_hint` > 0, by requiring r to lie within eps of a
/// multiple of that period. `op_seq` may be empty; otherwise it is indexed
/// like `times`. q_max = 0 scans every shift leaving at least 10 overlapping
/// indices.
AlmostPeriodScan common_almost_periods(const ImpulseTimes& times, std::span<const double> op_seq,
                                       double forcing_period_hint, double eps, double interval_len,
                                       int q_max = 0,
                                       const std::function<bool(double, int)>& forcing_ok = {});

/// Number of τ_k in the open interval (s, t).
long count_in_interval(const ImpulseTimes& times, double s, double t);

/// i(t₀, t₀ + T)/T over the largest available T.
///
/// t₀ sits half a minimal gap before the first time so that equally spaced
/// times give exactly 1/a.
double estimate_density(const ImpulseTimes& times);

struct UapReport {
    bool holds = false;
    int period = 0;          ///< best common shift found
    double deviation = 0.0;  ///< its sup deviation over all difference sequences
    int p_max = 0;           ///< scanned shifts 1..p_max
    int j_range = 0;
};

/// Searches a common eps-almost period p ≥ 1 of the difference sequences
/// τ_{k+j} − τ_k, 1 ≤ j ≤ j_range (negative j are covered by symmetry).
UapReport check_uap_differences(const ImpulseTimes& times, double eps, int j_range, int p_max = 0);

}  // namespace impulse
