#include "impulse/apseq.hpp"

#include "impulse/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace impulse {

double APSpec::offset(long k) const {
    double c = 0.0;
    const double x = static_cast<double>(k);
    for (const auto& m : modes) c += m.amp * std::sin(m.freq * x + m.phase);
    return c;
}

void APSpec::validate() const {
    if (!(a > 0.0) || !std::isfinite(a)) throw Error("APSpec: base step a must be positive");
    if (!(clamp >= 0.0)) throw Error("APSpec: clamp must be nonnegative");
    double amp_sum = 0.0;
    for (const auto& m : modes) amp_sum += std::abs(m.amp);
    if (amp_sum > clamp) throw Error("APSpec: sum of |amplitude| exceeds clamp");
    if (!(clamp < a / 2.0)) throw Error("APSpec: clamp must be < a/2 for monotone times");
}

ImpulseTimes ImpulseTimes::from_times(long j_min, std::vector<double> times, std::optional<APSpec> spec) {
    if (times.empty()) throw Error("ImpulseTimes: empty window");
    ImpulseTimes out;
    out.j_min_ = j_min;
    out.spec_ = std::move(spec);
    out.theta_ = std::numeric_limits<double>::infinity();
    out.big_theta_ = 0.0;
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        const double gap = times[i + 1] - times[i];
        if (!(gap > 0.0)) throw Error("ImpulseTimes: times must be strictly increasing");
        out.theta_ = std::min(out.theta_, gap);
        out.big_theta_ = std::max(out.big_theta_, gap);
    }
    out.times_ = std::move(times);
    return out;
}

double ImpulseTimes::at(long j) const {
    if (!contains_index(j)) {
        throw Error("ImpulseTimes: index " + std::to_string(j) + " outside window");
    }
    return (*this)[j];
}

long ImpulseTimes::first_at_or_after(double t) const {
    auto it = std::lower_bound(times_.begin(), times_.end(), t);
    return j_min_ + static_cast<long>(it - times_.begin());
}

long ImpulseTimes::first_after(double t) const {
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    return j_min_ + static_cast<long>(it - times_.begin());
}

double ImpulseTimes::distance_to_nearest(double t) const {
    auto it = std::lower_bound(times_.begin(), times_.end(), t);
    double d = std::numeric_limits<double>::infinity();
    if (it != times_.end()) d = *it - t;
    if (it != times_.begin()) d = std::min(d, t - *(it - 1));
    return d;
}

ImpulseTimes gen_times(const APSpec& spec, long j_min, long j_max) {
    spec.validate();
    if (j_min > j_max) throw Error("gen_times: j_min > j_max");
    std::vector<double> t;
    t.reserve(static_cast<std::size_t>(j_max - j_min + 1));
    for (long j = j_min; j <= j_max; ++j) t.push_back(spec.a * static_cast<double>(j) + spec.offset(j));
    return ImpulseTimes::from_times(j_min, std::move(t), spec);
}

std::vector<int> find_eps_almost_periods(std::span<const double> seq, double eps, int p_range) {
    if (!(eps > 0.0)) throw Error("find_eps_almost_periods: eps must be positive");
    if (p_range < 0) throw Error("find_eps_almost_periods: negative p_range");
    const long n = static_cast<long>(seq.size());
    if (n - p_range < 10) throw Error("find_eps_almost_periods: window too short");
    std::vector<int> out;
    for (int p = -p_range; p <= p_range; ++p) {
        const long lo = std::max<long>(0, -p);
        const long hi = std::min<long>(n, n - p);
        double dev = 0.0;
        for (long k = lo; k < hi; ++k) {
            dev = std::max(dev, std::abs(seq[static_cast<std::size_t>(k + p)] - seq[static_cast<std::size_t>(k)]));
        }
        if (dev < eps) out.push_back(p);
    }
    return out;
}

AlmostPeriodScan common_almost_periods(const ImpulseTimes& times, std::span<const double> op_seq,
                                       double forcing_period_hint, double eps, double interval_len,
                                       int q_max, const std::function<bool(double, int)>& forcing_ok) {
    if (!(eps > 0.0)) throw Error("common_almost_periods: eps must be positive");
    if (!(interval_len > 0.0)) throw Error("common_almost_periods: interval_len must be positive");
    if (!op_seq.empty() && op_seq.size() != times.size()) {
        throw Error("common_almost_periods: operator sequence not aligned with times");
    }
    const auto tau = times.values();
    const int n = static_cast<int>(tau.size());
    const int q_cap = std::max(0, n - 10);
    if (q_max <= 0 || q_max > q_cap) q_max = q_cap;

    AlmostPeriodScan scan;
    scan.q_max = q_max;
    scan.eps = eps;
    for (int q = 1; q <= q_max; ++q) {
        const int m = n - q;
        double mean = 0.0;
        for (int i = 0; i < m; ++i) mean += tau[i + q] - tau[i];
        mean /= m;
        double tau_dev = 0.0;
        for (int i = 0; i < m; ++i) tau_dev = std::max(tau_dev, std::abs(tau[i + q] - tau[i] - mean));
        double op_dev = 0.0;
        if (!op_seq.empty()) {
            for (int i = 0; i < m; ++i) op_dev = std::max(op_dev, std::abs(op_seq[i + q] - op_seq[i]));
        }
        if (!(tau_dev < eps) || !(op_dev < eps)) continue;
        if (forcing_period_hint > 0.0) {
            const double cycles = std::round(mean / forcing_period_hint);
            if (!(std::abs(mean - cycles * forcing_period_hint) < eps)) continue;
        }
        if (forcing_ok && !forcing_ok(mean, q)) continue;
        scan.pairs.push_back({mean, q, tau_dev, op_dev});
    }

    const double r_end = tau.back() - tau.front();
    for (double lo = 0.0; lo < r_end; lo += interval_len) {
        AlmostPeriodInterval iv{lo, lo + interval_len, std::nullopt};
        for (const auto& p : scan.pairs) {
            if (p.r >= iv.lo && p.r < iv.hi &&
                (!iv.pair || std::max(p.tau_dev, p.op_dev) < std::max(iv.pair->tau_dev, iv.pair->op_dev))) {
                iv.pair = p;
            }
        }
        scan.intervals.push_back(iv);
    }
    return scan;
}

long count_in_interval(const ImpulseTimes& times, double s, double t) {
    if (!(s < t)) throw Error("count_in_interval: require s < t");
    if (s < times.front() || t > times.back()) throw Error("count_in_interval: query outside covered window");
    const auto v = times.values();
    auto lo = std::upper_bound(v.begin(), v.end(), s);
    auto hi = std::lower_bound(v.begin(), v.end(), t);
    return hi > lo ? static_cast<long>(hi - lo) : 0L;
}

double estimate_density(const ImpulseTimes& times) {
    if (times.size() < 51) throw Error("estimate_density: window too short (need >= 50 gaps)");
    const auto v = times.values();
    const double t0 = v.front() - 0.5 * times.theta();
    const double T = v.back() - v.front();
    const double t1 = t0 + T;
    auto lo = std::upper_bound(v.begin(), v.end(), t0);
    auto hi = std::lower_bound(v.begin(), v.end(), t1);
    return static_cast<double>(hi - lo) / T;
}

UapReport check_uap_differences(const ImpulseTimes& times, double eps, int j_range, int p_max) {
    if (!(eps > 0.0)) throw Error("check_uap_differences: eps must be positive");
    if (j_range < 1) throw Error("check_uap_differences: j_range must be >= 1");
    const auto tau = times.values();
    const int n = static_cast<int>(tau.size());
    const int cap = n - j_range - 10;
    if (cap < 1) throw Error("check_uap_differences: window too short");
    if (p_max <= 0 || p_max > cap) p_max = cap;

    UapReport rep;
    rep.p_max = p_max;
    rep.j_range = j_range;
    rep.deviation = std::numeric_limits<double>::infinity();
    for (int p = 1; p <= p_max; ++p) {
        double dev = 0.0;
        for (int j = 1; j <= j_range; ++j) {
            for (int k = 0; k + p + j < n; ++k) {
                const double d_shift = tau[k + p + j] - tau[k + p];
                const double d = tau[k + j] - tau[k];
                dev = std::max(dev, std::abs(d_shift - d));
            }
        }
        if (dev < rep.deviation) {
            rep.deviation = dev;
            rep.period = p;
        }
    }
    rep.holds = rep.deviation < eps;
    return rep;
}

}  // namespace impulse
