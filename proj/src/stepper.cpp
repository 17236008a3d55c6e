#include "impulse/stepper.hpp"

#include "impulse/error.hpp"

#include <algorithm>
#include <cmath>

namespace impulse {

SourceFn make_source(const Nonlinearity& nonlin, const Forcing& forcing, std::size_t K) {
    return [nonlin, forcing, K](double t, const SpectralVector& u) {
        SpectralVector out = forcing.f(t, K);
        if (!nonlin.is_zero()) out += nonlin(t, u);
        return out;
    };
}

ImpulseFn make_impulse(const ImpulseMap& map, const Forcing& forcing, std::size_t K) {
    return [map, forcing, K](long j, const SpectralVector& u) {
        SpectralVector out = forcing.g(j, K);
        if (!map.is_zero()) out += map(j, u);
        return out;
    };
}

SpectralVector exp_euler_step(const LinearSystem& sys, const SourceFn& f, const SpectralVector& u, double t, double h) {
    const SpectralVector src = f(t, u);
    SpectralVector out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double ell = sys.log_flow(static_cast<int>(i + 1), t + h, t);
        const double E = std::exp(ell);
        // (1 − e^{−r h})/r with r = −ell/h
        const double phi = std::abs(ell) < 1e-8 ? h * (1.0 + 0.5 * ell) : h * (E - 1.0) / ell;
        out[i] = E * u[i] + phi * src[i];
    }
    return out;
}

DenseSegment step_segment(const LinearSystem& sys, const SourceFn& f, const SpectralVector& u_start, double t_start,
                          double t_end, double h, const StepLimits& limits) {
    if (!(h > 0.0)) throw Error("step_segment: h must be positive");
    if (t_end < t_start) throw Error("step_segment: t_end < t_start");
    DenseSegment seg;
    seg.t.push_back(t_start);
    seg.u.push_back(u_start);
    const double len = t_end - t_start;
    if (len == 0.0) return seg;
    const auto n = static_cast<long>(std::ceil(len / h - 1e-9));
    const double hh = len / static_cast<double>(std::max(1L, n));
    SpectralVector u = u_start;
    for (long i = 0; i < std::max(1L, n); ++i) {
        const double t = t_start + hh * static_cast<double>(i);
        u = exp_euler_step(sys, f, u, t, hh);
        if (alpha_norm(u, limits.alpha) > limits.bound) throw DomainError("step_segment: state left the admissible ball");
        seg.t.push_back(i + 1 == std::max(1L, n) ? t_end : t + hh);
        seg.u.push_back(u);
    }
    return seg;
}

SpectralVector Trajectory::evaluate(double t) const {
    for (const auto& seg : segments) {
        if (t < seg.t.front() || t > seg.t.back()) continue;
        if (t == seg.t.front() && &seg != &segments.front()) continue;  // left continuity
        auto it = std::lower_bound(seg.t.begin(), seg.t.end(), t);
        const auto i = static_cast<std::size_t>(it - seg.t.begin());
        if (seg.t[i] == t) return seg.u[i];
        const double w = (t - seg.t[i - 1]) / (seg.t[i] - seg.t[i - 1]);
        return seg.u[i - 1] * (1.0 - w) + seg.u[i] * w;
    }
    throw Error("Trajectory: time outside the simulated range");
}

std::vector<std::pair<double, SpectralVector>> Trajectory::nodes() const {
    std::vector<std::pair<double, SpectralVector>> out;
    for (const auto& seg : segments) {
        for (std::size_t i = 0; i < seg.t.size(); ++i) out.emplace_back(seg.t[i], seg.u[i]);
    }
    return out;
}

Trajectory simulate_fixed(const LinearSystem& sys, const SourceFn& f, const ImpulseFn& g, const SpectralVector& u0,
                          double t0, double t_end, double h, const StepLimits& limits) {
    Trajectory tr;
    tr.h = h;
    SpectralVector u = u0;
    double t = t0;
    long j = sys.times.first_at_or_after(t0);
    while (true) {
        const bool jump_next = j <= sys.times.j_max() && sys.times[j] < t_end;
        const double stop = jump_next ? sys.times[j] : t_end;
        tr.segments.push_back(step_segment(sys, f, u, t, stop, h, limits));
        u = tr.segments.back().u.back();
        t = stop;
        if (!jump_next) break;
        Crossing c{j, t, u, u};
        c.u_after += sys.jumps.apply(j, u);
        c.u_after += g(j, u);
        u = c.u_after;
        tr.crossings.push_back(std::move(c));
        ++j;
    }
    return tr;
}

}  // namespace impulse
