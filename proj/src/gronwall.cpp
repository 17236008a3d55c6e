#include "impulse/gronwall.hpp"

#include "impulse/error.hpp"

#include <algorithm>
#include <cmath>

namespace impulse {

namespace {

/// ∫_{x_lo}^{x_hi} (t − s)^{−β} ds for x_hi ≤ t.
double kernel_weight(double t, double x_lo, double x_hi, double beta) {
    if (beta == 0.0) return x_hi - x_lo;
    return (std::pow(t - x_lo, 1.0 - beta) - std::pow(t - x_hi, 1.0 - beta)) / (1.0 - beta);
}

constexpr double kRelTol = 1e-9;

bool exceeds(double lhs, double rhs) { return lhs > rhs * (1.0 + kRelTol) + 1e-300; }

/// b ∫ over cells (x_{l−1}, x_l], l ≤ i, with right-endpoint values y_l.
double product_integral(std::span<const double> x, std::span<const double> y, double x0, std::size_t i, double beta) {
    double s = 0.0;
    double lo = x0;
    for (std::size_t l = 0; l <= i; ++l) {
        s += kernel_weight(x[i], lo, x[l], beta) * y[l];
        lo = x[l];
    }
    return s;
}

}  // namespace

std::vector<double> gronwall_grid(double Q, std::size_t N) {
    std::vector<double> t(N);
    for (std::size_t i = 0; i < N; ++i) t[i] = Q * static_cast<double>(i + 1) / static_cast<double>(N);
    return t;
}

std::vector<double> gronwall_majorant(double a1, double a2, double b, double alpha, double beta, double Q,
                                      std::size_t N) {
    if (!(beta >= 0.0 && beta < 1.0) || !(alpha >= 0.0 && alpha < 1.0)) {
        throw Error("gronwall: exponents must lie in [0, 1)");
    }
    const auto t = gronwall_grid(Q, N);
    std::vector<double> z(N, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        double s = 0.0;
        double lo = 0.0;
        for (std::size_t l = 0; l < i; ++l) {
            s += kernel_weight(t[i], lo, t[l], beta) * z[l];
            lo = t[l];
        }
        const double wii = kernel_weight(t[i], lo, t[i], beta);
        const double denom = 1.0 - b * wii;
        if (!(denom > 0.0)) throw Error("gronwall: grid too coarse for the kernel");
        z[i] = (a1 + a2 * std::pow(t[i], -alpha) + b * s) / denom;
    }
    return z;
}

double gronwall_constant(double b, double beta, double Q, std::size_t N) {
    const auto z = gronwall_majorant(1.0, 0.0, b, 0.0, beta, Q, N);
    return std::max(1.0, *std::max_element(z.begin(), z.end()));
}

GronwallResult gronwall_verify_continuous(double a1, double a2, double b, double alpha, double beta, double Q,
                                          std::span<const double> y_samples) {
    const std::size_t N = y_samples.size();
    if (N == 0) throw Error("gronwall_verify_continuous: no samples");
    const auto t = gronwall_grid(Q, N);
    for (std::size_t i = 0; i < N; ++i) {
        if (y_samples[i] < 0.0) throw HypothesisError("gronwall: negative sample", i);
        const double rhs = a1 + a2 * std::pow(t[i], -alpha) + b * product_integral(t, y_samples, 0.0, i, beta);
        if (exceeds(y_samples[i], rhs)) throw HypothesisError("gronwall: hypothesis fails at node", i);
    }
    const auto z = gronwall_majorant(a1, a2, b, alpha, beta, Q, N);
    GronwallResult r;
    r.C_tilde = 1.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double base = a1 + a2 / ((1.0 - alpha) * std::pow(t[i], alpha));
        if (base > 0.0) r.C_tilde = std::max(r.C_tilde, z[i] / base);
    }
    r.holds = true;
    for (std::size_t i = 0; i < N; ++i) {
        const double bound = (a1 + a2 / ((1.0 - alpha) * std::pow(t[i], alpha))) * r.C_tilde;
        if (bound > 0.0) r.worst_ratio = std::max(r.worst_ratio, y_samples[i] / bound);
        if (exceeds(y_samples[i], bound)) r.holds = false;
    }
    return r;
}

double ImpulsiveSamples::node(std::size_t j, std::size_t i) const {
    const double h = (knots[j + 1] - knots[j]) / static_cast<double>(nodes_per_interval);
    return knots[j] + h * static_cast<double>(i + 1);
}

namespace {

/// Right-hand side of the impulsive hypothesis at node i of interval m, with
/// `self` the weight multiplying the node's own value (excluded from the sum).
struct ImpulsiveRhs {
    double value;
    double self;
};

ImpulsiveRhs impulsive_rhs(const ImpulsiveSamples& s, double M1, double M2, double M3, double alpha, double z0,
                           std::size_t m, std::size_t i, const std::vector<double>& completed,
                           const std::vector<double>& jump_values) {
    const std::size_t N = s.nodes_per_interval;
    double v = M1 * z0;
    for (std::size_t j = 0; j < m; ++j) v += M2 * completed[j] + M3 * jump_values[j];
    const double t = s.node(m, i);
    double lo = s.knots[m];
    for (std::size_t l = 0; l < i; ++l) {
        const double x = s.node(m, l);
        v += M2 * kernel_weight(t, lo, x, alpha) * s.z[m * N + l];
        lo = x;
    }
    return {v, M2 * kernel_weight(t, lo, t, alpha)};
}

/// ∫_{t_m}^{t_{m+1}} (t_{m+1} − s)^{−α} z(s) ds by right-endpoint product integration.
double completed_integral(const ImpulsiveSamples& s, double alpha, std::size_t m) {
    const std::size_t N = s.nodes_per_interval;
    const double t = s.knots[m + 1];
    double v = 0.0;
    double lo = s.knots[m];
    for (std::size_t l = 0; l < N; ++l) {
        const double x = s.node(m, l);
        v += kernel_weight(t, lo, x, alpha) * s.z[m * N + l];
        lo = x;
    }
    return v;
}

}  // namespace

ImpulsiveSamples saturate_impulsive(double M1, double M2, double M3, double alpha, std::vector<double> knots,
                                    std::size_t N, double z0) {
    if (knots.size() < 2 || N == 0) throw Error("saturate_impulsive: need at least one interval and one node");
    ImpulsiveSamples s;
    s.knots = std::move(knots);
    s.nodes_per_interval = N;
    const std::size_t n = s.knots.size() - 1;
    s.z.assign(n * N, 0.0);
    std::vector<double> completed, jumps;
    for (std::size_t m = 0; m < n; ++m) {
        for (std::size_t i = 0; i < N; ++i) {
            const auto r = impulsive_rhs(s, M1, M2, M3, alpha, z0, m, i, completed, jumps);
            const double denom = 1.0 - r.self;
            if (!(denom > 0.0)) throw Error("saturate_impulsive: grid too coarse for the kernel");
            s.z[m * N + i] = r.value / denom;
        }
        completed.push_back(completed_integral(s, alpha, m));
        jumps.push_back(s.z[m * N + N - 1]);
    }
    return s;
}

ImpulsiveGronwallResult gronwall_verify_impulsive(double M1, double M2, double M3, double alpha,
                                                  const ImpulsiveSamples& samples, double z0) {
    const std::size_t N = samples.nodes_per_interval;
    if (samples.knots.size() < 2 || samples.z.size() != (samples.knots.size() - 1) * N) {
        throw Error("gronwall_verify_impulsive: malformed samples");
    }
    const std::size_t n = samples.knots.size() - 1;
    ImpulsiveGronwallResult r;
    for (std::size_t m = 0; m < n; ++m) r.Q = std::max(r.Q, samples.knots[m + 1] - samples.knots[m]);

    std::vector<double> completed, jumps;
    for (std::size_t m = 0; m < n; ++m) {
        for (std::size_t i = 0; i < N; ++i) {
            const double z = samples.z[m * N + i];
            if (z < 0.0) throw HypothesisError("gronwall_impulsive: negative sample", m * N + i);
            const auto rhs = impulsive_rhs(samples, M1, M2, M3, alpha, z0, m, i, completed, jumps);
            if (exceeds(z, rhs.value + rhs.self * z)) {
                throw HypothesisError("gronwall_impulsive: hypothesis fails at node", m * N + i);
            }
        }
        completed.push_back(completed_integral(samples, alpha, m));
        jumps.push_back(samples.z[m * N + N - 1]);
    }

    r.C_tilde = gronwall_constant(M2, alpha, r.Q, N);
    r.growth = 1.0 + M2 * r.C_tilde * std::pow(r.Q, 1.0 - alpha) / (1.0 - alpha) + M3 * r.C_tilde;
    r.holds = true;
    for (std::size_t m = 0; m < n; ++m) {
        const double bound = M1 * z0 * r.C_tilde * std::pow(r.growth, static_cast<double>(m));
        for (std::size_t i = 0; i < N; ++i) {
            const double z = samples.z[m * N + i];
            r.worst_ratio = std::max(r.worst_ratio, z / bound);
            if (exceeds(z, bound)) r.holds = false;
        }
    }
    return r;
}

}  // namespace impulse
