#include "impulse/quadrature.hpp"

#include "impulse/error.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace impulse {

const GaussRule& gauss_legendre(std::size_t n) {
    static std::mutex mu;
    static std::map<std::size_t, GaussRule> cache;
    std::lock_guard lock(mu);
    if (auto it = cache.find(n); it != cache.end()) return it->second;
    if (n == 0) throw Error("gauss_legendre: n must be positive");

    GaussRule rule;
    rule.nodes.resize(n);
    rule.weights.resize(n);
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (dn + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const double dk = static_cast<double>(k);
                const double p2 = ((2.0 * dk - 1.0) * x * p1 - (dk - 1.0) * p0) / dk;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) {
                p1 = x;
                p0 = 1.0;
            }
            dp = dn * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        rule.nodes[i] = -x;
        rule.nodes[n - 1 - i] = x;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.weights[i] = w;
        rule.weights[n - 1 - i] = w;
    }
    return cache.emplace(n, std::move(rule)).first->second;
}

std::vector<double> node_layout(NodeLayout layout, double a, double b, std::size_t n) {
    if (n < 2) throw Error("node_layout: need at least two nodes");
    std::vector<double> x(n);
    const double dn = static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        double s = static_cast<double>(i) / dn;
        if (layout == NodeLayout::Chebyshev) s = 0.5 * (1.0 - std::cos(std::numbers::pi * s));
        x[i] = a + (b - a) * s;
    }
    x.front() = a;
    x.back() = b;
    return x;
}

std::vector<double> barycentric_weights(std::span<const double> x) {
    const std::size_t n = x.size();
    std::vector<double> w(n, 1.0);
    const double scale = n > 1 ? 4.0 / (x.back() - x.front()) : 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) w[i] /= scale * (x[i] - x[j]);
        }
    }
    return w;
}

std::vector<double> barycentric_coefficients(std::span<const double> x, std::span<const double> w, double t) {
    const std::size_t n = x.size();
    std::vector<double> c(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (t == x[i]) {
            c[i] = 1.0;
            return c;
        }
    }
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        c[i] = w[i] / (t - x[i]);
        denom += c[i];
    }
    for (double& ci : c) ci /= denom;
    return c;
}

}  // namespace impulse
