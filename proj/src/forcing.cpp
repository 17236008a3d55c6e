#include "impulse/forcing.hpp"

#include <algorithm>
#include <cmath>

namespace impulse {

namespace {

SpectralVector evaluate(const std::vector<SignalTerm>& terms, double x, std::size_t K) {
    SpectralVector out(K);
    for (const auto& term : terms) {
        const double s = term.signal(x);
        if (s == 0.0) continue;
        const std::size_t n = std::min(K, term.profile.size());
        for (std::size_t i = 0; i < n; ++i) out[i] += s * term.profile[i];
    }
    return out;
}

double bound(const std::vector<SignalTerm>& terms, std::size_t K, double alpha) {
    double b = 0.0;
    for (const auto& term : terms) {
        SpectralVector p(K);
        const std::size_t n = std::min(K, term.profile.size());
        for (std::size_t i = 0; i < n; ++i) p[i] = term.profile[i];
        b += term.signal.sup_abs() * alpha_norm(p, alpha);
    }
    return b;
}

}  // namespace

SpectralVector Forcing::f(double t, std::size_t K) const { return evaluate(f_terms, t, K); }

SpectralVector Forcing::g(long j, std::size_t K) const { return evaluate(g_terms, static_cast<double>(j), K); }

double Forcing::f_sup(std::size_t K) const { return bound(f_terms, K, 0.0); }

double Forcing::g_sup(std::size_t K, double alpha) const { return bound(g_terms, K, alpha); }

}  // namespace impulse
