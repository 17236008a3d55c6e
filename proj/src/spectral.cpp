#include "impulse/spectral.hpp"

#include "impulse/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <random>

namespace impulse {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_same_size(const SpectralVector& a, const SpectralVector& b) {
    if (a.size() != b.size()) throw Error("SpectralVector: truncation orders differ");
}

double toy_shape(LipschitzToy::Shape s, double x) {
    return s == LipschitzToy::Shape::Sine ? std::sin(x) : x;
}

SpectralVector apply_toy(const LipschitzToy& toy, const SpectralVector& u) {
    SpectralVector out(u.size());
    if (toy.modes.empty()) {
        for (std::size_t i = 0; i < u.size(); ++i) out[i] = toy.gain * toy_shape(toy.shape, u[i]);
    } else {
        for (int k : toy.modes) {
            if (k < 1 || static_cast<std::size_t>(k) > u.size()) continue;
            out.mode(k) = toy.gain * toy_shape(toy.shape, u.mode(k));
        }
    }
    return out;
}

}  // namespace

SpectralVector SpectralVector::unit(std::size_t K, int k) {
    if (k < 1 || static_cast<std::size_t>(k) > K) throw Error("SpectralVector::unit: mode out of range");
    SpectralVector u(K);
    u.mode(k) = 1.0;
    return u;
}

SpectralVector& SpectralVector::operator+=(const SpectralVector& o) {
    require_same_size(*this, o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

SpectralVector& SpectralVector::operator-=(const SpectralVector& o) {
    require_same_size(*this, o);
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

SpectralVector& SpectralVector::operator*=(double s) {
    for (double& x : a_) x *= s;
    return *this;
}

double alpha_norm(const SpectralVector& u, double alpha) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double k = static_cast<double>(i + 1);
        const double w = alpha == 0.0 ? 1.0 : std::pow(k, 2.0 * alpha);
        s += (w * u[i]) * (w * u[i]);
    }
    return std::sqrt(s);
}

double l2_function_norm(const SpectralVector& u) {
    return std::sqrt(std::numbers::pi / 2.0) * alpha_norm(u, 0.0);
}

SpectralVector frac_power(const SpectralVector& u, double alpha) {
    SpectralVector out = u;
    if (alpha == 0.0) return out;
    for (std::size_t i = 0; i < u.size(); ++i) out[i] *= std::pow(static_cast<double>(i + 1), 2.0 * alpha);
    return out;
}

SpectralVector semigroup(const SpectralVector& u, double t) {
    if (t < 0.0) throw Error("semigroup: negative time");
    SpectralVector out = u;
    if (t == 0.0) return out;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const double k = static_cast<double>(i + 1);
        out[i] *= std::exp(-k * k * t);
    }
    return out;
}

SpectralVector shift_R(const SpectralVector& u) {
    SpectralVector out(u.size());
    for (std::size_t i = 1; i < u.size(); ++i) out[i - 1] = u[i];
    return out;
}

SpectralVector shift_L(const SpectralVector& u) {
    SpectralVector out(u.size());
    for (std::size_t i = 0; i + 1 < u.size(); ++i) out[i + 1] = u[i];
    return out;
}

SpectralVector T_op(const SpectralVector& u) {
    SpectralVector out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) {
        if (i + 1 < u.size()) out[i] += 0.5 * u[i + 1];
        if (i >= 1) out[i] -= 0.5 * u[i - 1];
    }
    return out;
}

const std::vector<double>& derivative_matrix(std::size_t K) {
    static std::mutex mu;
    static std::map<std::size_t, std::unique_ptr<std::vector<double>>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[K];
    if (!slot) {
        slot = std::make_unique<std::vector<double>>(K * K, 0.0);
        auto& D = *slot;
        for (std::size_t mi = 0; mi < K; ++mi) {
            const long m = static_cast<long>(mi + 1);
            for (std::size_t ki = 0; ki < K; ++ki) {
                const long k = static_cast<long>(ki + 1);
                if ((m + k) % 2 == 0) continue;
                const double proj = (2.0 / std::numbers::pi) * 2.0 * static_cast<double>(m) /
                                    static_cast<double>(m * m - k * k);
                D[mi * K + ki] = static_cast<double>(k) * proj;
            }
        }
    }
    return *slot;
}

SpectralVector derivative_project(const SpectralVector& u) {
    const std::size_t K = u.size();
    const auto& D = derivative_matrix(K);
    SpectralVector out(K);
    for (std::size_t m = 0; m < K; ++m) {
        double s = 0.0;
        for (std::size_t k = 0; k < K; ++k) s += D[m * K + k] * u[k];
        out[m] = s;
    }
    return out;
}

std::vector<double> reconstruct(const SpectralVector& u, std::size_t n) {
    std::vector<double> out(n, 0.0);
    if (n == 0) return out;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = n == 1 ? 0.0 : std::numbers::pi * static_cast<double>(i) / static_cast<double>(n - 1);
        double s = 0.0;
        for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * std::sin(static_cast<double>(k + 1) * x);
        out[i] = s;
    }
    return out;
}

double semigroup_op_norm(std::size_t K, double alpha, double t) {
    double best = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
        const double k = static_cast<double>(i + 1);
        best = std::max(best, std::pow(k, 2.0 * alpha) * std::exp(-k * k * t));
    }
    return best;
}

double smoothing_bound(double alpha, double t, double lambda1) {
    if (alpha == 0.0) return std::exp(-lambda1 * t);
    if (t <= alpha / lambda1) return std::pow(t * std::numbers::e / alpha, -alpha);
    return std::pow(lambda1, alpha) * std::exp(-lambda1 * t);
}

namespace {

std::vector<SpectralVector> probe_vectors(std::size_t K, std::size_t random, std::uint64_t seed) {
    std::vector<SpectralVector> out;
    for (std::size_t k = 1; k <= K; ++k) out.push_back(SpectralVector::unit(K, static_cast<int>(k)));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (std::size_t r = 0; r < random; ++r) {
        SpectralVector u(K);
        for (std::size_t i = 0; i < K; ++i) u[i] = nd(rng);
        out.push_back(u * (1.0 / alpha_norm(u, 0.0)));
    }
    return out;
}

void record(InequalityCheck& c, double lhs, double rhs) {
    ++c.samples;
    const double ratio = lhs / rhs;
    c.worst_ratio = std::max(c.worst_ratio, ratio);
    if (ratio > 1.0 + 1e-12) ++c.violations;
}

}  // namespace

InequalityCheck smoothing_check(std::size_t K, const std::vector<double>& alphas, const std::vector<double>& ts,
                                std::size_t random, std::uint64_t seed) {
    InequalityCheck c;
    const auto probes = probe_vectors(K, random, seed);
    for (double a : alphas) {
        for (double t : ts) {
            const double rhs = smoothing_bound(a, t);
            for (const auto& u : probes) record(c, alpha_norm(semigroup(u, t), a), rhs * alpha_norm(u, 0.0));
        }
    }
    return c;
}

InequalityCheck shift_smoothing_check(std::size_t K, const std::vector<double>& alphas,
                                      const std::vector<double>& betas, const std::vector<double>& ts,
                                      std::size_t random, std::uint64_t seed) {
    InequalityCheck c;
    const auto probes = probe_vectors(K, random, seed);
    for (double a : alphas) {
        for (double b : betas) {
            for (double t : ts) {
                const double rhs = 0.5 * (std::pow(4.0, a) + 1.0) * semigroup_op_norm(K, a + b, t);
                for (const auto& u : probes) {
                    const SpectralVector w = frac_power(T_op(frac_power(semigroup(u, t), b)), a);
                    record(c, alpha_norm(w, 0.0), rhs * alpha_norm(u, 0.0));
                }
            }
        }
    }
    return c;
}

// ---------------------------------------------------------------------------

SpectralVector JumpOperator::apply(long j, const SpectralVector& u) const {
    SpectralVector out(u.size());
    const double x = static_cast<double>(j);
    for (const auto& term : terms_) {
        std::visit(overloaded{
                       [&](const ScalarJump& s) { out += u * s.factor(x); },
                       [&](const ShiftJump& s) {
                           const double b = s.b(x);
                           if (b != 0.0) out += T_op(frac_power(u, 0.5)) * b;
                       },
                       [&](const DiagonalJump& d) {
                           const double sc = d.scale(x);
                           for (std::size_t i = 0; i < u.size() && i < d.multipliers.size(); ++i) {
                               out[i] += sc * d.multipliers[i] * u[i];
                           }
                       },
                       [&](const CouplingJump& c) {
                           const double b = c.b(x);
                           if (b != 0.0) out += T_op(u) * b;
                       },
                   },
                   term);
    }
    return out;
}

bool JumpOperator::is_diagonal() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const JumpTerm& t) {
        return std::holds_alternative<ScalarJump>(t) || std::holds_alternative<DiagonalJump>(t);
    });
}

double JumpOperator::one_plus_multiplier(long j, int k) const {
    if (!is_diagonal()) throw Error("JumpOperator: multiplier requested for non-diagonal jumps");
    const double x = static_cast<double>(j);
    double m = 1.0;
    for (const auto& term : terms_) {
        if (const auto* s = std::get_if<ScalarJump>(&term)) {
            m += s->factor(x);
        } else if (const auto* d = std::get_if<DiagonalJump>(&term)) {
            const auto i = static_cast<std::size_t>(k - 1);
            if (i < d->multipliers.size()) m += d->scale(x) * d->multipliers[i];
        }
    }
    return m;
}

double JumpOperator::bound(double alpha) const {
    const double shift_gain = (std::pow(4.0, alpha) + 1.0) / 2.0;
    double b = 0.0;
    for (const auto& term : terms_) {
        std::visit(overloaded{
                       [&](const ScalarJump& s) { b += s.factor.sup_abs(); },
                       [&](const ShiftJump& s) { b += s.b.sup_abs() * shift_gain; },
                       [&](const DiagonalJump& d) {
                           double mx = 0.0;
                           for (double m : d.multipliers) mx = std::max(mx, std::abs(m));
                           b += d.scale.sup_abs() * mx;
                       },
                       [&](const CouplingJump& c) { b += c.b.sup_abs() * shift_gain; },
                   },
                   term);
    }
    return b;
}

SpectralVector jump_apply(const JumpOperator& B, long j, const SpectralVector& u) { return B.apply(j, u); }

// ---------------------------------------------------------------------------

SpectralVector Nonlinearity::operator()(double t, const SpectralVector& u) const {
    if (!is_zero() && alpha_norm(u, alpha_) > rho_ * (1.0 + 1e-12)) {
        throw DomainError("domain exceeded: state outside the ball U^alpha_rho");
    }
    return eval_unchecked(t, u);
}

SpectralVector Nonlinearity::eval_unchecked(double t, const SpectralVector& u) const {
    return std::visit(overloaded{
                          [&](const ZeroNonlinearity&) { return SpectralVector(u.size()); },
                          [&](const Advection& adv) {
                              SpectralVector out(u.size());
                              const double a = adv.a(t);
                              if (a != 0.0) out = derivative_project(u) * a;
                              for (std::size_t i = 0; i < adv.b_modes.size() && i < u.size(); ++i) {
                                  out[i] += adv.b_modes[i](t);
                              }
                              return out;
                          },
                          [&](const LipschitzToy& toy) { return apply_toy(toy, u); },
                      },
                      kind_);
}

double Nonlinearity::lipschitz(std::size_t K) const {
    return std::visit(overloaded{
                          [](const ZeroNonlinearity&) { return 0.0; },
                          [&](const Advection& adv) {
                              const double a = adv.a.sup_abs();
                              if (a == 0.0) return 0.0;
                              const auto& D = derivative_matrix(K);
                              Eigen::MatrixXd M(K, K);
                              for (std::size_t m = 0; m < K; ++m) {
                                  for (std::size_t k = 0; k < K; ++k) {
                                      M(m, k) = D[m * K + k] * std::pow(static_cast<double>(k + 1), -2.0 * alpha_);
                                  }
                              }
                              Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
                              return a * svd.singularValues()(0);
                          },
                          [](const LipschitzToy& toy) { return std::abs(toy.gain); },
                      },
                      kind_);
}

double Nonlinearity::bound_at_zero(std::size_t K) const {
    if (const auto* adv = std::get_if<Advection>(&kind_)) {
        double s = 0.0;
        for (std::size_t i = 0; i < adv->b_modes.size() && i < K; ++i) {
            const double b = adv->b_modes[i].sup_abs();
            s += b * b;
        }
        return std::sqrt(s);
    }
    return 0.0;
}

SpectralVector f_eval(const Nonlinearity& f, double t, const SpectralVector& u) { return f(t, u); }

SpectralVector ImpulseMap::operator()(long j, const SpectralVector& u) const {
    SpectralVector out = apply_toy(map, u);
    return out * scale(static_cast<double>(j));
}

SpectralVector parabola_profile(std::size_t K) {
    SpectralVector out(K);
    for (std::size_t i = 0; i < K; i += 2) {
        const double k = static_cast<double>(i + 1);
        out[i] = 8.0 / (std::numbers::pi * k * k * k);
    }
    return out;
}

}  // namespace impulse
