#pragma once

#include "impulse/trig_series.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

namespace impulse {

/// Truncated sine-series coefficients  u(x) = Σ_{k=1}^{K} a_k sin kx  on (0, π).
///
/// Storage index i holds mode k = i + 1. Norms are pure coefficient norms,
/// ‖u‖_α = (Σ k^{4α} a_k²)^{1/2}; the L² factor √(π/2) is omitted everywhere
/// except where a physical L² integral is meant (see l2_function_norm).
class SpectralVector {
public:
    SpectralVector() = default;
    explicit SpectralVector(std::size_t K) : a_(K, 0.0) {}
    explicit SpectralVector(std::vector<double> coeffs) : a_(std::move(coeffs)) {}

    /// e_k (1-based mode index).
    static SpectralVector unit(std::size_t K, int k);

    std::size_t size() const { return a_.size(); }
    bool empty() const { return a_.empty(); }

    /// 1-based mode access.
    double mode(int k) const { return a_[static_cast<std::size_t>(k - 1)]; }
    double& mode(int k) { return a_[static_cast<std::size_t>(k - 1)]; }

    /// 0-based storage access.
    double operator[](std::size_t i) const { return a_[i]; }
    double& operator[](std::size_t i) { return a_[i]; }

    std::span<const double> coeffs() const { return a_; }
    std::span<double> coeffs() { return a_; }
    const std::vector<double>& vec() const { return a_; }

    SpectralVector& operator+=(const SpectralVector& o);
    SpectralVector& operator-=(const SpectralVector& o);
    SpectralVector& operator*=(double s);

    friend SpectralVector operator+(SpectralVector a, const SpectralVector& b) { return a += b; }
    friend SpectralVector operator-(SpectralVector a, const SpectralVector& b) { return a -= b; }
    friend SpectralVector operator*(SpectralVector a, double s) { return a *= s; }
    friend SpectralVector operator*(double s, SpectralVector a) { return a *= s; }
    friend SpectralVector operator-(SpectralVector a) { return a *= -1.0; }
    friend bool operator==(const SpectralVector&, const SpectralVector&) = default;

private:
    std::vector<double> a_;
};

/// (Σ k^{4α} a_k²)^{1/2}.
double alpha_norm(const SpectralVector& u, double alpha);

/// ‖u‖ in L²(0, π): √(π/2)·alpha_norm(u, 0).
double l2_function_norm(const SpectralVector& u);

/// A^α u: coefficient-wise multiply by k^{2α} (negative α allowed).
SpectralVector frac_power(const SpectralVector& u, double alpha);

/// e^{−At} u; throws for t < 0.
SpectralVector semigroup(const SpectralVector& u, double t);

/// R u = Σ a_k sin(k−1)x.
SpectralVector shift_R(const SpectralVector& u);
/// L u = Σ a_k sin(k+1)x, truncated at K.
SpectralVector shift_L(const SpectralVector& u);
/// T = (R − L)/2.
SpectralVector T_op(const SpectralVector& u);

/// Sine-basis projection of u_x = Σ k a_k cos kx, truncated at K.
SpectralVector derivative_project(const SpectralVector& u);

/// Row-major K×K matrix D with (D u)_m = Σ_k D[m][k] a_k; cached per K.
const std::vector<double>& derivative_matrix(std::size_t K);

/// u(x) on n uniform points of [0, π].
std::vector<double> reconstruct(const SpectralVector& u, std::size_t n);

/// sup_k k^{2α} e^{−k² t} over k ≤ K, i.e. ‖A^α e^{−At}‖ on the truncated space.
double semigroup_op_norm(std::size_t K, double alpha, double t);

/// Henry's bound for ‖A^α e^{−At}‖: (te/α)^{−α} for t ≤ α/λ₁, λ₁^α e^{−λ₁ t} after.
double smoothing_bound(double alpha, double t, double lambda1 = 1.0);

struct InequalityCheck {
    std::size_t samples = 0;
    std::size_t violations = 0;
    double worst_ratio = 0.0;  ///< max lhs / rhs over samples
};

/// ‖A^α e^{−At}u‖ ≤ smoothing_bound(α, t)·‖u‖ over every (α, t), the unit
/// vectors e_1..e_K and `random` Gaussian directions.
InequalityCheck smoothing_check(std::size_t K, const std::vector<double>& alphas, const std::vector<double>& ts,
                                std::size_t random, std::uint64_t seed);

/// ‖A^α T A^β e^{−At}u‖ ≤ ((4^α + 1)/2)·‖A^{α+β}e^{−At}‖·‖u‖ over every
/// (α, β, t), the unit vectors and `random` Gaussian directions.
InequalityCheck shift_smoothing_check(std::size_t K, const std::vector<double>& alphas,
                                      const std::vector<double>& betas, const std::vector<double>& ts,
                                      std::size_t random, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Impulse operators B_j

/// B_j = factor(j)·I.
struct ScalarJump {
    TrigSeries factor;
};

/// B_j = b(j)·T·A^{1/2}  (sin x · u_x in the sine basis, up to the sign of T).
struct ShiftJump {
    TrigSeries b;
};

/// B_j = scale(j)·diag(multipliers).
struct DiagonalJump {
    std::vector<double> multipliers;
    TrigSeries scale{1.0};
};

/// B_j = b(j)·T, a bounded mode coupling with ‖T‖ ≤ 1.
struct CouplingJump {
    TrigSeries b;
};

using JumpTerm = std::variant<ScalarJump, ShiftJump, DiagonalJump, CouplingJump>;

/// The impulse operator family {B_j}: a sum of terms (usually one).
class JumpOperator {
public:
    JumpOperator() = default;
    JumpOperator(JumpTerm term) { terms_.push_back(std::move(term)); }  // NOLINT(implicit)
    explicit JumpOperator(std::vector<JumpTerm> terms) : terms_(std::move(terms)) {}

    JumpOperator& add(JumpTerm term) {
        terms_.push_back(std::move(term));
        return *this;
    }

    const std::vector<JumpTerm>& terms() const { return terms_; }

    /// B_j u (not (I + B_j) u).
    SpectralVector apply(long j, const SpectralVector& u) const;

    /// True when every B_j is diagonal in the sine basis.
    bool is_diagonal() const;

    /// Multiplier of mode k in 1 + B_j; diagonal families only.
    double one_plus_multiplier(long j, int k) const;

    /// Upper bound b with ‖B_j u‖_α ≤ b‖u‖_α (bounded terms) or
    /// ‖B_j‖_{L(X^{α+1/2}, X^α)} ≤ b (ShiftJump terms).
    double bound(double alpha) const;

    bool empty() const { return terms_.empty(); }

private:
    std::vector<JumpTerm> terms_;
};

/// B_j u for a single family (free function mirror of JumpOperator::apply).
SpectralVector jump_apply(const JumpOperator& B, long j, const SpectralVector& u);

// ---------------------------------------------------------------------------
// Nonlinearities f(t, u)

struct ZeroNonlinearity {};

/// f(t, u) = a(t)·P(u_x) + Σ_k b_k(t) e_k  (sine projection of the advection term).
struct Advection {
    TrigSeries a;
    std::vector<TrigSeries> b_modes;  ///< b_modes[i] drives mode i + 1
};

/// f(t, u)_k = gain·φ(u_k) on the listed modes, φ = identity or sin.
struct LipschitzToy {
    enum class Shape { Linear, Sine };
    Shape shape = Shape::Linear;
    double gain = 0.0;
    std::vector<int> modes;  ///< 1-based; empty means all modes
};

/// f(t, u) declared on the ball U^α_ρ = {‖u‖_α ≤ ρ}.
class Nonlinearity {
public:
    using Kind = std::variant<ZeroNonlinearity, Advection, LipschitzToy>;

    Nonlinearity() = default;
    Nonlinearity(Kind kind, double alpha, double rho)
        : kind_(std::move(kind)), alpha_(alpha), rho_(rho) {}

    const Kind& kind() const { return kind_; }
    double alpha() const { return alpha_; }
    double rho() const { return rho_; }
    bool is_zero() const { return std::holds_alternative<ZeroNonlinearity>(kind_); }

    /// f(t, u) in X; throws DomainError("domain exceeded") outside the ball.
    SpectralVector operator()(double t, const SpectralVector& u) const;

    /// Evaluation without the ball check.
    SpectralVector eval_unchecked(double t, const SpectralVector& u) const;

    /// N₁ with ‖f(t,u₁) − f(t,u₂)‖ ≤ N₁‖u₁ − u₂‖_α on K modes.
    double lipschitz(std::size_t K) const;

    /// M₀ ≥ sup_t ‖f(t, 0)‖.
    double bound_at_zero(std::size_t K) const;

private:
    Kind kind_{ZeroNonlinearity{}};
    double alpha_ = 0.5;
    double rho_ = 1.0;
};

SpectralVector f_eval(const Nonlinearity& f, double t, const SpectralVector& u);

/// Impulse nonlinearity g_j(u) = scale(j)·map(u).
struct ImpulseMap {
    LipschitzToy map;
    TrigSeries scale{1.0};

    SpectralVector operator()(long j, const SpectralVector& u) const;
    double lipschitz() const { return std::abs(map.gain) * scale.sup_abs(); }
    bool is_zero() const { return map.gain == 0.0 || (scale.mean == 0.0 && scale.modes.empty()); }
};

/// Sine coefficients of x(π − x): 8/(π k³) for odd k, 0 for even k.
SpectralVector parabola_profile(std::size_t K);

}  // namespace impulse
