#pragma once

#include "impulse/evolution.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace impulse {

/// Family of one-step maps T_n = U(s₀ + d(n+1), s₀ + dn + 0), n = n_first, ….
struct DiscreteFamily {
    double d = 1.0;
    double s_origin = 0.0;
    long n_first = 0;
    std::vector<Eigen::MatrixXd> maps;

    long n_last() const { return n_first + static_cast<long>(maps.size()); }  ///< one past the last map
    const Eigen::MatrixXd& T(long n) const { return maps[static_cast<std::size_t>(n - n_first)]; }
    std::size_t dim() const { return maps.empty() ? 0 : static_cast<std::size_t>(maps.front().rows()); }

    /// T_{n−1}⋯T_m for n ≥ m (identity when n = m).
    Eigen::MatrixXd product(long n, long m) const;
};

/// Matrices of U over [s₀ + dn, s₀ + d(n+1)] for n in [n_first, n_first + count),
/// assembled column by column from basis vectors.
DiscreteFamily discrete_maps(const LinearSystem& sys, double d, double s_origin, long n_first, long count);

/// Dichotomy projections P_n for n in [n_first, n_last] of a discrete family
/// with an unstable dimension r, plus orthonormal bases of Im P_n.
struct DiscreteDichotomy {
    std::vector<Eigen::MatrixXd> P;       ///< P_n, index n − n_first
    std::vector<Eigen::MatrixXd> basis;   ///< K×r orthonormal basis of Im P_n
    long n_first = 0;
    int rank = 0;

    const Eigen::MatrixXd& proj(long n) const { return P[static_cast<std::size_t>(n - n_first)]; }
};

/// Forward iteration of an initial unstable frame gives Im P_n; backward
/// iteration of its transpose gives the annihilator of the stable space.
/// Throws "not dichotomous" when the two fail to be complementary.
DiscreteDichotomy discrete_projections(const DiscreteFamily& fam, int rank, const Eigen::MatrixXd& initial_frame);

/// Discrete Green function G_{n,m}: T_{n,m}(I − P_m) for n ≥ m and
/// −(T_{m,n}|Im P_n)^{−1} P_m for n < m.
Eigen::MatrixXd discrete_green(const DiscreteFamily& fam, const DiscreteDichotomy& dich, long n, long m);

/// Diagonal α-weight W with ‖u‖_α = |W u|.
Eigen::MatrixXd alpha_weight(std::size_t K, double alpha);

/// Operator norm in X^α.
double alpha_op_norm(const Eigen::MatrixXd& M, double alpha);

struct TailModel {
    double M = 1.0;
    double beta = 1.0;
};

struct GreenIdentityResidual {
    double residual = 0.0;    ///< ‖G̃ − G − Σ G(T̃ − T)G̃‖_α over the family's index range
    double tail_bound = 0.0;  ///< bound on the omitted bi-infinite tail
    double lhs_norm = 0.0;    ///< ‖G̃_{n,m} − G_{n,m}‖_α
};

/// Residual of G̃_{n,m} − G_{n,m} = Σ_k G_{n,k+1}(T̃_k − T_k)G̃_{k,m} with the
/// sum truncated to the common index range of both families.
GreenIdentityResidual discrete_green_identity_residual(const DiscreteFamily& T, const DiscreteFamily& T_tilde,
                                                       const DiscreteDichotomy& P, const DiscreteDichotomy& P_tilde,
                                                       long n, long m, double alpha, const TailModel& tail);

struct DiscreteDichotomyFit {
    double M = 1.0;
    double beta = 0.0;
    bool dichotomous = false;
};

/// Fits ‖T_{n,m}(I − P_m)‖_α ≤ M e^{−βd(n−m)} and the backward analogue over
/// all pairs in [n_lo, n_hi].
DiscreteDichotomyFit fit_discrete_dichotomy(const DiscreteFamily& fam, const DiscreteDichotomy& dich, long n_lo,
                                            long n_hi, double alpha);

struct RobustnessReport {
    double eps = 0.0;
    double M_hat = 1.0;
    double beta_hat = 0.0;
    double M_hat_base = 1.0;
    double beta_hat_base = 0.0;
    bool dichotomous = false;
    double proj_gap = 0.0;          ///< max_n ‖P̃_n − P_n‖_α at grid points away from impulses
    double time_shift = 0.0;        ///< sup|ϑ(t') − t'|
    double slope_dev = 0.0;         ///< sup|ϑ' − 1|
    bool time_change_bounds = false;
    std::vector<double> residuals;  ///< Green identity residuals on sampled (n, m)
    double tail_bound = 0.0;
};

struct RobustnessOptions {
    double d = 1.0;
    long steps = 10;    ///< evaluation window length
    long burn_in = 24;  ///< extra steps on each side for the projections
    double alpha = 0.5;
};

/// Perturbs the impulse times by ≤ eps, adds eps·T to every jump and eps/2
/// to the drift, then re-measures the discrete dichotomy and compares
/// projections and Green functions with the unperturbed system.
RobustnessReport robustness_experiment(const LinearSystem& sys, double eps, const RobustnessOptions& opt);

/// The perturbed system used by robustness_experiment.
LinearSystem perturb_system(const LinearSystem& sys, double eps);

}  // namespace impulse
