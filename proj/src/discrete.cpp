#include "impulse/discrete.hpp"

#include "impulse/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace impulse {

namespace {

Eigen::MatrixXd orth_columns(const Eigen::MatrixXd& A) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    return qr.householderQ() * Eigen::MatrixXd::Identity(A.rows(), A.cols());
}

/// G_{n,j} for j in [j_lo, j_hi].
std::vector<Eigen::MatrixXd> green_row(const DiscreteFamily& fam, const DiscreteDichotomy& dich, long n, long j_lo,
                                       long j_hi) {
    const auto K = static_cast<Eigen::Index>(fam.dim());
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(K, K);
    std::vector<Eigen::MatrixXd> row(static_cast<std::size_t>(j_hi - j_lo + 1));
    auto at = [&](long j) -> Eigen::MatrixXd& { return row[static_cast<std::size_t>(j - j_lo)]; };

    Eigen::MatrixXd prod = I;  // T_{n,j}
    for (long j = n; j >= j_lo; --j) {
        if (j < n) prod = prod * fam.T(j);
        if (j <= j_hi) at(j) = prod * (I - dich.proj(j));
    }
    if (dich.rank == 0) {
        for (long j = std::max(n + 1, j_lo); j <= j_hi; ++j) at(j) = Eigen::MatrixXd::Zero(K, K);
        return row;
    }
    const Eigen::MatrixXd& Un = dich.basis[static_cast<std::size_t>(n - dich.n_first)];
    Eigen::MatrixXd image = Un;  // T_{j,n} U_n
    for (long j = n + 1; j <= j_hi; ++j) {
        image = fam.T(j - 1) * image;
        if (j < j_lo) continue;
        const Eigen::MatrixXd& Uj = dich.basis[static_cast<std::size_t>(j - dich.n_first)];
        const Eigen::MatrixXd C = Uj.transpose() * image;
        at(j) = -Un * C.partialPivLu().solve(Uj.transpose() * dich.proj(j));
    }
    return row;
}

/// G_{k,m} for k in [k_lo, k_hi].
std::vector<Eigen::MatrixXd> green_col(const DiscreteFamily& fam, const DiscreteDichotomy& dich, long m, long k_lo,
                                       long k_hi) {
    const auto K = static_cast<Eigen::Index>(fam.dim());
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(K, K);
    std::vector<Eigen::MatrixXd> col(static_cast<std::size_t>(k_hi - k_lo + 1));
    auto at = [&](long k) -> Eigen::MatrixXd& { return col[static_cast<std::size_t>(k - k_lo)]; };

    const Eigen::MatrixXd stable = I - dich.proj(m);
    Eigen::MatrixXd prod = I;  // T_{k,m}
    for (long k = m; k <= k_hi; ++k) {
        if (k > m) prod = fam.T(k - 1) * prod;
        if (k >= k_lo) at(k) = prod * stable;
    }
    if (dich.rank == 0) {
        for (long k = k_lo; k < std::min(m, k_hi + 1); ++k) at(k) = Eigen::MatrixXd::Zero(K, K);
        return col;
    }
    const Eigen::MatrixXd& Um = dich.basis[static_cast<std::size_t>(m - dich.n_first)];
    const Eigen::MatrixXd rhs = Um.transpose() * dich.proj(m);
    Eigen::MatrixXd back = I;  // T_{m,k}
    for (long k = m - 1; k >= k_lo; --k) {
        back = back * fam.T(k);
        if (k > k_hi) continue;
        const Eigen::MatrixXd& Uk = dich.basis[static_cast<std::size_t>(k - dich.n_first)];
        const Eigen::MatrixXd C = Um.transpose() * back * Uk;
        at(k) = -Uk * C.partialPivLu().solve(rhs);
    }
    return col;
}

}  // namespace

Eigen::MatrixXd DiscreteFamily::product(long n, long m) const {
    if (n < m) throw Error("DiscreteFamily::product: requires n >= m");
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(dim()));
    for (long k = m; k < n; ++k) P = T(k) * P;
    return P;
}

DiscreteFamily discrete_maps(const LinearSystem& sys, double d, double s_origin, long n_first, long count) {
    if (!(d > 0.0)) throw Error("discrete_maps: d must be positive");
    DiscreteFamily fam;
    fam.d = d;
    fam.s_origin = s_origin;
    fam.n_first = n_first;
    const auto K = static_cast<Eigen::Index>(sys.K);
    for (long n = n_first; n < n_first + count; ++n) {
        const double t0 = s_origin + d * static_cast<double>(n);
        const double t1 = t0 + d;
        Eigen::MatrixXd T(K, K);
        for (Eigen::Index i = 0; i < K; ++i) {
            const auto col = U_apply(sys, t1, t0, SpectralVector::unit(sys.K, static_cast<int>(i + 1)), Side::Before,
                                     Side::After);
            for (Eigen::Index r = 0; r < K; ++r) T(r, i) = col[static_cast<std::size_t>(r)];
        }
        fam.maps.push_back(std::move(T));
    }
    return fam;
}

DiscreteDichotomy discrete_projections(const DiscreteFamily& fam, int rank, const Eigen::MatrixXd& initial_frame) {
    const auto K = static_cast<Eigen::Index>(fam.dim());
    const std::size_t N = fam.maps.size();
    DiscreteDichotomy out;
    out.n_first = fam.n_first;
    out.rank = rank;
    out.P.assign(N + 1, Eigen::MatrixXd::Zero(K, K));
    out.basis.assign(N + 1, Eigen::MatrixXd::Zero(K, rank));
    if (rank == 0) return out;
    if (initial_frame.rows() != K || initial_frame.cols() != rank) {
        throw Error("discrete_projections: initial frame has the wrong shape");
    }
    out.basis[0] = orth_columns(initial_frame);
    for (std::size_t i = 0; i < N; ++i) out.basis[i + 1] = orth_columns(fam.maps[i] * out.basis[i]);

    std::vector<Eigen::MatrixXd> W(N + 1);  // r×K annihilators of the stable spaces
    W[N] = orth_columns(initial_frame).transpose();
    for (std::size_t i = N; i-- > 0;) W[i] = orth_columns((W[i + 1] * fam.maps[i]).transpose()).transpose();

    for (std::size_t i = 0; i <= N; ++i) {
        const Eigen::MatrixXd C = W[i] * out.basis[i];
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(C);
        const double smin = svd.singularValues()(rank - 1);
        if (!(smin > 1e-8)) throw Error("not dichotomous: unstable and stable spaces are not complementary");
        out.P[i] = out.basis[i] * C.inverse() * W[i];
    }
    return out;
}

Eigen::MatrixXd discrete_green(const DiscreteFamily& fam, const DiscreteDichotomy& dich, long n, long m) {
    if (n >= m) return green_col(fam, dich, m, n, n).front();
    return green_row(fam, dich, n, m, m).front();
}

Eigen::MatrixXd alpha_weight(std::size_t K, double alpha) {
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(K), static_cast<Eigen::Index>(K));
    for (std::size_t i = 0; i < K; ++i) {
        W(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = std::pow(static_cast<double>(i + 1), 2.0 * alpha);
    }
    return W;
}

double alpha_op_norm(const Eigen::MatrixXd& M, double alpha) {
    const std::size_t K = static_cast<std::size_t>(M.rows());
    Eigen::VectorXd w(M.rows());
    for (std::size_t i = 0; i < K; ++i) w(static_cast<Eigen::Index>(i)) = std::pow(static_cast<double>(i + 1), 2.0 * alpha);
    const Eigen::MatrixXd S = w.asDiagonal() * M * w.cwiseInverse().asDiagonal();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(S);
    return svd.singularValues()(0);
}

GreenIdentityResidual discrete_green_identity_residual(const DiscreteFamily& T, const DiscreteFamily& T_tilde,
                                                       const DiscreteDichotomy& P, const DiscreteDichotomy& P_tilde,
                                                       long n, long m, double alpha, const TailModel& tail) {
    if (T.dim() != T_tilde.dim() || T.d != T_tilde.d) throw Error("green identity: families are not comparable");
    const long k_lo = std::max(T.n_first, T_tilde.n_first);
    const long k_hi = std::min(T.n_last(), T_tilde.n_last());  // sum over k in [k_lo, k_hi)
    if (n < k_lo || n > k_hi || m < k_lo || m > k_hi) throw Error("green identity: (n, m) outside the families");

    const auto row = green_row(T, P, n, k_lo, k_hi);            // G_{n,j}
    const auto col = green_col(T_tilde, P_tilde, m, k_lo, k_hi);  // G̃_{k,m}
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(T.dim()), static_cast<Eigen::Index>(T.dim()));
    for (long k = k_lo; k < k_hi; ++k) {
        sum += row[static_cast<std::size_t>(k + 1 - k_lo)] * (T_tilde.T(k) - T.T(k)) *
               col[static_cast<std::size_t>(k - k_lo)];
    }
    const Eigen::MatrixXd lhs = col[static_cast<std::size_t>(n - k_lo)] - row[static_cast<std::size_t>(m - k_lo)];

    GreenIdentityResidual r;
    r.residual = alpha_op_norm(lhs - sum, alpha);
    r.lhs_norm = alpha_op_norm(lhs, alpha);
    const double d = T.d;
    auto boundary = [&](long k) {
        return std::exp(-tail.beta * d * static_cast<double>(std::abs(n - k) + std::abs(k - m)));
    };
    r.tail_bound = tail.M * tail.M * (boundary(k_lo) + boundary(k_hi));
    return r;
}

DiscreteDichotomyFit fit_discrete_dichotomy(const DiscreteFamily& fam, const DiscreteDichotomy& dich, long n_lo,
                                            long n_hi, double alpha) {
    std::vector<double> xs, ys, xu, yu;
    for (long m = n_lo; m <= n_hi; ++m) {
        const auto col = green_col(fam, dich, m, n_lo, n_hi);
        for (long n = n_lo; n <= n_hi; ++n) {
            if (n == m) continue;
            const double g = alpha_op_norm(col[static_cast<std::size_t>(n - n_lo)], alpha);
            if (!(g > 0.0)) continue;
            const double x = fam.d * static_cast<double>(std::abs(n - m));
            (n > m ? xs : xu).push_back(x);
            (n > m ? ys : yu).push_back(std::log(g));
        }
    }
    auto fit = [](const std::vector<double>& x, const std::vector<double>& y, double& M, double& beta) {
        if (x.size() < 5) return false;
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            mx += x[i];
            my += y[i];
        }
        mx /= static_cast<double>(x.size());
        my /= static_cast<double>(x.size());
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sxx += (x[i] - mx) * (x[i] - mx);
            sxy += (x[i] - mx) * (y[i] - my);
        }
        beta = -sxy / sxx;
        double worst = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, y[i] + beta * x[i]);
        M = std::max(1.0, std::exp(worst));
        return true;
    };
    DiscreteDichotomyFit out;
    double Ms = 1.0, bs = std::numeric_limits<double>::infinity();
    double Mu = 1.0, bu = std::numeric_limits<double>::infinity();
    const bool ok_s = fit(xs, ys, Ms, bs);
    const bool ok_u = fit(xu, yu, Mu, bu);
    if (!ok_s && !ok_u) throw Error("fit_discrete_dichotomy: fewer than 5 usable points");
    out.M = std::max(ok_s ? Ms : 1.0, ok_u ? Mu : 1.0);
    out.beta = std::min(ok_s ? bs : std::numeric_limits<double>::infinity(),
                        ok_u ? bu : std::numeric_limits<double>::infinity());
    out.dichotomous = out.beta > 0.0 && std::isfinite(out.M);
    return out;
}

LinearSystem perturb_system(const LinearSystem& sys, double eps) {
    if (eps < 0.0) throw Error("perturb_system: eps must be nonnegative");
    if (!(eps < sys.times.theta() / 2.0)) throw Error("perturb_system: eps must be < theta/2");
    LinearSystem out = sys;
    if (eps == 0.0) return out;
    constexpr double freq = 1.3;
    constexpr double phase = 0.7;
    std::vector<double> t;
    for (long j = sys.times.j_min(); j <= sys.times.j_max(); ++j) {
        t.push_back(sys.times[j] + eps * std::sin(freq * static_cast<double>(j) + phase));
    }
    std::optional<APSpec> spec = sys.times.spec();
    if (spec) {
        spec->modes.push_back({eps, freq, phase});
        spec->clamp += eps;
    }
    out.times = ImpulseTimes::from_times(sys.times.j_min(), std::move(t), spec);
    out.jumps.add(CouplingJump{TrigSeries(eps)});
    out.c = sys.c + eps / 2.0;
    return out;
}

RobustnessReport robustness_experiment(const LinearSystem& sys, double eps, const RobustnessOptions& opt) {
    const LinearSystem tilde = perturb_system(sys, eps);
    const TimeChange tc = time_change(sys.times, tilde.times);

    const long count = opt.steps + 2 * opt.burn_in;
    const long j0 = sys.times.j_min() + 1;
    if (!sys.times.contains_index(j0 + 1)) throw Error("robustness_experiment: impulse window too short");
    const double s0 = 0.5 * (sys.times[j0] + sys.times[j0 + 1]);
    if (s0 + opt.d * static_cast<double>(count) > std::min(sys.times.back(), tilde.times.back())) {
        throw Error("robustness_experiment: impulse window too short for steps + 2*burn_in");
    }

    const auto unstable = sys.unstable_modes();
    const int r = static_cast<int>(unstable.size());
    Eigen::MatrixXd frame = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(sys.K), r);
    for (int i = 0; i < r; ++i) frame(unstable[static_cast<std::size_t>(i)] - 1, i) = 1.0;

    const DiscreteFamily F = discrete_maps(sys, opt.d, s0, 0, count);
    const DiscreteFamily Ft = discrete_maps(tilde, opt.d, s0, 0, count);
    const DiscreteDichotomy D = discrete_projections(F, r, frame);
    const DiscreteDichotomy Dt = discrete_projections(Ft, r, frame);

    const long lo = opt.burn_in;
    const long hi = opt.burn_in + opt.steps;
    const auto fb = fit_discrete_dichotomy(F, D, lo, hi, opt.alpha);
    const auto fp = fit_discrete_dichotomy(Ft, Dt, lo, hi, opt.alpha);

    RobustnessReport rep;
    rep.eps = eps;
    rep.M_hat_base = fb.M;
    rep.beta_hat_base = fb.beta;
    rep.M_hat = fp.M;
    rep.beta_hat = fp.beta;
    rep.dichotomous = fp.dichotomous;
    rep.time_shift = tc.map.sup_shift();
    rep.slope_dev = tc.map.sup_slope_dev();
    rep.time_change_bounds = tc.shift_bound_holds && tc.slope_bound_holds;

    for (long n = lo; n <= hi; ++n) {
        const double t = s0 + opt.d * static_cast<double>(n);
        if (sys.times.distance_to_nearest(t) < eps || tilde.times.distance_to_nearest(t) < eps) continue;
        rep.proj_gap = std::max(rep.proj_gap, alpha_op_norm(Dt.proj(n) - D.proj(n), opt.alpha));
    }

    const TailModel tail{std::max(fb.M, fp.M), std::min(fb.beta, fp.beta)};
    const long mid = (lo + hi) / 2;
    for (long n : {lo, mid, hi}) {
        for (long m : {lo, mid, hi}) {
            const auto res = discrete_green_identity_residual(F, Ft, D, Dt, n, m, opt.alpha, tail);
            rep.residuals.push_back(res.residual);
            rep.tail_bound = std::max(rep.tail_bound, res.tail_bound);
        }
    }
    return rep;
}

}  // namespace impulse
