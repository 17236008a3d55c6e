#pragma once

#include "impulse/spectral.hpp"

#include <cstddef>
#include <vector>

namespace impulse {

/// Nodes of one continuity interval (τ_j, τ_{j+1}].
///
/// t.front() = τ_j carries the right limit u(τ_j + 0); t.back() = τ_{j+1}
/// carries the stored value u(τ_{j+1}) = u(τ_{j+1} − 0).
struct GridInterval {
    long j = 0;
    std::vector<double> t;
    std::vector<SpectralVector> u;
    std::vector<double> bary;  ///< barycentric weights of t

    double left() const { return t.front(); }
    double right() const { return t.back(); }
    SpectralVector interpolate(double s) const;
};

/// Piecewise smooth solution on consecutive continuity intervals.
class GridSolution {
public:
    GridSolution() = default;
    GridSolution(std::vector<GridInterval> intervals, double alpha);

    const std::vector<GridInterval>& intervals() const { return intervals_; }
    std::vector<GridInterval>& intervals() { return intervals_; }
    double alpha() const { return alpha_; }
    std::size_t K() const;

    double t_begin() const { return intervals_.front().left(); }
    double t_end() const { return intervals_.back().right(); }
    long j_first() const { return intervals_.front().j; }
    long j_last() const { return intervals_.back().j + 1; }  ///< index of the right end impulse

    /// Interval index (0-based) holding t under left continuity: left < t ≤ right.
    std::size_t locate(double t) const;

    /// u(t) = u(t − 0); at t_begin() the right limit is returned.
    SpectralVector evaluate(double t) const;
    /// u(t + 0).
    SpectralVector right_limit(double t) const;

    /// u(τ_j) and u(τ_j + 0) at an interior impulse of the window.
    SpectralVector before(long j) const;
    SpectralVector after(long j) const;

    /// Interval structure restricted to impulses j_from..j_to.
    GridSolution crop(long j_from, long j_to) const;

    double sup_norm(double alpha) const;
    /// max over nodes of ‖u − v‖_α; grids must match.
    double max_node_diff(const GridSolution& other, double alpha) const;

    std::size_t node_count() const;

    double tail_tol = 0.0;  ///< tail truncation tolerance of the construction

private:
    std::vector<GridInterval> intervals_;
    double alpha_ = 0.5;
};

}  // namespace impulse
