#include "impulse/grid_solution.hpp"

#include "impulse/error.hpp"
#include "impulse/quadrature.hpp"

#include <algorithm>
#include <string>

namespace impulse {

SpectralVector GridInterval::interpolate(double s) const {
    const auto c = barycentric_coefficients(t, bary, s);
    SpectralVector out(u.front().size());
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] != 0.0) out += u[i] * c[i];
    }
    return out;
}

GridSolution::GridSolution(std::vector<GridInterval> intervals, double alpha)
    : intervals_(std::move(intervals)), alpha_(alpha) {
    if (intervals_.empty()) throw Error("GridSolution: no intervals");
    for (auto& iv : intervals_) {
        if (iv.t.size() < 2 || iv.t.size() != iv.u.size()) throw Error("GridSolution: malformed interval");
        if (iv.bary.size() != iv.t.size()) iv.bary = barycentric_weights(iv.t);
    }
}

std::size_t GridSolution::K() const { return intervals_.front().u.front().size(); }

std::size_t GridSolution::locate(double t) const {
    if (t < t_begin() || t > t_end()) throw Error("GridSolution: time " + std::to_string(t) + " outside window");
    auto it = std::lower_bound(intervals_.begin(), intervals_.end(), t,
                               [](const GridInterval& iv, double x) { return iv.right() < x; });
    return static_cast<std::size_t>(it - intervals_.begin());
}

SpectralVector GridSolution::evaluate(double t) const {
    if (t == t_begin()) return intervals_.front().u.front();
    return intervals_[locate(t)].interpolate(t);
}

SpectralVector GridSolution::right_limit(double t) const {
    if (t == t_end()) throw Error("GridSolution: right limit at the window end");
    std::size_t i = locate(t);
    if (t == intervals_[i].right()) ++i;
    return intervals_[i].interpolate(t);
}

SpectralVector GridSolution::before(long j) const {
    for (const auto& iv : intervals_) {
        if (iv.j + 1 == j) return iv.u.back();
    }
    throw Error("GridSolution: no interval ends at impulse " + std::to_string(j));
}

SpectralVector GridSolution::after(long j) const {
    for (const auto& iv : intervals_) {
        if (iv.j == j) return iv.u.front();
    }
    throw Error("GridSolution: no interval starts at impulse " + std::to_string(j));
}

GridSolution GridSolution::crop(long j_from, long j_to) const {
    std::vector<GridInterval> out;
    for (const auto& iv : intervals_) {
        if (iv.j >= j_from && iv.j + 1 <= j_to) out.push_back(iv);
    }
    if (out.empty()) throw Error("GridSolution: empty crop");
    GridSolution g(std::move(out), alpha_);
    g.tail_tol = tail_tol;
    return g;
}

double GridSolution::sup_norm(double alpha) const {
    double m = 0.0;
    for (const auto& iv : intervals_) {
        for (const auto& u : iv.u) m = std::max(m, alpha_norm(u, alpha));
    }
    return m;
}

double GridSolution::max_node_diff(const GridSolution& other, double alpha) const {
    if (other.intervals_.size() != intervals_.size()) throw Error("GridSolution: grids differ");
    double m = 0.0;
    for (std::size_t i = 0; i < intervals_.size(); ++i) {
        const auto& a = intervals_[i];
        const auto& b = other.intervals_[i];
        if (a.u.size() != b.u.size()) throw Error("GridSolution: grids differ");
        for (std::size_t n = 0; n < a.u.size(); ++n) m = std::max(m, alpha_norm(a.u[n] - b.u[n], alpha));
    }
    return m;
}

std::size_t GridSolution::node_count() const {
    std::size_t n = 0;
    for (const auto& iv : intervals_) n += iv.t.size();
    return n;
}

}  // namespace impulse
