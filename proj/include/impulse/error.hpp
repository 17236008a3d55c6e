#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace impulse {

/// Base class for every failure reported by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An iteration failed to converge; carries the per-iteration history.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, std::vector<double> history)
        : Error(what), history_(std::move(history)) {}

    const std::vector<double>& history() const noexcept { return history_; }

private:
    std::vector<double> history_;
};

/// A state left the ball on which the nonlinear data are Lipschitz.
class DomainError : public Error {
public:
    using Error::Error;
};

/// A trajectory met an impulsive surface more than once.
class BeatingError : public Error {
public:
    BeatingError(const std::string& what, long surface)
        : Error(what), surface_(surface) {}

    long surface() const noexcept { return surface_; }

private:
    long surface_;
};

/// A sampled function does not satisfy the hypothesis of an inequality.
class HypothesisError : public Error {
public:
    HypothesisError(const std::string& what, std::size_t node)
        : Error(what), node_(node) {}

    std::size_t node() const noexcept { return node_; }

private:
    std::size_t node_;
};

}  // namespace impulse
