#pragma once

// Independent checks for the field-value solver: plain value iteration and
// Monte Carlo simulation of the absorbing chain. Neither shares code with
// solve_absorbing.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "qpass/field_value.hpp"

namespace qpass {

struct IterationResult {
    Eigen::VectorXd values;
    std::size_t iterations = 0;
};

/// v <- P_tt v + P_tτ b from v = 0 until the ∞-norm change drops below `tol`.
/// Throws a numerical error when `cap` iterations are not enough.
IterationResult value_iteration(const StochasticMatrix& P, double tol = 1e-12, std::size_t cap = 1000000);

struct MonteCarloEstimate {
    double estimate = 0.0;
    double standard_error = 0.0;
    std::size_t walks = 0;
    std::size_t capped = 0;
};

/// Mean terminal payoff of `n_walks` random walks from `start` (a transient state).
/// Dangling states absorb with payoff 0. Walk w uses a generator seeded from (seed, w).
/// Throws a numerical error when more than 1% of walks hit `max_steps`.
MonteCarloEstimate monte_carlo_value(const StochasticMatrix& P, std::size_t start, std::size_t n_walks,
                                     std::uint64_t seed, std::size_t max_steps = 1000000);

/// Random sparse absorbing system over c clusters where every transient state
/// reaches a terminal. Some states may be dangling.
StochasticMatrix random_absorbing_system(std::size_t c, double s, std::uint64_t seed);

}  // namespace qpass
