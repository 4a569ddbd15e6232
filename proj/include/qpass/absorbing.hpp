#pragma once

// Expected terminal payoff of an absorbing chain:
//   v = P_tt v + P_tτ b   over the transient states,
// with states that have no outgoing transitions treated as absorbing with payoff 0.

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "qpass/error.hpp"

namespace qpass {

template <typename Scalar>
using SparseRows = Eigen::SparseMatrix<Scalar, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

enum class SolveMethod { automatic, direct, iterative };

struct SolveOptions {
    SolveMethod method = SolveMethod::automatic;
    /// automatic uses the direct solver up to this many transient states.
    Eigen::Index direct_limit = 600;
    double tolerance = 1e-10;
    std::size_t max_iterations = 100000;
    /// Relaxation weight of the fixed-point update, in (0, 1].
    double damping = 0.9;
};

template <typename Scalar>
struct AbsorbingSolution {
    Vector<Scalar> values;
    std::vector<bool> dangling;
    Scalar residual = 0;
    std::size_t iterations = 0;
    bool direct = false;
};

/// Transient states from which no absorbing state (terminal or dangling) is reachable.
template <typename Scalar>
std::vector<Eigen::Index> trapped_states(const SparseRows<Scalar>& P, Eigen::Index transient) {
    std::vector<bool> reaches(static_cast<std::size_t>(transient), false);
    std::vector<std::vector<Eigen::Index>> into(static_cast<std::size_t>(transient));
    std::deque<Eigen::Index> queue;
    for (Eigen::Index k = 0; k < transient; ++k) {
        bool any = false, absorbs = false;
        for (typename SparseRows<Scalar>::InnerIterator it(P, k); it; ++it) {
            if (it.value() == Scalar(0)) continue;
            any = true;
            if (it.col() >= transient)
                absorbs = true;
            else
                into[static_cast<std::size_t>(it.col())].push_back(k);
        }
        if (!any || absorbs) {
            reaches[static_cast<std::size_t>(k)] = true;
            queue.push_back(k);
        }
    }
    while (!queue.empty()) {
        const auto j = queue.front();
        queue.pop_front();
        for (auto k : into[static_cast<std::size_t>(j)]) {
            if (!reaches[static_cast<std::size_t>(k)]) {
                reaches[static_cast<std::size_t>(k)] = true;
                queue.push_back(k);
            }
        }
    }
    std::vector<Eigen::Index> trapped;
    for (Eigen::Index k = 0; k < transient; ++k)
        if (!reaches[static_cast<std::size_t>(k)]) trapped.push_back(k);
    return trapped;
}

/// Solves for the absorption payoff of every transient state. `P` is square with the
/// first `transient` states transient and the remaining `payoff.size()` terminal.
/// Throws a numerical error naming the trapped states when some transient class never absorbs.
template <typename Scalar>
AbsorbingSolution<Scalar> solve_absorbing(const SparseRows<Scalar>& P, Eigen::Index transient,
                                          const Vector<Scalar>& payoff, const SolveOptions& opt = {}) {
    const Eigen::Index n = transient;
    if (P.rows() != n + payoff.size() || P.cols() != P.rows())
        throw validation_error("solve_absorbing: matrix is " + std::to_string(P.rows()) + "x" +
                               std::to_string(P.cols()) + ", expected " + std::to_string(n + payoff.size()) +
                               " square");

    if (auto trapped = trapped_states(P, n); !trapped.empty()) {
        std::string list;
        for (std::size_t i = 0; i < trapped.size() && i < 20; ++i) list += (i ? " " : "") + std::to_string(trapped[i]);
        if (trapped.size() > 20) list += " ...";
        throw numerical_error("singular system: " + std::to_string(trapped.size()) +
                              " transient states never reach a terminal state: " + list);
    }

    AbsorbingSolution<Scalar> sol;
    sol.dangling.assign(static_cast<std::size_t>(n), true);
    Vector<Scalar> reward = Vector<Scalar>::Zero(n);
    std::vector<Eigen::Triplet<Scalar>> inner;
    for (Eigen::Index k = 0; k < n; ++k) {
        for (typename SparseRows<Scalar>::InnerIterator it(P, k); it; ++it) {
            if (it.value() == Scalar(0)) continue;
            sol.dangling[static_cast<std::size_t>(k)] = false;
            if (it.col() >= n)
                reward(k) += it.value() * payoff(it.col() - n);
            else
                inner.emplace_back(k, it.col(), it.value());
        }
    }
    SparseRows<Scalar> Ptt(n, n);
    Ptt.setFromTriplets(inner.begin(), inner.end());

    const bool direct = opt.method == SolveMethod::direct ||
                        (opt.method == SolveMethod::automatic && n <= opt.direct_limit);
    sol.direct = direct;

    if (direct) {
        Eigen::SparseMatrix<Scalar> A(n, n);
        std::vector<Eigen::Triplet<Scalar>> trip;
        trip.reserve(inner.size() + static_cast<std::size_t>(n));
        for (Eigen::Index k = 0; k < n; ++k) trip.emplace_back(k, k, Scalar(1));
        for (const auto& t : inner) trip.emplace_back(t.row(), t.col(), -t.value());
        A.setFromTriplets(trip.begin(), trip.end());
        A.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<Scalar>, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(A);
        if (lu.info() != Eigen::Success) throw numerical_error("sparse LU factorization failed: " + lu.lastErrorMessage());
        sol.values = lu.solve(reward);
        if (lu.info() != Eigen::Success) throw numerical_error("sparse LU solve failed");
        sol.iterations = 1;
    } else {
        const Scalar w = static_cast<Scalar>(opt.damping);
        Vector<Scalar> v = Vector<Scalar>::Zero(n);
        Vector<Scalar> next(n);
        const Scalar tol = static_cast<Scalar>(opt.tolerance);
        // A small residual alone does not bound the error when the chain mixes slowly:
        // the error is about res * w / (1 - rho) for contraction rate rho, estimated
        // from the residual decay over the last kSpan steps.
        constexpr std::size_t kSpan = 10;
        std::vector<Scalar> history(kSpan, Scalar(0));
        bool done = false;
        for (std::size_t it = 0; it < opt.max_iterations; ++it) {
            next.noalias() = Ptt * v;
            next += reward;
            const Scalar res = (next - v).template lpNorm<Eigen::Infinity>();
            sol.iterations = it + 1;
            if (res == Scalar(0)) {
                done = true;
                break;
            }
            if (res <= tol && it >= kSpan) {
                const Scalar old = history[it % kSpan];
                const Scalar rho = old > Scalar(0) ? std::pow(res / old, Scalar(1) / Scalar(kSpan)) : Scalar(1);
                if (rho < Scalar(1) && res * w / (Scalar(1) - rho) <= tol) {
                    done = true;
                    break;
                }
            }
            history[it % kSpan] = res;
            v += w * (next - v);
        }
        if (!done)
            throw numerical_error("fixed-point iteration did not converge within " +
                                  std::to_string(opt.max_iterations) + " iterations");
        sol.values = std::move(v);
    }

    sol.residual = n == 0 ? Scalar(0) : (sol.values - Ptt * sol.values - reward).template lpNorm<Eigen::Infinity>();
    if (!(sol.residual <= static_cast<Scalar>(opt.tolerance)) || !sol.values.allFinite())
        throw numerical_error("ill-conditioned system: residual " + std::to_string(static_cast<double>(sol.residual)) +
                              " exceeds tolerance");
    return sol;
}

}  // namespace qpass
