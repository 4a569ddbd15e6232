#include "qpass/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qpass/error.hpp"
#include "qpass/partition.hpp"

namespace qpass {

namespace {

struct RowList {
    std::vector<std::vector<std::pair<std::size_t, double>>> rows;
};

RowList to_rows(const StochasticMatrix& P) {
    RowList out;
    out.rows.resize(static_cast<std::size_t>(P.P.rows()));
    for (Eigen::Index k = 0; k < P.P.outerSize(); ++k) {
        for (SparseRows<double>::InnerIterator it(P.P, k); it; ++it) {
            if (it.value() != 0.0) out.rows[static_cast<std::size_t>(k)].emplace_back(it.col(), it.value());
        }
    }
    return out;
}

/// splitmix64 as a standard uniform random bit generator; cheap to seed per walk.
struct SplitMix64 {
    using result_type = std::uint64_t;
    std::uint64_t state;
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~result_type{0}; }
    result_type operator()() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
};

}  // namespace

IterationResult value_iteration(const StochasticMatrix& P, double tol, std::size_t cap) {
    const std::size_t n = P.transient();
    const auto rows = to_rows(P);
    std::vector<double> v(n, 0.0), next(n, 0.0);

    IterationResult out;
    for (std::size_t it = 0; it < cap; ++it) {
        double change = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            double acc = 0.0;
            for (const auto& [j, p] : rows.rows[k]) acc += p * (j < n ? v[j] : P.terminal(static_cast<Eigen::Index>(j - n)));
            next[k] = acc;
            change = std::max(change, std::abs(acc - v[k]));
        }
        v.swap(next);
        out.iterations = it + 1;
        if (change < tol) {
            out.values = Eigen::Map<Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(n));
            return out;
        }
    }
    throw numerical_error("value iteration did not converge within " + std::to_string(cap) + " iterations");
}

MonteCarloEstimate monte_carlo_value(const StochasticMatrix& P, std::size_t start, std::size_t n_walks,
                                     std::uint64_t seed, std::size_t max_steps) {
    const std::size_t n = P.transient();
    if (start >= n) throw validation_error("monte carlo start state must be transient");
    if (n_walks == 0) throw validation_error("monte carlo needs at least one walk");

    // cumulative distribution per row
    const auto rows = to_rows(P);
    std::vector<std::vector<double>> cdf(rows.rows.size());
    for (std::size_t k = 0; k < rows.rows.size(); ++k) {
        double acc = 0.0;
        for (const auto& [j, p] : rows.rows[k]) cdf[k].push_back(acc += p);
    }

    MonteCarloEstimate out;
    double sum = 0.0, sum_sq = 0.0;
    for (std::size_t w = 0; w < n_walks; ++w) {
        SplitMix64 rng{mix_seed(seed, w)};
        std::size_t state = start;
        double payoff = 0.0;
        bool absorbed = false;
        for (std::size_t step = 0; step < max_steps; ++step) {
            if (state >= n) {
                payoff = P.terminal(static_cast<Eigen::Index>(state - n));
                absorbed = true;
                break;
            }
            const auto& row = cdf[state];
            if (row.empty()) {  // dangling
                absorbed = true;
                break;
            }
            const double u = rng.uniform() * row.back();
            auto it = std::upper_bound(row.begin(), row.end(), u);
            const auto pick = std::min<std::size_t>(static_cast<std::size_t>(it - row.begin()), row.size() - 1);
            state = rows.rows[state][pick].first;
        }
        if (!absorbed) {
            ++out.capped;
            continue;
        }
        sum += payoff;
        sum_sq += payoff * payoff;
        ++out.walks;
    }
    if (static_cast<double>(out.capped) > 0.01 * static_cast<double>(n_walks))
        throw numerical_error("monte carlo: " + std::to_string(out.capped) + " of " + std::to_string(n_walks) +
                              " walks hit the step cap");

    const double m = static_cast<double>(out.walks);
    out.estimate = sum / m;
    const double var = out.walks > 1 ? std::max(0.0, (sum_sq - m * out.estimate * out.estimate) / (m - 1)) : 0.0;
    out.standard_error = std::sqrt(var / m);
    return out;
}

StochasticMatrix random_absorbing_system(std::size_t c, double s, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = 2 * c;
    std::uniform_int_distribution<std::size_t> transient_state(0, n - 1);
    std::uniform_int_distribution<std::size_t> terminal_state(n, n + 3);
    std::uniform_int_distribution<int> fanout(1, 4);

    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t k = 0; k < n; ++k) {
        if (k != 0 && unit(rng) < 0.05) continue;  // dangling
        std::vector<std::pair<std::size_t, double>> row;
        for (int j = 0, m = fanout(rng); j < m; ++j) row.emplace_back(transient_state(rng), 0.1 + unit(rng));
        if (k == 0 || unit(rng) < 0.7) {
            for (int j = 0, m = fanout(rng) % 2 + 1; j < m; ++j) row.emplace_back(terminal_state(rng), 0.1 + unit(rng));
        } else {
            row.emplace_back(0, 0.1 + unit(rng));
        }
        double total = 0.0;
        for (const auto& [j, w] : row) total += w;
        for (const auto& [j, w] : row) trip.emplace_back(static_cast<int>(k), static_cast<int>(j), w / total);
    }

    StochasticMatrix out;
    out.c = c;
    out.terminal = terminal_values(s);
    out.P.resize(static_cast<Eigen::Index>(n + 4), static_cast<Eigen::Index>(n + 4));
    out.P.setFromTriplets(trip.begin(), trip.end());
    out.dangling.assign(n + 4, false);
    for (std::size_t k = 0; k < n + 4; ++k) out.dangling[k] = out.P.row(static_cast<Eigen::Index>(k)).nonZeros() == 0;
    return out;
}

}  // namespace qpass
