#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qpass/error.hpp"
#include "qpass/oracle.hpp"

using namespace qpass;

namespace {

StochasticMatrix from_dense(std::size_t c, const Eigen::MatrixXd& rows, double s = 0.7) {
    TransitionSystem ts;
    ts.c = c;
    ts.terminal = terminal_values(s);
    ts.counts = rows.sparseView();
    return normalize_rows(ts);
}

}  // namespace

TEST_CASE("value iteration on the hand-solved system") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 6);
    a(0, 3) = 1;
    a(0, 1) = 1;
    a(1, 5) = 1;
    const auto r = value_iteration(from_dense(1, a));
    CHECK(std::abs(r.values(0)) <= 1e-12);
    CHECK(std::abs(r.values(1) + 0.7) <= 1e-12);
}

TEST_CASE("all-dangling system converges at once") {
    const auto r = value_iteration(from_dense(3, Eigen::MatrixXd::Zero(10, 10)));
    CHECK(r.values.isZero());
    CHECK(r.iterations == 1);
}

TEST_CASE("value iteration cap") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 6);
    a(0, 0) = 999;
    a(0, 2) = 1;
    CHECK_THROWS_AS(value_iteration(from_dense(1, a), 1e-12, 10), Error);
}

TEST_CASE("value iteration agrees with the solver on random systems") {
    ValuationConfig cfg;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const std::size_t c = 2 + seed % 9;
        const auto P = random_absorbing_system(c, 0.7, seed);
        const auto vi = value_iteration(P);
        const auto fv = solve_field_values(P, cfg, SolveMethod::direct);
        CHECK((vi.values - fv.values).lpNorm<Eigen::Infinity>() <= 1e-9);
        CHECK(fv.values.cwiseAbs().maxCoeff() <= 1.0);
    }
}

TEST_CASE("random systems are well formed and deterministic") {
    const auto a = random_absorbing_system(7, 0.7, 3);
    const auto b = random_absorbing_system(7, 0.7, 3);
    CHECK(Eigen::MatrixXd(a.P) == Eigen::MatrixXd(b.P));
    CHECK(a.c == 7);
    CHECK(a.P.rows() == 18);
    CHECK_FALSE(a.dangling[0]);
    for (Eigen::Index r = 0; r < a.P.rows(); ++r) {
        const double sum = a.P.row(r).sum();
        CHECK((std::abs(sum - 1.0) < 1e-12 || sum == 0.0));
        CHECK((sum == 0.0) == a.dangling[static_cast<std::size_t>(r)]);
    }
}

TEST_CASE("Monte Carlo: deterministic walk") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 6);
    a(0, 2) = 1;
    a(1, 4) = 1;
    const auto P = from_dense(1, a);
    const auto mc = monte_carlo_value(P, 0, 1000, 1);
    CHECK(mc.estimate == 1.0);
    CHECK(mc.standard_error == 0.0);
    CHECK(mc.walks == 1000);
}

TEST_CASE("Monte Carlo: fair split between goal and conceded goal") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 6);
    a(0, 2) = 1;
    a(0, 4) = 1;
    const auto mc = monte_carlo_value(from_dense(1, a), 0, 100000, 42);
    CHECK(mc.standard_error == doctest::Approx(1.0 / std::sqrt(100000.0)).epsilon(1e-2));
    CHECK(std::abs(mc.estimate) <= 3 * mc.standard_error);
}

TEST_CASE("Monte Carlo: determinism, dangling payoff and errors") {
    const auto P = random_absorbing_system(5, 0.7, 9);
    const auto x = monte_carlo_value(P, 0, 5000, 77);
    const auto y = monte_carlo_value(P, 0, 5000, 77);
    CHECK(x.estimate == y.estimate);

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(6, 6);
    a(0, 1) = 1;  // into a dangling opponent state
    CHECK(monte_carlo_value(from_dense(1, a), 0, 100, 1).estimate == 0.0);

    Eigen::MatrixXd slow = Eigen::MatrixXd::Zero(6, 6);
    slow(0, 0) = 1e6;
    slow(0, 2) = 1;
    CHECK_THROWS_AS(monte_carlo_value(from_dense(1, slow), 0, 200, 1, 100), Error);
}

TEST_CASE("Monte Carlo agrees with the solver on random systems") {
    // 20 independent comparisons: a 3-sigma miss has probability 0.0027 each, so allow
    // one, and none beyond 4.5 sigma. Zero-variance walks must match to rounding.
    ValuationConfig cfg;
    int beyond3 = 0;
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
        const auto P = random_absorbing_system(2 + seed % 9, 0.7, seed);
        const auto fv = solve_field_values(P, cfg);
        const auto mc = monte_carlo_value(P, 0, 20000, seed);
        const double diff = std::abs(mc.estimate - fv.own(0));
        if (mc.standard_error == 0.0) {
            CHECK(diff <= 1e-9);
            continue;
        }
        CHECK(diff <= 4.5 * mc.standard_error);
        if (diff > 3 * mc.standard_error) ++beyond3;
    }
    CHECK(beyond3 <= 1);
}
