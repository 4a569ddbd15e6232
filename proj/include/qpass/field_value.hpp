#pragma once

// Field values: the expected terminal payoff of having (or conceding) the ball
// in each cluster, from an absorbing transition system over 2c + 4 states.
//
// State layout for cluster count c:
//   [0, c)        team has the ball in own-cluster k
//   [c, 2c)       opponent has the ball in opponent-cluster k
//   2c, 2c + 1    team scores / team shoots without scoring
//   2c + 2, 2c + 3  opponent scores / opponent shoots without scoring

#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "qpass/absorbing.hpp"
#include "qpass/events.hpp"
#include "qpass/partition.hpp"

namespace qpass {

struct ValuationConfig {
    /// Value of taking a shot; conceding one is worth -s.
    double s = 0.7;
    PartitionConfig partition;
    double tolerance = 1e-10;
    std::size_t max_iterations = 100000;
    /// Cluster counts up to this use the direct solver, above it fixed-point iteration.
    std::size_t direct_max_clusters = 300;
    double damping = 0.9;

    void validate() const;
    SolveOptions solve_options(std::size_t c) const;
};

/// (+1, s, -1, -s)
Eigen::Vector4d terminal_values(double s);

struct TransitionSystem {
    std::size_t c = 0;
    SparseRows<double> counts;
    Eigen::Vector4d terminal = terminal_values(0.7);

    std::size_t states() const { return 2 * c + 4; }
    std::size_t own(std::size_t k) const { return k; }
    std::size_t opp(std::size_t k) const { return c + k; }
    std::size_t goal() const { return 2 * c; }
    std::size_t shot() const { return 2 * c + 1; }
    std::size_t conceded_goal() const { return 2 * c + 2; }
    std::size_t conceded_shot() const { return 2 * c + 3; }

    double total_count() const { return counts.sum(); }
};

/// Row-normalized transition system; rows without transitions stay zero and are flagged.
struct StochasticMatrix {
    std::size_t c = 0;
    SparseRows<double> P;
    std::vector<bool> dangling;
    Eigen::Vector4d terminal = terminal_values(0.7);

    std::size_t transient() const { return 2 * c; }
};

struct FieldValues {
    std::size_t c = 0;
    double s = 0.7;
    /// Own-possession values in [0, c), opponent-possession values in [c, 2c).
    Eigen::VectorXd values;
    std::vector<bool> dangling;
    std::size_t iterations = 0;
    bool direct = false;
    double residual = 0.0;

    double own(std::size_t k) const { return values(static_cast<Eigen::Index>(k)); }
    double opp(std::size_t k) const { return values(static_cast<Eigen::Index>(c + k)); }
};

/// Counts every state transition implied by the team's and its opponents' events.
/// Throws a validation error when an assignment or a required l_e is missing.
TransitionSystem accumulate_transitions(const TeamPartition& partition, const TeamEventSet& events,
                                        const ValuationConfig& cfg);

/// Expected total count from event tallies; must equal TransitionSystem::total_count().
double expected_transition_count(const TeamEventSet& events);

StochasticMatrix normalize_rows(const TransitionSystem& ts);

FieldValues solve_field_values(const StochasticMatrix& P, const ValuationConfig& cfg);
FieldValues solve_field_values(const StochasticMatrix& P, const ValuationConfig& cfg, SolveMethod method);

/// Endpoint values of every pass under a solved partition, used as the next clustering's f feature.
PointValues point_values(const TeamPartition& partition, const FieldValues& fv);

struct TeamValuation {
    TeamPartition partition;
    FieldValues values;
    TransitionSystem transitions;
    std::size_t iterations = 0;
};

/// Called after each iteration with the cluster count and solved values.
using IterationObserver = std::function<void(std::size_t c, const TeamPartition&, const FieldValues&)>;

/// Coarsens c from c_max to c_min, re-clustering with the previous iteration's
/// values as a feature and re-solving each time. Returns the final (c_min) state.
TeamValuation run_team_valuation(const TeamEventSet& events, const ValuationConfig& cfg,
                                 const IterationObserver& observer = {});

/// `state_kind,cluster_id,value` with state_kind own|opp.
void write_field_values_csv(std::ostream& out, const FieldValues& fv);

/// Coordinate list `row,col,count`.
void write_transitions_csv(std::ostream& out, const TransitionSystem& ts);

}  // namespace qpass
