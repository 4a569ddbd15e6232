#pragma once

// Seeded synthetic league: possessions simulated as random walks over the
// pitch with per-team style parameters and position-dependent passing priors.

#include <cstdint>
#include <vector>

#include "qpass/events.hpp"

namespace qpass {

struct TeamStyle {
    /// Probability that a receiver keeps the ball after a successful pass.
    double retention = 0.93;
    /// Base probability that a pass is unsuccessful.
    double turnover_rate = 0.12;
    /// Extra failure probability for passes played from the own third.
    double build_up_risk = 0.12;
    /// Shift (pitch %) of the mean forward progress of every pass.
    double progress_bias = 0.0;
    /// Multiplier on the per-zone shot probability.
    double shot_propensity = 1.0;
    /// Probability that a goalkeeper or defender in the own third plays a long, lost ball.
    double clearance_rate = 0.0;
};

struct SyntheticLeagueSpec {
    std::size_t teams = 2;
    /// Matches played by every pair of teams, alternating who kicks off.
    std::size_t matches_per_pairing = 1;
    std::size_t possessions_per_match = 200;
    double goal_conversion = 0.11;
    /// One style per team; empty means the default style for all.
    std::vector<TeamStyle> styles;
    std::uint64_t seed = 42;

    void validate() const;
    TeamStyle style(std::size_t team) const;
};

struct SyntheticLeague {
    std::vector<MatchEventLog> matches;
    Roster roster;
};

SyntheticLeague generate_synthetic_league(const SyntheticLeagueSpec& spec);

/// Twenty teams, double round robin, sized to about 330,000 passes and 8,600 shots.
SyntheticLeagueSpec paper_scale_spec(std::uint64_t seed = 42);

struct LeagueTally {
    std::size_t passes = 0;
    std::size_t shots = 0;
    std::size_t goals = 0;
    std::size_t possessions = 0;
};

LeagueTally tally(const std::vector<MatchEventLog>& matches);

}  // namespace qpass
