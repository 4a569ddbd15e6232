#pragma once

// QPass: the change in field value caused by a pass.
//   successful:   f_e - f_s
//   unsuccessful: (opponent-possession value at the mirrored end) - f_s

#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "qpass/events.hpp"
#include "qpass/field_value.hpp"
#include "qpass/partition.hpp"

namespace qpass {

struct QPassRecord {
    PassRecord pass;
    double qpass = 0.0;
    double f_s = 0.0;
    double f_e = 0.0;
    /// Present iff the pass is unsuccessful.
    std::optional<double> l_e_value;
    bool successful = false;
    std::size_t c_s = 0;
    std::size_t c_e = 0;
    std::optional<std::size_t> l_e;
};

QPassRecord qpass_of_pass(const PassRecord& pass, const ClusterAssignment& a, const FieldValues& fv);

/// Scores every own pass of the team (virtual passes included, flagged on the record).
std::vector<QPassRecord> score_team(const TeamEventSet& events, const TeamValuation& valuation);

/// Mean of the two middle values for even counts. Empty input is an error.
double median(std::vector<double> values);

struct PlayerRanking {
    std::string player_id;
    std::string name;
    std::string team_id;
    PositionGroup position = PositionGroup::midfielder;
    std::size_t pass_count = 0;
    double median_qpass = 0.0;
};

/// Median QPass over non-virtual passes for players with at least `min_passes` of them,
/// sorted by descending median, then player_id. Qualifying players missing from the
/// roster are a validation error.
std::vector<PlayerRanking> rank_players(std::span<const QPassRecord> records, const Roster& roster,
                                        std::size_t min_passes = 100);

/// The player's `n` highest-QPass non-virtual passes, ties by seq. Unknown player is an error.
std::vector<QPassRecord> top_passes(std::span<const QPassRecord> records, const std::string& player_id,
                                    std::size_t n);

struct CdfSeries {
    /// (value, cumulative fraction), sorted by value.
    std::vector<std::pair<double, double>> points;
    /// Share of unsuccessful passes with QPass > 0.
    double beneficial_fraction = 0.0;
    std::size_t count = 0;
};

struct UnsuccessfulCdf {
    std::map<PositionGroup, CdfSeries> groups;
    /// Groups with no unsuccessful passes.
    std::vector<PositionGroup> omitted;
};

/// Empirical CDF of QPass over unsuccessful, non-virtual passes per position group.
/// Passes of players missing from the roster are skipped.
UnsuccessfulCdf unsuccessful_cdf(std::span<const QPassRecord> records, const Roster& roster);

void write_records_csv(std::ostream& out, std::span<const QPassRecord> records);

/// `player,qpass_median,team,position,pass_count`
void write_rankings_csv(std::ostream& out, std::span<const PlayerRanking> rankings);

/// `position,value,cumulative_fraction`
void write_cdf_csv(std::ostream& out, const UnsuccessfulCdf& cdf);

}  // namespace qpass
