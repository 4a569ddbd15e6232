#pragma once

// Event data model: passes and shots in each team's own attack frame,
// possession segmentation, virtual passes, and per-team season event sets.

#include <array>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace qpass {

inline constexpr double kPitchMin = 0.0;
inline constexpr double kPitchMax = 100.0;

/// Pitch location in percent of length (x, attack left to right) and width (y).
struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

/// Converts a location between the two teams' attack frames. Involution.
constexpr Point mirror(Point p) noexcept { return {kPitchMax - p.x, kPitchMax - p.y}; }

Point clamp_to_pitch(Point p) noexcept;

struct PassRecord {
    std::string match_id;
    long seq = 0;
    std::string team_id;
    std::string player_id;
    Point start;
    Point end;
    bool successful = false;
    bool is_virtual = false;
    int possession_id = -1;
    bool is_last_of_possession = false;
    /// The possession this pass belongs to ends with a shot.
    bool possession_ends_in_shot = false;
    /// seq of the shot this pass assisted.
    std::optional<long> assist_for_shot;
};

struct ShotRecord {
    std::string match_id;
    long seq = 0;
    std::string team_id;
    std::string player_id;
    Point location;
    bool is_goal = false;
    /// seq of the assisting pass.
    std::optional<long> assisted_by;
    int possession_id = -1;
};

using Event = std::variant<PassRecord, ShotRecord>;

const std::string& team_of(const Event& e);
long seq_of(const Event& e);
int possession_of(const Event& e);

struct MatchEventLog {
    std::string match_id;
    std::array<std::string, 2> teams;
    std::vector<Event> events;

    const std::string& opponent_of(const std::string& team) const;
};

/// Parses the event CSV. Rows are grouped by match_id in order of first appearance;
/// every match must have strictly increasing seq and exactly two teams.
/// Coordinates are clamped to the pitch.
std::vector<MatchEventLog> parse_events(std::istream& in);

/// Writes the event CSV (11 columns, header included). With `augmented`, two
/// trailing columns `virtual,possession_id` are appended.
void write_events(std::ostream& out, std::span<const MatchEventLog> logs, bool augmented = false);

/// Assigns possession ids and the last-of-possession / ends-in-shot flags.
/// A possession ends at an unsuccessful pass, at a shot, or when the other team acts next.
MatchEventLog segment_possessions(MatchEventLog log);

/// Inserts a virtual pass between consecutive passes of a possession whose
/// endpoints differ. The result is segmented and re-sequenced from 1; assist
/// references are remapped to the new seq values.
MatchEventLog insert_virtual_passes(MatchEventLog log);

/// segment_possessions followed by insert_virtual_passes.
MatchEventLog augment(MatchEventLog log);

/// All events a team takes part in over a season, split by who acts.
/// Each shot carries the index of its assisting pass in the matching pass list.
struct TeamEventSet {
    std::string team_id;
    std::vector<PassRecord> own_passes;
    std::vector<PassRecord> opp_passes;
    std::vector<ShotRecord> own_shots;
    std::vector<ShotRecord> opp_shots;
    std::vector<std::optional<std::size_t>> own_shot_assists;
    std::vector<std::optional<std::size_t>> opp_shot_assists;
};

TeamEventSet build_team_event_sets(std::span<const MatchEventLog> logs, const std::string& team);

/// Teams in order of first appearance across the logs.
std::vector<std::string> teams_in(std::span<const MatchEventLog> logs);

enum class PositionGroup { goalkeeper, defender, midfielder, attacker };

inline constexpr std::array<PositionGroup, 4> kPositionGroups = {
    PositionGroup::goalkeeper, PositionGroup::defender, PositionGroup::midfielder, PositionGroup::attacker};

/// GK / DF / MF / FW
const char* position_code(PositionGroup g);
std::optional<PositionGroup> parse_position(std::string_view code);

struct RosterEntry {
    std::string player_id;
    std::string name;
    std::string team_id;
    PositionGroup position = PositionGroup::midfielder;
};

using Roster = std::map<std::string, RosterEntry>;

Roster parse_roster(std::istream& in);
void write_roster(std::ostream& out, const Roster& roster);

}  // namespace qpass
