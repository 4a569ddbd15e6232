#include "qpass/events.hpp"

#include <algorithm>
#include <unordered_map>

#include "qpass/csv.hpp"
#include "qpass/error.hpp"

namespace qpass {

Point clamp_to_pitch(Point p) noexcept {
    return {std::clamp(p.x, kPitchMin, kPitchMax), std::clamp(p.y, kPitchMin, kPitchMax)};
}

const std::string& team_of(const Event& e) {
    return std::visit([](const auto& ev) -> const std::string& { return ev.team_id; }, e);
}

long seq_of(const Event& e) {
    return std::visit([](const auto& ev) { return ev.seq; }, e);
}

int possession_of(const Event& e) {
    return std::visit([](const auto& ev) { return ev.possession_id; }, e);
}

const std::string& MatchEventLog::opponent_of(const std::string& team) const {
    if (teams[0] == team) return teams[1];
    if (teams[1] == team) return teams[0];
    throw validation_error("team " + team + " does not play in match " + match_id);
}

namespace {

constexpr std::array<std::string_view, 10> kRequiredColumns = {
    "match_id", "seq", "team_id", "player_id", "kind", "x_start", "y_start", "x_end", "y_end", "flag"};
constexpr std::size_t kAssistColumn = 10;

double coordinate(const std::vector<std::string>& f, std::size_t i, std::size_t line) {
    auto v = csv::to_double(f[i]);
    if (!v) throw ParseError(line, "column " + std::string(kRequiredColumns[i]) + " is not a number: '" + f[i] + "'");
    return *v;
}

bool flag_value(const std::string& s, std::size_t line, std::string_view column) {
    if (s == "1") return true;
    if (s == "0") return false;
    throw ParseError(line, "column " + std::string(column) + " must be 0 or 1, got '" + s + "'");
}

void validate_match(MatchEventLog& log) {
    std::vector<std::string> teams;
    long prev_seq = 0;
    bool first = true;
    for (const auto& e : log.events) {
        const long s = seq_of(e);
        if (!first && s <= prev_seq)
            throw validation_error("match " + log.match_id + ": seq " + std::to_string(s) + " does not increase");
        first = false;
        prev_seq = s;
        const auto& t = team_of(e);
        if (std::find(teams.begin(), teams.end(), t) == teams.end()) teams.push_back(t);
    }
    if (teams.size() != 2)
        throw validation_error("match " + log.match_id + " has " + std::to_string(teams.size()) +
                               " teams, expected exactly 2");
    log.teams = {teams[0], teams[1]};

    // Link assists to the passes they reference.
    std::unordered_map<long, std::size_t> pass_at;
    for (std::size_t i = 0; i < log.events.size(); ++i) {
        if (std::holds_alternative<PassRecord>(log.events[i])) pass_at[seq_of(log.events[i])] = i;
    }
    for (auto& e : log.events) {
        auto* shot = std::get_if<ShotRecord>(&e);
        if (shot == nullptr || !shot->assisted_by) continue;
        auto it = pass_at.find(*shot->assisted_by);
        if (it == pass_at.end() || seq_of(log.events[it->second]) >= shot->seq)
            throw validation_error("match " + log.match_id + ": shot " + std::to_string(shot->seq) +
                                   " references unknown assist seq " + std::to_string(*shot->assisted_by));
        auto& pass = std::get<PassRecord>(log.events[it->second]);
        if (pass.team_id != shot->team_id)
            throw validation_error("match " + log.match_id + ": shot " + std::to_string(shot->seq) +
                                   " is assisted by a pass of the other team");
        pass.assist_for_shot = shot->seq;
    }
}

}  // namespace

std::vector<MatchEventLog> parse_events(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!csv::next_line(in, line, line_no)) throw validation_error("empty event log");

    const auto header = csv::split_line(line);
    if (header.size() < kRequiredColumns.size())
        throw ParseError(line_no, "header must start with " + std::to_string(kRequiredColumns.size()) + " columns");
    for (std::size_t i = 0; i < kRequiredColumns.size(); ++i) {
        if (header[i] != kRequiredColumns[i])
            throw ParseError(line_no, "expected header column '" + std::string(kRequiredColumns[i]) + "', got '" +
                                          header[i] + "'");
    }
    std::optional<std::size_t> virtual_col;
    for (std::size_t i = kRequiredColumns.size(); i < header.size(); ++i) {
        if (header[i] == "virtual") virtual_col = i;
    }

    std::vector<MatchEventLog> logs;
    std::unordered_map<std::string, std::size_t> match_index;

    while (csv::next_line(in, line, line_no)) {
        auto f = csv::split_line(line);
        if (f.size() < kRequiredColumns.size() || f.size() > std::max(header.size(), kAssistColumn + 1))
            throw ParseError(line_no, "expected " + std::to_string(kRequiredColumns.size()) + " to " +
                                          std::to_string(std::max(header.size(), kAssistColumn + 1)) +
                                          " fields, got " + std::to_string(f.size()));
        auto seq = csv::to_long(f[1]);
        if (!seq) throw ParseError(line_no, "seq is not an integer: '" + f[1] + "'");
        if (f[0].empty() || f[2].empty() || f[3].empty()) throw ParseError(line_no, "empty identifier");

        std::optional<long> assist;
        if (f.size() > kAssistColumn && !f[kAssistColumn].empty()) {
            assist = csv::to_long(f[kAssistColumn]);
            if (!assist) throw ParseError(line_no, "assist_seq is not an integer: '" + f[kAssistColumn] + "'");
        }

        Event event;
        const Point start = clamp_to_pitch({coordinate(f, 5, line_no), coordinate(f, 6, line_no)});
        if (f[4] == "pass") {
            if (assist) throw ParseError(line_no, "assist_seq is only valid on shot rows");
            PassRecord p;
            p.match_id = f[0];
            p.seq = *seq;
            p.team_id = f[2];
            p.player_id = f[3];
            p.start = start;
            p.end = clamp_to_pitch({coordinate(f, 7, line_no), coordinate(f, 8, line_no)});
            p.successful = flag_value(f[9], line_no, "flag");
            if (virtual_col && *virtual_col < f.size() && !f[*virtual_col].empty())
                p.is_virtual = flag_value(f[*virtual_col], line_no, "virtual");
            event = std::move(p);
        } else if (f[4] == "shot") {
            ShotRecord s;
            s.match_id = f[0];
            s.seq = *seq;
            s.team_id = f[2];
            s.player_id = f[3];
            s.location = start;
            s.is_goal = flag_value(f[9], line_no, "flag");
            s.assisted_by = assist;
            event = std::move(s);
        } else {
            throw ParseError(line_no, "unknown event kind '" + f[4] + "'");
        }

        auto [it, inserted] = match_index.try_emplace(f[0], logs.size());
        if (inserted) {
            logs.emplace_back();
            logs.back().match_id = f[0];
        }
        logs[it->second].events.push_back(std::move(event));
    }

    if (logs.empty()) throw validation_error("empty event log");
    for (auto& log : logs) validate_match(log);
    return logs;
}

void write_events(std::ostream& out, std::span<const MatchEventLog> logs, bool augmented) {
    out << "match_id,seq,team_id,player_id,kind,x_start,y_start,x_end,y_end,flag,assist_seq";
    if (augmented) out << ",virtual,possession_id";
    out << '\n';
    for (const auto& log : logs) {
        for (const auto& e : log.events) {
            if (const auto* p = std::get_if<PassRecord>(&e)) {
                out << csv::quote(p->match_id) << ',' << p->seq << ',' << csv::quote(p->team_id) << ','
                    << csv::quote(p->player_id) << ",pass," << csv::format_double(p->start.x) << ','
                    << csv::format_double(p->start.y) << ',' << csv::format_double(p->end.x) << ','
                    << csv::format_double(p->end.y) << ',' << (p->successful ? 1 : 0) << ',';
                if (augmented) out << ',' << (p->is_virtual ? 1 : 0) << ',' << p->possession_id;
            } else {
                const auto& s = std::get<ShotRecord>(e);
                out << csv::quote(s.match_id) << ',' << s.seq << ',' << csv::quote(s.team_id) << ','
                    << csv::quote(s.player_id) << ",shot," << csv::format_double(s.location.x) << ','
                    << csv::format_double(s.location.y) << ",,," << (s.is_goal ? 1 : 0) << ',';
                if (s.assisted_by) out << *s.assisted_by;
                if (augmented) out << ",0," << s.possession_id;
            }
            out << '\n';
        }
    }
}

MatchEventLog segment_possessions(MatchEventLog log) {
    int possession = -1;
    const Event* prev = nullptr;
    std::size_t possession_begin = 0;

    auto close_possession = [&](std::size_t end) {
        // end is one past the last event of the possession
        if (end == possession_begin) return;
        const bool ends_in_shot = std::holds_alternative<ShotRecord>(log.events[end - 1]);
        PassRecord* last_pass = nullptr;
        for (std::size_t i = possession_begin; i < end; ++i) {
            if (auto* p = std::get_if<PassRecord>(&log.events[i])) {
                p->is_last_of_possession = false;
                p->possession_ends_in_shot = ends_in_shot;
                last_pass = p;
            }
        }
        if (last_pass != nullptr) last_pass->is_last_of_possession = true;
    };

    for (std::size_t i = 0; i < log.events.size(); ++i) {
        auto& e = log.events[i];
        bool starts_new = prev == nullptr || team_of(*prev) != team_of(e);
        if (prev != nullptr) {
            if (const auto* p = std::get_if<PassRecord>(prev); p != nullptr && !p->successful) starts_new = true;
            if (std::holds_alternative<ShotRecord>(*prev)) starts_new = true;
        }
        if (starts_new) {
            close_possession(i);
            possession_begin = i;
            ++possession;
        }
        std::visit([&](auto& ev) { ev.possession_id = possession; }, e);
        prev = &e;
    }
    close_possession(log.events.size());
    return log;
}

MatchEventLog insert_virtual_passes(MatchEventLog log) {
    log = segment_possessions(std::move(log));

    std::vector<Event> out;
    out.reserve(log.events.size() * 2);
    std::unordered_map<long, long> new_seq;
    long next_seq = 1;

    for (std::size_t i = 0; i < log.events.size(); ++i) {
        const auto& e = log.events[i];
        if (i > 0) {
            const auto* a = std::get_if<PassRecord>(&log.events[i - 1]);
            const auto* b = std::get_if<PassRecord>(&e);
            if (a != nullptr && b != nullptr && a->possession_id == b->possession_id && a->end != b->start) {
                PassRecord v;
                v.match_id = b->match_id;
                v.seq = next_seq++;
                v.team_id = b->team_id;
                v.player_id = b->player_id;
                v.start = a->end;
                v.end = b->start;
                v.successful = true;
                v.is_virtual = true;
                v.possession_id = b->possession_id;
                v.possession_ends_in_shot = b->possession_ends_in_shot;
                out.emplace_back(std::move(v));
            }
        }
        new_seq[seq_of(e)] = next_seq;
        out.push_back(e);
        std::visit([&](auto& ev) { ev.seq = next_seq; }, out.back());
        ++next_seq;
    }

    for (auto& e : out) {
        if (auto* p = std::get_if<PassRecord>(&e); p && p->assist_for_shot) p->assist_for_shot = new_seq.at(*p->assist_for_shot);
        if (auto* s = std::get_if<ShotRecord>(&e); s && s->assisted_by) s->assisted_by = new_seq.at(*s->assisted_by);
    }
    log.events = std::move(out);
    return log;
}

MatchEventLog augment(MatchEventLog log) { return insert_virtual_passes(std::move(log)); }

TeamEventSet build_team_event_sets(std::span<const MatchEventLog> logs, const std::string& team) {
    TeamEventSet set;
    set.team_id = team;
    bool found = false;

    for (const auto& log : logs) {
        if (log.teams[0] != team && log.teams[1] != team) continue;
        found = true;
        std::unordered_map<long, std::size_t> own_index, opp_index;
        for (const auto& e : log.events) {
            const bool own = team_of(e) == team;
            if (const auto* p = std::get_if<PassRecord>(&e)) {
                auto& passes = own ? set.own_passes : set.opp_passes;
                (own ? own_index : opp_index)[p->seq] = passes.size();
                passes.push_back(*p);
            } else {
                const auto& s = std::get<ShotRecord>(e);
                std::optional<std::size_t> assist;
                if (s.assisted_by) {
                    const auto& index = own ? own_index : opp_index;
                    if (auto it = index.find(*s.assisted_by); it != index.end()) assist = it->second;
                }
                (own ? set.own_shots : set.opp_shots).push_back(s);
                (own ? set.own_shot_assists : set.opp_shot_assists).push_back(assist);
            }
        }
    }
    if (!found) throw validation_error("team " + team + " does not appear in any match");
    return set;
}

std::vector<std::string> teams_in(std::span<const MatchEventLog> logs) {
    std::vector<std::string> teams;
    for (const auto& log : logs) {
        for (const auto& t : log.teams) {
            if (std::find(teams.begin(), teams.end(), t) == teams.end()) teams.push_back(t);
        }
    }
    return teams;
}

const char* position_code(PositionGroup g) {
    switch (g) {
        case PositionGroup::goalkeeper: return "GK";
        case PositionGroup::defender: return "DF";
        case PositionGroup::midfielder: return "MF";
        case PositionGroup::attacker: return "FW";
    }
    return "??";
}

std::optional<PositionGroup> parse_position(std::string_view code) {
    for (auto g : kPositionGroups) {
        if (code == position_code(g)) return g;
    }
    return std::nullopt;
}

Roster parse_roster(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!csv::next_line(in, line, line_no)) throw validation_error("empty roster");
    const auto header = csv::split_line(line);
    if (header != std::vector<std::string>{"player_id", "name", "team_id", "position"})
        throw ParseError(line_no, "roster header must be player_id,name,team_id,position");

    Roster roster;
    while (csv::next_line(in, line, line_no)) {
        auto f = csv::split_line(line);
        if (f.size() != 4) throw ParseError(line_no, "expected 4 fields, got " + std::to_string(f.size()));
        auto pos = parse_position(f[3]);
        if (!pos) throw ParseError(line_no, "unknown position '" + f[3] + "'");
        if (f[0].empty()) throw ParseError(line_no, "empty player_id");
        RosterEntry entry{f[0], f[1], f[2], *pos};
        if (!roster.emplace(f[0], std::move(entry)).second)
            throw validation_error("player " + f[0] + " listed twice in roster");
    }
    return roster;
}

void write_roster(std::ostream& out, const Roster& roster) {
    out << "player_id,name,team_id,position\n";
    for (const auto& [id, e] : roster) {
        out << csv::quote(id) << ',' << csv::quote(e.name) << ',' << csv::quote(e.team_id) << ','
            << position_code(e.position) << '\n';
    }
}

}  // namespace qpass
