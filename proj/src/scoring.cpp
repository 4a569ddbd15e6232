#include "qpass/scoring.hpp"

#include <algorithm>
#include <unordered_map>

#include "qpass/csv.hpp"
#include "qpass/error.hpp"

namespace qpass {

QPassRecord qpass_of_pass(const PassRecord& pass, const ClusterAssignment& a, const FieldValues& fv) {
    QPassRecord r;
    r.pass = pass;
    r.successful = pass.successful;
    r.c_s = a.c_s;
    r.c_e = a.c_e;
    r.l_e = a.l_e;
    r.f_s = fv.own(a.c_s);
    r.f_e = fv.own(a.c_e);
    if (pass.successful) {
        r.qpass = r.f_e - r.f_s;
    } else {
        if (!a.l_e)
            throw validation_error("unsuccessful pass " + pass.match_id + "/" + std::to_string(pass.seq) +
                                   " has no l_e cluster");
        r.l_e_value = fv.opp(*a.l_e);
        r.qpass = *r.l_e_value - r.f_s;
    }
    return r;
}

std::vector<QPassRecord> score_team(const TeamEventSet& events, const TeamValuation& valuation) {
    const auto& assignments = valuation.partition.own_assignments;
    if (assignments.size() != events.own_passes.size())
        throw validation_error("valuation does not match the team's passes");
    std::vector<QPassRecord> out;
    out.reserve(events.own_passes.size());
    for (std::size_t i = 0; i < events.own_passes.size(); ++i)
        out.push_back(qpass_of_pass(events.own_passes[i], assignments[i], valuation.values));
    return out;
}

double median(std::vector<double> values) {
    if (values.empty()) throw validation_error("median of an empty set");
    const auto n = values.size();
    const auto mid = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(values.begin(), mid, values.end());
    const double upper = *mid;
    if (n % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), mid);
    return lower + (upper - lower) / 2.0;
}

std::vector<PlayerRanking> rank_players(std::span<const QPassRecord> records, const Roster& roster,
                                        std::size_t min_passes) {
    std::map<std::string, std::vector<double>> by_player;
    std::map<std::string, std::string> team_of_player;
    for (const auto& r : records) {
        if (r.pass.is_virtual) continue;
        by_player[r.pass.player_id].push_back(r.qpass);
        team_of_player.emplace(r.pass.player_id, r.pass.team_id);
    }

    std::vector<PlayerRanking> out;
    for (auto& [player, values] : by_player) {
        if (values.size() < min_passes) continue;
        auto it = roster.find(player);
        if (it == roster.end()) throw validation_error("player " + player + " is missing from the roster");
        PlayerRanking pr;
        pr.player_id = player;
        pr.name = it->second.name;
        pr.team_id = team_of_player[player];
        pr.position = it->second.position;
        pr.pass_count = values.size();
        pr.median_qpass = median(std::move(values));
        out.push_back(std::move(pr));
    }
    // by_player is keyed by player_id, so a stable sort keeps id order on ties
    std::stable_sort(out.begin(), out.end(),
                     [](const PlayerRanking& a, const PlayerRanking& b) { return a.median_qpass > b.median_qpass; });
    return out;
}

std::vector<QPassRecord> top_passes(std::span<const QPassRecord> records, const std::string& player_id,
                                    std::size_t n) {
    std::vector<QPassRecord> mine;
    bool known = false;
    for (const auto& r : records) {
        if (r.pass.player_id != player_id) continue;
        known = true;
        if (!r.pass.is_virtual) mine.push_back(r);
    }
    if (!known) throw validation_error("unknown player " + player_id);
    std::stable_sort(mine.begin(), mine.end(), [](const QPassRecord& a, const QPassRecord& b) {
        if (a.qpass != b.qpass) return a.qpass > b.qpass;
        if (a.pass.seq != b.pass.seq) return a.pass.seq < b.pass.seq;
        return a.pass.match_id < b.pass.match_id;
    });
    if (mine.size() > n) mine.resize(n);
    return mine;
}

UnsuccessfulCdf unsuccessful_cdf(std::span<const QPassRecord> records, const Roster& roster) {
    std::map<PositionGroup, std::vector<double>> values;
    for (const auto& r : records) {
        if (r.successful || r.pass.is_virtual) continue;
        auto it = roster.find(r.pass.player_id);
        if (it == roster.end()) continue;
        values[it->second.position].push_back(r.qpass);
    }

    UnsuccessfulCdf cdf;
    for (auto g : kPositionGroups) {
        auto it = values.find(g);
        if (it == values.end() || it->second.empty()) {
            cdf.omitted.push_back(g);
            continue;
        }
        auto& v = it->second;
        std::sort(v.begin(), v.end());
        CdfSeries series;
        series.count = v.size();
        const double n = static_cast<double>(v.size());
        std::size_t beneficial = 0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            series.points.emplace_back(v[i], static_cast<double>(i + 1) / n);
            if (v[i] > 0.0) ++beneficial;
        }
        series.beneficial_fraction = static_cast<double>(beneficial) / n;
        cdf.groups.emplace(g, std::move(series));
    }
    return cdf;
}

void write_records_csv(std::ostream& out, std::span<const QPassRecord> records) {
    out << "match_id,seq,team_id,player_id,virtual,successful,x_start,y_start,x_end,y_end,c_s,c_e,l_e,f_s,f_e,"
           "l_e_value,qpass\n";
    for (const auto& r : records) {
        const auto& p = r.pass;
        out << csv::quote(p.match_id) << ',' << p.seq << ',' << csv::quote(p.team_id) << ',' << csv::quote(p.player_id)
            << ',' << (p.is_virtual ? 1 : 0) << ',' << (r.successful ? 1 : 0) << ',' << csv::format_double(p.start.x)
            << ',' << csv::format_double(p.start.y) << ',' << csv::format_double(p.end.x) << ','
            << csv::format_double(p.end.y) << ',' << r.c_s << ',' << r.c_e << ',';
        if (r.l_e) out << *r.l_e;
        out << ',' << csv::format_double(r.f_s) << ',' << csv::format_double(r.f_e) << ',';
        if (r.l_e_value) out << csv::format_double(*r.l_e_value);
        out << ',' << csv::format_double(r.qpass) << '\n';
    }
}

void write_rankings_csv(std::ostream& out, std::span<const PlayerRanking> rankings) {
    out << "player,qpass_median,team,position,pass_count\n";
    for (const auto& r : rankings) {
        out << csv::quote(r.name.empty() ? r.player_id : r.name) << ',' << csv::format_double(r.median_qpass) << ','
            << csv::quote(r.team_id) << ',' << position_code(r.position) << ',' << r.pass_count << '\n';
    }
}

void write_cdf_csv(std::ostream& out, const UnsuccessfulCdf& cdf) {
    out << "position,value,cumulative_fraction\n";
    for (const auto& [g, series] : cdf.groups) {
        for (const auto& [v, f] : series.points)
            out << position_code(g) << ',' << csv::format_double(v) << ',' << csv::format_double(f) << '\n';
    }
}

}  // namespace qpass
