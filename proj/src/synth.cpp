#include "qpass/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <random>

#include "qpass/error.hpp"
#include "qpass/partition.hpp"

namespace qpass {

namespace {

constexpr std::array<std::size_t, 4> kSquad = {1, 4, 4, 2};  // GK, DF, MF, FW

struct PassPrior {
    double mean_dx;
    double sd_dx;
    double sd_dy;
};

// Goalkeepers kick long, defenders build up, midfielders progress a little,
// forwards mostly lay off sideways or backwards.
constexpr std::array<PassPrior, 4> kPriors = {{
    {34.0, 9.0, 18.0},
    {13.0, 10.0, 14.0},
    {5.0, 12.0, 15.0},
    {-4.0, 10.0, 14.0},
}};

std::string team_name(std::size_t t) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "T%02zu", t + 1);
    return buf;
}

std::string player_name(std::size_t t, PositionGroup g, std::size_t i) {
    return team_name(t) + "_" + position_code(g) + std::to_string(i + 1);
}

double round1(double v) { return std::round(v * 10.0) / 10.0; }

Point on_pitch(double x, double y) { return clamp_to_pitch({round1(x), round1(y)}); }

/// Probability of shooting right after receiving the ball at `p`.
double zone_shot_probability(Point p) {
    const bool central = p.y > 21.0 && p.y < 79.0;
    if (p.x > 83.0 && central) return 0.29;
    if (p.x > 75.0) return 0.068;
    if (p.x > 62.0) return 0.008;
    return 0.0;
}

class MatchSimulator {
public:
    MatchSimulator(const SyntheticLeagueSpec& spec, std::array<std::size_t, 2> teams, std::string match_id,
                   std::uint64_t seed)
        : spec_(spec), teams_(teams), rng_(seed) {
        log_.match_id = std::move(match_id);
        log_.teams = {team_name(teams[0]), team_name(teams[1])};
    }

    MatchEventLog run() {
        int side = 0;
        Point start{50.0, 50.0};
        for (std::size_t i = 0; i < spec_.possessions_per_match; ++i) {
            start = possession(side, start);
            side = 1 - side;
        }
        return std::move(log_);
    }

private:
    double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng_); }
    double normal(double mean, double sd) { return std::normal_distribution<double>(mean, sd)(rng_); }

    PositionGroup group_at(Point p) {
        int g = p.x < 12.0 ? 0 : p.x < 40.0 ? 1 : p.x < 68.0 ? 2 : 3;
        const double u = unit();
        if (u < 0.08 && g > 0) --g;
        else if (u > 0.92 && g < 3 && g > 0) ++g;
        return static_cast<PositionGroup>(g);
    }

    std::string player(int side, PositionGroup g) {
        const auto n = kSquad[static_cast<std::size_t>(g)];
        std::uniform_int_distribution<std::size_t> pick(0, n - 1);
        return player_name(teams_[static_cast<std::size_t>(side)], g, pick(rng_));
    }

    PassRecord& emit_pass(int side, const std::string& who, Point from, Point to, bool ok) {
        PassRecord p;
        p.match_id = log_.match_id;
        p.seq = next_seq_++;
        p.team_id = log_.teams[static_cast<std::size_t>(side)];
        p.player_id = who;
        p.start = from;
        p.end = to;
        p.successful = ok;
        log_.events.emplace_back(std::move(p));
        return std::get<PassRecord>(log_.events.back());
    }

    /// Plays one possession for `side` from `at` (in that side's frame) and returns
    /// where the other side starts the next one, in its own frame.
    Point possession(int side, Point at) {
        const TeamStyle style = spec_.style(teams_[static_cast<std::size_t>(side)]);
        for (;;) {
            const PositionGroup g = group_at(at);
            const std::string who = player(side, g);
            const bool deep = g == PositionGroup::goalkeeper || g == PositionGroup::defender;

            if (deep && at.x < 33.0 && unit() < style.clearance_rate) {
                const Point to = on_pitch(55.0 + 30.0 * unit(), 10.0 + 80.0 * unit());
                emit_pass(side, who, at, to, false);
                return mirror(to);
            }

            const auto& prior = kPriors[static_cast<std::size_t>(g)];
            const Point to = on_pitch(at.x + normal(prior.mean_dx + style.progress_bias, prior.sd_dx),
                                      at.y + normal(0.0, prior.sd_dy));
            const double exposure = 0.7 + 0.6 * to.x / 100.0;
            double fail = 1.0 - std::pow(1.0 - style.turnover_rate, exposure);
            if (at.x < 33.0) fail += (1.0 - fail) * style.build_up_risk;
            if (unit() < fail) {
                emit_pass(side, who, at, to, false);
                return mirror(to);
            }
            const long pass_seq = emit_pass(side, who, at, to, true).seq;

            const Point carry = on_pitch(to.x + normal(1.5, 2.0), to.y + normal(0.0, 2.0));
            if (unit() < style.shot_propensity * zone_shot_probability(to)) {
                ShotRecord s;
                s.match_id = log_.match_id;
                s.seq = next_seq_++;
                s.team_id = log_.teams[static_cast<std::size_t>(side)];
                s.player_id = player(side, group_at(to));
                s.location = carry;
                s.is_goal = unit() < spec_.goal_conversion;
                s.assisted_by = pass_seq;
                const bool goal = s.is_goal;
                log_.events.emplace_back(std::move(s));
                return goal ? Point{50.0, 50.0} : Point{5.0, 50.0};
            }
            if (unit() > style.retention) return mirror(carry);
            at = carry;
        }
    }

    const SyntheticLeagueSpec& spec_;
    std::array<std::size_t, 2> teams_;
    std::mt19937_64 rng_;
    MatchEventLog log_;
    long next_seq_ = 1;
};

bool probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

void SyntheticLeagueSpec::validate() const {
    if (teams < 2) throw validation_error("synthetic league needs at least 2 teams");
    if (matches_per_pairing == 0) throw validation_error("matches_per_pairing must be positive");
    if (!probability(goal_conversion)) throw validation_error("goal_conversion must lie in [0, 1]");
    if (!styles.empty() && styles.size() != teams)
        throw validation_error("expected one style per team (" + std::to_string(teams) + "), got " +
                               std::to_string(styles.size()));
    for (const auto& s : styles) {
        if (!probability(s.retention) || !probability(s.turnover_rate) || !probability(s.build_up_risk) ||
            !probability(s.clearance_rate))
            throw validation_error("team style probabilities must lie in [0, 1]");
        if (!(s.shot_propensity >= 0.0)) throw validation_error("shot_propensity must be non-negative");
    }
}

TeamStyle SyntheticLeagueSpec::style(std::size_t team) const { return styles.empty() ? TeamStyle{} : styles[team]; }

SyntheticLeague generate_synthetic_league(const SyntheticLeagueSpec& spec) {
    spec.validate();
    SyntheticLeague league;

    for (std::size_t t = 0; t < spec.teams; ++t) {
        for (auto g : kPositionGroups) {
            for (std::size_t i = 0; i < kSquad[static_cast<std::size_t>(g)]; ++i) {
                RosterEntry e;
                e.player_id = player_name(t, g, i);
                e.name = e.player_id;
                e.team_id = team_name(t);
                e.position = g;
                league.roster.emplace(e.player_id, e);
            }
        }
    }

    std::uint64_t match_no = 0;
    for (std::size_t round = 0; round < spec.matches_per_pairing; ++round) {
        for (std::size_t a = 0; a < spec.teams; ++a) {
            for (std::size_t b = a + 1; b < spec.teams; ++b) {
                const std::array<std::size_t, 2> sides = round % 2 == 0 ? std::array{a, b} : std::array{b, a};
                char id[32];
                std::snprintf(id, sizeof(id), "M%04llu", static_cast<unsigned long long>(match_no + 1));
                MatchSimulator sim(spec, sides, id, mix_seed(spec.seed, match_no));
                league.matches.push_back(sim.run());
                ++match_no;
            }
        }
    }
    return league;
}

SyntheticLeagueSpec paper_scale_spec(std::uint64_t seed) {
    SyntheticLeagueSpec spec;
    spec.teams = 20;
    spec.matches_per_pairing = 2;
    spec.possessions_per_match = 200;
    spec.seed = seed;
    return spec;
}

LeagueTally tally(const std::vector<MatchEventLog>& matches) {
    LeagueTally t;
    for (const auto& m : matches) {
        int last = -1;
        for (const auto& e : segment_possessions(m).events) {
            if (const auto* p = std::get_if<PassRecord>(&e)) {
                if (!p->is_virtual) ++t.passes;
            } else {
                ++t.shots;
                if (std::get<ShotRecord>(e).is_goal) ++t.goals;
            }
            if (possession_of(e) != last) {
                ++t.possessions;
                last = possession_of(e);
            }
        }
    }
    return t;
}

}  // namespace qpass
