#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>
#include <sstream>

#include "fixtures.hpp"
#include "qpass/error.hpp"
#include "qpass/synth.hpp"

using namespace qpass;

namespace {

std::string csv_of(const SyntheticLeague& league) {
    std::ostringstream out;
    write_events(out, league.matches);
    write_roster(out, league.roster);
    return out.str();
}

double shot_share(const std::vector<MatchEventLog>& logs, const std::string& team) {
    std::size_t possessions = 0, with_shot = 0;
    for (const auto& m : logs) {
        const auto seg = segment_possessions(m);
        long last = -1;
        for (const auto& e : seg.events) {
            if (team_of(e) != team || possession_of(e) == last) continue;
            last = possession_of(e);
            ++possessions;
        }
        for (const auto& e : seg.events)
            if (const auto* s = std::get_if<ShotRecord>(&e); s && s->team_id == team) ++with_shot;
    }
    return static_cast<double>(with_shot) / static_cast<double>(possessions);
}

}  // namespace

TEST_CASE("byte-identical output for a fixed seed") {
    SyntheticLeagueSpec spec;
    spec.seed = 42;
    CHECK(csv_of(generate_synthetic_league(spec)) == csv_of(generate_synthetic_league(spec)));
    SyntheticLeagueSpec other = spec;
    other.seed = 43;
    CHECK(csv_of(generate_synthetic_league(spec)) != csv_of(generate_synthetic_league(other)));
}

TEST_CASE("invalid specs") {
    SyntheticLeagueSpec spec;
    spec.teams = 1;
    CHECK_THROWS_AS(spec.validate(), Error);
    spec = {};
    spec.styles.assign(2, TeamStyle{});
    spec.styles[1].turnover_rate = 1.5;
    CHECK_THROWS_AS(generate_synthetic_league(spec), Error);
    spec.styles[1].turnover_rate = 0.1;
    spec.styles[1].retention = -0.1;
    CHECK_THROWS_AS(generate_synthetic_league(spec), Error);
    spec = {};
    spec.styles.assign(3, TeamStyle{});
    CHECK_THROWS_AS(spec.validate(), Error);
}

TEST_CASE("turnover rate 1 gives single-pass possessions") {
    SyntheticLeagueSpec spec;
    spec.styles.assign(2, TeamStyle{});
    for (auto& s : spec.styles) s.turnover_rate = 1.0;
    const auto league = generate_synthetic_league(spec);
    for (const auto& m : league.matches) {
        const auto seg = segment_possessions(m);
        std::map<long, int> per_possession;
        for (const auto& e : seg.events) {
            const auto* p = std::get_if<PassRecord>(&e);
            REQUIRE(p != nullptr);
            CHECK_FALSE(p->successful);
            ++per_possession[p->possession_id];
        }
        for (const auto& [id, n] : per_possession) CHECK(n == 1);
    }
}

TEST_CASE("generated logs satisfy the event invariants") {
    const auto league = generate_synthetic_league(SyntheticLeagueSpec{4, 1, 150});
    CHECK(league.matches.size() == 6);
    CHECK(league.roster.size() == 4 * 11);
    std::ostringstream out;
    write_events(out, league.matches);
    std::istringstream in(out.str());
    const auto parsed = parse_events(in);  // validates seq order, two teams, assists
    CHECK(parsed.size() == league.matches.size());

    for (const auto& m : testing::augmented(league.matches)) {
        const PassRecord* prev = nullptr;
        for (const auto& e : m.events) {
            const auto* p = std::get_if<PassRecord>(&e);
            if (!p) {
                prev = nullptr;
                continue;
            }
            for (double v : {p->start.x, p->start.y, p->end.x, p->end.y}) CHECK((v >= 0.0 && v <= 100.0));
            if (prev && prev->possession_id == p->possession_id) CHECK(p->start == prev->end);
            CHECK(league.roster.count(p->player_id) == 1);
            CHECK(league.roster.at(p->player_id).team_id == p->team_id);
            prev = p;
        }
    }
}

TEST_CASE("positional priors: goalkeepers pass from deepest, forwards from highest") {
    const auto league = generate_synthetic_league(SyntheticLeagueSpec{4, 1, 300});
    std::map<PositionGroup, std::pair<double, int>> acc;
    for (const auto& m : league.matches)
        for (const auto& e : m.events)
            if (const auto* p = std::get_if<PassRecord>(&e)) {
                auto& [sum, n] = acc[league.roster.at(p->player_id).position];
                sum += p->start.x;
                ++n;
            }
    auto mean = [&](PositionGroup g) { return acc[g].first / acc[g].second; };
    CHECK(mean(PositionGroup::goalkeeper) < mean(PositionGroup::defender));
    CHECK(mean(PositionGroup::defender) < mean(PositionGroup::midfielder));
    CHECK(mean(PositionGroup::midfielder) < mean(PositionGroup::attacker));
}

TEST_CASE("raising shot propensity raises the share of possessions ending in shots") {
    double prev = -1.0;
    for (double prop : {0.25, 0.5, 1.0, 2.0, 3.0}) {
        SyntheticLeagueSpec spec{2, 2, 400};
        spec.styles.assign(2, TeamStyle{});
        spec.styles[0].shot_propensity = prop;
        const auto share = shot_share(generate_synthetic_league(spec).matches, "T01");
        CHECK(share > prev);
        prev = share;
    }
}

TEST_CASE("paper-scale spec reaches the published magnitudes") {
    const auto spec = paper_scale_spec(42);
    CHECK(spec.teams == 20);
    const auto t = tally(generate_synthetic_league(spec).matches);
    CHECK(t.passes == doctest::Approx(330000).epsilon(0.03));
    CHECK(t.shots == doctest::Approx(8600).epsilon(0.03));
    CHECK(t.goals < t.shots);
}
