// qpass: command-line front end for the pass valuation pipeline.
//
// Exit codes: 0 success, 1 internal error, 2 usage or configuration error,
// 3 malformed or invalid input data, 4 numerical failure, 5 I/O failure.
// Diagnostics go to stderr; stdout carries only the manifest path.

#include <iostream>

#include <CLI11.hpp>

#include "qpass/pipeline.hpp"

namespace {

const char* kind_name(qpass::ErrorKind kind) {
    switch (kind) {
        case qpass::ErrorKind::parse: return "parse";
        case qpass::ErrorKind::validation: return "validation";
        case qpass::ErrorKind::config: return "config";
        case qpass::ErrorKind::numerical: return "numerical";
        case qpass::ErrorKind::io: return "io";
    }
    return "error";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"QPass: team-specific field values and merit-based pass evaluation"};
    app.set_config("--config", "", "Flat key=value file; every key can be overridden by the flag of the same name");
    app.require_subcommand(1);

    qpass::RunConfig cfg;
    std::string events, roster, out = "out";
    auto& part = cfg.valuation.partition;
    bool paper_scale = false;

    app.add_option("--events", events, "Event CSV");
    app.add_option("--roster", roster, "Roster CSV (player_id,name,team_id,position)");
    app.add_option("--out", out, "Output directory")->capture_default_str();
    app.add_option("--team", cfg.team, "Restrict partition/value to one team");
    app.add_option("--s", cfg.valuation.s, "Value of taking a shot")->capture_default_str();
    app.add_option("--cmax", part.c_max, "Initial cluster count")->capture_default_str();
    app.add_option("--cmin", part.c_min, "Final cluster count")->capture_default_str();
    app.add_option("--cstep", part.c_step, "Cluster count decrement")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    app.add_option("--min-passes", cfg.min_passes, "Minimum passes for a ranked player")->capture_default_str();
    app.add_option("--top-n", cfg.top_n, "Passes per player in trajectory figures")->capture_default_str();
    app.add_option("--threads", cfg.threads, "Worker threads for per-team valuation (0 = all cores)")
        ->capture_default_str();

    app.add_option("--teams", cfg.synth.teams, "synth: number of teams")->capture_default_str();
    app.add_option("--matches-per-pairing", cfg.synth.matches_per_pairing, "synth: matches per pair of teams")
        ->capture_default_str();
    app.add_option("--possessions", cfg.synth.possessions_per_match, "synth: possessions per match")
        ->capture_default_str();
    app.add_option("--turnover-rate", cfg.synth_style.turnover_rate, "synth: base pass failure probability")
        ->capture_default_str();
    app.add_option("--clearance-rate", cfg.synth_style.clearance_rate, "synth: long lost-ball rate from own third")
        ->capture_default_str();
    app.add_flag("--paper-scale", paper_scale, "synth: 20 teams, about 330k passes and 8.6k shots");

    const std::pair<const char*, const char*> verbs[] = {
        {"ingest", "Validate events, insert virtual passes, segment possessions"},
        {"partition", "Build the first (spatial) clustering of each team"},
        {"value", "Run the coarsening loop and solve field values"},
        {"score", "Score every pass"},
        {"rank", "Rank players by median QPass"},
        {"report", "Render figures and distribution tables"},
        {"synth", "Generate a synthetic league (events.csv, roster.csv)"},
        {"all", "ingest + value + score + rank + report"},
    };
    for (const auto& [name, help] : verbs) app.add_subcommand(name, help)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    cfg.events = events;
    cfg.roster = roster;
    cfg.out = out;
    cfg.synth.seed = cfg.seed;
    if (paper_scale) {
        auto spec = qpass::paper_scale_spec(cfg.seed);
        cfg.synth.teams = spec.teams;
        cfg.synth.matches_per_pairing = spec.matches_per_pairing;
        cfg.synth.possessions_per_match = spec.possessions_per_match;
    }

    const auto verb = qpass::parse_verb(app.get_subcommands().front()->get_name());
    try {
        const auto bundle = qpass::run_pipeline(cfg, *verb);
        std::cout << bundle.manifest.string() << '\n';
        return 0;
    } catch (const qpass::Error& e) {
        std::cerr << "qpass: " << kind_name(e.kind()) << " error: " << e.what() << '\n';
        return qpass::exit_code(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "qpass: internal error: " << e.what() << '\n';
        return 1;
    }
}
