#include "qpass/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <openssl/evp.h>

#include "qpass/csv.hpp"
#include "qpass/events.hpp"
#include "qpass/partition.hpp"
#include "qpass/scoring.hpp"
#include "qpass/svg.hpp"

namespace fs = std::filesystem;

namespace qpass {

std::optional<Verb> parse_verb(std::string_view name) {
    static constexpr std::pair<std::string_view, Verb> verbs[] = {
        {"ingest", Verb::ingest}, {"partition", Verb::partition}, {"value", Verb::value}, {"score", Verb::score},
        {"rank", Verb::rank},     {"report", Verb::report},       {"synth", Verb::synth}, {"all", Verb::all}};
    for (const auto& [n, v] : verbs)
        if (n == name) return v;
    return std::nullopt;
}

int exit_code(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::config: return 2;
        case ErrorKind::parse: return 3;
        case ErrorKind::validation: return 3;
        case ErrorKind::numerical: return 4;
        case ErrorKind::io: return 5;
    }
    return 1;
}

std::string sha256_hex(const fs::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw io_error("cannot read " + file.string());
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw io_error("sha256 unavailable");
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof(buf));
        if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx.get(), digest, &len);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xF]);
    }
    return out;
}

namespace {

std::string file_token(const std::string& id) {
    std::string out;
    for (char ch : id) out.push_back(std::isalnum(static_cast<unsigned char>(ch)) || ch == '-' || ch == '_' ? ch : '_');
    return out;
}

class Writer {
public:
    explicit Writer(fs::path root) : root_(std::move(root)) {}

    void text(const std::string& rel, const std::string& content) {
        const fs::path p = root_ / rel;
        fs::create_directories(p.parent_path());
        std::ofstream out(p, std::ios::binary);
        if (!out) throw io_error("cannot write " + p.string());
        out << content;
        if (!out) throw io_error("write failed for " + p.string());
    }

    template <typename F>
    void stream(const std::string& rel, F&& fill) {
        std::ostringstream os;
        fill(os);
        text(rel, os.str());
    }

private:
    fs::path root_;
};

std::vector<MatchEventLog> load_events(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open events file " + path.string());
    auto logs = parse_events(in);
    for (auto& log : logs) log = augment(std::move(log));
    return logs;
}

Roster load_roster(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open roster file " + path.string());
    return parse_roster(in);
}

/// Runs `fn(i)` for i in [0, n) on up to `threads` workers; rethrows the first failure by index.
template <typename F>
void parallel_for(std::size_t n, std::size_t threads, F&& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, n);
    std::vector<std::exception_ptr> errors(n);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

void write_manifest(const fs::path& root, ReportBundle& bundle) {
    bundle.files.clear();
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        const auto rel = fs::relative(entry.path(), root).generic_string();
        if (rel == "manifest.txt") continue;
        bundle.files.push_back(rel);
    }
    std::sort(bundle.files.begin(), bundle.files.end());
    std::ostringstream os;
    for (const auto& rel : bundle.files) os << rel << ' ' << sha256_hex(root / rel) << '\n';
    bundle.manifest = root / "manifest.txt";
    std::ofstream out(bundle.manifest, std::ios::binary);
    if (!out) throw io_error("cannot write " + bundle.manifest.string());
    out << os.str();
}

}  // namespace

ReportBundle run_pipeline(const RunConfig& cfg, Verb verb) {
    const bool needs_events = verb != Verb::synth;
    const bool needs_roster = verb == Verb::rank || verb == Verb::report || verb == Verb::all;
    if (needs_events) {
        if (cfg.events.empty()) throw config_error("--events is required");
        if (!fs::is_regular_file(cfg.events)) throw config_error("events file not found: " + cfg.events.string());
    }
    if (needs_roster) {
        if (cfg.roster.empty()) throw config_error("--roster is required");
        if (!fs::is_regular_file(cfg.roster)) throw config_error("roster file not found: " + cfg.roster.string());
    }
    if (cfg.min_passes == 0) throw config_error("min_passes must be positive");
    cfg.valuation.validate();

    auto open_output = [&] {
        std::error_code ec;
        fs::create_directories(cfg.out, ec);
        if (ec) throw io_error("cannot create output directory " + cfg.out.string() + ": " + ec.message());
        return Writer(cfg.out);
    };
    ReportBundle bundle;

    if (verb == Verb::synth) {
        Writer w = open_output();
        auto spec = cfg.synth;
        if (spec.styles.empty()) spec.styles.assign(spec.teams, cfg.synth_style);
        const auto league = generate_synthetic_league(spec);
        w.stream("events.csv", [&](std::ostream& os) { write_events(os, league.matches); });
        w.stream("roster.csv", [&](std::ostream& os) { write_roster(os, league.roster); });
        write_manifest(cfg.out, bundle);
        return bundle;
    }

    // Read everything up front so input errors leave no partial outputs.
    const auto logs = load_events(cfg.events);
    std::optional<Roster> roster;
    if (needs_roster) roster = load_roster(cfg.roster);

    Writer w = open_output();

    std::vector<std::string> teams = teams_in(logs);
    if (!cfg.team.empty()) {
        if (std::find(teams.begin(), teams.end(), cfg.team) == teams.end())
            throw validation_error("team " + cfg.team + " does not appear in any match");
        if (verb == Verb::partition || verb == Verb::value) teams = {cfg.team};
    }

    if (verb == Verb::ingest || verb == Verb::all) {
        w.stream("events_augmented.csv", [&](std::ostream& os) { write_events(os, logs, true); });
        w.stream("ingest_summary.csv", [&](std::ostream& os) {
            os << "match_id,team_a,team_b,passes,virtual_passes,shots,goals,possessions\n";
            for (const auto& log : logs) {
                std::size_t passes = 0, virt = 0, shots = 0, goals = 0;
                int possessions = 0;
                for (const auto& e : log.events) {
                    if (const auto* p = std::get_if<PassRecord>(&e))
                        (p->is_virtual ? virt : passes)++;
                    else {
                        ++shots;
                        goals += std::get<ShotRecord>(e).is_goal ? 1 : 0;
                    }
                    possessions = std::max(possessions, possession_of(e) + 1);
                }
                os << log.match_id << ',' << log.teams[0] << ',' << log.teams[1] << ',' << passes << ',' << virt
                   << ',' << shots << ',' << goals << ',' << possessions << '\n';
            }
        });
    }

    std::vector<TeamEventSet> sets(teams.size());
    for (std::size_t i = 0; i < teams.size(); ++i) sets[i] = build_team_event_sets(logs, teams[i]);

    auto team_seed = [&](const std::string& team) {
        std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
        for (unsigned char ch : team) h = (h ^ ch) * 1099511628211ULL;
        return mix_seed(cfg.seed, h);
    };

    if (verb == Verb::partition) {
        for (std::size_t i = 0; i < teams.size(); ++i) {
            PartitionConfig pc = cfg.valuation.partition;
            pc.seed = team_seed(teams[i]);
            const auto part = build_partition(sets[i], nullptr, pc.c_max, pc);
            const auto tok = file_token(teams[i]);
            w.stream("partition_" + tok + ".csv", [&](std::ostream& os) { write_partition_csv(os, part.own); });
            w.stream("partition_opp_" + tok + ".csv", [&](std::ostream& os) { write_partition_csv(os, part.opp); });
            w.stream("scaler_" + tok + ".csv", [&](std::ostream& os) { write_scaler_csv(os, part.own.scaler); });
        }
        write_manifest(cfg.out, bundle);
        return bundle;
    }
    if (verb == Verb::ingest) {
        write_manifest(cfg.out, bundle);
        return bundle;
    }

    // value and beyond
    std::vector<TeamValuation> valuations(teams.size());
    parallel_for(teams.size(), cfg.threads, [&](std::size_t i) {
        ValuationConfig vc = cfg.valuation;
        vc.partition.seed = team_seed(teams[i]);
        valuations[i] = run_team_valuation(sets[i], vc);
    });
    for (std::size_t i = 0; i < teams.size(); ++i) {
        const auto tok = file_token(teams[i]);
        const auto& v = valuations[i];
        w.stream("field_values_" + tok + ".csv", [&](std::ostream& os) { write_field_values_csv(os, v.values); });
        w.stream("partition_" + tok + ".csv", [&](std::ostream& os) { write_partition_csv(os, v.partition.own); });
        w.stream("partition_opp_" + tok + ".csv", [&](std::ostream& os) { write_partition_csv(os, v.partition.opp); });
        w.stream("scaler_" + tok + ".csv", [&](std::ostream& os) { write_scaler_csv(os, v.partition.own.scaler); });
        w.stream("transitions_" + tok + ".csv", [&](std::ostream& os) { write_transitions_csv(os, v.transitions); });
    }
    if (verb == Verb::value) {
        write_manifest(cfg.out, bundle);
        return bundle;
    }

    std::vector<QPassRecord> records;
    for (std::size_t i = 0; i < teams.size(); ++i) {
        auto r = score_team(sets[i], valuations[i]);
        records.insert(records.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
    }
    w.stream("qpass_records.csv", [&](std::ostream& os) { write_records_csv(os, records); });
    if (verb == Verb::score) {
        write_manifest(cfg.out, bundle);
        return bundle;
    }

    const auto rankings = rank_players(records, *roster, cfg.min_passes);
    w.stream("rankings.csv", [&](std::ostream& os) { write_rankings_csv(os, rankings); });
    if (verb == Verb::rank) {
        write_manifest(cfg.out, bundle);
        return bundle;
    }

    // report
    for (std::size_t i = 0; i < teams.size(); ++i) {
        const auto tok = file_token(teams[i]);
        const auto& v = valuations[i];
        w.text("svg/partition_" + tok + ".svg",
               svg::render_partition_map(v.partition, svg::Side::own, "Field partition: " + teams[i]));
        w.text("svg/values_own_" + tok + ".svg",
               svg::render_value_heatmap(v.partition, v.values, svg::Side::own, "Ball possession of " + teams[i]));
        w.text("svg/values_opp_" + tok + ".svg",
               svg::render_value_heatmap(v.partition, v.values, svg::Side::opp,
                                         "Ball at the opponents of " + teams[i] + " (opponent frame)"));
    }

    const auto cdf = unsuccessful_cdf(records, *roster);
    w.stream("unsuccessful_cdf.csv", [&](std::ostream& os) { write_cdf_csv(os, cdf); });
    w.stream("beneficial_fraction.csv", [&](std::ostream& os) {
        os << "position,unsuccessful_passes,beneficial_fraction\n";
        for (const auto& [g, s] : cdf.groups)
            os << position_code(g) << ',' << s.count << ',' << csv::format_double(s.beneficial_fraction) << '\n';
    });
    w.text("svg/unsuccessful_cdf.svg", svg::render_cdf(cdf, "QPass of unsuccessful passes"));

    // best and worst ranked player of each position
    std::vector<std::string> featured;
    for (auto g : kPositionGroups) {
        const PlayerRanking* first = nullptr;
        const PlayerRanking* last = nullptr;
        for (const auto& r : rankings) {
            if (r.position != g) continue;
            if (!first) first = &r;
            last = &r;
        }
        for (const auto* r : {first, last})
            if (r && std::find(featured.begin(), featured.end(), r->player_id) == featured.end())
                featured.push_back(r->player_id);
    }
    for (const auto& player : featured) {
        const auto tok = file_token(player);
        const auto best = top_passes(records, player, cfg.top_n);
        w.text("svg/top_passes_" + tok + ".svg",
               svg::render_pass_trajectories(best, "Top " + std::to_string(cfg.top_n) + " passes: " + player));
        std::vector<QPassRecord> lost;
        for (const auto& r : records)
            if (r.pass.player_id == player && !r.pass.is_virtual && !r.successful && r.qpass > 0) lost.push_back(r);
        w.text("svg/beneficial_lost_" + tok + ".svg",
               svg::render_pass_trajectories(lost, "Unsuccessful passes that raised the field value: " + player));
    }

    write_manifest(cfg.out, bundle);
    return bundle;
}

}  // namespace qpass
