#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "qpass/error.hpp"
#include "qpass/pipeline.hpp"

namespace fs = std::filesystem;
using namespace qpass;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("qpass_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

struct Run {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Run cli(const std::string& args, const fs::path& scratch) {
    const auto out = scratch / "stdout.txt";
    const auto err = scratch / "stderr.txt";
    const std::string cmd = std::string("\"") + QPASS_CLI_PATH + "\" " + args + " > \"" + out.string() + "\" 2> \"" +
                            err.string() + "\"";
    const int status = std::system(cmd.c_str());
    Run r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::set<std::string> files_under(const fs::path& root) {
    std::set<std::string> out;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file()) out.insert(fs::relative(e.path(), root).generic_string());
    return out;
}

const char* kSmall = " --cmax 20 --cmin 10 --cstep 10 --min-passes 20 --seed 9";

}  // namespace

TEST_CASE("synth then all on a two-team league") {
    TempDir tmp("all");
    const auto data = tmp.path / "data";
    const auto out = tmp.path / "out";
    auto r = cli("synth --teams 2 --possessions 300 --seed 9 --out \"" + data.string() + "\"", tmp.path);
    REQUIRE(r.code == 0);
    CHECK(fs::exists(data / "events.csv"));
    CHECK(fs::exists(data / "roster.csv"));

    r = cli("all --events \"" + (data / "events.csv").string() + "\" --roster \"" + (data / "roster.csv").string() +
                "\" --out \"" + out.string() + "\"" + kSmall,
            tmp.path);
    INFO(r.err);
    REQUIRE(r.code == 0);
    CHECK(r.out == (out / "manifest.txt").string() + "\n");
    CHECK(r.err.empty());

    const auto files = files_under(out);
    for (const char* f : {"events_augmented.csv", "ingest_summary.csv", "field_values_T01.csv", "field_values_T02.csv",
                          "transitions_T01.csv", "partition_T01.csv", "partition_opp_T01.csv", "scaler_T01.csv",
                          "qpass_records.csv", "rankings.csv", "unsuccessful_cdf.csv", "beneficial_fraction.csv",
                          "svg/partition_T01.svg", "svg/values_own_T01.svg", "svg/values_opp_T02.svg",
                          "svg/unsuccessful_cdf.svg", "manifest.txt"})
        CHECK_MESSAGE(files.count(f) == 1, f);
    bool trajectories = false;
    for (const auto& f : files) trajectories = trajectories || f.rfind("svg/top_passes_", 0) == 0;
    CHECK(trajectories);

    // the manifest lists every other file with its hash
    std::istringstream manifest(slurp(out / "manifest.txt"));
    std::set<std::string> listed;
    std::string path, hash;
    while (manifest >> path >> hash) {
        listed.insert(path);
        CHECK(hash == sha256_hex(out / path));
        CHECK(hash.size() == 64);
    }
    auto expected = files;
    expected.erase("manifest.txt");
    CHECK(listed == expected);

    // the final field values have c_min rows per side
    const auto fv = slurp(out / "field_values_T01.csv");
    CHECK(std::count(fv.begin(), fv.end(), '\n') == 1 + 2 * 10);
    CHECK(slurp(out / "rankings.csv").rfind("player,qpass_median,team,position,pass_count\n", 0) == 0);

    SUBCASE("identical reruns give identical manifests") {
        const auto again = tmp.path / "again";
        r = cli("all --events \"" + (data / "events.csv").string() + "\" --roster \"" +
                    (data / "roster.csv").string() + "\" --out \"" + again.string() + "\"" + kSmall,
                tmp.path);
        REQUIRE(r.code == 0);
        CHECK(slurp(again / "manifest.txt") == slurp(out / "manifest.txt"));
    }
    SUBCASE("config file with flag override") {
        const auto conf = tmp.path / "run.conf";
        std::ofstream(conf) << "events=" << (data / "events.csv").string() << "\nroster="
                            << (data / "roster.csv").string() << "\ncmax=30\ncmin=10\ncstep=10\nmin-passes=20\n"
                            << "out=" << (tmp.path / "conf_out").string() << "\n";
        r = cli("value --config \"" + conf.string() + "\" --cmax 20", tmp.path);
        INFO(r.err);
        REQUIRE(r.code == 0);
        CHECK(fs::exists(tmp.path / "conf_out" / "field_values_T01.csv"));
        CHECK_FALSE(fs::exists(tmp.path / "conf_out" / "rankings.csv"));
    }
    SUBCASE("single-team partition") {
        r = cli("partition --team T02 --events \"" + (data / "events.csv").string() + "\" --roster \"" +
                    (data / "roster.csv").string() + "\" --out \"" + (tmp.path / "p").string() + "\"" + kSmall,
                tmp.path);
        REQUIRE(r.code == 0);
        CHECK(fs::exists(tmp.path / "p" / "partition_T02.csv"));
        CHECK_FALSE(fs::exists(tmp.path / "p" / "partition_T01.csv"));
    }
}

TEST_CASE("failure classes map to exit codes") {
    TempDir tmp("fail");
    const auto data = tmp.path / "data";
    REQUIRE(cli("synth --teams 2 --possessions 100 --out \"" + data.string() + "\"", tmp.path).code == 0);
    const auto events = (data / "events.csv").string();
    const auto roster = (data / "roster.csv").string();

    SUBCASE("missing roster: config error, nothing written") {
        const auto out = tmp.path / "out";
        const auto r = cli("all --events \"" + events + "\" --roster \"" + (tmp.path / "nope.csv").string() +
                               "\" --out \"" + out.string() + "\"",
                           tmp.path);
        CHECK(r.code == 2);
        CHECK(r.out.empty());
        CHECK(r.err.find("config error") != std::string::npos);
        CHECK((!fs::exists(out) || fs::is_empty(out)));
    }
    SUBCASE("unknown flag") {
        CHECK(cli("all --bogus 1", tmp.path).code == 2);
    }
    SUBCASE("no verb") {
        CHECK(cli("", tmp.path).code == 2);
    }
    SUBCASE("invalid step") {
        const auto r = cli("value --events \"" + events + "\" --roster \"" + roster + "\" --cmax 100 --cmin 10 "
                               "--cstep 7 --out \"" + (tmp.path / "o").string() + "\"",
                           tmp.path);
        CHECK(r.code == 2);
    }
    SUBCASE("malformed events: parse error") {
        const auto bad = tmp.path / "bad.csv";
        std::ofstream(bad) << "match_id,seq,team_id,player_id,kind,x_start,y_start,x_end,y_end,flag\n"
                              "M1,1,TA,P,pass,oops,1,2,2,1\n";
        const auto r = cli("ingest --events \"" + bad.string() + "\" --roster \"" + roster + "\" --out \"" +
                               (tmp.path / "o").string() + "\"",
                           tmp.path);
        CHECK(r.code == 3);
        CHECK(r.err.find("line 2") != std::string::npos);
    }
    SUBCASE("too many clusters for the data: validation error") {
        const auto r = cli("value --events \"" + events + "\" --roster \"" + roster +
                               "\" --cmax 100000 --cmin 100000 --out \"" + (tmp.path / "o").string() + "\"",
                           tmp.path);
        CHECK(r.code == 3);
    }
}

TEST_CASE("library entry point") {
    TempDir tmp("lib");
    RunConfig cfg;
    cfg.out = tmp.path / "synth";
    cfg.synth.possessions_per_match = 150;
    auto bundle = run_pipeline(cfg, Verb::synth);
    CHECK(bundle.files == std::vector<std::string>{"events.csv", "roster.csv"});

    cfg.events = cfg.out / "events.csv";
    cfg.roster = cfg.out / "roster.csv";
    cfg.out = tmp.path / "ingest";
    bundle = run_pipeline(cfg, Verb::ingest);
    CHECK(bundle.manifest == cfg.out / "manifest.txt");
    CHECK(std::find(bundle.files.begin(), bundle.files.end(), "events_augmented.csv") != bundle.files.end());

    CHECK(parse_verb("report") == Verb::report);
    CHECK_FALSE(parse_verb("explode").has_value());
    CHECK(exit_code(ErrorKind::config) == 2);
    CHECK(exit_code(ErrorKind::parse) == 3);
    CHECK(exit_code(ErrorKind::validation) == 3);
    CHECK(exit_code(ErrorKind::numerical) == 4);
    CHECK(exit_code(ErrorKind::io) == 5);
}
