#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "whistle/cli.hpp"
#include "whistle/csv.hpp"
#include "whistle/ingest.hpp"
#include "whistle/synth.hpp"
#include "whistle/text.hpp"

using namespace whistle;
namespace fs = std::filesystem;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    std::ostringstream out, err;
    Run r;
    r.code = cli::run(args, out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

class TempDir {
public:
    TempDir() {
        path_ = fs::temp_directory_path() / ("whistle_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name, const std::string& content) const {
        const auto p = path_ / name;
        std::ofstream(p, std::ios::binary) << content;
        return p.string();
    }
    std::string path(const std::string& name) const { return (path_ / name).string(); }
    const fs::path& root() const { return path_; }

private:
    fs::path path_;
    static inline int counter_ = 0;
};

std::string synthetic_l2m(std::size_t games, double bias) {
    SynthSpec spec = default_synth_spec();
    spec.n_games = games;
    spec.seed = 12;
    spec.injected_bias["home"] = bias;
    return to_canonical_l2m(generate(spec).events);
}

std::string body(const std::string& report) {
    const auto pos = report.find("\n\n");
    return pos == std::string::npos ? report : report.substr(pos + 2);
}

std::string metadata_value(const std::string& report, const std::string& key) {
    std::istringstream in(report);
    std::string line;
    const std::string prefix = "# " + key + ": ";
    while (std::getline(in, line)) {
        if (line.starts_with(prefix)) return line.substr(prefix.size());
    }
    return {};
}

}  // namespace

TEST_CASE("usage errors exit 2") {
    CHECK(run({}).code == cli::kExitUsage);
    CHECK(run({"bogus"}).code == cli::kExitUsage);
    CHECK(run({"home"}).code == cli::kExitUsage);  // --l2m is required
    CHECK(run({"home", "--l2m", "x.csv", "--replicates", "0"}).code == cli::kExitUsage);
    CHECK(run({"home", "--l2m", "x.csv", "--format", "xml"}).code == cli::kExitUsage);
    CHECK(run({"home", "--l2m", "x.csv", "--frobnicate"}).code == cli::kExitUsage);
    const auto v = run({"--version"});
    CHECK(v.code == cli::kExitOk);
    CHECK(v.out.find(cli::kToolVersion) != std::string::npos);
}

TEST_CASE("data errors exit 3 with a structured message") {
    TempDir dir;
    const auto empty = dir.file("empty.csv", "");
    const auto r = run({"rates", "--l2m", empty, "-o", "-"});
    CHECK(r.code == cli::kExitData);
    const auto err = nlohmann::json::parse(r.err);
    CHECK(err["error"] == "no_data");
    CHECK(err["message"].get<std::string>().find("no data") != std::string::npos);

    const auto missing = run({"home", "--l2m", dir.path("nope.csv"), "-o", "-"});
    CHECK(missing.code == cli::kExitData);
    CHECK(nlohmann::json::parse(missing.err)["error"] == "config");

    const auto bad_season = run({"home", "--l2m", dir.file("l2m.csv", synthetic_l2m(5, 0.0)), "--seasons",
                                 "2022-2015", "-o", "-"});
    CHECK(bad_season.code == cli::kExitUsage);
}

TEST_CASE("race data gaps list the affected games") {
    TempDir dir;
    const auto officials = dir.file("off.csv", "game_id,referee\ng1,A\ng1,B\ng1,C\n");
    const auto box = dir.file("box.csv", "game_id,player,minutes\ng0,p,30\n");
    const auto demo = dir.file("demo.csv", "person,role,race\nA,referee,white\nB,referee,black\nC,referee,white\np,player,black\n");
    const auto tech = dir.file("tech.csv", "game_id,referee,player,description\ng1,A,p,unsportsmanlike\n");
    const auto r = run({"race", "--officials", officials, "--box-scores", box, "--demographics", demo,
                        "--tech-fouls", tech, "--replicates", "10", "-o", "-"});
    CHECK(r.code == cli::kExitData);
    const auto err = nlohmann::json::parse(r.err);
    CHECK(err["error"] == "data_gap");
    CHECK(err["items"] == nlohmann::json::array({"g1"}));
}

TEST_CASE("rates report") {
    TempDir dir;
    const auto l2m = dir.file("l2m.csv", synthetic_l2m(100, 0.0));
    const auto r = run({"rates", "--l2m", l2m, "-o", "-"});
    REQUIRE(r.code == cli::kExitOk);
    const auto start = r.out.find("# rates\n");
    REQUIRE(start != std::string::npos);
    const auto table = csv::parse(std::string_view(r.out).substr(start + 8));
    CHECK(table.header[0] == "violation");
    REQUIRE(table.rows.size() == 6);
    long previous = 1L << 40;
    for (const auto& row : table.rows) {
        const long n = std::stol(row.fields[*table.column("N")]);
        CHECK(n <= previous);
        previous = n;
    }
    CHECK(metadata_value(r.out, "inputs.l2m.sha256").size() == 64);
    CHECK(metadata_value(r.out, "ingest.rows_retained") == "1600");
}

TEST_CASE("study reports are byte-identical across runs and thread counts") {
    TempDir dir;
    const auto l2m = dir.file("l2m.csv", synthetic_l2m(150, 0.02));
    std::string first;
    for (const char* threads : {"1", "4", "8"}) {
        const auto r = run({"teams", "--l2m", l2m, "--seasons", "2019", "--replicates", "999", "--seed", "7",
                            "--threads", threads, "-o", "-"});
        REQUIRE(r.code == cli::kExitOk);
        if (first.empty()) first = r.out;
        CHECK(r.out == first);
    }
    CHECK(metadata_value(first, "seed") == "7");
    CHECK(metadata_value(first, "replicates") == "999");
    const auto changed = run({"teams", "--l2m", l2m, "--seasons", "2019", "--replicates", "999", "--seed", "8", "-o", "-"});
    CHECK(body(changed.out) != body(first));
}

TEST_CASE("the recorded command line reproduces the report") {
    TempDir dir;
    const auto l2m = dir.file("l2m.csv", synthetic_l2m(80, 0.0));
    const auto out_path = dir.path("home.csv");
    const auto r = run({"home", "--l2m", l2m, "--seasons", "2019-2019", "--replicates", "500", "--seed", "3",
                        "--smoothing", "--pseudo-count", "5", "--threads", "2", "-o", out_path});
    REQUIRE(r.code == cli::kExitOk);
    const std::string report = csv::read_file(out_path);
    const std::string rerun = metadata_value(report, "rerun");
    REQUIRE(rerun.starts_with("whistle home "));
    CHECK(rerun.find("--threads") == std::string::npos);

    std::vector<std::string> args;
    for (const auto& part : text::split(rerun.substr(8), ' ')) args.push_back(part);
    args.push_back("-o");
    args.push_back("-");
    const auto again = run(args);
    REQUIRE(again.code == cli::kExitOk);
    CHECK(again.out == report);
    CHECK(metadata_value(report, "rate_source").starts_with("smoothed"));
}

TEST_CASE("json reports separate metadata from results") {
    TempDir dir;
    const auto l2m = dir.file("l2m.csv", synthetic_l2m(60, 0.0));
    const auto r = run({"players", "--l2m", l2m, "--min-involvements", "10", "--replicates", "199", "--format",
                        "json", "-o", "-"});
    REQUIRE(r.code == cli::kExitOk);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc["metadata"]["command"] == "players");
    CHECK(doc["metadata"]["min_involvements"] == 10);
    const auto& rows = doc["results"]["results"];
    REQUIRE(rows.is_array());
    CHECK(!rows.empty());
    for (const auto& row : rows) {
        CHECK(row.contains("share_gap_pct"));
        CHECK(row["p_upper"].get<double>() > 0.0);
        CHECK(row["N_events"].get<int>() >= 10);
    }
    CHECK(doc["results"]["meta_test"].size() == 2);
}

TEST_CASE("default output path and data directory") {
    TempDir dir;
    dir.file("l2m.csv", synthetic_l2m(20, 0.0));
    const auto cwd = fs::current_path();
    fs::current_path(dir.root());
    ::setenv(cli::kDataDirEnv, dir.root().c_str(), 1);
    const auto r = run({"rates", "--l2m", "l2m.csv", "--format", "json"});
    ::unsetenv(cli::kDataDirEnv);
    fs::current_path(cwd);
    CHECK(r.code == cli::kExitOk);
    CHECK(fs::exists(dir.root() / "rates_report.json"));
}

TEST_CASE("race report") {
    TempDir dir;
    RaceSynthSpec spec;
    spec.n_games = 60;
    spec.seed = 5;
    const auto d = generate_race_null(spec);
    std::string officials = "game_id,referee\n", box = "game_id,player,minutes\n", demo = "person,role,race\n",
                tech = "game_id,referee,player,description\n";
    for (const auto& o : d.officials) officials += o.game_id + "," + o.referee + "\n";
    for (const auto& b : d.box_scores) box += b.game_id + "," + b.player + "," + std::to_string(b.minutes_played) + "\n";
    for (const auto& p : d.demographics) {
        demo += p.person + "," + (p.role == PersonRole::Referee ? "referee" : "player") + "," +
                std::string(to_string(p.race)) + "\n";
    }
    for (const auto& t : d.tech_fouls) tech += t.game_id + "," + t.referee + "," + t.player + ",unsportsmanlike\n";
    tech += "RG000001,ref001,t01-p01,Delay of game\n";
    const std::vector<std::string> args = {"race", "--officials", dir.file("o.csv", officials), "--box-scores",
                                           dir.file("b.csv", box), "--demographics", dir.file("d.csv", demo),
                                           "--tech-fouls", dir.file("t.csv", tech), "--replicates", "300",
                                           "--bins", "10", "--format", "json", "-o", "-"};
    const auto r = run(args);
    REQUIRE(r.code == cli::kExitOk);
    const auto doc = nlohmann::json::parse(r.out);
    const auto& summary = doc["results"]["summary"][0];
    CHECK(summary["degenerate"] == false);
    CHECK(summary["p_value"].get<double>() > 0.0);
    CHECK(doc["metadata"]["ingest"]["tech_fouls_filtered"] == 1);
    CHECK(doc["results"]["null_histogram"].size() == 10);
    std::size_t total = 0;
    for (const auto& bin : doc["results"]["null_histogram"]) total += bin["count"].get<std::size_t>();
    CHECK(total == 300);
    CHECK(run(args).out == r.out);
}

TEST_CASE("power command and its synthetic export") {
    TempDir dir;
    const auto csv_path = dir.path("syn.csv");
    const auto r = run({"power", "--games", "50", "--trials", "4", "--replicates", "99", "--bias-levels", "0,0.05",
                        "--emit-csv", csv_path, "-o", "-"});
    REQUIRE(r.code == cli::kExitOk);
    CHECK(r.out.find("# power\n") != std::string::npos);
    const auto parsed = parse_l2m(csv::read_file(csv_path));
    CHECK(parsed.events.size() == 50 * 16);
    CHECK(parsed.report.rejections.empty());

    CHECK(run({"power", "--bias-levels", "0,abc", "-o", "-"}).code == cli::kExitUsage);
    CHECK(run({"power", "--bias-levels", "0.2", "--trials", "1", "-o", "-"}).code == cli::kExitUsage);
}
