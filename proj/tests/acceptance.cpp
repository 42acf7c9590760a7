// Acceptance suite: one PASS/FAIL/SKIP line per criterion.
//
//   acceptance            run every criterion
//   acceptance 3 5        run the listed criteria
//
// Exit status: 0 when every selected criterion passed, 1 when any failed, 77
// when every selected criterion was skipped. Criteria 3 and 4 read the public
// exports from $WHISTLE_DATA_DIR (see README) and skip when they are absent.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <algorithm>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "whistle/analyses.hpp"
#include "whistle/cli.hpp"
#include "whistle/config.hpp"
#include "whistle/csv.hpp"
#include "whistle/ingest.hpp"
#include "whistle/philox.hpp"
#include "whistle/race_audit.hpp"
#include "whistle/synth.hpp"

using namespace whistle;
namespace fs = std::filesystem;

namespace {

enum class Verdict { Pass, Fail, Skip };

struct Outcome {
    Verdict verdict = Verdict::Fail;
    std::string detail;
};

class Detail {
public:
    template <class... Args>
    void add(const char* fmt, Args... args) {
        char buf[512];
        std::snprintf(buf, sizeof buf, fmt, args...);
        if (!text_.empty()) text_ += "; ";
        text_ += buf;
    }
    void check(bool ok) { ok_ = ok_ && ok; }
    Outcome done() const { return {ok_ ? Verdict::Pass : Verdict::Fail, text_}; }

private:
    std::string text_;
    bool ok_ = true;
};

bool within(double v, double lo, double hi) { return v >= lo && v <= hi; }

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// --- 1 ----------------------------------------------------------------------

Outcome meta_test_exactness() {
    Detail d;
    const auto t0 = Clock::now();
    const double a = binomial_meta_test(106, 12, 0.05);
    const double b = binomial_meta_test(106, 7, 0.05);
    const double c = binomial_meta_test(30, 3, 0.05);
    const double ms = seconds_since(t0) * 1e3;
    d.add("(106,12)=%.5f in [0.006,0.008]", a);
    d.check(within(a, 0.006, 0.008));
    d.add("(106,7)=%.4f in [0.27,0.29]", b);
    d.check(within(b, 0.27, 0.29));
    d.add("(30,3)=%.4f in [0.18,0.20]", c);
    d.check(within(c, 0.18, 0.20));
    d.add("%.3f ms < 1 ms", ms);
    d.check(ms < 1.0);
    d.check(binomial_meta_test(106, 12, 0.05) == a);
    return d.done();
}

// --- 2 ----------------------------------------------------------------------

Outcome share_gap_identity() {
    // (excess, N, printed percentage, half a unit in the printed last digit)
    struct Row {
        double excess;
        std::size_t n;
        double printed;
        double half_unit;
    };
    const Row rows[] = {{107.7, 17'956, 1.2, 0.05}, {47.86, 1'355, 7.0, 0.5}, {145.55, 19'311, 1.6, 0.05}};
    Detail d;
    for (const auto& r : rows) {
        const double pct = share_gap_pct(r.excess, r.n);
        const bool ok = std::abs(pct - r.printed) <= r.half_unit;
        d.add("2*%.2f/%zu = %.3f%% vs printed %.1f%% %s", r.excess, r.n, pct, r.printed, ok ? "ok" : "MISMATCH");
        d.check(ok);
    }
    return d.done();
}

// --- 3 and 4: public data -------------------------------------------------------

std::optional<fs::path> data_file(const char* name) {
    const char* dir = std::getenv(cli::kDataDirEnv);
    if (dir == nullptr || *dir == '\0') return std::nullopt;
    const fs::path p = fs::path(dir) / name;
    if (!fs::exists(p)) return std::nullopt;
    return p;
}

KeyValueDoc optional_doc(const char* name) {
    auto p = data_file(name);
    return p ? KeyValueDoc::load(p->string()) : KeyValueDoc{};
}

Outcome full_data_reproduction() {
    const auto l2m_path = data_file("l2m.csv");
    if (!l2m_path) {
        return {Verdict::Skip, std::string("needs l2m.csv under $") + cli::kDataDirEnv};
    }
    const auto t0 = Clock::now();
    const KeyValueDoc mapping_doc = optional_doc("mapping.ini");
    const AliasTable aliases = AliasTable::from_doc(optional_doc("aliases.ini"));
    const auto parsed =
        parse_l2m(csv::read_file(l2m_path->string()), merged_mapping(default_l2m_mapping(), mapping_doc, "l2m"), aliases);

    Detail d;
    SimConfig cfg;
    cfg.replicates = 10'000;
    cfg.master_seed = 7;

    StudySpec home;
    home.seasons = {2015, 2022};
    const auto all = run_study(parsed.events, home, cfg);
    if (all.empty()) return {Verdict::Fail, "no home ledger"};
    const auto& h = all.front().outcome;
    d.add("2015-2022 excess %.2f in 145.55+-10%%, p_upper %.4f < 0.02 (N=%zu)", h.excess, h.p_upper, h.n_events);
    d.check(within(h.excess, 145.55 * 0.9, 145.55 * 1.1) && h.p_upper < 0.02);

    home.seasons = {2020, 2022};
    const auto recent = run_study(parsed.events, home, cfg);
    const double p_recent = recent.empty() ? -1.0 : recent.front().outcome.p_upper;
    d.add("2020-2022 p_upper %.3f in [0.35,0.65]", p_recent);
    d.check(within(p_recent, 0.35, 0.65));

    StudySpec players;
    players.kind = EntityKind::Player;
    players.seasons = {2015, 2022};
    players.min_involvements = 100;
    const std::size_t n_players = build_ledgers(parsed.events, players).size();
    d.add("players %zu in 106+-3", n_players);
    d.check(n_players >= 103 && n_players <= 109);

    const auto rates = compute_rates(select_events(parsed.events, players));
    const auto it = rates.find(normalize_violation_type("Foul: Personal", aliases));
    if (it == rates.end() || !it->second.precision || !it->second.recall) {
        d.add("%s", "no personal-foul rates");
        d.check(false);
    } else {
        const double prec = *it->second.precision;
        const double rec = *it->second.recall;
        d.add("personal precision %.3f (0.97+-0.01) recall %.3f (0.90+-0.01)", prec, rec);
        d.check(std::abs(prec - 0.97) <= 0.01 && std::abs(rec - 0.90) <= 0.01);
    }
    const double secs = seconds_since(t0);
    d.add("%.1f s < 120 s", secs);
    d.check(secs < 120.0);
    return d.done();
}

Outcome race_audit_reproduction() {
    const auto officials = data_file("officials.csv");
    const auto box = data_file("box_scores.csv");
    const auto demo = data_file("demographics.csv");
    const auto tech = data_file("tech_fouls.csv");
    if (!officials || !box || !demo || !tech) {
        return {Verdict::Skip, std::string("needs officials.csv, box_scores.csv, demographics.csv and tech_fouls.csv "
                                           "under $") +
                                   cli::kDataDirEnv};
    }
    const KeyValueDoc mapping_doc = optional_doc("mapping.ini");
    const AliasTable aliases = AliasTable::from_doc(optional_doc("aliases.ini"));
    const auto o = parse_officials(csv::read_file(officials->string()),
                                   merged_mapping(default_officials_mapping(), mapping_doc, "officials"), aliases);
    const auto b = parse_box_scores(csv::read_file(box->string()),
                                    merged_mapping(default_box_score_mapping(), mapping_doc, "box_scores"), aliases);
    const auto p = parse_demographics(csv::read_file(demo->string()),
                                      merged_mapping(default_demographics_mapping(), mapping_doc, "demographics"),
                                      aliases);
    const auto t = parse_tech_fouls(csv::read_file(tech->string()),
                                    merged_mapping(default_tech_foul_mapping(), mapping_doc, "tech_fouls"), aliases);

    const auto ex = build_exposures(o.assignments, b.lines, p.people);
    const auto s = tech_rates(ex.exposures, t.events, p.people);
    Detail d;
    if (!s.delta_tau) return {Verdict::Fail, "delta tau undefined"};
    d.add("delta tau %.5f in 0.0022+-0.001 (tau_diff %.4f, tau_same %.4f)", *s.delta_tau, s.tau_diff.value_or(0),
          s.tau_same.value_or(0));
    d.check(std::abs(*s.delta_tau - 0.0022) <= 0.001);

    RaceNullConfig cfg;
    cfg.replicates = 10'000;
    cfg.seed = 7;
    const auto null = simulate_race_null(ex.exposures, per_referee_rates(ex.exposures, t.events), *s.delta_tau, cfg);
    d.add("p %.3f in 0.33+-0.05", null.p_value);
    d.check(!null.degenerate && std::abs(null.p_value - 0.33) <= 0.05);
    return d.done();
}

// --- 5 ----------------------------------------------------------------------

Outcome oracle_equivalence() {
    RateTable rates;
    for (const auto& [type, ic, inc] : std::vector<std::tuple<const char*, double, double>>{
             {"personal", 0.026, 0.093}, {"shooting", 0.04, 0.21}, {"traveling", 0.0, 0.62},
             {"coin", 0.5, 0.5}, {"offensive", 0.11, 1.0}, {"perfect", 0.0, 0.0}}) {
        ViolationRates r;
        r.violation_type = type;
        r.boundaries = Boundaries{ic, inc};
        rates.emplace(type, r);
    }
    using E = std::pair<const char*, Role>;
    const std::vector<std::vector<E>> fixtures = {
        {},
        {{"personal", Role::Committing}},
        {{"coin", Role::Disadvantaged}},
        {{"perfect", Role::Committing}, {"shooting", Role::Disadvantaged}},
        {{"offensive", Role::Committing}, {"traveling", Role::Committing}, {"personal", Role::Disadvantaged}},
        {{"shooting", Role::Committing},
         {"shooting", Role::Disadvantaged},
         {"coin", Role::Committing},
         {"offensive", Role::Disadvantaged}},
        {{"traveling", Role::Disadvantaged},
         {"traveling", Role::Disadvantaged},
         {"traveling", Role::Disadvantaged},
         {"traveling", Role::Disadvantaged}},
    };
    constexpr std::uint32_t R = 100'000;
    Detail d;
    std::size_t points = 0;
    double worst = 0.0;
    for (std::size_t f = 0; f < fixtures.size(); ++f) {
        EntityLedger ledger;
        for (const auto& [type, role] : fixtures[f]) ledger.add(type, role, Decision::CorrectCall);
        const auto exact = oracle::enumerate_null(ledger, rates);
        SimConfig cfg;
        cfg.replicates = R;
        cfg.master_seed = 500 + f;
        const auto out = run_simulation(ledger, lookup_in(rates), cfg);
        std::map<std::int64_t, double> freq;
        for (auto s : out.null_samples) freq[s] += 1.0;
        for (const auto& [w, count] : freq) {
            if (!exact.contains(w)) {
                d.add("fixture %zu: impossible value %lld", f, static_cast<long long>(w));
                d.check(false);
            }
        }
        double mean = 0.0, second = 0.0;
        for (const auto& [w, p] : exact) {
            const double se = std::sqrt(p * (1 - p) / R);
            const double diff = std::abs(freq[w] / R - p);
            ++points;
            if (se > 0) worst = std::max(worst, diff / se);
            d.check(diff <= 3 * se + 1e-12);
            mean += double(w) * p;
            second += double(w) * double(w) * p;
        }
        const double se_mean = std::sqrt(std::max(0.0, second - mean * mean) / R);
        d.check(std::abs(out.null_mean - mean) <= 3 * se_mean + 1e-12);
    }
    d.add("%zu fixtures, %zu probability points, worst deviation %.2f SE (limit 3)", fixtures.size(), points, worst);
    return d.done();
}

// --- 6 ----------------------------------------------------------------------

Outcome calibration() {
    constexpr std::size_t kTrials = 500;
    constexpr double kAlpha = 0.05;
    Detail d;

    SynthSpec spec = default_synth_spec();
    spec.n_games = 250;
    std::size_t whistle_hits = 0;
    for (std::size_t t = 0; t < kTrials; ++t) {
        SynthSpec trial = spec;
        trial.seed = rng::derive_seed(std::uint64_t{6001}, std::uint64_t{t});
        whistle_hits += home_trial_p_value(trial, 999, rng::derive_seed(std::uint64_t{6002}, std::uint64_t{t})) <= kAlpha;
    }
    const double whistle_rate = double(whistle_hits) / kTrials;
    d.add("whistle gain: %zu/%zu = %.3f in [0.03,0.07]", whistle_hits, kTrials, whistle_rate);
    d.check(within(whistle_rate, 0.03, 0.07));

    std::size_t race_hits = 0;
    std::size_t degenerate = 0;
    for (std::size_t t = 0; t < kTrials; ++t) {
        RaceSynthSpec rs;
        rs.seed = rng::derive_seed(std::uint64_t{6003}, std::uint64_t{t});
        const auto data = generate_race_null(rs);
        const auto ex = build_exposures(data.officials, data.box_scores, data.demographics);
        const auto s = tech_rates(ex.exposures, data.tech_fouls, data.demographics);
        RaceNullConfig cfg;
        cfg.replicates = 999;
        cfg.seed = rng::derive_seed(std::uint64_t{6004}, std::uint64_t{t});
        const auto null =
            simulate_race_null(ex.exposures, per_referee_rates(ex.exposures, data.tech_fouls), *s.delta_tau, cfg);
        degenerate += null.degenerate;
        race_hits += !null.degenerate && null.p_value <= kAlpha;
    }
    const double race_rate = double(race_hits) / kTrials;
    d.add("race audit: %zu/%zu = %.3f in [0.03,0.07]", race_hits, kTrials, race_rate);
    d.check(within(race_rate, 0.03, 0.07) && degenerate == 0);
    return d.done();
}

// --- 7 ----------------------------------------------------------------------

Outcome determinism() {
    Detail d;
    SynthSpec spec = default_synth_spec();
    spec.n_games = 400;
    spec.seed = 71;
    spec.injected_bias["team:team03"] = 0.03;
    const auto events = generate(spec).events;

    StudySpec study;
    study.kind = EntityKind::Team;
    study.seasons = {2019, 2019};
    std::vector<std::vector<std::int64_t>> whistle_runs;
    for (unsigned threads : {1u, 4u, 8u}) {
        SimConfig cfg;
        cfg.replicates = 4'000;
        cfg.master_seed = 72;
        cfg.threads = threads;
        std::vector<std::int64_t> all;
        for (const auto& r : run_study(events, study, cfg)) {
            all.insert(all.end(), r.outcome.null_samples.begin(), r.outcome.null_samples.end());
        }
        whistle_runs.push_back(std::move(all));
    }
    const bool whistle_same = whistle_runs[0] == whistle_runs[1] && whistle_runs[0] == whistle_runs[2];
    d.add("whistle-gain null samples (%zu) %s", whistle_runs[0].size(), whistle_same ? "identical" : "DIFFER");
    d.check(whistle_same);

    RaceSynthSpec rs;
    rs.seed = 73;
    const auto data = generate_race_null(rs);
    const auto ex = build_exposures(data.officials, data.box_scores, data.demographics);
    const auto rates = per_referee_rates(ex.exposures, data.tech_fouls);
    std::vector<std::vector<double>> race_runs;
    for (unsigned threads : {1u, 4u, 8u}) {
        RaceNullConfig cfg;
        cfg.replicates = 4'000;
        cfg.seed = 74;
        cfg.threads = threads;
        race_runs.push_back(simulate_race_null(ex.exposures, rates, 0.0, cfg).null_samples);
    }
    const bool race_same = race_runs[0] == race_runs[1] && race_runs[0] == race_runs[2];
    d.add("race null samples %s", race_same ? "identical" : "DIFFER");
    d.check(race_same);

    const fs::path dir = fs::temp_directory_path() / ("whistle_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    const std::string l2m = (dir / "l2m.csv").string();
    {
        std::ofstream f(l2m, std::ios::binary);
        write_canonical_l2m(f, events);
    }
    std::vector<std::string> reports;
    for (const char* threads : {"1", "4", "8"}) {
        std::ostringstream out, err;
        const int code = cli::run({"players", "--l2m", l2m, "--seasons", "2019", "--min-involvements", "40",
                                   "--replicates", "2000", "--seed", "75", "--threads", threads, "-o", "-"},
                                  out, err);
        if (code != 0) reports.push_back("exit " + std::to_string(code) + ": " + err.str());
        else reports.push_back(out.str());
    }
    fs::remove_all(dir);
    const bool report_same = reports[0] == reports[1] && reports[0] == reports[2] && !reports[0].starts_with("exit");
    d.add("players report (%zu bytes) %s at 1/4/8 threads", reports[0].size(), report_same ? "byte-identical" : "DIFFERS");
    d.check(report_same);
    return d.done();
}

// --- 8 ----------------------------------------------------------------------

Outcome power_guard() {
    SynthSpec spec = default_synth_spec();
    spec.n_games = 1200;
    PowerOptions opts;
    opts.trials = 200;
    opts.alpha = 0.05;
    opts.replicates = 999;
    opts.seed = 8;
    const auto curve = power_curve(spec, {0.05}, opts);
    const auto& p = curve.front();
    Detail d;
    d.add("b=0.05, 1200 games x 16 events: %zu/%zu detected = %.3f >= 0.80", p.detections, p.trials, p.rate());
    d.check(p.rate() >= 0.80);
    return d.done();
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria = {
        {1, "meta-test exactness", meta_test_exactness},
        {2, "share-gap consistency identity", share_gap_identity},
        {3, "full-data reproduction", full_data_reproduction},
        {4, "race audit reproduction", race_audit_reproduction},
        {5, "oracle equivalence at desk scale", oracle_equivalence},
        {6, "null calibration", calibration},
        {7, "determinism across thread counts", determinism},
        {8, "power regression guard", power_guard},
    };
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));

    int passed = 0, failed = 0, skipped = 0;
    for (const auto& c : criteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
        Outcome o;
        const auto t0 = Clock::now();
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {Verdict::Fail, std::string("exception: ") + e.what()};
        }
        const char* tag = o.verdict == Verdict::Pass ? "PASS" : o.verdict == Verdict::Fail ? "FAIL" : "SKIP";
        std::printf("[%s] criterion %d, %s: %s (%.1f s)\n", tag, c.id, c.name, o.detail.c_str(), seconds_since(t0));
        std::fflush(stdout);
        (o.verdict == Verdict::Pass ? passed : o.verdict == Verdict::Fail ? failed : skipped) += 1;
    }
    std::printf("%d passed, %d failed, %d skipped\n", passed, failed, skipped);
    if (failed > 0) return 1;
    if (passed == 0 && skipped > 0) return 77;
    return 0;
}
