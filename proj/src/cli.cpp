#include "whistle/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "whistle/analyses.hpp"
#include "whistle/csv.hpp"
#include "whistle/ingest.hpp"
#include "whistle/race_audit.hpp"
#include "whistle/report.hpp"
#include "whistle/synth.hpp"
#include "whistle/text.hpp"

namespace whistle::cli {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct CommonOptions {
    std::string format = "csv";
    std::string output;
    std::uint64_t seed = 1;
    std::uint32_t replicates = 10'000;
    unsigned threads = 0;
    std::string isa = "auto";
};

struct DataOptions {
    std::string l2m;
    std::string mapping;
    std::string aliases;
    std::string rejections;
};

struct StudyOptions {
    std::string seasons = "2015-2022";
    std::string type = "both";
    std::int64_t min_involvements = 100;
    double alpha = 0.05;
    bool smoothing = false;
    double pseudo_count = kDefaultPseudoCount;
};

struct RaceOptions {
    std::string officials;
    std::string box_scores;
    std::string demographics;
    std::string tech_fouls;
    bool poisson = false;
    std::size_t bins = 50;
};

struct PowerCliOptions {
    std::size_t games = 1200;
    double events_per_game = 16.0;
    double dispersion = 0.0;
    std::string bias_levels = "0,0.02,0.05";
    std::size_t trials = 200;
    std::string emit_csv;
};

// Reads an input file, resolving relative paths against WHISTLE_DATA_DIR.
struct Input {
    std::string path;
    std::string bytes;
};

std::string resolve(const std::string& path) {
    if (path.empty() || path == "-") return path;
    const char* dir = std::getenv(kDataDirEnv);
    if (dir != nullptr && *dir != '\0' && fs::path(path).is_relative()) return (fs::path(dir) / path).string();
    return path;
}

Input load_input(const std::string& path, const char* what) {
    const std::string resolved = resolve(path);
    if (resolved.empty()) throw ConfigError(std::string("missing required input: ") + what);
    if (!fs::exists(resolved)) throw ConfigError(std::string(what) + " not found: " + resolved);
    return {path, csv::read_file(resolved)};
}

json input_meta(const Input& in) { return json{{"path", in.path}, {"sha256", sha256_hex(in.bytes)}}; }

json report_json_number(std::optional<double> v) { return v ? json(*v) : json(nullptr); }

KeyValueDoc load_doc(const std::string& path, const char* what) {
    if (path.empty()) return KeyValueDoc{};
    return KeyValueDoc::parse(load_input(path, what).bytes);
}

struct LoadedL2M {
    Input input;
    L2MParseResult parsed;
};

LoadedL2M load_l2m(const DataOptions& d) {
    const KeyValueDoc mapping_doc = load_doc(d.mapping, "mapping file");
    const AliasTable aliases = AliasTable::from_doc(load_doc(d.aliases, "alias file"));
    const ColumnMapping mapping = merged_mapping(default_l2m_mapping(), mapping_doc, "l2m");
    LoadedL2M out{load_input(d.l2m, "L2M file"), {}};
    out.parsed = parse_l2m(out.input.bytes, mapping, aliases);
    if (!d.rejections.empty()) {
        std::ofstream log(d.rejections);
        write_rejection_log(log, out.parsed.report);
    }
    return out;
}

void add_data_meta(json& meta, const DataOptions& d, const LoadedL2M& l2m) {
    meta["inputs"]["l2m"] = input_meta(l2m.input);
    if (!d.mapping.empty()) meta["inputs"]["mapping"] = input_meta(load_input(d.mapping, "mapping file"));
    if (!d.aliases.empty()) meta["inputs"]["aliases"] = input_meta(load_input(d.aliases, "alias file"));
    const auto& r = l2m.parsed.report;
    meta["ingest"] = json{{"rows_total", r.total_rows},
                          {"rows_retained", r.retained},
                          {"rows_rejected", r.rejections.size()},
                          {"cnc_rows", l2m.parsed.cnc_rows}};
}

json base_meta(const std::string& command, const std::string& rerun) {
    json meta;
    meta["tool"] = kToolName;
    meta["version"] = kToolVersion;
    meta["command"] = command;
    meta["rerun"] = rerun;
    return meta;
}

std::string quote_arg(const std::string& s) {
    if (!s.empty() && s.find_first_of(" \t\"'") == std::string::npos) return s;
    std::string out = "'";
    for (char c : s) out += c == '\'' ? std::string("'\\''") : std::string(1, c);
    return out + "'";
}

void emit(const Report& report, const CommonOptions& c, const std::string& command, std::ostream& out) {
    const ReportFormat format = *parse_report_format(c.format);
    std::string path = c.output;
    if (path.empty()) path = command + "_report." + (format == ReportFormat::Json ? "json" : "csv");
    if (path == "-") {
        report.write(out, format);
        return;
    }
    std::ofstream file(path, std::ios::binary);
    if (!file) throw ConfigError("cannot write report: " + path);
    report.write(file, format);
}

kernels::Isa pick_isa(const std::string& name) {
    if (name == "scalar") return kernels::Isa::Scalar;
    if (name == "avx2") {
        if (!kernels::isa_available(kernels::Isa::Avx2)) throw ArgumentError("AVX2 not available on this CPU");
        return kernels::Isa::Avx2;
    }
    return kernels::preferred_isa();
}

// --- rates ----------------------------------------------------------------

Report rates_report(const DataOptions& d, const StudyOptions& s, const std::string& rerun) {
    const auto l2m = load_l2m(d);
    StudySpec spec;
    spec.seasons = parse_season_range(s.seasons);
    spec.season_type = *parse_season_type_filter(s.type);
    const auto selected = select_events(l2m.parsed.events, spec);
    if (selected.empty()) throw NoDataError("no data: no graded events in the selected seasons");
    RateTable rates = compute_rates(selected);
    if (s.smoothing) rates = smooth_table(rates, s.pseudo_count);

    std::vector<const ViolationRates*> order;
    for (const auto& [_, r] : rates) order.push_back(&r);
    std::stable_sort(order.begin(), order.end(),
                     [](const ViolationRates* a, const ViolationRates* b) { return a->counts.total() > b->counts.total(); });

    Report report;
    report.metadata = base_meta("rates", rerun);
    report.metadata["seasons"] = s.seasons;
    report.metadata["season_type"] = s.type;
    report.metadata["rate_source"] = s.smoothing ? "smoothed(m=" + json(s.pseudo_count).dump() + ")" : "raw";
    add_data_meta(report.metadata, d, l2m);

    ReportTable table{"rates", {"violation", "precision", "recall", "N", "cc", "ic", "inc", "b_ic", "b_inc"}, {}};
    for (const auto* r : order) {
        table.rows.push_back({r->violation_type, report_json_number(r->precision), report_json_number(r->recall),
                              r->counts.total(), r->counts.cc, r->counts.ic, r->counts.inc,
                              r->boundaries ? json(r->boundaries->ic) : json(nullptr),
                              r->boundaries ? json(r->boundaries->inc) : json(nullptr)});
    }
    report.tables.push_back(std::move(table));
    return report;
}

// --- home / players / teams -------------------------------------------------

Report study_report(EntityKind kind, const std::string& command, const CommonOptions& c, const DataOptions& d,
                    const StudyOptions& s, const std::string& rerun) {
    const auto l2m = load_l2m(d);
    StudySpec spec;
    spec.kind = kind;
    spec.seasons = parse_season_range(s.seasons);
    spec.season_type = *parse_season_type_filter(s.type);
    spec.min_involvements = s.min_involvements;
    spec.alpha = s.alpha;
    spec.validate();

    SimConfig cfg;
    cfg.replicates = c.replicates;
    cfg.master_seed = c.seed;
    cfg.threads = c.threads;
    cfg.isa = pick_isa(c.isa);
    if (s.smoothing) cfg.smoothing = s.pseudo_count;

    const auto results = run_study(l2m.parsed.events, spec, cfg);
    if (results.empty()) throw NoDataError("no data: no entity qualifies for the study");

    Report report;
    report.metadata = base_meta(command, rerun);
    report.metadata["seed"] = c.seed;
    report.metadata["replicates"] = c.replicates;
    report.metadata["rate_source"] = s.smoothing ? "smoothed(m=" + json(s.pseudo_count).dump() + ")" : "raw";
    report.metadata["rates"] = kind == EntityKind::HomeSide ? "pooled" : "leave-one-out";
    report.metadata["seasons"] = s.seasons;
    report.metadata["season_type"] = s.type;
    if (kind == EntityKind::Player) report.metadata["min_involvements"] = s.min_involvements;
    report.metadata["alpha"] = s.alpha;
    report.metadata["p_value"] = "add-one, (1 + #{null at or beyond observed}) / (R + 1)";
    report.metadata["share_gap_pct"] = "2 * excess / N_events * 100";
    add_data_meta(report.metadata, d, l2m);

    ReportTable table{"results",
                      {"entity", "N_events", "observed_wg", "null_mean", "excess", "share_gap_pct", "p_upper",
                       "p_lower", "significant_direction"},
                      {}};
    for (const auto& r : results) {
        const auto& o = r.outcome;
        table.rows.push_back({r.entity, o.n_events, o.observed_wg, o.null_mean, o.excess, o.share_gap_pct, o.p_upper,
                              o.p_lower, std::string(significant_direction(o, s.alpha))});
    }
    report.tables.push_back(std::move(table));

    const auto summary = classify_significance(results, s.alpha);
    ReportTable meta_table{"meta_test", {"direction", "m_tests", "r_significant", "alpha", "p_all_false_positive"}, {}};
    for (const auto& [name, m] : {std::pair{"positive", summary.positive_meta}, std::pair{"negative", summary.negative_meta}}) {
        meta_table.rows.push_back({name, m.m_tests, m.r_significant, m.alpha, m.p_all_false_positive});
    }
    report.tables.push_back(std::move(meta_table));

    bool any_fallback = false;
    ReportTable fallback{"rate_fallbacks", {"entity", "violation"}, {}};
    for (const auto& r : results) {
        for (const auto& t : r.fallback_types) {
            fallback.rows.push_back({r.entity, t});
            any_fallback = true;
        }
    }
    if (any_fallback) report.tables.push_back(std::move(fallback));
    return report;
}

// --- race -------------------------------------------------------------------

Report race_report(const CommonOptions& c, const DataOptions& d, const RaceOptions& ro, const std::string& rerun) {
    const KeyValueDoc mapping_doc = load_doc(d.mapping, "mapping file");
    const AliasTable aliases = AliasTable::from_doc(load_doc(d.aliases, "alias file"));
    const Input officials_in = load_input(ro.officials, "officials file");
    const Input box_in = load_input(ro.box_scores, "box score file");
    const Input demo_in = load_input(ro.demographics, "demographics file");
    const Input tech_in = load_input(ro.tech_fouls, "technical foul file");

    const auto officials =
        parse_officials(officials_in.bytes, merged_mapping(default_officials_mapping(), mapping_doc, "officials"), aliases);
    const auto box =
        parse_box_scores(box_in.bytes, merged_mapping(default_box_score_mapping(), mapping_doc, "box_scores"), aliases);
    const auto demo = parse_demographics(
        demo_in.bytes, merged_mapping(default_demographics_mapping(), mapping_doc, "demographics"), aliases);
    const auto tech =
        parse_tech_fouls(tech_in.bytes, merged_mapping(default_tech_foul_mapping(), mapping_doc, "tech_fouls"), aliases);

    const auto exposures = build_exposures(officials.assignments, box.lines, demo.people);
    const auto summary = tech_rates(exposures.exposures, tech.events, demo.people);
    const auto referee_rates = per_referee_rates(exposures.exposures, tech.events);

    RaceNullConfig cfg;
    cfg.replicates = c.replicates;
    cfg.seed = c.seed;
    cfg.threads = c.threads;
    cfg.model = ro.poisson ? TechCallModel::Poisson : TechCallModel::Bernoulli;
    const auto null = simulate_race_null(exposures.exposures, referee_rates, summary.delta_tau.value_or(0.0), cfg);

    Report report;
    report.metadata = base_meta("race", rerun);
    report.metadata["seed"] = c.seed;
    report.metadata["replicates"] = c.replicates;
    report.metadata["tech_call_model"] = ro.poisson ? "poisson" : "bernoulli";
    report.metadata["exposure"] = "pooled across referees, per 48 player-minutes";
    report.metadata["inputs"]["officials"] = input_meta(officials_in);
    report.metadata["inputs"]["box_scores"] = input_meta(box_in);
    report.metadata["inputs"]["demographics"] = input_meta(demo_in);
    report.metadata["inputs"]["tech_fouls"] = input_meta(tech_in);
    report.metadata["ingest"]["tech_fouls_filtered"] = tech.report.filtered;
    report.metadata["ingest"]["tech_fouls_retained"] = tech.report.retained;

    ReportTable table{"summary",
                      {"tau_same", "tau_diff", "delta_tau", "p_value", "null_mean", "n_fouls_used", "n_fouls_excluded",
                       "same_race_minutes", "diff_race_minutes", "games_total", "games_dropped", "games_dropped_pct",
                       "degenerate", "diagnostic"},
                      {}};
    table.rows.push_back({report_json_number(summary.tau_same), report_json_number(summary.tau_diff),
                          report_json_number(summary.delta_tau), null.degenerate ? json(nullptr) : json(null.p_value),
                          null.degenerate ? json(nullptr) : json(null.null_mean), summary.n_fouls_used,
                          summary.n_fouls_excluded, summary.same_minutes, summary.diff_minutes, exposures.total_games,
                          exposures.dropped_games.size(), 100.0 * exposures.dropped_fraction(), null.degenerate,
                          null.diagnostic});
    report.tables.push_back(std::move(table));

    ReportTable hist_table{"null_histogram", {"bin_lo", "bin_hi", "count"}, {}};
    const Histogram h = make_histogram(null.null_samples, ro.bins);
    for (std::size_t i = 0; i < h.counts.size(); ++i) hist_table.rows.push_back({h.edges[i], h.edges[i + 1], h.counts[i]});
    report.tables.push_back(std::move(hist_table));
    return report;
}

// --- power ------------------------------------------------------------------

Report power_report(const CommonOptions& c, const StudyOptions& s, const PowerCliOptions& p, const std::string& rerun) {
    SynthSpec spec = default_synth_spec();
    spec.n_games = p.games;
    spec.events_per_game = {p.events_per_game, p.dispersion};

    std::vector<double> levels;
    for (const auto& part : text::split(p.bias_levels, ',')) {
        const auto t = text::trim(part);
        if (t.empty()) continue;
        try {
            levels.push_back(std::stod(std::string(t)));
        } catch (const std::exception&) {
            throw ArgumentError("invalid bias level: " + std::string(t));
        }
    }
    if (levels.empty()) throw ArgumentError("no bias levels given");

    if (!p.emit_csv.empty()) {
        SynthSpec sample = spec;
        sample.injected_bias["home"] = levels.front();
        sample.seed = c.seed;
        std::ofstream f(p.emit_csv, std::ios::binary);
        if (!f) throw ConfigError("cannot write synthetic CSV: " + p.emit_csv);
        write_canonical_l2m(f, generate(sample).events);
    }

    PowerOptions opts;
    opts.trials = p.trials;
    opts.alpha = s.alpha;
    opts.replicates = c.replicates;
    opts.seed = c.seed;
    opts.threads = c.threads;
    const auto curve = power_curve(spec, levels, opts);

    Report report;
    report.metadata = base_meta("power", rerun);
    report.metadata["seed"] = c.seed;
    report.metadata["replicates"] = c.replicates;
    report.metadata["games"] = p.games;
    report.metadata["events_per_game"] = json{{"mean", p.events_per_game}, {"dispersion", p.dispersion}};
    report.metadata["trials"] = p.trials;
    report.metadata["alpha"] = s.alpha;
    report.metadata["bias_target"] = "home";

    ReportTable table{"power", {"bias", "trials", "detections", "detection_rate"}, {}};
    for (const auto& pt : curve) table.rows.push_back({pt.bias, pt.trials, pt.detections, pt.rate()});
    report.tables.push_back(std::move(table));
    return report;
}

void print_error(std::ostream& err, const char* kind, const std::string& message,
                 const std::vector<std::string>& items = {}) {
    json e{{"error", kind}, {"message", message}};
    if (!items.empty()) e["items"] = items;
    err << e.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Officiating-bias analysis of NBA Last-Two-Minute reports", kToolName};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    CommonOptions common;
    DataOptions data;
    StudyOptions study;
    RaceOptions race;
    PowerCliOptions power;

    auto add_common = [&](CLI::App* sub, bool simulation) {
        sub->add_option("--format", common.format, "Report format")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("-o,--output", common.output, "Report path ('-' for stdout)");
        if (simulation) {
            sub->add_option("--seed", common.seed, "Master seed");
            sub->add_option("--replicates", common.replicates, "Monte Carlo replicates")->check(CLI::PositiveNumber);
            sub->add_option("--threads", common.threads, "Worker threads (0 = all cores; never changes output)");
            sub->add_option("--isa", common.isa, "Kernel ISA")->check(CLI::IsMember({"auto", "scalar", "avx2"}));
        }
    };
    auto add_data = [&](CLI::App* sub) {
        sub->add_option("--l2m", data.l2m, "L2M grade records (delimited text)")->required();
        sub->add_option("--mapping", data.mapping, "Column mapping document");
        sub->add_option("--aliases", data.aliases, "Alias document");
        sub->add_option("--rejections", data.rejections, "Write the rejection log here");
    };
    auto add_study = [&](CLI::App* sub, bool players) {
        sub->add_option("--seasons", study.seasons, "Inclusive season range, e.g. 2015-2022");
        sub->add_option("--type", study.type, "Season type")->check(CLI::IsMember({"regular", "playoffs", "both"}));
        sub->add_option("--alpha", study.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
        sub->add_flag("--smoothing", study.smoothing, "Use Bayesian-average rates");
        sub->add_option("--pseudo-count", study.pseudo_count, "Smoothing pseudo-count m")->check(CLI::NonNegativeNumber);
        if (players) sub->add_option("--min-involvements", study.min_involvements, "Minimum involvements per player");
    };

    auto* rates_cmd = app.add_subcommand("rates", "Per-violation precision, recall and N");
    add_common(rates_cmd, false);
    add_data(rates_cmd);
    add_study(rates_cmd, false);

    auto* home_cmd = app.add_subcommand("home", "Home-court whistle gain study");
    auto* players_cmd = app.add_subcommand("players", "Per-player whistle gain study");
    auto* teams_cmd = app.add_subcommand("teams", "Per-team whistle gain study");
    for (auto* sub : {home_cmd, players_cmd, teams_cmd}) {
        add_common(sub, true);
        add_data(sub);
        add_study(sub, sub == players_cmd);
    }

    auto* race_cmd = app.add_subcommand("race", "Referee/player race technical-foul audit");
    add_common(race_cmd, true);
    race_cmd->add_option("--officials", race.officials, "Officials per game")->required();
    race_cmd->add_option("--box-scores", race.box_scores, "Box-score minutes")->required();
    race_cmd->add_option("--demographics", race.demographics, "Demographics")->required();
    race_cmd->add_option("--tech-fouls", race.tech_fouls, "Technical foul events")->required();
    race_cmd->add_option("--mapping", data.mapping, "Column mapping document");
    race_cmd->add_option("--aliases", data.aliases, "Alias document");
    race_cmd->add_flag("--poisson", race.poisson, "Poisson technical-call model instead of Bernoulli");
    race_cmd->add_option("--bins", race.bins, "Histogram bins")->check(CLI::PositiveNumber);

    auto* power_cmd = app.add_subcommand("power", "Detection power of the home study on synthetic data");
    add_common(power_cmd, true);
    power_cmd->add_option("--games", power.games, "Games per synthetic dataset")->check(CLI::PositiveNumber);
    power_cmd->add_option("--events-per-game", power.events_per_game, "Mean graded events per game");
    power_cmd->add_option("--dispersion", power.dispersion, "Negative-binomial dispersion (0 = fixed count)");
    power_cmd->add_option("--bias-levels", power.bias_levels, "Comma-separated home bias levels");
    power_cmd->add_option("--trials", power.trials, "Trials per bias level")->check(CLI::PositiveNumber);
    power_cmd->add_option("--alpha", study.alpha, "Significance level")->check(CLI::Range(0.0, 1.0));
    power_cmd->add_option("--emit-csv", power.emit_csv, "Also write one synthetic dataset (canonical L2M CSV)");

    std::vector<const char*> argv{kToolName};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    if (power_cmd->parsed() && power_cmd->count("--replicates") == 0) common.replicates = 999;

    // Canonical command line for the metadata block: every option that can
    // affect results, in a fixed order. Threads, ISA and output are excluded.
    std::ostringstream rerun;
    rerun << kToolName;
    CLI::App* active = app.get_subcommands().front();
    rerun << ' ' << active->get_name();
    for (const CLI::Option* opt : active->get_options()) {
        if (opt->count() == 0 || opt->get_lnames().empty()) continue;
        const std::string lname = "--" + opt->get_lnames().front();
        if (lname == "--threads" || lname == "--isa" || lname == "--output" || lname == "--rejections" ||
            lname == "--help") {
            continue;
        }
        if (opt->get_expected_max() == 0) {
            rerun << ' ' << lname;
        } else {
            for (const auto& v : opt->results()) rerun << ' ' << lname << ' ' << quote_arg(v);
        }
    }

    try {
        Report report;
        const std::string command = active->get_name();
        if (command == "rates") {
            report = rates_report(data, study, rerun.str());
        } else if (command == "home") {
            report = study_report(EntityKind::HomeSide, command, common, data, study, rerun.str());
        } else if (command == "players") {
            report = study_report(EntityKind::Player, command, common, data, study, rerun.str());
        } else if (command == "teams") {
            report = study_report(EntityKind::Team, command, common, data, study, rerun.str());
        } else if (command == "race") {
            report = race_report(common, data, race, rerun.str());
        } else {
            report = power_report(common, study, power, rerun.str());
        }
        emit(report, common, command, out);
        return kExitOk;
    } catch (const NoDataError& e) {
        print_error(err, "no_data", e.what());
        return kExitData;
    } catch (const DataGapError& e) {
        print_error(err, "data_gap", e.what(), e.items());
        return kExitData;
    } catch (const ConfigError& e) {
        print_error(err, "config", e.what());
        return kExitData;
    } catch (const ArgumentError& e) {
        print_error(err, "usage", e.what());
        return kExitUsage;
    } catch (const std::exception& e) {
        print_error(err, "failure", e.what());
        return kExitFailure;
    }
}

}  // namespace whistle::cli
