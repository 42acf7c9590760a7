#include "whistle/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <tuple>

#include "whistle/ingest.hpp"
#include "whistle/parallel.hpp"
#include "whistle/philox.hpp"

namespace whistle {

namespace {

std::string numbered(const char* prefix, std::size_t i, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s%0*zu", prefix, width, i);
    return buf;
}

std::size_t pick_index(rng::PhiloxEngine& eng, std::size_t n) {
    return std::min(n - 1, static_cast<std::size_t>(eng.uniform() * double(n)));
}

// Event role of a bias target, if it took part.
std::optional<Role> target_role(const GradedEvent& e, std::string_view target) {
    if (target == "home") return role_of(e, EntityKind::HomeSide, {});
    if (target.starts_with("player:")) return role_of(e, EntityKind::Player, target.substr(7));
    if (target.starts_with("team:")) return role_of(e, EntityKind::Team, target.substr(5));
    return std::nullopt;
}

}  // namespace

void SynthSpec::validate() const {
    if (violation_mix.empty()) throw ArgumentError("synthetic violation mix is empty");
    double total = 0.0;
    for (const auto& [type, p] : violation_mix) {
        if (!(p >= 0.0)) throw ArgumentError("negative mix probability for '" + type + "'");
        total += p;
        auto it = base_rates.find(type);
        if (it == base_rates.end()) throw ArgumentError("no base rates for mixed type '" + type + "'");
        const auto& b = it->second;
        if (!(b.ic >= 0.0 && b.ic <= b.inc && b.inc <= 1.0)) {
            throw ArgumentError("base boundaries out of order for '" + type + "'");
        }
        for (const auto& [entity, bias] : injected_bias) {
            const double room = std::min(b.ic, b.inc - b.ic);
            if (std::abs(bias) > room + 1e-12) {
                throw ArgumentError("bias " + std::to_string(bias) + " for '" + entity +
                                    "' infeasible for violation type '" + type + "'");
            }
        }
    }
    if (std::abs(total - 1.0) > 1e-9) throw ArgumentError("violation mix must sum to 1");
    if (n_teams < 2 || players_per_team < 1) throw ArgumentError("need at least two teams with players");
    if (!(events_per_game.mean >= 0.0) || !(events_per_game.dispersion >= 0.0)) {
        throw ArgumentError("events-per-game parameters must be non-negative");
    }
}

SynthSpec default_synth_spec() {
    SynthSpec s;
    const std::pair<const char*, std::tuple<double, double, double>> table[] = {
        {"foul:personal", {0.40, 0.06, 0.16}},        {"foul:shooting", {0.25, 0.07, 0.22}},
        {"foul:loose ball", {0.08, 0.06, 0.40}},      {"foul:offensive", {0.08, 0.08, 0.55}},
        {"turnover:traveling", {0.07, 0.12, 0.70}},   {"stoppage:out-of-bounds", {0.12, 0.08, 0.16}},
    };
    for (const auto& [type, v] : table) {
        const auto [mix, b_ic, b_inc] = v;
        s.violation_mix[type] = mix;
        s.base_rates[type] = Boundaries{b_ic, b_inc};
    }
    return s;
}

SynthDataset generate(const SynthSpec& spec) {
    spec.validate();
    rng::PhiloxEngine eng(spec.seed, static_cast<std::uint32_t>(rng::Stream::Synth));

    std::vector<std::pair<std::string, double>> cumulative_mix;
    double run = 0.0;
    for (const auto& [type, p] : spec.violation_mix) {
        run += p;
        cumulative_mix.emplace_back(type, run);
    }

    auto team_name = [](std::size_t t) { return numbered("team", t + 1, 2); };
    auto player_name = [&](std::size_t t, std::size_t p) { return team_name(t) + " " + numbered("p", p + 1, 2); };

    SynthDataset out;
    out.ground_truth = spec.injected_bias;
    for (std::size_t g = 0; g < spec.n_games; ++g) {
        const std::size_t home = pick_index(eng, spec.n_teams);
        std::size_t away = pick_index(eng, spec.n_teams - 1);
        if (away >= home) ++away;

        std::size_t n_events = 0;
        if (spec.events_per_game.dispersion == 0.0) {
            n_events = static_cast<std::size_t>(std::llround(spec.events_per_game.mean));
        } else {
            const double k = 1.0 / spec.events_per_game.dispersion;
            std::gamma_distribution<double> gamma(k, spec.events_per_game.mean / k);
            std::poisson_distribution<long> poisson(std::max(gamma(eng), 1e-12));
            n_events = static_cast<std::size_t>(poisson(eng));
        }

        const std::string game_id = numbered("SYN", g + 1, 6);
        for (std::size_t i = 0; i < n_events; ++i) {
            GradedEvent e;
            e.game_id = game_id;
            e.season = spec.season;
            e.season_type = spec.season_type;
            const double u_type = eng.uniform() * run;
            auto it = std::find_if(cumulative_mix.begin(), cumulative_mix.end(),
                                   [&](const auto& entry) { return u_type < entry.second; });
            e.violation_type = (it == cumulative_mix.end() ? cumulative_mix.back() : *it).first;

            const bool home_commits = eng.uniform() < 0.5;
            const std::size_t committer = home_commits ? home : away;
            const std::size_t victim = home_commits ? away : home;
            e.committing_side = home_commits ? Side::Home : Side::Visiting;
            e.disadvantaged_side = opposite(e.committing_side);
            e.committing_team = team_name(committer);
            e.disadvantaged_team = team_name(victim);
            e.committing_player = player_name(committer, pick_index(eng, spec.players_per_team));
            e.disadvantaged_player = player_name(victim, pick_index(eng, spec.players_per_team));

            const auto& b = spec.base_rates.find(e.violation_type)->second;
            double p_ic = b.ic;
            double p_inc = b.inc - b.ic;
            for (const auto& [target, bias] : spec.injected_bias) {
                const auto role = target_role(e, target);
                if (!role) continue;
                const double shift = *role == Role::Committing ? bias : -bias;
                p_ic -= shift;
                p_inc += shift;
            }
            if (p_ic < -1e-12 || p_inc < -1e-12) {
                throw ArgumentError("combined bias shifts leave [0, 1] for a '" + e.violation_type + "' event");
            }
            const double u = eng.uniform();
            e.decision = u < p_ic ? Decision::IncorrectCall
                                  : (u < p_ic + p_inc ? Decision::IncorrectNonCall : Decision::CorrectCall);
            out.events.push_back(std::move(e));
        }
    }
    return out;
}

double home_trial_p_value(const SynthSpec& spec, std::uint32_t replicates, std::uint64_t sim_seed) {
    const SynthDataset data = generate(spec);
    const auto parsed = parse_l2m(to_canonical_l2m(data.events));
    StudySpec study;
    study.kind = EntityKind::HomeSide;
    study.seasons = {spec.season, spec.season};
    SimConfig cfg;
    cfg.replicates = replicates;
    cfg.master_seed = sim_seed;
    cfg.threads = 1;
    const auto results = run_study(parsed.events, study, cfg);
    if (results.empty()) throw SimulationError("synthetic trial produced no home ledger");
    return results.front().outcome.p_upper;
}

std::vector<PowerPoint> power_curve(const SynthSpec& spec_template, const std::vector<double>& bias_levels,
                                    const PowerOptions& options) {
    if (options.trials == 0) throw ArgumentError("power curve needs at least one trial");
    std::vector<PowerPoint> out;
    for (const double bias : bias_levels) {
        SynthSpec level = spec_template;
        level.injected_bias["home"] = bias;
        level.validate();

        std::vector<std::uint8_t> hit(options.trials, 0);
        parallel_for_chunks(options.trials, options.threads, 1, [&](std::size_t begin, std::size_t end) {
            for (std::size_t t = begin; t < end; ++t) {
                // Trials share data and simulation seeds across bias levels.
                SynthSpec trial = level;
                trial.seed = rng::derive_seed(rng::derive_seed(options.seed, "data"), t);
                const auto sim_seed = rng::derive_seed(rng::derive_seed(options.seed, "sim"), t);
                hit[t] = home_trial_p_value(trial, options.replicates, sim_seed) <= options.alpha;
            }
        });
        PowerPoint p;
        p.bias = bias;
        p.trials = options.trials;
        for (auto h : hit) p.detections += h;
        out.push_back(p);
    }
    return out;
}

RaceSynthDataset generate_race_null(const RaceSynthSpec& spec) {
    if (spec.n_teams < 2 || spec.n_referees < 3 || spec.players_per_team < 1) {
        throw ArgumentError("race synth needs two teams, three referees and at least one player per team");
    }
    rng::PhiloxEngine eng(spec.seed, static_cast<std::uint32_t>(rng::Stream::RaceSynth));
    RaceSynthDataset out;

    std::vector<std::string> referees;
    std::vector<double> ref_rate;
    for (std::size_t r = 0; r < spec.n_referees; ++r) {
        referees.push_back(numbered("ref", r + 1, 3));
        const Race race = eng.uniform() < spec.referee_black_share ? Race::Black : Race::White;
        out.demographics.push_back({referees.back(), PersonRole::Referee, race});
        ref_rate.push_back(spec.min_tech_rate + (spec.max_tech_rate - spec.min_tech_rate) * eng.uniform());
    }
    std::vector<std::vector<std::string>> rosters(spec.n_teams);
    for (std::size_t t = 0; t < spec.n_teams; ++t) {
        for (std::size_t p = 0; p < spec.players_per_team; ++p) {
            rosters[t].push_back(numbered("t", t + 1, 2) + "-" + numbered("p", p + 1, 2));
            const double u = eng.uniform();
            const Race race = u < spec.player_other_share                            ? Race::Other
                              : u < spec.player_other_share + spec.player_black_share ? Race::Black
                                                                                       : Race::White;
            out.demographics.push_back({rosters[t].back(), PersonRole::Player, race});
        }
    }

    for (std::size_t g = 0; g < spec.n_games; ++g) {
        const std::string game_id = numbered("RG", g + 1, 6);
        const std::size_t home = pick_index(eng, spec.n_teams);
        std::size_t away = pick_index(eng, spec.n_teams - 1);
        if (away >= home) ++away;

        std::vector<std::size_t> crew;
        while (crew.size() < 3) {
            const std::size_t r = pick_index(eng, spec.n_referees);
            if (std::find(crew.begin(), crew.end(), r) == crew.end()) crew.push_back(r);
        }
        for (auto r : crew) out.officials.push_back({game_id, referees[r]});

        std::vector<std::pair<std::string, double>> played;
        for (const std::size_t team : {home, away}) {
            std::vector<double> weights;
            double sum = 0.0;
            for (std::size_t p = 0; p < spec.players_per_team; ++p) {
                weights.push_back(0.2 + eng.uniform() + (p < 5 ? 1.0 : 0.0));
                sum += weights.back();
            }
            for (std::size_t p = 0; p < spec.players_per_team; ++p) {
                const double minutes = std::min(48.0, 240.0 * weights[p] / sum);
                played.emplace_back(rosters[team][p], minutes);
                out.box_scores.push_back({game_id, rosters[team][p], minutes});
            }
        }
        std::vector<double> cumulative;
        double run = 0.0;
        for (const auto& [_, m] : played) cumulative.push_back(run += m);

        for (auto r : crew) {
            const double u_call = eng.uniform();
            const double u_pick = eng.uniform();
            if (u_call < ref_rate[r]) {
                out.tech_fouls.push_back({game_id, referees[r], played[pick_recipient(cumulative, u_pick)].first, {}});
            }
        }
    }
    return out;
}

}  // namespace whistle
