#include "whistle/race_audit.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <utility>

#include "whistle/mc_engine.hpp"
#include "whistle/parallel.hpp"
#include "whistle/philox.hpp"

namespace whistle {

namespace {

bool studied(Race r) { return r == Race::White || r == Race::Black; }

using RaceIndex = std::map<std::string, Race, std::less<>>;

std::pair<RaceIndex, RaceIndex> index_races(std::span<const PersonDemographics> demographics) {
    RaceIndex referees;
    RaceIndex players;
    for (const auto& d : demographics) (d.role == PersonRole::Referee ? referees : players)[d.person] = d.race;
    return {std::move(referees), std::move(players)};
}

Race lookup(const RaceIndex& idx, std::string_view person) {
    auto it = idx.find(person);
    return it == idx.end() ? Race::Unknown : it->second;
}

}  // namespace

ExposureSet build_exposures(std::span<const OfficialAssignment> officials, std::span<const BoxScoreLine> box_scores,
                            std::span<const PersonDemographics> demographics) {
    const auto [referee_race, player_race] = index_races(demographics);

    std::map<std::string, std::set<std::string>, std::less<>> crews;
    for (const auto& a : officials) crews[a.game_id].insert(a.referee);

    std::map<std::string, std::vector<RosterEntry>, std::less<>> rosters;
    for (const auto& line : box_scores) {
        if (!(line.minutes_played > 0.0)) continue;
        auto& roster = rosters[line.game_id];
        auto it = std::find_if(roster.begin(), roster.end(), [&](const RosterEntry& r) { return r.player == line.player; });
        if (it != roster.end()) {
            it->minutes += line.minutes_played;
        } else {
            roster.push_back({line.player, line.minutes_played, lookup(player_race, line.player)});
        }
    }

    ExposureSet out;
    out.total_games = crews.size();
    std::vector<std::string> missing_box;
    for (const auto& [game, crew] : crews) {
        const bool complete = std::all_of(crew.begin(), crew.end(),
                                          [&](const std::string& ref) { return studied(lookup(referee_race, ref)); });
        if (!complete) {
            out.dropped_games.push_back(game);
            continue;
        }
        auto roster_it = rosters.find(game);
        if (roster_it == rosters.end()) {
            missing_box.push_back(game);
            continue;
        }
        for (const auto& ref : crew) {
            RefGameExposure e;
            e.referee = ref;
            e.game_id = game;
            e.referee_race = lookup(referee_race, ref);
            e.roster = roster_it->second;
            for (const auto& p : e.roster) {
                if (!studied(p.race)) continue;
                (p.race == e.referee_race ? e.same_race_minutes : e.diff_race_minutes) += p.minutes;
            }
            out.exposures.push_back(std::move(e));
        }
    }
    if (!missing_box.empty()) {
        throw DataGapError("box score missing for " + std::to_string(missing_box.size()) + " retained game(s)",
                           std::move(missing_box));
    }
    return out;
}

std::optional<double> per48(std::int64_t fouls, double minutes) {
    if (!(minutes > 0.0)) return std::nullopt;
    return double(fouls) * 48.0 / minutes;
}

namespace {

struct Buckets {
    double same_minutes = 0.0;
    double diff_minutes = 0.0;
};

Buckets total_exposure(std::span<const RefGameExposure> exposures) {
    Buckets b;
    for (const auto& e : exposures) {
        b.same_minutes += e.same_race_minutes;
        b.diff_minutes += e.diff_race_minutes;
    }
    return b;
}

std::optional<double> delta_from(std::int64_t same, std::int64_t diff, const Buckets& b) {
    const auto ts = per48(same, b.same_minutes);
    const auto td = per48(diff, b.diff_minutes);
    if (!ts || !td) return std::nullopt;
    return *td - *ts;
}

}  // namespace

TechRateSummary tech_rates(std::span<const RefGameExposure> exposures, std::span<const TechFoulEvent> fouls,
                           std::span<const PersonDemographics> demographics) {
    const auto [referee_race, player_race] = index_races(demographics);
    std::map<std::pair<std::string_view, std::string_view>, const RefGameExposure*> by_key;
    for (const auto& e : exposures) by_key[{e.referee, e.game_id}] = &e;

    TechRateSummary s;
    const Buckets b = total_exposure(exposures);
    s.same_minutes = b.same_minutes;
    s.diff_minutes = b.diff_minutes;
    for (const auto& f : fouls) {
        auto it = by_key.find({f.referee, f.game_id});
        const Race pr = lookup(player_race, f.player);
        if (it == by_key.end() || !studied(pr)) {
            ++s.n_fouls_excluded;
            continue;
        }
        ++s.n_fouls_used;
        (pr == it->second->referee_race ? s.same_fouls : s.diff_fouls) += 1;
    }
    if ((s.same_fouls > 0 && !(s.same_minutes > 0.0)) || (s.diff_fouls > 0 && !(s.diff_minutes > 0.0))) {
        throw SimulationError("technical fouls recorded in a race bucket with zero exposure");
    }
    s.tau_same = per48(s.same_fouls, s.same_minutes);
    s.tau_diff = per48(s.diff_fouls, s.diff_minutes);
    s.delta_tau = delta_from(s.same_fouls, s.diff_fouls, b);
    return s;
}

std::map<std::string, double, std::less<>> per_referee_rates(std::span<const RefGameExposure> exposures,
                                                             std::span<const TechFoulEvent> fouls) {
    std::map<std::string, std::int64_t, std::less<>> games;
    std::set<std::pair<std::string_view, std::string_view>> retained;
    for (const auto& e : exposures) {
        ++games[e.referee];
        retained.insert({e.referee, e.game_id});
    }
    std::map<std::string, std::int64_t, std::less<>> calls;
    for (const auto& f : fouls) {
        if (retained.contains({f.referee, f.game_id})) ++calls[f.referee];
    }
    std::map<std::string, double, std::less<>> out;
    for (const auto& [ref, n] : games) {
        auto it = calls.find(ref);
        out[ref] = double(it == calls.end() ? 0 : it->second) / double(n);
    }
    return out;
}

std::size_t pick_recipient(std::span<const double> cumulative_minutes, double u) {
    const double target = u * cumulative_minutes.back();
    const auto it = std::upper_bound(cumulative_minutes.begin(), cumulative_minutes.end(), target);
    return std::min<std::size_t>(std::size_t(it - cumulative_minutes.begin()), cumulative_minutes.size() - 1);
}

namespace {

// Per-exposure data flattened for the replicate loop.
struct CompiledExposure {
    double rate = 0.0;
    std::size_t first = 0;  // offset into cumulative/bucket arrays
    std::size_t count = 0;
};

constexpr std::uint8_t kSame = 0;
constexpr std::uint8_t kDiff = 1;
constexpr std::uint8_t kExcluded = 2;

std::uint32_t poisson_inverse(double lambda, double u) {
    double p = std::exp(-lambda);
    double cdf = p;
    std::uint32_t k = 0;
    while (u >= cdf && k < 64) {
        ++k;
        p *= lambda / k;
        cdf += p;
    }
    return k;
}

}  // namespace

RaceNullResult simulate_race_null(std::span<const RefGameExposure> exposures,
                                  const std::map<std::string, double, std::less<>>& referee_rates,
                                  double observed_delta, const RaceNullConfig& config) {
    if (config.replicates == 0) throw ArgumentError("replicate count must be at least 1");
    RaceNullResult result;
    result.observed_delta = observed_delta;

    const Buckets b = total_exposure(exposures);
    if (!(b.same_minutes > 0.0) || !(b.diff_minutes > 0.0)) {
        result.degenerate = true;
        result.diagnostic = !(b.diff_minutes > 0.0)
                                ? "no different-race exposure: every player shares every referee's race"
                                : "no same-race exposure: no player shares a referee's race";
        return result;
    }

    std::vector<CompiledExposure> compiled;
    std::vector<double> cumulative;
    std::vector<std::uint8_t> bucket;
    compiled.reserve(exposures.size());
    for (const auto& e : exposures) {
        CompiledExposure c;
        auto it = referee_rates.find(e.referee);
        c.rate = it == referee_rates.end() ? 0.0 : it->second;
        if (config.model == TechCallModel::Bernoulli) c.rate = std::clamp(c.rate, 0.0, 1.0);
        c.first = cumulative.size();
        double run = 0.0;
        for (const auto& p : e.roster) {
            if (!(p.minutes > 0.0)) continue;
            run += p.minutes;
            cumulative.push_back(run);
            bucket.push_back(!studied(p.race) ? kExcluded : (p.race == e.referee_race ? kSame : kDiff));
        }
        c.count = cumulative.size() - c.first;
        if (c.count == 0 && c.rate > 0.0) {
            throw SimulationError("empty roster in game " + e.game_id + " for referee " + e.referee);
        }
        compiled.push_back(c);
    }
    if (compiled.size() > 0xFFFFFFFFull) throw SimulationError("too many referee-games for the counter layout");

    const auto key = rng::key_from_seed(config.seed);
    constexpr auto stream = static_cast<std::uint32_t>(rng::Stream::RaceNull);
    result.null_samples.assign(config.replicates, 0.0);

    parallel_for_chunks(config.replicates, config.threads, 16, [&](std::size_t begin, std::size_t end) {
        for (std::size_t rep = begin; rep < end; ++rep) {
            std::int64_t same = 0;
            std::int64_t diff = 0;
            auto credit = [&](const CompiledExposure& c, double u) {
                const std::span<const double> cum(cumulative.data() + c.first, c.count);
                const auto which = bucket[c.first + pick_recipient(cum, u)];
                if (which == kSame) ++same;
                if (which == kDiff) ++diff;
            };
            for (std::size_t i = 0; i < compiled.size(); ++i) {
                const auto& c = compiled[i];
                if (c.rate <= 0.0) continue;
                const auto w = rng::philox4x32({std::uint32_t(i), 0, std::uint32_t(rep), stream}, key);
                const double u_call = rng::to_unit53(w[0], w[1]);
                const double u_pick = rng::to_unit53(w[2], w[3]);
                if (config.model == TechCallModel::Bernoulli) {
                    if (u_call < c.rate) credit(c, u_pick);
                    continue;
                }
                const std::uint32_t k = poisson_inverse(c.rate, u_call);
                for (std::uint32_t j = 0; j < k; ++j) {
                    if (j == 0) {
                        credit(c, u_pick);
                        continue;
                    }
                    const auto extra = rng::philox4x32({std::uint32_t(i), j, std::uint32_t(rep), stream}, key);
                    credit(c, rng::to_unit53(extra[0], extra[1]));
                }
            }
            result.null_samples[rep] = *delta_from(same, diff, b);
        }
    });

    result.null_mean = std::accumulate(result.null_samples.begin(), result.null_samples.end(), 0.0) /
                       double(result.null_samples.size());
    result.p_value = empirical_p_value(result.null_samples, observed_delta, Tail::Upper);
    return result;
}

Histogram make_histogram(std::span<const double> samples, std::size_t bins) {
    Histogram h;
    if (samples.empty() || bins == 0) return h;
    const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
    double lo = *lo_it;
    double hi = *hi_it;
    if (hi == lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double width = (hi - lo) / double(bins);
    h.edges.resize(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * double(i);
    h.edges.back() = hi;
    h.counts.assign(bins, 0);
    for (double s : samples) {
        auto idx = static_cast<std::size_t>((s - lo) / width);
        h.counts[std::min(idx, bins - 1)] += 1;
    }
    return h;
}

}  // namespace whistle
