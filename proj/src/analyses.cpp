#include "whistle/analyses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "whistle/philox.hpp"

namespace whistle {

void StudySpec::validate() const {
    if (seasons.first > seasons.last) throw ArgumentError("empty season range");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0, 1)");
    if (min_involvements < 0) throw ArgumentError("min_involvements must be non-negative");
}

std::vector<GradedEvent> select_events(std::span<const GradedEvent> events, const StudySpec& spec) {
    std::vector<GradedEvent> out;
    for (const auto& e : events) {
        if (e.is_cnc() || !spec.seasons.contains(e.season) || !matches(spec.season_type, e.season_type)) continue;
        out.push_back(e);
    }
    return out;
}

std::optional<Role> role_of(const GradedEvent& e, EntityKind kind, std::string_view entity) {
    auto is = [&](const std::optional<std::string>& key) { return key && *key == entity; };
    switch (kind) {
        case EntityKind::HomeSide:
            if (e.committing_side == Side::Home) return Role::Committing;
            if (e.committing_side == Side::Visiting) return Role::Disadvantaged;
            if (e.disadvantaged_side == Side::Home) return Role::Disadvantaged;
            if (e.disadvantaged_side == Side::Visiting) return Role::Committing;
            return std::nullopt;
        case EntityKind::Player: {
            const bool c = is(e.committing_player);
            const bool d = is(e.disadvantaged_player);
            if (c == d) return std::nullopt;
            return c ? Role::Committing : Role::Disadvantaged;
        }
        case EntityKind::Team: {
            const bool c = is(e.committing_team);
            const bool d = is(e.disadvantaged_team);
            if (c == d) return std::nullopt;
            return c ? Role::Committing : Role::Disadvantaged;
        }
    }
    return std::nullopt;
}

std::vector<EntityLedger> build_ledgers(std::span<const GradedEvent> events, const StudySpec& spec) {
    spec.validate();
    const auto selected = select_events(events, spec);
    std::vector<EntityLedger> out;

    if (spec.kind == EntityKind::HomeSide) {
        EntityLedger ledger;
        ledger.entity = "home";
        for (const auto& e : selected) {
            if (auto role = role_of(e, EntityKind::HomeSide, {})) ledger.add(e.violation_type, *role, e.decision);
        }
        if (!ledger.events.empty()) out.push_back(std::move(ledger));
        return out;
    }

    std::map<std::string, EntityLedger, std::less<>> ledgers;
    auto credit = [&](const std::optional<std::string>& key, const GradedEvent& e) {
        if (!key) return;
        auto role = role_of(e, spec.kind, *key);
        if (!role) return;
        auto& ledger = ledgers[*key];
        ledger.entity = *key;
        ledger.add(e.violation_type, *role, e.decision);
    };
    for (const auto& e : selected) {
        if (spec.kind == EntityKind::Player) {
            credit(e.committing_player, e);
            if (e.disadvantaged_player != e.committing_player) credit(e.disadvantaged_player, e);
        } else {
            credit(e.committing_team, e);
            if (e.disadvantaged_team != e.committing_team) credit(e.disadvantaged_team, e);
        }
    }
    const std::int64_t threshold = spec.kind == EntityKind::Player ? spec.min_involvements : 0;
    for (auto& [key, ledger] : ledgers) {
        if (std::int64_t(ledger.size()) >= threshold) out.push_back(std::move(ledger));
    }
    return out;
}

namespace {

LeaveOneOutRates smooth(const LeaveOneOutRates& loo, double pseudo_count) {
    LeaveOneOutRates out;
    out.rates = smooth_table(loo.rates, pseudo_count);
    out.fallback_types = loo.fallback_types;
    if (!loo.fallback.empty()) {
        ViolationCounts prior;
        for (const auto& [_, r] : loo.rates) prior += r.counts;
        for (const auto& [_, r] : loo.fallback) prior += r.counts;
        for (const auto& [type, r] : loo.fallback) out.fallback.emplace(type, smoothed_rates(r.counts, prior, pseudo_count));
    }
    return out;
}

}  // namespace

std::vector<EntityResult> run_study(std::span<const GradedEvent> events, const StudySpec& spec,
                                    const SimConfig& config) {
    const auto ledgers = build_ledgers(events, spec);
    const auto selected = select_events(events, spec);

    std::vector<EntityResult> results;
    results.reserve(ledgers.size());
    const std::string prefix = std::string(to_string(spec.kind)) + ":";

    if (spec.kind == EntityKind::HomeSide) {
        RateTable rates = compute_rates(selected);
        if (config.smoothing) rates = smooth_table(rates, *config.smoothing);
        for (const auto& ledger : ledgers) {
            SimConfig cfg = config;
            cfg.master_seed = rng::derive_seed(config.master_seed, prefix + ledger.entity);
            results.push_back({ledger.entity, run_simulation(ledger, lookup_in(rates), cfg), {}});
        }
    } else {
        for (const auto& ledger : ledgers) {
            LeaveOneOutRates loo = leave_one_out_rates(selected, ledger.entity, spec.kind);
            if (config.smoothing) loo = smooth(loo, *config.smoothing);
            SimConfig cfg = config;
            cfg.master_seed = rng::derive_seed(config.master_seed, prefix + ledger.entity);
            EntityResult r{ledger.entity, run_simulation(ledger, lookup_in(loo), cfg), {}};
            r.fallback_types.assign(loo.fallback_types.begin(), loo.fallback_types.end());
            results.push_back(std::move(r));
        }
    }

    std::stable_sort(results.begin(), results.end(), [](const EntityResult& a, const EntityResult& b) {
        if (a.outcome.p_upper != b.outcome.p_upper) return a.outcome.p_upper < b.outcome.p_upper;
        return a.entity < b.entity;
    });
    return results;
}

double binomial_meta_test(std::size_t m, std::size_t r, double alpha) {
    if (r > m) throw ArgumentError("meta-test: significant count exceeds number of tests");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("meta-test: alpha must lie in (0, 1)");
    if (r == 0) return 1.0;

    const double log_a = std::log(alpha);
    const double log_b = std::log1p(-alpha);
    const double lg_m = std::lgamma(double(m) + 1.0);
    std::vector<double> terms;
    terms.reserve(m - r + 1);
    for (std::size_t k = r; k <= m; ++k) {
        const double log_choose = lg_m - std::lgamma(double(k) + 1.0) - std::lgamma(double(m - k) + 1.0);
        terms.push_back(log_choose + double(k) * log_a + double(m - k) * log_b);
    }
    const double peak = *std::max_element(terms.begin(), terms.end());
    double sum = 0.0;
    for (double t : terms) sum += std::exp(t - peak);
    return std::min(1.0, std::exp(peak + std::log(sum)));
}

std::string_view significant_direction(const SimOutcome& o, double alpha) {
    if (o.p_upper <= alpha) return "positive";
    if (o.p_lower <= alpha) return "negative";
    return "none";
}

SignificanceSummary classify_significance(std::span<const EntityResult> results, double alpha) {
    if (results.empty()) throw ArgumentError("no outcomes to classify");
    if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("alpha must lie in (0, 1)");
    SignificanceSummary s;
    for (const auto& r : results) {
        if (r.outcome.p_upper <= alpha) s.positive.push_back(r.entity);
        if (r.outcome.p_lower <= alpha) s.negative.push_back(r.entity);
    }
    const std::size_t m = results.size();
    s.positive_meta = {m, s.positive.size(), alpha, binomial_meta_test(m, s.positive.size(), alpha)};
    s.negative_meta = {m, s.negative.size(), alpha, binomial_meta_test(m, s.negative.size(), alpha)};
    return s;
}

}  // namespace whistle
