#include "whistle/rates.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace whistle {

void ViolationCounts::add(Decision d) {
    switch (d) {
        case Decision::CorrectCall: ++cc; break;
        case Decision::IncorrectCall: ++ic; break;
        case Decision::IncorrectNonCall: ++inc; break;
        case Decision::CorrectNonCall: break;
    }
}

ViolationCounts& ViolationCounts::operator+=(const ViolationCounts& other) {
    cc += other.cc;
    ic += other.ic;
    inc += other.inc;
    return *this;
}

CountTable count_decisions(std::span<const GradedEvent> events) {
    CountTable out;
    for (const auto& e : events) {
        if (e.is_cnc()) continue;
        auto [it, inserted] = out.try_emplace(e.violation_type);
        if (inserted) it->second.violation_type = e.violation_type;
        it->second.add(e.decision);
    }
    return out;
}

ViolationRates rates_from_counts(const ViolationCounts& c) {
    ViolationRates r;
    r.violation_type = c.violation_type;
    r.counts = c;
    if (c.cc + c.ic > 0) r.precision = double(c.cc) / double(c.cc + c.ic);
    if (c.cc + c.inc > 0) r.recall = double(c.cc) / double(c.cc + c.inc);
    if (const auto total = c.total(); total > 0) {
        r.boundaries = Boundaries{double(c.ic) / double(total), double(c.ic + c.inc) / double(total)};
    }
    return r;
}

RateTable compute_rates(std::span<const GradedEvent> events) {
    RateTable out;
    for (const auto& [type, counts] : count_decisions(events)) out.emplace(type, rates_from_counts(counts));
    return out;
}

ViolationCounts aggregate(const CountTable& counts) {
    ViolationCounts sum;
    for (const auto& [_, c] : counts) sum += c;
    return sum;
}

std::string_view to_string(EntityKind k) {
    switch (k) {
        case EntityKind::HomeSide: return "home";
        case EntityKind::Player: return "player";
        case EntityKind::Team: return "team";
    }
    return "?";
}

bool involves(const GradedEvent& e, std::string_view entity, EntityKind kind) {
    auto is = [&](const std::optional<std::string>& key) { return key && *key == entity; };
    switch (kind) {
        case EntityKind::Player: return is(e.committing_player) || is(e.disadvantaged_player);
        case EntityKind::Team: return is(e.committing_team) || is(e.disadvantaged_team);
        case EntityKind::HomeSide: return e.committing_side != Side::Unknown || e.disadvantaged_side != Side::Unknown;
    }
    return false;
}

const ViolationRates* LeaveOneOutRates::find(std::string_view violation_type) const {
    if (auto it = rates.find(violation_type); it != rates.end()) return &it->second;
    if (auto it = fallback.find(violation_type); it != fallback.end()) return &it->second;
    return nullptr;
}

LeaveOneOutRates leave_one_out_rates(std::span<const GradedEvent> events, std::string_view excluded_entity,
                                     EntityKind kind) {
    std::vector<GradedEvent> kept;
    kept.reserve(events.size());
    for (const auto& e : events) {
        if (!involves(e, excluded_entity, kind)) kept.push_back(e);
    }
    LeaveOneOutRates out;
    out.rates = compute_rates(kept);
    for (auto& [type, rates] : compute_rates(events)) {
        if (!out.rates.contains(type)) {
            out.fallback_types.insert(type);
            out.fallback.emplace(type, std::move(rates));
        }
    }
    return out;
}

ViolationRates smoothed_rates(const ViolationCounts& counts, const ViolationCounts& prior, double pseudo_count) {
    if (!std::isfinite(pseudo_count) || pseudo_count < 0.0) {
        throw ArgumentError("pseudo-count must be finite and non-negative");
    }
    if (pseudo_count == 0.0) return rates_from_counts(counts);
    const double prior_total = double(prior.total());
    if (prior_total <= 0.0) throw ArgumentError("smoothing prior has no events");

    const double m = pseudo_count;
    const double cc = counts.cc + m * (prior.cc / prior_total);
    const double ic = counts.ic + m * (prior.ic / prior_total);
    const double inc = counts.inc + m * (prior.inc / prior_total);
    const double total = double(counts.total()) + m;

    ViolationRates r;
    r.violation_type = counts.violation_type;
    r.counts = counts;
    if (cc + ic > 0.0) r.precision = cc / (cc + ic);
    if (cc + inc > 0.0) r.recall = cc / (cc + inc);
    r.boundaries = Boundaries{ic / total, std::min(1.0, (ic + inc) / total)};
    return r;
}

RateTable smooth_table(const RateTable& table, double pseudo_count) {
    ViolationCounts prior;
    for (const auto& [_, r] : table) prior += r.counts;
    RateTable out;
    for (const auto& [type, r] : table) out.emplace(type, smoothed_rates(r.counts, prior, pseudo_count));
    return out;
}

}  // namespace whistle
