#include "whistle/mc_engine.hpp"

#include <algorithm>
#include <numeric>

#include "whistle/parallel.hpp"

namespace whistle {

void EntityLedger::add(std::string violation_type, Role role, Decision decision) {
    if (decision == Decision::CorrectNonCall) return;
    const bool committed = role == Role::Committing;
    if (decision == Decision::IncorrectNonCall) {
        committed ? ++observed_beta : ++observed_delta;
    } else if (decision == Decision::IncorrectCall) {
        committed ? ++observed_delta : ++observed_beta;
    }
    events.push_back(LedgerEvent{std::move(violation_type), role, decision});
}

std::int64_t observed_whistle_gain(const EntityLedger& ledger) noexcept {
    return ledger.observed_beta - ledger.observed_delta;
}

EntityLedger swap_roles(const EntityLedger& ledger) {
    EntityLedger out;
    out.entity = ledger.entity;
    for (const auto& e : ledger.events) {
        out.add(e.violation_type, e.role == Role::Committing ? Role::Disadvantaged : Role::Committing, e.decision);
    }
    return out;
}

RateLookup lookup_in(const RateTable& table) {
    return [&table](std::string_view type) -> const ViolationRates* {
        auto it = table.find(type);
        return it == table.end() ? nullptr : &it->second;
    };
}

RateLookup lookup_in(const LeaveOneOutRates& rates) {
    return [&rates](std::string_view type) { return rates.find(type); };
}

Decision simulate_event(const ViolationRates& rates, double u) {
    if (!rates.boundaries) {
        throw SimulationError("no decision boundaries for violation type '" + rates.violation_type + "'");
    }
    const auto& b = *rates.boundaries;
    if (u < b.ic) return Decision::IncorrectCall;
    if (u < b.inc) return Decision::IncorrectNonCall;
    return Decision::CorrectCall;
}

namespace {

template <class T>
double p_value_impl(std::span<const T> samples, T observed, Tail tail) {
    if (samples.empty()) throw ArgumentError("empirical p-value needs at least one null sample");
    std::size_t hits = 0;
    for (const T s : samples) {
        if (tail == Tail::Upper ? s >= observed : s <= observed) ++hits;
    }
    return double(1 + hits) / double(samples.size() + 1);
}

}  // namespace

double empirical_p_value(std::span<const std::int64_t> null_samples, std::int64_t observed, Tail tail) {
    return p_value_impl(null_samples, observed, tail);
}

double empirical_p_value(std::span<const double> null_samples, double observed, Tail tail) {
    return p_value_impl(null_samples, observed, tail);
}

double share_gap_pct(double excess, std::size_t n_events) noexcept {
    if (n_events == 0) return 0.0;
    return 2.0 * excess / double(n_events) * 100.0;
}

kernels::CompiledLedger compile_ledger(const EntityLedger& ledger, const RateLookup& rates) {
    std::vector<kernels::EventSpec> specs;
    specs.reserve(ledger.size());
    for (const auto& e : ledger.events) {
        const ViolationRates* r = rates(e.violation_type);
        if (r == nullptr || !r->boundaries) {
            throw SimulationError("no decision boundaries for violation type '" + e.violation_type + "'");
        }
        specs.push_back({r->boundaries->ic, r->boundaries->inc, e.role == Role::Committing ? 1 : -1});
    }
    return kernels::CompiledLedger(specs);
}

SimOutcome summarize(std::int64_t observed, std::size_t n_events, std::vector<std::int64_t> null_samples) {
    SimOutcome out;
    out.n_events = n_events;
    out.observed_wg = observed;
    const std::int64_t total = std::accumulate(null_samples.begin(), null_samples.end(), std::int64_t{0});
    out.null_mean = double(total) / double(null_samples.size());
    out.p_upper = empirical_p_value(null_samples, observed, Tail::Upper);
    out.p_lower = empirical_p_value(null_samples, observed, Tail::Lower);
    out.excess = double(observed) - out.null_mean;
    out.share_gap_pct = share_gap_pct(out.excess, n_events);
    out.null_samples = std::move(null_samples);
    return out;
}

SimOutcome run_simulation(const EntityLedger& ledger, const RateLookup& rates, const SimConfig& config) {
    if (config.replicates == 0) throw ArgumentError("replicate count must be at least 1");
    const kernels::CompiledLedger compiled = compile_ledger(ledger, rates);

    std::vector<std::int64_t> samples(config.replicates);
    parallel_for_chunks(samples.size(), config.threads, 256, [&](std::size_t begin, std::size_t end) {
        kernels::whistle_gain_batch(compiled, config.master_seed, static_cast<std::uint32_t>(begin),
                                    std::span(samples).subspan(begin, end - begin), config.isa);
    });
    return summarize(observed_whistle_gain(ledger), ledger.size(), std::move(samples));
}

}  // namespace whistle
