#include "campussim/control.hpp"

#include <algorithm>
#include <set>

namespace campussim {

void ControlPolicy::validate() const {
    if (batch.enabled && !(batch.split > 0.0 && batch.split < 1.0)) {
        throw ConfigError("control.batch.split: must lie in (0,1)");
    }
    if (stagger.enabled) {
        if (!(stagger.max_offset_s >= 0.0)) {
            throw ConfigError("control.stagger.max_offset_s: must be >= 0");
        }
        if (!(stagger.step_s > 0.0)) throw ConfigError("control.stagger.step_s: must be > 0");
        for (const auto& [name, off] : stagger.morning_by_dorm) {
            if (off < 0.0 || off > stagger.max_offset_s) {
                throw ConfigError("control.stagger offset for '" + name +
                                  "' outside [0, max_offset]");
            }
        }
        for (const auto& [name, off] : stagger.postclass_by_group) {
            if (off < 0.0 || off > stagger.max_offset_s) {
                throw ConfigError("control.stagger offset for '" + name +
                                  "' outside [0, max_offset]");
            }
        }
    }
    if (isolation.enabled) {
        if (isolation.detection_delay_days < 0) {
            throw ConfigError("control.isolation.detection_delay_days: must be >= 0");
        }
        if (isolation.tracing_window_days < 1) {
            throw ConfigError("control.isolation.tracing_window_days: must be >= 1");
        }
        if (!(isolation.close_contact_seconds >= 0.0)) {
            throw ConfigError("control.isolation.close_contact_seconds: must be >= 0");
        }
    }
}

int apply_batch(std::span<Agent> agents, const BatchPolicy& policy, uint64_t seed) {
    if (!policy.enabled) {
        for (Agent& a : agents) a.batch = 0;
        return static_cast<int>(agents.size());
    }
    if (!(policy.split > 0.0 && policy.split < 1.0)) {
        throw ConfigError("control.batch.split: must lie in (0,1)");
    }
    // Deterministic shuffled split: ceil(n*split) agents go to the morning.
    size_t n = agents.size();
    std::vector<int> order(n);
    for (size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
    Substream rng(seed, StreamId::Setup, 0x6261746368ULL);  // batch shuffle stream
    for (size_t i = n; i > 1; --i) {
        size_t j = rng.uniform_index(i);
        std::swap(order[i - 1], order[j]);
    }
    size_t morning = static_cast<size_t>(std::ceil(static_cast<double>(n) * policy.split));
    for (size_t k = 0; k < n; ++k) {
        agents[order[k]].batch = k < morning ? 0 : 1;
    }
    return static_cast<int>(morning);
}

uint64_t ContactLog::pair_key(int a, int b) {
    uint32_t lo = static_cast<uint32_t>(std::min(a, b));
    uint32_t hi = static_cast<uint32_t>(std::max(a, b));
    return (static_cast<uint64_t>(hi) << 32) | lo;
}

void ContactLog::add(int a, int b, double seconds) {
    days_.back()[pair_key(a, b)] += seconds;
}

void ContactLog::roll_day(int keep_days) {
    days_.emplace_back();
    while (static_cast<int>(days_.size()) > std::max(1, keep_days)) days_.pop_front();
}

std::vector<std::pair<int, double>> ContactLog::contacts_of(int agent) const {
    std::map<int, double> acc;
    for (const auto& day : days_) {
        for (const auto& [key, seconds] : day) {
            int lo = static_cast<int>(key & 0xffffffffu);
            int hi = static_cast<int>(key >> 32);
            if (lo == agent) acc[hi] += seconds;
            else if (hi == agent) acc[lo] += seconds;
        }
    }
    return {acc.begin(), acc.end()};
}

std::vector<IsolationAction> trace_and_isolate(int day, std::span<const Agent> agents,
                                               const ContactLog& log,
                                               const IsolationPolicy& policy) {
    std::vector<IsolationAction> actions;
    if (!policy.enabled) return actions;
    std::set<int> already;
    for (const Agent& a : agents) {
        if (a.isolated || a.diagnosis_day < 0) continue;
        if (day - a.diagnosis_day < policy.detection_delay_days) continue;
        if (already.insert(a.id).second) actions.push_back({a.id, false});
        for (const auto& [partner, seconds] : log.contacts_of(a.id)) {
            if (seconds < policy.close_contact_seconds) continue;
            const Agent& p = agents[partner];
            if (p.isolated || already.count(partner)) continue;
            already.insert(partner);
            actions.push_back({partner, true});
        }
    }
    return actions;
}

}  // namespace campussim
