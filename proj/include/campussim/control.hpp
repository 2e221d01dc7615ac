#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "campussim/agent.hpp"
#include "campussim/rng.hpp"
#include "campussim/road_network.hpp"

namespace campussim {

struct BatchPolicy {
    bool enabled = false;
    double split = 0.5;  // morning-cohort fraction
};

struct StaggerPolicy {
    bool enabled = false;
    double max_offset_s = 1200.0;  // 20 min cap on any departure offset
    double step_s = 60.0;
    // Explicit offsets; when empty and enabled, the optimizer fills them in.
    std::map<std::string, double> morning_by_dorm;
    std::map<std::string, double> postclass_by_group;
    // Study locations that keep their own post-class group; the rest share
    // the "others" slot.
    std::vector<std::string> postclass_separate = {"teaching_building", "library"};
};

struct IsolationPolicy {
    bool enabled = false;
    int detection_delay_days = 0;     // days between diagnosis and isolation
    int tracing_window_days = 2;
    double close_contact_seconds = 300.0;
};

struct ControlPolicy {
    BatchPolicy batch;
    StaggerPolicy stagger;
    IsolationPolicy isolation;

    void validate() const;
};

// Splits class-task agents into morning/afternoon cohorts. Seeded and stable:
// the same seed always produces the same assignment. Returns the morning
// cohort size.
int apply_batch(std::span<Agent> agents, const BatchPolicy& policy, uint64_t seed);

// Per-day co-presence seconds between agent pairs within the transmission
// radius, kept for the tracing window.
class ContactLog {
public:
    void add(int a, int b, double seconds);
    // Closes the current day and drops days older than `keep_days`.
    void roll_day(int keep_days);
    // Total logged co-presence of `agent` with everyone over the kept window,
    // in ascending partner order.
    std::vector<std::pair<int, double>> contacts_of(int agent) const;

private:
    static uint64_t pair_key(int a, int b);
    std::deque<std::unordered_map<uint64_t, double>> days_{1};
};

struct IsolationAction {
    int agent_id;
    bool suspected;  // true = traced contact, false = diagnosed case
};

// Diagnosed agents whose detection delay has elapsed are isolated, along
// with their close contacts over the tracing window. `agents` is scanned,
// not mutated; the engine applies the returned actions.
std::vector<IsolationAction> trace_and_isolate(int day, std::span<const Agent> agents,
                                               const ContactLog& log,
                                               const IsolationPolicy& policy);

}  // namespace campussim
