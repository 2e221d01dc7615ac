#pragma once

#include <map>
#include <string>
#include <vector>

#include "campussim/congestion.hpp"
#include "campussim/scenario.hpp"
#include "campussim/stats.hpp"

namespace campussim {

// Deterministic expansion of the population block: one entry per agent, in
// id order, with the study destination already chosen. Seed-independent so
// the stagger planner and the per-run setup agree exactly.
struct PopulationLayout {
    struct Member {
        int dorm_loc = -1;
        int category = 1;
        int study_loc = -1;
    };
    std::vector<Member> members;
    // (dorm location, study location) -> member count; timetabled mode only.
    std::map<std::pair<int, int>, int> dorm_study_counts;
};

// Owns the immutable inputs of one scenario: network, population layout and
// the resolved stagger schedule. run_once is const and reentrant, so
// replications can run concurrently against one Simulation.
class Simulation {
public:
    explicit Simulation(ScenarioConfig cfg);

    const ScenarioConfig& config() const { return cfg_; }
    const RoadNetwork& network() const { return net_; }
    const PopulationLayout& layout() const { return layout_; }
    const StaggerOffsets& stagger_offsets() const { return offsets_; }
    bool stagger_fully_separated() const { return stagger_fully_separated_; }

    const std::vector<std::string>& location_names() const { return loc_names_; }
    int location_index(const std::string& name) const;

    // Congestion planning models (exposed for the stagger-opt subcommand and
    // the acceptance checks). Morning: dorm departures; post-class: study
    // building departures back toward the dormitories.
    CongestionModel morning_congestion_model() const;
    CongestionModel postclass_congestion_model() const;

    RunResult run_once(uint64_t seed) const;
    std::vector<RunResult> run_all() const;
    ReplicationSummary run_replicated() const;

private:
    CongestionModel build_congestion_model(bool morning) const;
    void resolve_stagger();

    ScenarioConfig cfg_;
    RoadNetwork net_;
    std::vector<std::string> loc_names_;  // sorted location names
    std::map<std::string, int> loc_index_;
    PopulationLayout layout_;
    StaggerOffsets offsets_;
    bool stagger_fully_separated_ = true;
};

}  // namespace campussim
