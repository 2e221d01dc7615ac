#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "campussim/control.hpp"
#include "campussim/infection.hpp"
#include "campussim/itinerary.hpp"
#include "campussim/locomotion.hpp"
#include "campussim/road_network.hpp"
#include "campussim/speed_model.hpp"
#include "campussim/venue.hpp"

namespace campussim {

// One population block: so many agents of one category housed in one
// dormitory building.
struct PopulationGroup {
    std::string dormitory;
    int category = 1;
    int count = 0;
};

struct PopulationSpec {
    int total = 1680;
    std::vector<double> category_mix = {0.3, 0.3, 0.2, 0.2};
    std::string dormitory_prefix = "dormitory";
    std::vector<PopulationGroup> groups;  // when set, overrides total/mix
    std::string itinerary_mode = "timetabled";  // or "free_walk"

    // free-walk sampling (cruise-style scenarios)
    int free_walk_min_outings = 2;
    int free_walk_max_outings = 3;
    double free_walk_start_s = 28800.0;
    double free_walk_end_s = 72000.0;
    double free_walk_dwell_min_s = 1800.0;
    double free_walk_dwell_max_s = 5400.0;
    std::vector<std::string> free_walk_targets;

    void validate() const;
};

struct EngineSpec {
    int horizon_days = 21;
    int initial_infected = 1;
    int replications = 20;
    uint64_t seed = 12345;
    bool parallel_replications = true;
    bool parallel_agents = false;
    double heatmap_cell_m = 2.0;

    void validate() const;
};

struct ScenarioConfig {
    nlohmann::json map_json;  // always inlined after parsing
    PopulationSpec population;
    InfectionParams infection;
    ControlPolicy control;
    Timetable timetable;
    SpeedModel speeds;
    LocomotionParams locomotion;
    std::vector<VenueSpec> venues;
    EngineSpec engine;

    static ScenarioConfig from_file(const std::string& path);
    static ScenarioConfig from_json(const nlohmann::json& j, const std::string& base_dir,
                                    const std::string& origin_name);

    // Fully resolved round-trippable form (defaults filled, map inlined).
    nlohmann::json to_json() const;

    // Applies a dotted-path override ("infection.beta=0.6"); the key must
    // resolve to an existing scalar and the value must parse as its type.
    void apply_override(const std::string& dotted_key, const std::string& value);

    RoadNetwork load_network() const;
    void validate(const RoadNetwork& net) const;

    // Venue spec for a location name: exact match, then longest '*' pattern.
    const VenueSpec& venue_for(const std::string& location_name) const;
};

// Names accepted by the sweep subcommand mapped to override paths.
const std::map<std::string, std::string>& sweepable_parameters();

}  // namespace campussim
