#pragma once

#include <span>
#include <vector>

#include "campussim/agent.hpp"
#include "campussim/road_network.hpp"
#include "campussim/speed_model.hpp"

namespace campussim {

struct LocomotionParams {
    double dt_s = 1.0;
    double lane_width_m = 0.75;
    // Follow-the-leader governor: full slowdown below the hard gap, linear
    // up to the preferred spacing. Off = free flow (speed spread only).
    bool spacing_enabled = true;

    void validate() const {
        if (!(dt_s > 0.0)) throw ConfigError("locomotion.dt_s: must be > 0");
        if (!(lane_width_m > 0.0)) throw ConfigError("locomotion.lane_width_m: must be > 0");
    }
};

// Builds the path state for one road trip; `cohort_rank` spaces simultaneous
// departures into lanes and a queue behind the door.
ActivePath make_active_path(const RoadNetwork& net, const std::vector<int>& node_path,
                            const LocomotionParams& params, const SpeedModel& speeds,
                            int cohort_rank);

// World position of an agent at its current progress (lane offset applied).
Vec2 path_position(const ActivePath& path, double lane_width_m = 0.75);

// Advances every agent in `mover_ids` by one dt. Reads only the previous
// step's progress values, so the per-agent loop is safe to run in parallel
// and the result is identical for any thread count. Returns ids that reached
// the end of their path this step, in ascending id order.
std::vector<int> step_locomotion(std::span<Agent> agents, const std::vector<int>& mover_ids,
                                 const LocomotionParams& params, const SpeedModel& speeds,
                                 bool parallel);

}  // namespace campussim
