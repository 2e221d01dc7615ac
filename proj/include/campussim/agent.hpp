#pragma once

#include <cstdint>
#include <vector>

#include "campussim/infection.hpp"

namespace campussim {

// Where a coordinate lives. Context 0 is the outdoor road plane; every room
// gets its own context, so distances (and therefore exposure) are only
// defined between agents sharing a venue or both out on the roads.
constexpr int kRoadContext = 0;

struct PlacedPosition {
    int context = kRoadContext;
    double x = 0.0;
    double y = 0.0;
};

enum class GeneralState : uint8_t { Rest = 0, Move = 1, Visit = 2 };

// Progress of one agent along a road path (a node-id polyline). Negative
// progress models the queue forming behind the doorway before release.
struct ActivePath {
    std::vector<int> nodes;
    std::vector<double> cum_len_m;   // per node, from path start
    std::vector<double> pt_x;        // node coordinates, cached off the network
    std::vector<double> pt_y;
    std::vector<int> lanes;          // per segment
    double progress_m = 0.0;
    int segment = 0;                 // index of the current segment's start node
    int lane = 0;

    double total_length_m() const { return cum_len_m.empty() ? 0.0 : cum_len_m.back(); }
    bool finished() const { return progress_m >= total_length_m(); }
};

struct Agent {
    int id = 0;
    int gender = 0;
    int age = 20;
    int category = 1;           // 1..4 itinerary category
    double speed_mps = 1.256;   // desired walking speed
    int dorm_loc = -1;          // location index of the home dormitory
    int study_loc = -1;         // location index of the class destination
    int batch = 0;              // 0 = morning cohort, 1 = afternoon cohort

    GeneralState state = GeneralState::Rest;
    PlacedPosition pos;
    int current_loc = -1;       // location index when resting/visiting, -1 on the road
    ActivePath path;
    int leg_index = 0;          // next leg of today's schedule
    double leg_ready_s = -1.0;  // arrival time of the current visit, for dwell-based departures

    // Fixed seats (room index within location, seat enumeration index).
    int dorm_room = 0;
    int dorm_seat = 0;
    int study_room = 0;
    int study_seat = 0;
    // Arrival-seated venues (restaurant, cruise public areas).
    int visit_loc = -1;
    int visit_room = -1;
    int visit_seat = -1;

    InfectionStatus infection;
    bool isolated = false;
    int isolation_day = -1;     // day the isolation started
    int diagnosis_day = -1;     // day the carrier was diagnosed
};

}  // namespace campussim
