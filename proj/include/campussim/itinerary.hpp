#pragma once

#include <map>
#include <string>
#include <vector>

#include "campussim/agent.hpp"
#include "campussim/road_network.hpp"

namespace campussim {

// Daily wall-clock constants, seconds from midnight. The afternoon-cohort
// entries only matter when batch control is active. Individual departures
// trail the nominal time by up to `departure_jitter_s`, redrawn daily, so
// queues and seat neighborhoods are not frozen across days.
struct Timetable {
    double morning_departure_s = 27000.0;       // 07:30 dorm -> study
    double lunch_departure_s = 41400.0;         // 11:30 study -> restaurant
    double lunch_dwell_s = 1800.0;
    double afternoon_return_s = 59400.0;        // 16:30 study -> dorm
    double batch2_lunch_departure_s = 44400.0;  // 12:20 dorm -> restaurant
    double batch2_return_s = 61200.0;           // 17:00 study -> dorm
    double departure_jitter_s = 120.0;

    void validate() const;
};

// One leg of a day schedule. Departure is either at an absolute time or a
// dwell after arriving at the current place.
struct Leg {
    int to_loc = -1;
    double depart_s = -1.0;   // >= 0: absolute departure time
    double dwell_s = -1.0;    // >= 0: depart after this long at the current stop
};

using DaySchedule = std::vector<Leg>;

// Category -> allowed study locations (Table-style rows). Locations are
// engine indices; categories with two options split members between them.
struct CategoryRules {
    std::vector<std::vector<std::string>> study_options = {
        {"teaching_building", "library"},
        {"teaching_building", "laboratory"},
        {"laboratory"},
        {"administration_building", "library"},
    };
};

// Per-building departure offsets produced by the stagger optimizer.
struct StaggerOffsets {
    std::map<std::string, double> morning_by_dorm;       // dorm departures
    std::map<std::string, double> postclass_by_group;    // study-side departures
    double offset_for_dorm(const std::string& dorm) const;
    double offset_for_group(const std::string& group) const;
};

// Destination-group name for post-class offsets.
std::string postclass_group_of(const std::string& study_location,
                               const std::vector<std::string>& grouped_separately);

// Builds the day schedule for one agent under the active policy. `loc_name`
// resolves engine location indices to names.
DaySchedule build_day_schedule(const Agent& agent, const Timetable& tt, bool batch_enabled,
                               const StaggerOffsets& offsets,
                               const std::vector<std::string>& loc_names, int restaurant_loc,
                               const std::vector<std::string>& postclass_separate);

}  // namespace campussim
