#include "campussim/itinerary.hpp"

#include <algorithm>

namespace campussim {

void Timetable::validate() const {
    if (!(morning_departure_s >= 0.0 && morning_departure_s < 86400.0)) {
        throw ConfigError("timetable.morning_departure_s: must lie within the day");
    }
    if (!(lunch_departure_s > morning_departure_s)) {
        throw ConfigError("timetable.lunch_departure_s: must come after the morning departure");
    }
    if (!(afternoon_return_s > lunch_departure_s)) {
        throw ConfigError("timetable.afternoon_return_s: must come after lunch");
    }
    if (!(lunch_dwell_s > 0.0)) throw ConfigError("timetable.lunch_dwell_s: must be > 0");
    if (departure_jitter_s < 0.0) {
        throw ConfigError("timetable.departure_jitter_s: must be >= 0");
    }
}

double StaggerOffsets::offset_for_dorm(const std::string& dorm) const {
    auto it = morning_by_dorm.find(dorm);
    return it == morning_by_dorm.end() ? 0.0 : it->second;
}

double StaggerOffsets::offset_for_group(const std::string& group) const {
    auto it = postclass_by_group.find(group);
    return it == postclass_by_group.end() ? 0.0 : it->second;
}

std::string postclass_group_of(const std::string& study_location,
                               const std::vector<std::string>& grouped_separately) {
    if (std::find(grouped_separately.begin(), grouped_separately.end(), study_location) !=
        grouped_separately.end()) {
        return study_location;
    }
    return "others";
}

DaySchedule build_day_schedule(const Agent& agent, const Timetable& tt, bool batch_enabled,
                               const StaggerOffsets& offsets,
                               const std::vector<std::string>& loc_names, int restaurant_loc,
                               const std::vector<std::string>& postclass_separate) {
    const std::string& dorm = loc_names[agent.dorm_loc];
    const std::string& study = loc_names[agent.study_loc];
    double dorm_off = offsets.offset_for_dorm(dorm);
    double study_off = offsets.offset_for_group(postclass_group_of(study, postclass_separate));

    DaySchedule legs;
    if (!batch_enabled) {
        // dormitory -> study -> restaurant -> study -> dormitory
        legs.push_back({agent.study_loc, tt.morning_departure_s + dorm_off, -1.0});
        legs.push_back({restaurant_loc, tt.lunch_departure_s + study_off, -1.0});
        legs.push_back({agent.study_loc, -1.0, tt.lunch_dwell_s});
        legs.push_back({agent.dorm_loc, tt.afternoon_return_s + study_off, -1.0});
    } else if (agent.batch == 0) {
        // Morning cohort: class, lunch, then back to the dormitory.
        legs.push_back({agent.study_loc, tt.morning_departure_s + dorm_off, -1.0});
        legs.push_back({restaurant_loc, tt.lunch_departure_s + study_off, -1.0});
        legs.push_back({agent.dorm_loc, -1.0, tt.lunch_dwell_s});
    } else {
        // Afternoon cohort: dormitory until lunch, class after.
        legs.push_back({restaurant_loc, tt.batch2_lunch_departure_s + dorm_off, -1.0});
        legs.push_back({agent.study_loc, -1.0, tt.lunch_dwell_s});
        legs.push_back({agent.dorm_loc, tt.batch2_return_s + study_off, -1.0});
    }
    return legs;
}

}  // namespace campussim
