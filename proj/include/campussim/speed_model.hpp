#pragma once

#include "campussim/rng.hpp"
#include "campussim/road_network.hpp"

namespace campussim {

// Walking-speed distribution: truncated normal over the observed pedestrian
// range. The defaults put the mean at the range midpoint with the range
// spanning roughly +-3 sigma.
struct SpeedModel {
    double v_min = 0.926;
    double v_max = 1.586;
    double mean = 1.256;
    double stddev = 0.11;
    double preferred_spacing_m = 1.55;
    double hard_stop_m = 0.5;

    void validate() const {
        if (!(v_min > 0.0) || !(v_max >= v_min)) {
            throw ConfigError("speed: requires 0 < v_min <= v_max");
        }
        if (stddev > 0.0 && !(mean > v_min && mean < v_max)) {
            throw ConfigError("speed.mean: must lie inside (v_min, v_max)");
        }
    }
};

inline double sample_speed(const SpeedModel& model, Substream& rng) {
    return rng.truncated_normal(model.mean, model.stddev, model.v_min, model.v_max);
}

}  // namespace campussim
