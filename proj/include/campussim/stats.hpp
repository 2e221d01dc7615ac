#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "campussim/itinerary.hpp"

namespace campussim {

struct DailyStats {
    int day = 0;
    int susceptible = 0;
    int latent = 0;
    int infected = 0;  // diagnosed
    int isolated = 0;
    int free_carriers = 0;  // carriers still circulating (not isolated)
    int cumulative_infected = 0;
    double infection_rate = 0.0;
};

// Per-cell road-traffic accumulation over one run: total agent-slices and the
// peak single-slice occupancy.
struct HeatMap {
    double cell_m = 2.0;
    double min_x = 0.0;
    double min_y = 0.0;
    int nx = 0;
    int ny = 0;
    std::vector<double> visits;
    std::vector<int> peak;

    int cell_index(double x, double y) const {
        int cx = static_cast<int>(std::floor((x - min_x) / cell_m));
        int cy = static_cast<int>(std::floor((y - min_y) / cell_m));
        if (cx < 0 || cy < 0 || cx >= nx || cy >= ny) return -1;
        return cy * nx + cx;
    }
};

struct RunResult {
    uint64_t seed = 0;
    int population = 0;
    std::vector<DailyStats> days;
    HeatMap heat;
    StaggerOffsets stagger_used;
    bool stagger_fully_separated = true;
};

// Mean and standard deviation of every DailyStats field across replications.
struct ReplicationSummary {
    int population = 0;
    int replications = 0;
    std::vector<double> mean_susceptible, std_susceptible;
    std::vector<double> mean_latent, std_latent;
    std::vector<double> mean_infected, std_infected;
    std::vector<double> mean_isolated, std_isolated;
    std::vector<double> mean_cumulative, std_cumulative;
    std::vector<double> mean_rate, std_rate;
    HeatMap heat;  // visits averaged, peak maxed across replications

    int days() const { return static_cast<int>(mean_rate.size()); }
};

ReplicationSummary summarize(const std::vector<RunResult>& runs);

}  // namespace campussim
