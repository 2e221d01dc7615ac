#include "campussim/infection.hpp"

#include <algorithm>
#include <cmath>

#include "campussim/road_network.hpp"

namespace campussim {

void InfectionParams::validate() const {
    if (!(radius_m > 0.0)) throw ConfigError("infection.radius_m: must be > 0");
    if (incubation_days < 1) throw ConfigError("infection.incubation_days: must be >= 1");
    if (beta < 0.0 || beta > 1.0) throw ConfigError("infection.beta: must be in [0,1]");
    if (asymptomatic_prob < 0.0 || asymptomatic_prob > 1.0) {
        throw ConfigError("infection.asymptomatic_prob: must be in [0,1]");
    }
    if (!(slice_seconds > 0.0)) throw ConfigError("infection.slice_seconds: must be > 0");
    if (!(threshold > 0.0)) throw ConfigError("infection.threshold: must be > 0");
}

double viral_ramp(int days_carrying, int incubation_days) {
    if (days_carrying <= 0) return 0.0;
    if (days_carrying >= incubation_days) return 1.0;
    return static_cast<double>(days_carrying) / static_cast<double>(incubation_days);
}

double distance_kernel(double distance_m, double radius_m) {
    if (distance_m > radius_m) return 0.0;
    double rel = distance_m / radius_m;
    return std::sqrt(std::max(0.0, 1.0 - rel * rel));
}

double exposure_probability(const ContactSet& contacts, const InfectionParams& params) {
    size_t n = contacts.neighbors.size();
    if (n == 0) return 0.0;
    double sum = 0.0;
    for (const ContactSet::Neighbor& nb : contacts.neighbors) {
        sum += viral_ramp(nb.days_carrying, params.incubation_days) *
               distance_kernel(nb.distance_m, params.radius_m);
    }
    double p = (1.0 - params.beta) * sum / static_cast<double>(n);
    return std::clamp(p, 0.0, 1.0);
}

double exposure_probability_grouped(const ContactSet& contacts, const InfectionParams& params) {
    size_t n = contacts.neighbors.size();
    if (n == 0) return 0.0;
    // Outer sum over the days-carried classes 0..incubation_days, inner sum
    // over the neighbors belonging to each class.
    double total = 0.0;
    for (int day_class = 0; day_class <= params.incubation_days; ++day_class) {
        double class_sum = 0.0;
        for (const ContactSet::Neighbor& nb : contacts.neighbors) {
            int capped = std::min(nb.days_carrying, params.incubation_days);
            if (capped != day_class) continue;
            class_sum += viral_ramp(day_class, params.incubation_days) *
                         distance_kernel(nb.distance_m, params.radius_m);
        }
        total += class_sum / static_cast<double>(n);
    }
    return std::clamp((1.0 - params.beta) * total, 0.0, 1.0);
}

void accumulate_slice(InfectionStatus& status, double slice_exposure) {
    status.p_inf_today = std::max(status.p_inf_today, slice_exposure);
}

bool resolve_day(InfectionStatus& status, const InfectionParams& params, int day, Substream& rng) {
    bool newly_infected = false;
    if (status.carrier()) {
        status.days_carrying += 1;
        if (status.state == HealthState::Latent && !status.asymptomatic &&
            status.days_carrying >= params.incubation_days) {
            status.state = HealthState::Infected;
        }
    } else {
        // The draw is consumed unconditionally so an agent's stream position
        // never depends on its exposure history.
        double u = rng.uniform();
        double a = rng.uniform();
        if (status.p_inf_today >= params.threshold || u < status.p_inf_today) {
            status.state = HealthState::Latent;
            status.days_carrying = 1;
            status.asymptomatic = a < params.asymptomatic_prob;
            status.infected_on_day = day;
            newly_infected = true;
        }
    }
    status.p_inf_today = 0.0;
    return newly_infected;
}

}  // namespace campussim
