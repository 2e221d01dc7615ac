#pragma once

#include <cstdint>
#include <vector>

#include "campussim/rng.hpp"

namespace campussim {

struct InfectionParams {
    double radius_m = 2.0;          // perception/transmission radius
    int incubation_days = 7;        // days to full infectivity and diagnosis
    double threshold = 1.0;         // exposure at or above this infects deterministically
    double beta = 0.0;              // group protection rate in [0,1]
    double asymptomatic_prob = 0.0; // carriers that never self-reveal
    double slice_seconds = 60.0;    // exposure evaluation period

    void validate() const;
};

enum class HealthState : uint8_t { Susceptible = 0, Latent = 1, Infected = 2 };

struct InfectionStatus {
    HealthState state = HealthState::Susceptible;
    int days_carrying = 0;          // 0 iff susceptible
    bool asymptomatic = false;
    double p_inf_today = 0.0;       // running max exposure for the current day
    int infected_on_day = -1;

    bool carrier() const { return days_carrying > 0; }
};

// Neighbors of one agent within the transmission radius for one time slice.
struct ContactSet {
    struct Neighbor {
        double distance_m = 0.0;
        int days_carrying = 0;
    };
    std::vector<Neighbor> neighbors;
};

// Infectivity as a function of days carrying the virus: linear ramp up to the
// incubation period, saturating at 1.
double viral_ramp(int days_carrying, int incubation_days);

// Transmission weight as a function of pairwise distance: circular-arc decay,
// zero beyond the radius. d = 0 (co-located agents) extends continuously to 1.
double distance_kernel(double distance_m, double radius_m);

// Per-slice infection probability of the central agent: protection-scaled
// average of ramp*kernel over all neighbors in range, clamped to [0,1].
double exposure_probability(const ContactSet& contacts, const InfectionParams& params);

// Same quantity summed per day-carried class instead of per neighbor; kept as
// an independent route for cross-checking the per-neighbor form.
double exposure_probability_grouped(const ContactSet& contacts, const InfectionParams& params);

// Fold one slice's exposure into the daily running maximum.
void accumulate_slice(InfectionStatus& status, double slice_exposure);

// End-of-day resolution: infection draw for susceptibles against the daily
// maximum exposure, day-count increment and latent->infected transition for
// carriers. `rng` must be the agent's own (seed, agent, day) substream.
// Returns true when the agent was newly infected today.
bool resolve_day(InfectionStatus& status, const InfectionParams& params, int day, Substream& rng);

}  // namespace campussim
