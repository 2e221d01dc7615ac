#include "campussim/exposure.hpp"

#include <algorithm>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace campussim {

ContactSet gather_contacts(const SpatialGrid& grid, std::span<const Agent> agents, int center,
                           double radius_m) {
    ContactSet contacts;
    grid.for_neighbors(agents[center].pos, radius_m, center, [&](int j, double d) {
        contacts.neighbors.push_back({d, agents[j].infection.days_carrying});
    });
    return contacts;
}

void evaluate_exposure_slice(std::span<Agent> agents, const InfectionParams& params,
                             bool parallel, double co_presence_seconds, ContactLog* contact_log) {
    const int n = static_cast<int>(agents.size());

    // Exposure is zero and no traceable contact can form in a context with
    // no carrier, so only carrier-occupied contexts enter the pass at all.
    std::unordered_set<int> hot_contexts;
    for (int i = 0; i < n; ++i) {
        if (!agents[i].isolated && agents[i].infection.days_carrying > 0) {
            hot_contexts.insert(agents[i].pos.context);
        }
    }
    if (hot_contexts.empty()) return;

    std::vector<PlacedPosition> positions(n);
    std::vector<uint8_t> include(n, 0);
    std::vector<int> active;
    for (int i = 0; i < n; ++i) {
        positions[i] = agents[i].pos;
        if (!agents[i].isolated && hot_contexts.count(agents[i].pos.context)) {
            include[i] = 1;
            active.push_back(i);
        }
    }
    SpatialGrid grid(positions, params.radius_m / 2.0, include);

    const int m = static_cast<int>(active.size());
    std::vector<double> exposure(m, 0.0);
    // Pairs (i, j>i) per active slot, merged into the log in id order after
    // the parallel region.
    std::vector<std::vector<std::pair<int, double>>> pairs;
    if (contact_log != nullptr) pairs.resize(m);

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel && m > 128)
#endif
    for (int k = 0; k < m; ++k) {
        int i = active[k];
        const Agent& a = agents[i];
        bool want_exposure = a.infection.state == HealthState::Susceptible;
        bool log_contacts = contact_log != nullptr && a.infection.days_carrying > 0;
        if (!want_exposure && contact_log == nullptr) continue;
        int count = 0;
        double sum = 0.0;
        grid.for_neighbors(a.pos, params.radius_m, i, [&](int j, double d) {
            ++count;
            sum += viral_ramp(agents[j].infection.days_carrying, params.incubation_days) *
                   distance_kernel(d, params.radius_m);
            // Log carrier-involved pairs once, from the lower id side.
            if (contact_log != nullptr && j > i &&
                (log_contacts || agents[j].infection.days_carrying > 0)) {
                pairs[k].emplace_back(j, co_presence_seconds);
            }
        });
        if (want_exposure && count > 0) {
            double p = (1.0 - params.beta) * sum / static_cast<double>(count);
            exposure[k] = std::clamp(p, 0.0, 1.0);
        }
    }

    for (int k = 0; k < m; ++k) {
        accumulate_slice(agents[active[k]].infection, exposure[k]);
    }
    if (contact_log != nullptr) {
        for (int k = 0; k < m; ++k) {
            for (const auto& [j, seconds] : pairs[k]) contact_log->add(active[k], j, seconds);
        }
    }
}

}  // namespace campussim
