#pragma once

#include <span>
#include <vector>

#include "campussim/agent.hpp"
#include "campussim/control.hpp"
#include "campussim/infection.hpp"
#include "campussim/spatial_grid.hpp"

namespace campussim {

// One evaluation of the per-slice exposure update over all agents. Isolated
// agents neither receive nor contribute exposure. `co_presence_seconds` is
// the wall-clock time the evaluated configuration stands for (a multiple of
// the slice length when a static stretch is folded into one evaluation);
// it only feeds the contact log, the running maximum is unaffected.
//
// The log keeps pairs with at least one carrier; tracing only ever asks for
// the contacts of a diagnosed carrier, so susceptible-susceptible pairs
// would never be read.
//
// The parallel path partitions agents across threads; every agent's neighbor
// sum runs in the same grid-scan order either way, so serial and parallel
// results are bit-identical.
void evaluate_exposure_slice(std::span<Agent> agents, const InfectionParams& params,
                             bool parallel, double co_presence_seconds, ContactLog* contact_log);

// The neighbor set used by the slice pass, exposed for tests and tools.
ContactSet gather_contacts(const SpatialGrid& grid, std::span<const Agent> agents, int center,
                           double radius_m);

}  // namespace campussim
