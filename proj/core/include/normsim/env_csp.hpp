#pragma once

#include "normsim/world.hpp"

namespace normsim {

// Clean Up with Startup Problem dynamics.

// Per-site apple spawn probability from the pollution imbalance.
// literal: 0.05 * (1 - 0.25 * (d1 d2 / (d1+d2)^2)^10)  (as printed)
// prose:   0.05 * (1 - (4 d1 d2 / (d1+d2)^2)^10)       (zero when d1 == d2)
// d1 + d2 == 0 returns 0.05 in both variants.
double apple_spawn_prob(int d1, int d2, bool literal);

// Applies a resolved clean hit on pollution cell `site`: present -> absent,
// protect 100, agent tinted by the cleaned type, eat streak reset. Returns
// true if the cell was still present.
bool apply_clean(WorldState& state, const EnvParams& params, int agent, int site);

// Absent, unprotected pollution cells respawn with probability 0.05.
void pollution_respawn_tick(WorldState& state, const EnvParams& params);

// Empty, unoccupied apple sites spawn with apple_spawn_prob(d1, d2).
void apple_spawn_tick(WorldState& state, const EnvParams& params);

// Consumes the apple under `agent`; +1 reward, eat streak up; the 21st
// consecutive eat turns the agent gray.
double eat_apple(WorldState& state, const EnvParams& params, int agent, int site);

}  // namespace normsim
