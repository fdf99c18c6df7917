#pragma once

#include "normsim/world.hpp"

namespace normsim {

// Allelopathic Harvest dynamics. All functions are pure over WorldState plus
// the state's own RNG streams.

// Each unripe, non-refractory, unoccupied site of color X ripens with
// probability coeff * count(X), where count(X) is the number of sites whose
// current color is X (ripe or not).
void berry_spawn_tick(WorldState& state, const EnvParams& params);

// Consumes the ripe berry under `agent` (refractory := 10); returns the
// taste-dependent reward and rolls the gray reversion with probability 1 - m.
double eat_berry(WorldState& state, const EnvParams& params, int agent, int site);

// Applies a resolved replant hit: recolors `site` to `color` if it differs
// (ripeness preserved) and tints the agent. Returns true on success.
bool apply_replant(WorldState& state, int agent, int site, DisplayColor color);

}  // namespace normsim
