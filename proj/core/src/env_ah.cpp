#include "normsim/env_ah.hpp"

namespace normsim {

void berry_spawn_tick(WorldState& state, const EnvParams& params) {
  const double coeff = params.berry_spawn_coeff;
  for (auto& site : state.berries) {
    if (site.ripe || site.refractory_timer > 0) continue;
    if (state.occupancy[state.geom.index(site.pos)] >= 0) continue;  // not under agents
    const double p = coeff * state.berry_counts[static_cast<int>(site.color) - 1];
    if (state.rng_spawn.bernoulli(p)) site.ripe = true;
  }
}

double eat_berry(WorldState& state, const EnvParams& params, int agent, int site) {
  BerrySite& b = state.berries[site];
  b.ripe = false;
  b.refractory_timer = static_cast<int16_t>(params.berry_refractory);
  AgentBody& body = state.agents[agent];
  const double reward =
      (b.color == body.taste) ? params.taste_match_reward : params.taste_other_reward;
  const double m = state.monoculture_fraction();
  if (state.rng_gray.bernoulli(1.0 - m)) body.display_color = DisplayColor::Gray;
  return reward;
}

bool apply_replant(WorldState& state, int agent, int site, DisplayColor color) {
  BerrySite& b = state.berries[site];
  if (b.color == color) return false;
  state.berry_counts[static_cast<int>(b.color) - 1]--;
  state.berry_counts[static_cast<int>(color) - 1]++;
  b.color = color;
  state.agents[agent].display_color = color;
  return true;
}

}  // namespace normsim
