#include "normsim/env_csp.hpp"

#include <cmath>

namespace normsim {

double apple_spawn_prob(int d1, int d2, bool literal) {
  if (d1 + d2 == 0) return 0.05;
  const double total = static_cast<double>(d1) + d2;
  const double balance = (d1 / total) * (d2 / total);
  if (literal) return 0.05 * (1.0 - 0.25 * std::pow(balance, 10.0));
  return 0.05 * (1.0 - std::pow(4.0 * balance, 10.0));
}

bool apply_clean(WorldState& state, const EnvParams& params, int agent, int site) {
  PollutionCell& p = state.pollution[site];
  if (!p.present) return false;
  p.present = false;
  p.protect_timer = static_cast<int16_t>(params.pollution_protect);
  state.pollution_present[p.ptype - 1]--;
  AgentBody& body = state.agents[agent];
  body.display_color = (p.ptype == 1) ? DisplayColor::Red : DisplayColor::Green;
  body.eat_streak = 0;
  return true;
}

void pollution_respawn_tick(WorldState& state, const EnvParams& params) {
  for (auto& p : state.pollution) {
    if (p.present || p.protect_timer > 0) continue;
    if (state.rng_spawn.bernoulli(params.pollution_respawn_p)) {
      p.present = true;
      state.pollution_present[p.ptype - 1]++;
    }
  }
}

void apple_spawn_tick(WorldState& state, const EnvParams& params) {
  const double p = apple_spawn_prob(state.pollution_present[0], state.pollution_present[1],
                                    params.apple_prob_literal);
  for (auto& a : state.apples) {
    if (a.present) continue;
    if (state.occupancy[state.geom.index(a.pos)] >= 0) continue;
    if (state.rng_spawn.bernoulli(p)) a.present = true;
  }
}

double eat_apple(WorldState& state, const EnvParams& params, int agent, int site) {
  state.apples[site].present = false;
  AgentBody& body = state.agents[agent];
  body.eat_streak++;
  if (body.eat_streak >= params.eat_streak_gray_at) body.display_color = DisplayColor::Gray;
  return params.apple_reward;
}

}  // namespace normsim
