#include "normsim/engine.hpp"

#include <algorithm>

#include "normsim/env_ah.hpp"
#include "normsim/env_csp.hpp"
#include "normsim/errors.hpp"

namespace normsim {

Engine::Engine(const MapAsset& asset, EnvParams params, uint64_t episode_seed)
    : params_(std::move(params)), asset_(&asset) {
  params_.kind = asset.kind;
  params_.berry_spawn_coeff *= asset.berry_coeff_scale;
  state_ = make_world(asset, params_.n_agents, episode_seed);
  render_all();
}

Engine::Engine(WorldState state, EnvParams params)
    : state_(std::move(state)), params_(std::move(params)) {
  params_.kind = state_.kind;
  params_.n_agents = static_cast<int>(state_.agents.size());
  render_all();
}

void Engine::reset(uint64_t episode_seed) {
  if (asset_ == nullptr) throw std::logic_error("reset requires a map-backed engine");
  state_ = make_world(*asset_, params_.n_agents, episode_seed);
  log_.clear();
  last_obs_.clear();
  render_all();
}

int Engine::action_count() const {
  return params_.kind == EnvKind::AllelopathicHarvest ? action::kPlantBlue + 1
                                                      : action::kClean + 1;
}

void Engine::render_all() {
  const auto cells = build_cell_render(state_);
  const int n = static_cast<int>(state_.agents.size());
  last_obs_.resize(n);
  for (int i = 0; i < n; ++i) {
    // Reuse the buffer unless someone (the sanction log) still holds it.
    std::shared_ptr<Frame> frame;
    if (last_obs_[i] && last_obs_[i].use_count() == 1)
      frame = std::const_pointer_cast<Frame>(last_obs_[i]);
    else
      frame = std::make_shared<Frame>(kObsPixels, kObsPixels);
    render_observation_into(state_, i, cells, *frame);
    last_obs_[i] = std::move(frame);
  }
}

std::vector<int> Engine::zap_hits(const WorldState& state, int shooter,
                                  BeamFootprint* footprint_out) {
  const AgentBody& body = state.agents[shooter];
  const auto blocker = [&](Coord c) { return state.occupancy[state.geom.index(c)] >= 0; };
  BeamFootprint fp =
      beam_footprint(state.geom, body.pos, body.orientation, BeamKind::Zap, blocker);
  std::vector<int> hits;
  fp.for_each_cell([&](Coord c) {
    const int16_t occ = state.occupancy[state.geom.index(c)];
    if (occ >= 0 && occ != shooter &&
        std::find(hits.begin(), hits.end(), occ) == hits.end())
      hits.push_back(occ);
  });
  if (footprint_out != nullptr) *footprint_out = std::move(fp);
  return hits;
}

std::vector<int> Engine::apply_zap(WorldState& state, const EnvParams& params, int shooter,
                                   std::vector<double>* rewards) {
  AgentBody& s = state.agents[shooter];
  if (s.zap_cooldown != 0) throw ZapUnavailable("zap on cooldown");
  if (s.frozen() || s.removed()) throw ZapUnavailable("shooter cannot act");
  const std::vector<int> hits = zap_hits(state, shooter);
  s.zap_cooldown = static_cast<int16_t>(params.zap_cooldown);
  for (int j : hits) {
    AgentBody& t = state.agents[j];
    if (t.removed()) continue;
    if (t.marked()) {
      if (rewards != nullptr) (*rewards)[j] += params.removal_penalty;
      t.removal_timer = static_cast<int16_t>(params.removal_duration);
      t.mark_timer = 0;
      t.freeze_timer = 0;
      state.occupancy[state.geom.index(t.pos)] = -1;
    } else {
      t.mark_timer = static_cast<int16_t>(params.mark_duration);
      t.freeze_timer = static_cast<int16_t>(params.freeze_duration);
    }
  }
  return hits;
}

std::vector<std::pair<int, int>> Engine::sanction_opportunities(const WorldState& state) {
  std::vector<std::pair<int, int>> out;
  const int n = static_cast<int>(state.agents.size());
  for (int i = 0; i < n; ++i) {
    const AgentBody& a = state.agents[i];
    if (a.zap_cooldown != 0 || a.frozen() || a.removed()) continue;
    for (int j : zap_hits(state, i)) {
      const AgentBody& t = state.agents[j];
      if (!t.frozen() && !t.removed()) out.emplace_back(i, j);
    }
  }
  return out;
}

StepOutput Engine::step(const std::vector<int>& actions) {
  const int n = static_cast<int>(state_.agents.size());
  if (static_cast<int>(actions.size()) != n)
    throw InvalidActionId("expected one action per agent");
  const int n_actions = action_count();
  for (int a : actions)
    if (a < 0 || a >= n_actions) throw InvalidActionId("action id out of range");

  StepOutput out;
  out.rewards.assign(n, 0.0);
  state_.beams.clear();

  // Opportunities and zap geometry from the pre-step state, shared between
  // phase 2 and the emitted records.
  struct ShooterInfo {
    BeamFootprint fp;
    std::vector<int> hits;
    uint32_t witnesses = 0;
  };
  std::vector<ShooterInfo> shooter(n);
  std::vector<uint8_t> zap_ready(n, 0);
  for (int i = 0; i < n; ++i) {
    const AgentBody& a = state_.agents[i];
    if (a.zap_cooldown != 0 || a.frozen() || a.removed()) continue;
    zap_ready[i] = 1;
    shooter[i].hits = zap_hits(state_, i, &shooter[i].fp);
    for (int k = 0; k < n; ++k) {
      const AgentBody& w = state_.agents[k];
      if (w.removed()) continue;
      bool sees = false;
      shooter[i].fp.for_each_cell([&](Coord c) {
        sees = sees || in_observation_window(state_.geom, w.pos, w.orientation, c);
      });
      if (sees) shooter[i].witnesses |= 1u << k;
    }
  }
  std::vector<std::pair<int, int>> opportunities;
  for (int i = 0; i < n; ++i) {
    if (!zap_ready[i]) continue;
    for (int j : shooter[i].hits) {
      const AgentBody& t = state_.agents[j];
      if (!t.frozen() && !t.removed()) opportunities.emplace_back(i, j);
    }
  }

  // Phase 2a: zap beams fire simultaneously against pre-step geometry.
  std::vector<uint8_t> zapped(n, 0);
  for (int i = 0; i < n; ++i) {
    if (actions[i] != action::kZap || !zap_ready[i]) continue;
    zapped[i] = 1;
    out.events.zaps_fired.push_back(static_cast<uint8_t>(i));
    state_.agents[i].zap_cooldown = static_cast<int16_t>(params_.zap_cooldown);
    BeamVisual vis{BeamKind::Zap, static_cast<uint8_t>(i), PaletteIdx::BeamZap, {}};
    shooter[i].fp.for_each_cell([&](Coord c) { vis.cells.push_back(c); });
    state_.beams.push_back(std::move(vis));
  }

  // Phase 2b: tool beams (replant/clean). Paths use pre-step blockers.
  struct ToolShot {
    int agent;
    int site;  // berry or pollution index, -1 when the beam hit nothing
    DisplayColor plant_color = DisplayColor::Gray;
  };
  std::vector<ToolShot> tool_shots;
  for (int i = 0; i < n; ++i) {
    const AgentBody& a = state_.agents[i];
    if (a.frozen() || a.removed() || a.tool_cooldown != 0) continue;
    const int act = actions[i];
    if (params_.kind == EnvKind::AllelopathicHarvest) {
      if (act < action::kPlantRed || act > action::kPlantBlue) continue;
      const auto blocker = [&](Coord c) { return state_.berry_at[state_.geom.index(c)] >= 0; };
      const BeamFootprint fp =
          beam_footprint(state_.geom, a.pos, a.orientation, BeamKind::Narrow, blocker);
      ToolShot shot{i, -1, static_cast<DisplayColor>(act - action::kPlantRed + 1)};
      if (fp.blocked_at[1] >= 0)
        shot.site = state_.berry_at[state_.geom.index(fp.columns[1][fp.blocked_at[1]])];
      tool_shots.push_back(shot);
      state_.agents[i].tool_cooldown = static_cast<int16_t>(params_.plant_cooldown);
      BeamVisual vis{BeamKind::Narrow, static_cast<uint8_t>(i),
                     shot.plant_color == DisplayColor::Red     ? PaletteIdx::Red
                     : shot.plant_color == DisplayColor::Green ? PaletteIdx::Green
                                                               : PaletteIdx::Blue,
                     {}};
      for (Coord c : fp.columns[1]) vis.cells.push_back(c);
      state_.beams.push_back(std::move(vis));
    } else {
      if (act != action::kClean) continue;
      const auto blocker = [&](Coord c) {
        const int16_t p = state_.pollution_at[state_.geom.index(c)];
        return p >= 0 && state_.pollution[p].present;
      };
      const BeamFootprint fp =
          beam_footprint(state_.geom, a.pos, a.orientation, BeamKind::Narrow, blocker);
      ToolShot shot{i, -1};
      if (fp.blocked_at[1] >= 0)
        shot.site = state_.pollution_at[state_.geom.index(fp.columns[1][fp.blocked_at[1]])];
      tool_shots.push_back(shot);
      state_.agents[i].tool_cooldown = static_cast<int16_t>(params_.clean_cooldown);
      BeamVisual vis{BeamKind::Narrow, static_cast<uint8_t>(i), PaletteIdx::BeamClean, {}};
      for (Coord c : fp.columns[1]) vis.cells.push_back(c);
      state_.beams.push_back(std::move(vis));
    }
  }

  // Phase 3: sanction transitions in ascending shooter id; a later zap sees
  // the mark set by an earlier one.
  for (int i = 0; i < n; ++i) {
    if (!zapped[i]) continue;
    for (int j : shooter[i].hits) {
      AgentBody& t = state_.agents[j];
      if (t.removed()) continue;  // removed earlier in this phase
      if (t.marked()) {
        out.rewards[j] += params_.removal_penalty;
        out.events.hits.push_back(
            {static_cast<uint8_t>(i), static_cast<uint8_t>(j), t.display_color, true});
        t.removal_timer = static_cast<int16_t>(params_.removal_duration);
        t.mark_timer = 0;
        t.freeze_timer = 0;
        state_.occupancy[state_.geom.index(t.pos)] = -1;
      } else {
        out.events.hits.push_back(
            {static_cast<uint8_t>(i), static_cast<uint8_t>(j), t.display_color, false});
        t.mark_timer = static_cast<int16_t>(params_.mark_duration);
        t.freeze_timer = static_cast<int16_t>(params_.freeze_duration);
      }
    }
  }

  // Tool effects in ascending agent id against the now-current state.
  for (const ToolShot& shot : tool_shots) {
    if (shot.site < 0) continue;
    if (params_.kind == EnvKind::AllelopathicHarvest) {
      if (apply_replant(state_, shot.agent, shot.site, shot.plant_color))
        out.events.plants.push_back({static_cast<uint8_t>(shot.agent), shot.plant_color});
    } else {
      const uint8_t ptype = state_.pollution[shot.site].ptype;
      if (apply_clean(state_, params_, shot.agent, shot.site))
        out.events.cleans.push_back({static_cast<uint8_t>(shot.agent), ptype});
    }
  }

  // Phase 4: movement with uniform random tie-breaks.
  std::vector<Coord> targets(n);
  for (int i = 0; i < n; ++i) {
    AgentBody& a = state_.agents[i];
    targets[i] = a.pos;
    if (a.frozen() || a.removed()) continue;
    const int act = actions[i];
    if (act == action::kTurnLeft) {
      a.orientation = turned(a.orientation, 3);
    } else if (act == action::kTurnRight) {
      a.orientation = turned(a.orientation, 1);
    } else if (act >= action::kMoveUp && act <= action::kMoveRight) {
      Coord c = a.pos;
      if (state_.geom.advance(c, move_delta(act, a.orientation))) targets[i] = c;
    }
  }
  const auto new_pos = resolve_moves(state_.geom, state_.agents, targets, state_.occupancy,
                                     state_.rng_move);
  for (int i = 0; i < n; ++i) state_.agents[i].pos = new_pos[i];

  // Phase 5: eating at the new positions.
  for (int i = 0; i < n; ++i) {
    const AgentBody& a = state_.agents[i];
    if (a.removed()) continue;
    const int cell = state_.geom.index(a.pos);
    if (params_.kind == EnvKind::AllelopathicHarvest) {
      const int16_t site = state_.berry_at[cell];
      if (site >= 0 && state_.berries[site].ripe)
        out.rewards[i] += eat_berry(state_, params_, i, site);
    } else {
      const int16_t site = state_.apple_at[cell];
      if (site >= 0 && state_.apples[site].present)
        out.rewards[i] += eat_apple(state_, params_, i, site);
    }
  }

  // Phase 6: spawn/regrowth dynamics.
  if (params_.kind == EnvKind::AllelopathicHarvest) {
    berry_spawn_tick(state_, params_);
  } else {
    pollution_respawn_tick(state_, params_);
    apple_spawn_tick(state_, params_);
  }

  // Phase 7: timers decrement uniformly; expired removals respawn.
  for (int i = 0; i < n; ++i) {
    AgentBody& a = state_.agents[i];
    if (a.removal_timer > 0) {
      if (--a.removal_timer == 0) {
        std::vector<Coord> free;
        for (Coord c : state_.spawn_cells)
          if (state_.occupancy[state_.geom.index(c)] < 0) free.push_back(c);
        if (free.empty()) {
          for (int16_t r = 0; r < state_.geom.rows; ++r)
            for (int16_t q = 0; q < state_.geom.cols; ++q) {
              const Coord c{r, q};
              if (!state_.geom.is_wall(c) && state_.occupancy[state_.geom.index(c)] < 0)
                free.push_back(c);
            }
        }
        a.pos = free[state_.rng_place.next_below(static_cast<uint32_t>(free.size()))];
        a.orientation = static_cast<Orientation>(state_.rng_place.next_below(4));
        state_.occupancy[state_.geom.index(a.pos)] = static_cast<int16_t>(i);
      }
      continue;
    }
    if (a.mark_timer > 0) --a.mark_timer;
    if (a.freeze_timer > 0) --a.freeze_timer;
    if (a.zap_cooldown > 0) --a.zap_cooldown;
    if (a.tool_cooldown > 0) --a.tool_cooldown;
  }
  for (auto& b : state_.berries)
    if (b.refractory_timer > 0) --b.refractory_timer;
  for (auto& p : state_.pollution)
    if (p.protect_timer > 0) --p.protect_timer;

  state_.step_index++;

  // Phase 9 (before re-render swaps the buffers): emit records for every
  // pre-step opportunity; the context is the sanctioner's previous frame.
  out.new_records_begin = log_.size();
  for (auto [i, j] : opportunities) {
    SanctionRecord rec;
    rec.step = state_.step_index;
    rec.sanctioner = static_cast<uint8_t>(i);
    rec.target = static_cast<uint8_t>(j);
    rec.outcome = zapped[i] ? 1 : 0;
    rec.witnesses = shooter[i].witnesses;
    rec.context = last_obs_[i];
    log_.append(std::move(rec));
  }
  out.new_records_end = log_.size();

  // Phase 8: render.
  render_all();
  out.observations = last_obs_;
  out.aux.resize(n);
  for (int i = 0; i < n; ++i) {
    const AgentBody& a = state_.agents[i];
    out.aux[i] = {a.zap_cooldown == 0 ? 1.0f : 0.0f, a.tool_cooldown == 0 ? 1.0f : 0.0f,
                  a.frozen() ? 1.0f : 0.0f, a.marked() ? 1.0f : 0.0f};
  }
  out.episode_done = static_cast<int>(state_.step_index) >= params_.episode_length;
  return out;
}

}  // namespace normsim
