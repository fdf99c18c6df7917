#include "normsim/world.hpp"

#include <algorithm>

namespace normsim {

void WorldState::seed_streams(uint64_t episode_seed_in) {
  episode_seed = episode_seed_in;
  rng_move = RngStream(derive_seed(episode_seed, "move"));
  rng_spawn = RngStream(derive_seed(episode_seed, "spawn"));
  rng_place = RngStream(derive_seed(episode_seed, "place"));
  rng_gray = RngStream(derive_seed(episode_seed, "gray"));
}

void WorldState::place_agents(int n) {
  agents.assign(n, AgentBody{});
  occupancy.assign(geom.rows * geom.cols, -1);
  std::vector<Coord> pool = spawn_cells;
  for (int i = 0; i < n; ++i) {
    const uint32_t pick = rng_place.next_below(static_cast<uint32_t>(pool.size()));
    agents[i].pos = pool[pick];
    pool.erase(pool.begin() + pick);
    agents[i].orientation = static_cast<Orientation>(rng_place.next_below(4));
    agents[i].display_color = DisplayColor::Gray;
    // AH tastes: first half prefers red, second half green, fixed across
    // seeds so per-agent analyses line up.
    agents[i].taste = (i < n / 2) ? DisplayColor::Red : DisplayColor::Green;
    occupancy[geom.index(agents[i].pos)] = static_cast<int16_t>(i);
  }
}

uint64_t WorldState::state_hash() const {
  Fnv64 h;
  h.update_value(static_cast<uint8_t>(kind));
  h.update_value(geom.rows);
  h.update_value(geom.cols);
  h.update_value(step_index);
  for (const auto& b : berries) {
    h.update_value(static_cast<uint8_t>(b.color));
    h.update_value(b.ripe);
    h.update_value(b.refractory_timer);
  }
  for (const auto& p : pollution) {
    h.update_value(p.present);
    h.update_value(p.protect_timer);
  }
  for (const auto& a : apples) h.update_value(a.present);
  for (const auto& a : agents) {
    h.update_value(a.pos);
    h.update_value(static_cast<uint8_t>(a.orientation));
    h.update_value(static_cast<uint8_t>(a.display_color));
    h.update_value(a.mark_timer);
    h.update_value(a.freeze_timer);
    h.update_value(a.removal_timer);
    h.update_value(a.zap_cooldown);
    h.update_value(a.tool_cooldown);
    h.update_value(a.eat_streak);
  }
  h.update_value(rng_move.counter());
  h.update_value(rng_spawn.counter());
  h.update_value(rng_place.counter());
  h.update_value(rng_gray.counter());
  return h.digest();
}

std::vector<CellRender> build_cell_render(const WorldState& state) {
  const auto& geom = state.geom;
  std::vector<CellRender> cells(geom.rows * geom.cols);
  const PaletteIdx ground =
      state.kind == EnvKind::AllelopathicHarvest ? PaletteIdx::SoilAH : PaletteIdx::GroundCSP;
  for (int i = 0; i < geom.rows * geom.cols; ++i)
    cells[i].background = geom.wall[i] ? PaletteIdx::Wall : ground;

  static constexpr PaletteIdx kColorTint[4] = {PaletteIdx::BodyGray, PaletteIdx::Red,
                                               PaletteIdx::Green, PaletteIdx::Blue};
  for (const auto& b : state.berries) {
    auto& c = cells[geom.index(b.pos)];
    c.sprite = b.ripe ? SpriteId::BerryRipe : SpriteId::BerryUnripe;
    c.tint = kColorTint[static_cast<int>(b.color)];
  }
  for (const auto& p : state.pollution) {
    if (!p.present) continue;
    auto& c = cells[geom.index(p.pos)];
    c.sprite = SpriteId::PollutionPatch;
    c.tint = p.ptype == 1 ? PaletteIdx::PollutionOne : PaletteIdx::PollutionTwo;
  }
  for (const auto& a : state.apples) {
    if (!a.present) continue;
    auto& c = cells[geom.index(a.pos)];
    c.sprite = SpriteId::AppleFruit;
    c.tint = PaletteIdx::Apple;
  }
  for (const auto& a : state.agents) {
    if (a.removed()) continue;
    auto& c = cells[geom.index(a.pos)];
    c.sprite = SpriteId::AgentBody;
    c.world_rot = static_cast<uint8_t>((4 - static_cast<int>(a.orientation)) & 3);
    c.tint = kColorTint[static_cast<int>(a.display_color)];
    c.marked = a.marked() ? 1 : 0;
  }
  for (const auto& beam : state.beams)
    for (Coord cell : beam.cells) cells[geom.index(cell)].beam = beam.color;
  return cells;
}

void render_observation_into(const WorldState& state, int agent,
                             const std::vector<CellRender>& cells, Frame& frame) {
  if (frame.height != kObsPixels || frame.width != kObsPixels) frame = Frame(kObsPixels, kObsPixels);
  std::fill(frame.rgb.begin(), frame.rgb.end(), 0);
  const AgentBody& body = state.agents[agent];
  if (body.removed()) return;

  const uint8_t view_rot = static_cast<uint8_t>(body.orientation);
  const Coord fwd = forward_of(body.orientation);
  const Coord right = right_of(body.orientation);
  for (int vy = 0; vy < kViewCells; ++vy) {
    const int f = kViewAhead - vy;
    for (int vx = 0; vx < kViewCells; ++vx) {
      const int l = vx - kViewSide;
      int r = body.pos.row + f * fwd.row + l * right.row;
      int c = body.pos.col + f * fwd.col + l * right.col;
      if (state.geom.toroidal) {
        r = (r % state.geom.rows + state.geom.rows) % state.geom.rows;
        c = (c % state.geom.cols + state.geom.cols) % state.geom.cols;
      } else if (r < 0 || r >= state.geom.rows || c < 0 || c >= state.geom.cols) {
        continue;  // out of bounds stays black
      }
      blit_cell(frame, vy, vx, cells[r * state.geom.cols + c], view_rot);
    }
  }
}

Frame render_observation(const WorldState& state, int agent,
                         const std::vector<CellRender>& cells) {
  Frame frame(kObsPixels, kObsPixels);
  render_observation_into(state, agent, cells, frame);
  return frame;
}

Frame render_observation(const WorldState& state, int agent) {
  return render_observation(state, agent, build_cell_render(state));
}

}  // namespace normsim
