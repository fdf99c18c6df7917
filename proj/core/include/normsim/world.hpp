#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "normsim/frame.hpp"
#include "normsim/gridworld.hpp"
#include "normsim/rng.hpp"
#include "normsim/sprites.hpp"

namespace normsim {

enum class EnvKind : uint8_t { AllelopathicHarvest = 0, CleanUp = 1 };

// Static per-run environment parameters. Defaults follow Appendix B; knobs
// the source material leaves open are called out in config.
struct EnvParams {
  EnvKind kind = EnvKind::AllelopathicHarvest;
  int n_agents = 16;
  int episode_length = 2000;
  int zap_cooldown = 4;
  int plant_cooldown = 2;
  int clean_cooldown = 5;
  int mark_duration = 50;
  int freeze_duration = 25;
  int removal_duration = 25;
  int berry_refractory = 10;
  int pollution_protect = 100;
  double berry_spawn_coeff = 0.0000025;  // per-site p = coeff * count(color)
  double pollution_respawn_p = 0.05;
  bool apple_prob_literal = false;  // false = prose variant (default)
  double removal_penalty = -10.0;
  double taste_match_reward = 2.0;
  double taste_other_reward = 1.0;
  double apple_reward = 1.0;
  int eat_streak_gray_at = 21;  // CSP: 21st consecutive eat turns the agent gray
};

struct BerrySite {
  DisplayColor color = DisplayColor::Red;  // Red/Green/Blue only
  bool ripe = false;
  int16_t refractory_timer = 0;
  Coord pos;
};

struct PollutionCell {
  uint8_t ptype = 1;  // 1 or 2, fixed by map position
  bool present = true;
  int16_t protect_timer = 0;
  Coord pos;
};

struct AppleSite {
  bool present = false;
  Coord pos;
};

struct BeamVisual {
  BeamKind kind = BeamKind::Zap;
  uint8_t shooter = 0;
  PaletteIdx color = PaletteIdx::BeamZap;
  std::vector<Coord> cells;
};

// Full environment state. Single-threaded stepping; safe to move between
// threads between steps.
struct WorldState {
  EnvKind kind = EnvKind::AllelopathicHarvest;
  GridGeometry geom;
  std::vector<Coord> spawn_cells;

  // Cell -> entity index (-1 none), one table per entity family.
  std::vector<int16_t> berry_at;
  std::vector<int16_t> pollution_at;
  std::vector<int16_t> apple_at;
  std::vector<BerrySite> berries;
  std::array<int, 3> berry_counts = {0, 0, 0};  // sites by color (r, g, b)
  std::vector<PollutionCell> pollution;
  std::array<int, 2> pollution_present = {0, 0};  // d1, d2
  std::vector<AppleSite> apples;

  std::vector<AgentBody> agents;
  std::vector<int16_t> occupancy;  // cell -> live agent id or -1

  std::vector<BeamVisual> beams;  // fired during the last transition

  // One counter-based stream per subsystem, all derived from the episode
  // seed, so subsystem changes don't perturb each other's draws.
  RngStream rng_move, rng_spawn, rng_place, rng_gray;

  uint32_t step_index = 0;
  uint64_t episode_seed = 0;

  int total_sites() const { return static_cast<int>(berries.size()); }
  double monoculture_fraction() const {
    const int total = berry_counts[0] + berry_counts[1] + berry_counts[2];
    const int top = std::max(berry_counts[0], std::max(berry_counts[1], berry_counts[2]));
    return total > 0 ? static_cast<double>(top) / total : 0.0;
  }

  void seed_streams(uint64_t episode_seed_in);
  void place_agents(int n);  // uniform without replacement over spawn cells
  uint64_t state_hash() const;
};

// Render recipe for every cell, shared by all per-agent renders of one step.
std::vector<CellRender> build_cell_render(const WorldState& state);

// Pure egocentric rendering: 88x88x3, forward up; removed agents get an
// all-black frame.
Frame render_observation(const WorldState& state, int agent);
Frame render_observation(const WorldState& state, int agent,
                         const std::vector<CellRender>& cells);
void render_observation_into(const WorldState& state, int agent,
                             const std::vector<CellRender>& cells, Frame& out);

}  // namespace normsim
