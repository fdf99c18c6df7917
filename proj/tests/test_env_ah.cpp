#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "normsim/engine.hpp"
#include "normsim/env_ah.hpp"
#include "normsim/errors.hpp"
#include "normsim/maps.hpp"

using namespace normsim;

// Golden fixture: counting the 1/2/3 characters of the shipped map once.
// The printed map carries 348 sites, 116 per color (the accompanying prose
// says 384; the map itself wins).
constexpr int kAhSites = 348;
constexpr int kAhPerColor = 116;

TEST_CASE("full map parses to the committed golden counts") {
  const WorldState s = parse_ah_map(map_asset("ah").ascii);
  CHECK(s.geom.rows == 30);
  CHECK(s.geom.cols == 29);
  CHECK(s.geom.toroidal);
  CHECK(static_cast<int>(s.berries.size()) == kAhSites);
  CHECK(s.berry_counts == std::array<int, 3>{kAhPerColor, kAhPerColor, kAhPerColor});
  CHECK(static_cast<int>(s.spawn_cells.size()) == 30 * 29 - kAhSites);
  for (const auto& b : s.berries) CHECK(b.ripe);
}

TEST_CASE("mini map: 40 sites on an 11x11 toroid") {
  const WorldState s = parse_ah_map(map_asset("ah-mini").ascii);
  CHECK(s.geom.rows == 11);
  CHECK(s.geom.cols == 11);
  CHECK(static_cast<int>(s.berries.size()) == 40);
  CHECK(s.berry_counts[0] + s.berry_counts[1] + s.berry_counts[2] == 40);
  CHECK(map_asset("ah-mini").berry_coeff_scale == doctest::Approx(384.0 / 40.0));
}

TEST_CASE("unknown symbols and ragged maps are parse errors") {
  CHECK_THROWS_AS(parse_ah_map("PP1\nPXP\n"), MapParseError);
  CHECK_THROWS_AS(parse_ah_map("PP1\nPP\n"), MapParseError);
}

TEST_CASE("same seed places agents identically; different seeds differ") {
  const WorldState a = make_world(map_asset("ah"), 16, 101);
  const WorldState b = make_world(map_asset("ah"), 16, 101);
  const WorldState c = make_world(map_asset("ah"), 16, 102);
  bool all_equal_ac = true;
  for (int i = 0; i < 16; ++i) {
    CHECK(a.agents[i].pos == b.agents[i].pos);
    CHECK(a.agents[i].orientation == b.agents[i].orientation);
    all_equal_ac = all_equal_ac && a.agents[i].pos == c.agents[i].pos;
    CHECK(a.agents[i].display_color == DisplayColor::Gray);
  }
  CHECK_FALSE(all_equal_ac);
  // Tastes: first half red, second half green.
  for (int i = 0; i < 16; ++i)
    CHECK(a.agents[i].taste == (i < 8 ? DisplayColor::Red : DisplayColor::Green));
}

TEST_CASE("berry spawn probability matches 0.0000025*c within 3 s.e.") {
  // Scripted no-op world with counts held fixed: reset ripeness every tick
  // so every site stays eligible, and park the agents off the sites.
  WorldState s = make_world(map_asset("ah"), 1, 11);
  EnvParams params;
  // Scale the coefficient up so 1e7 site-steps give a crisp comparison at
  // the exact printed formula (the formula is linear in the coefficient;
  // the engine multiplies coeff * count directly).
  params.berry_spawn_coeff = 0.0000025;
  s.agents[0].pos = s.spawn_cells[0];

  const double expected_p = params.berry_spawn_coeff * kAhPerColor;  // per site-step
  long site_steps = 0;
  long events = 0;
  const int ticks = static_cast<int>(1e7 / kAhSites) + 1;  // >= 1e7 site-steps
  for (int t = 0; t < ticks; ++t) {
    for (auto& b : s.berries) {
      b.ripe = false;
      b.refractory_timer = 0;
    }
    berry_spawn_tick(s, params);
    for (const auto& b : s.berries) events += b.ripe ? 1 : 0;
    site_steps += kAhSites - 1;  // one site sits under the parked agent
  }
  const double rate = static_cast<double>(events) / site_steps;
  const double se = std::sqrt(expected_p * (1 - expected_p) / site_steps);
  CHECK(std::abs(rate - expected_p) < 3 * se);
}

TEST_CASE("no ripening under agents, in refractory, or when already ripe") {
  WorldState s = make_world(map_asset("ah"), 1, 13);
  EnvParams params;
  params.berry_spawn_coeff = 1.0;  // would ripen everything eligible
  // Park the agent on site 0.
  s.occupancy[s.geom.index(s.agents[0].pos)] = -1;
  s.agents[0].pos = s.berries[0].pos;
  s.occupancy[s.geom.index(s.agents[0].pos)] = 0;
  for (auto& b : s.berries) {
    b.ripe = false;
    b.refractory_timer = 0;
  }
  s.berries[1].refractory_timer = 4;  // eaten 6 steps ago (timer counts down from 10)
  berry_spawn_tick(s, params);
  CHECK_FALSE(s.berries[0].ripe);  // under agent
  CHECK_FALSE(s.berries[1].ripe);  // refractory
  CHECK(s.berries[2].ripe);
}

TEST_CASE("taste reward mapping is exhaustively correct") {
  EnvParams params;
  for (int taste = 1; taste <= 2; ++taste) {
    for (int color = 1; color <= 3; ++color) {
      WorldState s = make_world(map_asset("ah-mini"), 2, 17);
      const int agent = 0;
      s.agents[agent].taste = static_cast<DisplayColor>(taste);
      s.berries[0].color = static_cast<DisplayColor>(color);
      s.berries[0].ripe = true;
      const double reward = eat_berry(s, params, agent, 0);
      CHECK(reward == (taste == color ? 2.0 : 1.0));
      CHECK_FALSE(s.berries[0].ripe);
      CHECK(s.berries[0].refractory_timer == 10);
    }
  }
}

TEST_CASE("gray reversion empirical rate matches 1 - m within 3 s.e.") {
  WorldState s = make_world(map_asset("ah"), 1, 19);
  EnvParams params;
  // Force a known monoculture fraction: 200/348 after recoloring.
  int red = 0;
  for (auto& b : s.berries) b.color = DisplayColor::Green;
  for (auto& b : s.berries) {
    if (red < 200) {
      b.color = DisplayColor::Red;
      red++;
    }
  }
  s.berry_counts = {200, kAhSites - 200, 0};
  const double m = 200.0 / kAhSites;
  const int trials = 200000;
  long reverted = 0;
  for (int t = 0; t < trials; ++t) {
    s.agents[0].display_color = DisplayColor::Red;
    s.berries[0].ripe = true;
    eat_berry(s, params, 0, 0);
    reverted += s.agents[0].display_color == DisplayColor::Gray ? 1 : 0;
  }
  const double expect = 1.0 - m;
  const double rate = static_cast<double>(reverted) / trials;
  const double se = std::sqrt(expect * (1 - expect) / trials);
  CHECK(std::abs(rate - expect) < 3 * se);

  // m = 1: keeps its color, always.
  s.berry_counts = {kAhSites, 0, 0};
  for (int t = 0; t < 1000; ++t) {
    s.agents[0].display_color = DisplayColor::Red;
    s.berries[0].ripe = true;
    eat_berry(s, params, 0, 0);
    CHECK(s.agents[0].display_color == DisplayColor::Red);
  }
}

TEST_CASE("replanting recolors differently-colored sites and tints the agent") {
  WorldState s = make_world(map_asset("ah-mini"), 2, 23);
  const auto counts_before = s.berry_counts;
  s.berries[3].color = DisplayColor::Blue;
  s.berries[3].ripe = true;
  // Rebuild counters after the fiddling.
  s.berry_counts = {0, 0, 0};
  for (const auto& b : s.berries) s.berry_counts[static_cast<int>(b.color) - 1]++;
  (void)counts_before;

  CHECK(apply_replant(s, 0, 3, DisplayColor::Red));
  CHECK(s.berries[3].color == DisplayColor::Red);
  CHECK(s.berries[3].ripe);  // ripeness preserved
  CHECK(s.agents[0].display_color == DisplayColor::Red);

  // Same color: no-op, agent color unchanged.
  s.agents[0].display_color = DisplayColor::Gray;
  CHECK_FALSE(apply_replant(s, 0, 3, DisplayColor::Red));
  CHECK(s.agents[0].display_color == DisplayColor::Gray);

  // Conservation: r+g+b equals the site count at all times.
  CHECK(s.berry_counts[0] + s.berry_counts[1] + s.berry_counts[2] ==
        static_cast<int>(s.berries.size()));
}

TEST_CASE("plant action through the engine: beam, cooldown, ignore while hot") {
  WorldState raw = parse_ah_map(
      "PPP\n"
      "PPP\n"
      "P1P\n");
  raw.seed_streams(31);
  raw.agents.assign(1, AgentBody{});
  raw.occupancy.assign(9, -1);
  raw.agents[0].pos = {0, 1};
  raw.agents[0].orientation = Orientation::South;  // berry two cells ahead
  raw.occupancy[raw.geom.index({0, 1})] = 0;
  EnvParams params;
  params.kind = EnvKind::AllelopathicHarvest;
  params.n_agents = 1;
  params.episode_length = 1 << 20;
  Engine engine(std::move(raw), params);

  StepOutput out = engine.step({action::kPlantGreen});
  CHECK(engine.state().berries[0].color == DisplayColor::Green);
  CHECK(engine.state().agents[0].display_color == DisplayColor::Green);
  REQUIRE(out.events.plants.size() == 1);
  // Cooldown 2 set during the step, decremented once already.
  CHECK(engine.state().agents[0].tool_cooldown == 1);

  // Tool on cooldown: the plant action is ignored entirely.
  out = engine.step({action::kPlantRed});
  CHECK(out.events.plants.empty());
  CHECK(engine.state().berries[0].color == DisplayColor::Green);
  CHECK(engine.state().agents[0].tool_cooldown == 0);

  // Cooled down again: replant works.
  out = engine.step({action::kPlantRed});
  REQUIRE(out.events.plants.size() == 1);
  CHECK(engine.state().berries[0].color == DisplayColor::Red);
}

TEST_CASE("eating through the engine on entry") {
  WorldState raw = parse_ah_map(
      "PPP\n"
      "P1P\n"
      "PPP\n");
  raw.seed_streams(37);
  raw.agents.assign(1, AgentBody{});
  raw.occupancy.assign(9, -1);
  raw.agents[0].pos = {0, 1};
  raw.agents[0].orientation = Orientation::South;
  raw.agents[0].taste = DisplayColor::Red;
  raw.occupancy[raw.geom.index({0, 1})] = 0;
  raw.berry_counts = {1, 0, 0};
  EnvParams params;
  params.kind = EnvKind::AllelopathicHarvest;
  params.n_agents = 1;
  params.episode_length = 1 << 20;
  Engine engine(std::move(raw), params);
  const StepOutput out = engine.step({action::kMoveUp});  // facing south: moves south
  CHECK(engine.state().agents[0].pos == Coord{1, 1});
  CHECK(out.rewards[0] == 2.0);  // taste match
  CHECK_FALSE(engine.state().berries[0].ripe);
}
