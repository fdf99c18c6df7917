#include "normsim/scripted.hpp"

#include <sstream>

#include "normsim/errors.hpp"

namespace normsim {
namespace {

int random_walk(RngStream& rng) {
  // Uniform over the four moves and both turns.
  static constexpr int kChoices[6] = {action::kMoveUp,   action::kMoveLeft,
                                      action::kMoveDown, action::kMoveRight,
                                      action::kTurnLeft, action::kTurnRight};
  return kChoices[rng.next_below(6)];
}

}  // namespace

ScriptedPolicy ScriptedPolicy::parse(const std::string& spec) {
  ScriptedPolicy p;
  if (spec == "always-no-op") {
    p.rule_ = Rule::AlwaysNoop;
  } else if (spec == "random-walk") {
    p.rule_ = Rule::RandomWalk;
  } else if (spec == "zap-gray-in-view") {
    p.rule_ = Rule::ZapGrayInView;
  } else if (spec == "plant-color-red" || spec == "plant-color-green" ||
             spec == "plant-color-blue") {
    p.rule_ = Rule::PlantColor;
    p.color_ = spec == "plant-color-red"     ? DisplayColor::Red
               : spec == "plant-color-green" ? DisplayColor::Green
                                             : DisplayColor::Blue;
  } else if (spec == "clean-type-1" || spec == "clean-type-2") {
    p.rule_ = Rule::CleanType;
    p.ptype_ = spec == "clean-type-1" ? 1 : 2;
  } else {
    throw ConfigError("unknown scripted rule: " + spec);
  }
  return p;
}

std::vector<ScriptedPolicy> ScriptedPolicy::parse_roster(const std::string& list, int n_agents) {
  std::vector<ScriptedPolicy> rules;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) rules.push_back(parse(item));
  if (rules.empty()) throw ConfigError("scripted_rules is empty");
  std::vector<ScriptedPolicy> roster;
  for (int i = 0; i < n_agents; ++i) roster.push_back(rules[i % rules.size()]);
  return roster;
}

int ScriptedPolicy::act(const Engine& engine, int agent, RngStream& rng) const {
  const WorldState& state = engine.state();
  const AgentBody& body = state.agents[agent];
  switch (rule_) {
    case Rule::AlwaysNoop:
      return action::kNoop;
    case Rule::RandomWalk:
      return random_walk(rng);
    case Rule::ZapGrayInView: {
      if (body.zap_cooldown == 0 && !body.frozen() && !body.removed()) {
        for (int j : Engine::zap_hits(state, agent)) {
          const AgentBody& t = state.agents[j];
          if (!t.frozen() && !t.removed() && t.display_color == DisplayColor::Gray)
            return action::kZap;
        }
      }
      return random_walk(rng);
    }
    case Rule::PlantColor: {
      if (body.tool_cooldown == 0 && !body.frozen() && !body.removed()) {
        const auto blocker = [&](Coord c) { return state.berry_at[state.geom.index(c)] >= 0; };
        const BeamFootprint fp =
            beam_footprint(state.geom, body.pos, body.orientation, BeamKind::Narrow, blocker);
        if (fp.blocked_at[1] >= 0) {
          const int site = state.berry_at[state.geom.index(fp.columns[1][fp.blocked_at[1]])];
          if (state.berries[site].color != color_)
            return action::kPlantRed + static_cast<int>(color_) - 1;
        }
      }
      return random_walk(rng);
    }
    case Rule::CleanType: {
      if (body.tool_cooldown == 0 && !body.frozen() && !body.removed()) {
        const auto blocker = [&](Coord c) {
          const int16_t p = state.pollution_at[state.geom.index(c)];
          return p >= 0 && state.pollution[p].present;
        };
        const BeamFootprint fp =
            beam_footprint(state.geom, body.pos, body.orientation, BeamKind::Narrow, blocker);
        if (fp.blocked_at[1] >= 0) {
          const int site = state.pollution_at[state.geom.index(fp.columns[1][fp.blocked_at[1]])];
          if (state.pollution[site].ptype == ptype_) return action::kClean;
        }
      }
      return random_walk(rng);
    }
  }
  return action::kNoop;
}

}  // namespace normsim
