#pragma once

#include <string>
#include <vector>

#include "normsim/engine.hpp"
#include "normsim/rng.hpp"

namespace normsim {

// Deterministic oracle policies for tests and baselines. Never consult
// learned parameters.
class ScriptedPolicy {
 public:
  enum class Rule {
    AlwaysNoop,
    RandomWalk,
    ZapGrayInView,  // zap whenever an opportunity against a gray agent exists
    PlantColor,     // plant `color` when the narrow beam would recolor a berry
    CleanType,      // clean when the narrow beam would hit pollution of `param`
  };

  static ScriptedPolicy parse(const std::string& spec);  // throws ConfigError
  // Rule list like "zap-gray-in-view,plant-color-red"; cycled over agents.
  static std::vector<ScriptedPolicy> parse_roster(const std::string& list, int n_agents);

  int act(const Engine& engine, int agent, RngStream& rng) const;

  Rule rule() const { return rule_; }

 private:
  Rule rule_ = Rule::AlwaysNoop;
  DisplayColor color_ = DisplayColor::Red;
  int ptype_ = 1;
};

}  // namespace normsim
