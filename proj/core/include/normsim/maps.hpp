#pragma once

#include <string>

#include "normsim/world.hpp"

namespace normsim {

struct MapAsset {
  std::string name;
  std::string ascii;
  EnvKind kind;
  int default_agents;
  // Multiplier applied to the berry spawn coefficient so reduced maps keep
  // the same expected per-site rates (full-map sites / mini-map sites).
  double berry_coeff_scale;
};

// Built-in maps: "ah" (30x29 toroid), "ah-mini" (11x11), "csp" (11x30
// bounded incl. walls), "csp-mini" (7x16). Throws ConfigError for unknown
// names.
const MapAsset& map_asset(const std::string& name);

// AH map parser: alphabet {P,1,2,3}; berry sites at 1/2/3 start ripe with
// red/green/blue. Throws MapParseError on unknown symbols or ragged rows.
WorldState parse_ah_map(const std::string& ascii);

// CSP map parser: alphabet {W,P,B,F,D}. Throws MapParseError likewise.
WorldState parse_csp_map(const std::string& ascii);

// Parses, seeds the per-subsystem streams and spawns agents uniformly at
// random (without replacement) over P cells with random orientation.
WorldState make_world(const MapAsset& asset, int n_agents, uint64_t episode_seed);

}  // namespace normsim
