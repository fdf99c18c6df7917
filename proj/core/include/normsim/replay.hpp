#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace normsim {

// One episode's replay: run header plus per-step joint actions. Replaying
// through the engine reproduces states bit-exactly; the footer carries the
// final state hash and extrinsic collective return for validation.
struct Replay {
  std::string engine_version;
  std::string map_name;
  uint64_t config_hash = 0;
  uint64_t episode_seed = 0;
  uint32_t worker = 0;
  uint32_t episode_index = 0;
  uint32_t n_agents = 0;
  uint32_t steps = 0;
  std::vector<uint8_t> actions;  // steps * n_agents, step-major
  uint64_t final_state_hash = 0;
  double collective_return = 0.0;
};

void write_replay(const std::string& path, const Replay& replay);
Replay read_replay(const std::string& path);  // throws ReplayError

}  // namespace normsim
