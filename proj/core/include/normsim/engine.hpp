#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "normsim/maps.hpp"
#include "normsim/sanctions.hpp"
#include "normsim/world.hpp"

namespace normsim {

struct StepEvents {
  struct Hit {
    uint8_t shooter;
    uint8_t target;
    DisplayColor target_color;  // display color when hit
    bool removal;               // true when the hit removed a marked agent
  };
  struct Clean {
    uint8_t agent;
    uint8_t ptype;
  };
  struct Plant {
    uint8_t agent;
    DisplayColor color;
  };
  std::vector<uint8_t> zaps_fired;
  std::vector<Hit> hits;
  std::vector<Clean> cleans;  // successful cleans
  std::vector<Plant> plants;  // successful replants
};

struct StepOutput {
  std::vector<std::shared_ptr<const Frame>> observations;  // one per agent
  std::vector<std::array<float, 4>> aux;  // zap_ready, tool_ready, frozen, marked
  std::vector<double> rewards;            // extrinsic only
  size_t new_records_begin = 0;           // range into Engine::log().records()
  size_t new_records_end = 0;
  bool episode_done = false;
  StepEvents events;
};

// The episode loop: sanction opportunity detection, beam resolution, the
// mark/freeze/removal machine, movement, eating, spawns, timers, rendering
// and the public sanction log. Deterministic given (state, actions, seeds).
class Engine {
 public:
  Engine(const MapAsset& asset, EnvParams params, uint64_t episode_seed);

  // Build from an explicit state (tests construct scenarios directly).
  Engine(WorldState state, EnvParams params);

  void reset(uint64_t episode_seed);

  // One action per agent. Frozen/removed agents' actions are accepted but
  // ignored. Throws InvalidActionId on out-of-range ids.
  StepOutput step(const std::vector<int>& actions);

  // Pairs (i, j), i != j, where j stands in i's unblocked zap footprint,
  // i's zap cooldown is 0 and neither is frozen or removed.
  static std::vector<std::pair<int, int>> sanction_opportunities(const WorldState& state);

  // Hypothetical zap hit set of `shooter` against the current positions:
  // first agent per beam column within reach. Frozen agents block and are
  // hit; removed agents are not on the grid.
  static std::vector<int> zap_hits(const WorldState& state, int shooter,
                                   BeamFootprint* footprint_out = nullptr);

  // Direct zap application (test/harness surface): fires shooter's beam and
  // applies the mark/freeze/removal transitions; per-agent rewards accrue
  // into `rewards` when given. Returns the hit agent ids. Throws
  // ZapUnavailable when the cooldown is live or the shooter cannot act.
  static std::vector<int> apply_zap(WorldState& state, const EnvParams& params, int shooter,
                                    std::vector<double>* rewards = nullptr);

  const WorldState& state() const { return state_; }
  WorldState& mutable_state() { return state_; }
  const EnvParams& params() const { return params_; }
  const PublicSanctionLog& log() const { return log_; }
  PublicSanctionLog& mutable_log() { return log_; }
  const std::vector<std::shared_ptr<const Frame>>& last_observations() const {
    return last_obs_;
  }
  int action_count() const;

 private:
  void render_all();

  WorldState state_;
  EnvParams params_;
  PublicSanctionLog log_;
  const MapAsset* asset_ = nullptr;  // for reset()
  std::vector<std::shared_ptr<const Frame>> last_obs_;
};

}  // namespace normsim
