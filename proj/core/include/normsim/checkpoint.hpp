#pragma once

#include <cstdint>
#include <string>

#include "normsim/nn.hpp"

namespace normsim {

// Versioned flat parameter blob + metadata, shared by policy and classifier
// checkpoints. Optimizer state rides along so runs resume exactly.
struct CheckpointMeta {
  uint64_t step_count = 0;
  bool frozen = false;
};

void save_checkpoint(const std::string& path, const nn::ParamStore<float>& params,
                     const nn::RmsProp<float>* opt, CheckpointMeta meta);

// Loads into an already-constructed store (sizes must match). Returns the
// metadata. Throws std::runtime_error on mismatch or IO failure.
CheckpointMeta load_checkpoint(const std::string& path, nn::ParamStore<float>& params,
                               nn::RmsProp<float>* opt);

}  // namespace normsim
