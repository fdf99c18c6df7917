#pragma once

#include <string>
#include <vector>

#include "normsim/config.hpp"
#include "normsim/engine.hpp"
#include "normsim/metrics.hpp"

namespace normsim {

// Episode row formatting shared by the trainer and replay validation so the
// "re-simulating reproduces every CSV exactly" check is a string comparison.
std::vector<std::string> episode_csv_header(int n_agents);
std::vector<std::string> episode_csv_row(const EpisodeStats& stats);
std::vector<std::string> teaching_csv_row(const EpisodeStats& stats);
std::vector<std::vector<std::string>> simplex_csv_rows(const EpisodeStats& stats, int stride);

// Deterministic derivation of the per-(worker, episode) seed.
uint64_t episode_seed_for(uint64_t run_seed, int worker, uint64_t episode);

// Runs one seed of an experiment into `seed_dir` (created if needed).
// Resumes from run_state.bin when present. Returns total env steps executed.
uint64_t run_seed(const ExperimentConfig& cfg, uint64_t seed, const std::string& seed_dir);

// Re-simulates one replay file and returns the reconstructed episode stats;
// throws ReplayError when the final state hash diverges.
EpisodeStats resimulate_replay(const ExperimentConfig& cfg, const std::string& replay_path);

}  // namespace normsim
