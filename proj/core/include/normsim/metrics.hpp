#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "normsim/world.hpp"

namespace normsim {

// Largest berry-color share; r+g+b must be positive.
double monoculture_fraction(int r, int g, int b);

// 1 - min(d1,d2)/(d1+d2). When both are zero: sets *both_zero and returns
// 1.0 (fully cleaned counts as maximal imbalance) if the flag is provided,
// otherwise throws BothZero.
double inverted_minimal_fraction(int d1, int d2, bool* both_zero = nullptr);

// Everything §-5-style analyses need from one episode, accumulated by the
// harness while stepping (all replay-derivable except pseudo_return).
struct EpisodeStats {
  EnvKind kind = EnvKind::AllelopathicHarvest;
  int episode_index = 0;
  int worker = 0;
  uint64_t env_step_start = 0;
  int n_agents = 0;

  std::vector<std::array<int, 3>> berry_counts;      // AH, per step
  std::vector<std::array<int, 2>> pollution_counts;  // CSP, per step
  std::vector<double> extrinsic_return;              // per agent
  std::vector<double> pseudo_return;                 // per agent, reported separately
  long zap_actions = 0;
  long disapprovals = 0;   // records with outcome 1
  long opportunities = 0;  // all records
  std::array<long, 4> hits_by_color = {0, 0, 0, 0};         // zap hits per display color
  std::array<long, 4> agent_steps_by_color = {0, 0, 0, 0};  // live agent-steps per color
  std::array<long, 2> cleans_by_type = {0, 0};              // CSP

  // Collective return sums extrinsic returns only (penalties included,
  // pseudorewards excluded).
  double collective_return() const;
  // Mean monoculture fraction over the second half of the episode.
  double monoculture_second_half_mean() const;
  // Mean inverted minimal fraction over the whole episode.
  double inverted_minimal_mean() const;
};

// Bayes-style smoothed zap-rate contrasts: p(zapped | color) estimated with
// add-one smoothing; signal1 contrasts the free-rider color (gray) against
// the dominant color, signal2 the second-most-dominant against the dominant.
struct TeachingSignals {
  double signal1 = 0.0;
  double signal2 = 0.0;
};
TeachingSignals teaching_signals(const EpisodeStats& stats);

// Berry-share triples at a fixed step stride (AH episodes).
std::vector<std::array<double, 3>> simplex_samples(const EpisodeStats& stats, int stride);

}  // namespace normsim
