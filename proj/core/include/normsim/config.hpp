#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "normsim/classifier.hpp"
#include "normsim/learner.hpp"
#include "normsim/sanctions.hpp"
#include "normsim/world.hpp"

namespace normsim {

// Full run description. Serialized as a flat key=value text file; the
// canonical form (all keys resolved, sorted) hashes into every artifact.
struct ExperimentConfig {
  std::string environment = "ah";  // ah | ah-mini | csp | csp-mini
  int n_agents = 0;                // 0 = map default
  int episode_length = 2000;
  uint64_t total_env_steps = 2'000'000;
  bool cnm_enabled = true;
  Visibility visibility = Visibility::Global;
  uint64_t freeze_step = 0;  // 0 = never
  double alpha = -1.0;       // <0 = environment default
  double beta = -1.0;
  std::string profile = "desk";  // desk | full
  std::vector<uint64_t> seeds = {0};
  int metric_stride = 100;
  std::string output_dir = "runs/run";
  std::string policy = "learned";  // learned | scripted
  std::string scripted_rules;      // comma list, cycled over agents

  int batch_size = 4;       // parallel episode workers per seed
  int unroll_length = 20;   // L
  int cpc_shifts = 5;       // S
  int cpc_latent = 64;      // l
  double lambda_cpc = 10.0;
  double lambda_critic = 0.5;
  double lambda_class = 0.01;
  double gamma = 0.99;
  double lr_min = 1e-4, lr_max = 1e-3;
  double entropy_min = 1e-3, entropy_max = 1e-2;
  double rms_eps = 1e-5, rms_decay = 0.99, rms_momentum = 0.0;
  int classifier_positive_batch = 32;   // P
  int classifier_negative_batch = 1024; // P'
  int classifier_segment_len = 100;
  int zap_cooldown = 4;
  int context_len = 1;
  std::string spawn_variant = "prose";  // prose | literal (CSP apples)
  bool export_sanction_logs = false;
  bool record_replays = true;

  // Derived accessors (after resolve()).
  int resolved_agents() const;
  double resolved_alpha() const;
  double resolved_beta() const;
  bool is_ah() const;
  EnvParams env_params() const;
  NetProfile net_profile() const;
  LearnerHyperparams learner_hyperparams() const;  // lr/entropy filled per agent later

  // Canonical serialization: every key, sorted, one per line.
  std::string canonical() const;
  uint64_t hash() const;
  // Hash for run-state compatibility: ignores total_env_steps (and the
  // output location) so interrupted runs can resume toward a larger budget.
  uint64_t resume_hash() const;

  // Fills defaults that depend on the environment and checks invariants.
  // Throws ConfigError on any violation.
  void resolve_and_validate();
};

// Parse a flat key=value file body. Unknown keys are errors.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Built-in presets: ah-paper, csp-paper, ah-mini-cnm, csp-mini-cnm,
// ah-mini-base, csp-mini-base. Throws UnknownPreset.
ExperimentConfig preset_config(const std::string& name);
bool is_preset_name(const std::string& name);
std::vector<std::string> preset_names();

// §5.3 ablation preset deltas: no-freeze, local-sanctions, flat-pseudoreward.
// Returns the changed key/value pairs and applies them to `config`.
std::vector<std::pair<std::string, std::string>> ablation_preset(const std::string& name,
                                                                 ExperimentConfig& config);

}  // namespace normsim
