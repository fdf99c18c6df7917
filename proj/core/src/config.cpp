#include "normsim/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "normsim/csvio.hpp"
#include "normsim/errors.hpp"
#include "normsim/maps.hpp"

namespace normsim {
namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  size_t b = s.find_last_not_of(" \t\r");
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ConfigError("config: boolean expected for " + key + ", got '" + v + "'");
}

double parse_double(const std::string& v, const std::string& key) {
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (...) {
    throw ConfigError("config: number expected for " + key + ", got '" + v + "'");
  }
}

int64_t parse_int(const std::string& v, const std::string& key) {
  const double d = parse_double(v, key);
  const auto i = static_cast<int64_t>(d);
  if (static_cast<double>(i) != d)
    throw ConfigError("config: integer expected for " + key + ", got '" + v + "'");
  return i;
}

}  // namespace

int ExperimentConfig::resolved_agents() const {
  return n_agents > 0 ? n_agents : map_asset(environment).default_agents;
}
bool ExperimentConfig::is_ah() const {
  return map_asset(environment).kind == EnvKind::AllelopathicHarvest;
}
double ExperimentConfig::resolved_alpha() const {
  if (alpha >= 0.0) return alpha;
  return is_ah() ? 0.2 : 1.0;
}
double ExperimentConfig::resolved_beta() const {
  if (beta >= 0.0) return beta;
  return is_ah() ? 0.4 : 2.0;
}

EnvParams ExperimentConfig::env_params() const {
  EnvParams p;
  p.kind = map_asset(environment).kind;
  p.n_agents = resolved_agents();
  p.episode_length = episode_length;
  p.zap_cooldown = zap_cooldown;
  p.apple_prob_literal = spawn_variant == "literal";
  return p;
}

NetProfile ExperimentConfig::net_profile() const {
  return profile == "full" ? NetProfile::full() : NetProfile::desk();
}

LearnerHyperparams ExperimentConfig::learner_hyperparams() const {
  LearnerHyperparams hp;
  hp.gamma = gamma;
  hp.lambda_critic = lambda_critic;
  hp.lambda_cpc = lambda_cpc;
  hp.cpc_shifts = cpc_shifts;
  hp.cpc_latent = cpc_latent;
  hp.rms_decay = rms_decay;
  hp.rms_eps = rms_eps;
  return hp;
}

std::string ExperimentConfig::canonical() const {
  std::map<std::string, std::string> kv;
  kv["environment"] = environment;
  kv["n_agents"] = std::to_string(resolved_agents());
  kv["episode_length"] = std::to_string(episode_length);
  kv["total_env_steps"] = std::to_string(total_env_steps);
  kv["cnm_enabled"] = cnm_enabled ? "true" : "false";
  kv["visibility"] = visibility == Visibility::Global ? "global" : "local";
  kv["freeze_step"] = freeze_step == 0 ? "never" : std::to_string(freeze_step);
  kv["alpha"] = format_double(resolved_alpha());
  kv["beta"] = format_double(resolved_beta());
  kv["profile"] = profile;
  {
    std::string s;
    for (size_t i = 0; i < seeds.size(); ++i) s += (i ? "," : "") + std::to_string(seeds[i]);
    kv["seeds"] = s;
  }
  kv["metric_stride"] = std::to_string(metric_stride);
  kv["output_dir"] = output_dir;
  kv["policy"] = policy;
  kv["scripted_rules"] = scripted_rules;
  kv["batch_size"] = std::to_string(batch_size);
  kv["unroll_length"] = std::to_string(unroll_length);
  kv["cpc_shifts"] = std::to_string(cpc_shifts);
  kv["cpc_latent"] = std::to_string(cpc_latent);
  kv["lambda_cpc"] = format_double(lambda_cpc);
  kv["lambda_critic"] = format_double(lambda_critic);
  kv["lambda_class"] = format_double(lambda_class);
  kv["gamma"] = format_double(gamma);
  kv["lr_min"] = format_double(lr_min);
  kv["lr_max"] = format_double(lr_max);
  kv["entropy_min"] = format_double(entropy_min);
  kv["entropy_max"] = format_double(entropy_max);
  kv["rms_eps"] = format_double(rms_eps);
  kv["rms_decay"] = format_double(rms_decay);
  kv["rms_momentum"] = format_double(rms_momentum);
  kv["classifier_positive_batch"] = std::to_string(classifier_positive_batch);
  kv["classifier_negative_batch"] = std::to_string(classifier_negative_batch);
  kv["classifier_segment_len"] = std::to_string(classifier_segment_len);
  kv["zap_cooldown"] = std::to_string(zap_cooldown);
  kv["context_len"] = std::to_string(context_len);
  kv["spawn_variant"] = spawn_variant;
  kv["export_sanction_logs"] = export_sanction_logs ? "true" : "false";
  kv["record_replays"] = record_replays ? "true" : "false";
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

namespace {

uint64_t hash_without(const std::string& canonical, const std::vector<std::string>& drop) {
  std::string canon;
  std::istringstream in(canonical);
  std::string line;
  while (std::getline(in, line)) {
    bool skip = false;
    for (const auto& key : drop) skip = skip || line.rfind(key + "=", 0) == 0;
    if (!skip) canon += line + "\n";
  }
  return hash_bytes(canon.data(), canon.size());
}

}  // namespace

uint64_t ExperimentConfig::hash() const {
  // output_dir does not change the experiment itself.
  return hash_without(canonical(), {"output_dir"});
}

uint64_t ExperimentConfig::resume_hash() const {
  return hash_without(canonical(), {"output_dir", "total_env_steps"});
}

void ExperimentConfig::resolve_and_validate() {
  const MapAsset& asset = map_asset(environment);  // throws for unknown envs
  if (n_agents == 0) n_agents = asset.default_agents;
  if (n_agents < 1 || n_agents > 32)
    throw ConfigError("config: n_agents must be in [1, 32]");
  if (alpha < 0.0) alpha = resolved_alpha();
  if (beta < 0.0) beta = resolved_beta();
  if (episode_length <= 0) throw ConfigError("config: episode_length must be positive");
  if (policy != "learned" && policy != "scripted")
    throw ConfigError("config: policy must be learned or scripted");
  if (policy == "scripted" && scripted_rules.empty())
    throw ConfigError("config: scripted policy requires scripted_rules");
  if (profile != "desk" && profile != "full")
    throw ConfigError("config: profile must be desk or full");
  if (spawn_variant != "prose" && spawn_variant != "literal")
    throw ConfigError("config: spawn_variant must be prose or literal");
  if (context_len != 1)
    throw ConfigError("config: only context_len=1 is supported");
  if (seeds.empty()) throw ConfigError("config: at least one seed required");
  if (policy == "learned") {
    if (batch_size < 1) throw ConfigError("config: batch_size must be >= 1");
    if (unroll_length < 2) throw ConfigError("config: unroll_length must be >= 2");
    if (episode_length % unroll_length != 0)
      throw ConfigError("config: episode_length must be a multiple of unroll_length");
    if (cpc_shifts >= unroll_length)
      throw ConfigError("config: cpc_shifts must be < unroll_length");
    if (!(lr_min > 0 && lr_min < lr_max))
      throw ConfigError("config: learning-rate range requires 0 < lr_min < lr_max");
    if (!(entropy_min > 0 && entropy_min < entropy_max))
      throw ConfigError("config: entropy range requires 0 < entropy_min < entropy_max");
  }
  if (episode_length % classifier_segment_len != 0)
    throw ConfigError("config: episode_length must be a multiple of classifier_segment_len");
  if (policy == "learned" && cnm_enabled && classifier_segment_len % unroll_length != 0)
    throw ConfigError("config: classifier_segment_len must be a multiple of unroll_length");
  if (classifier_positive_batch < 1 || classifier_negative_batch < 1)
    throw ConfigError("config: classifier batch sizes must be positive");
  if (metric_stride < 1) throw ConfigError("config: metric_stride must be >= 1");
  if (zap_cooldown < 2) throw ConfigError("config: zap_cooldown must be >= 2");
}

ExperimentConfig parse_config_text(const std::string& text) {
  ExperimentConfig c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const size_t eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(t.substr(0, eq));
    const std::string val = trim(t.substr(eq + 1));
    if (key == "environment") c.environment = val;
    else if (key == "n_agents") c.n_agents = static_cast<int>(parse_int(val, key));
    else if (key == "episode_length") c.episode_length = static_cast<int>(parse_int(val, key));
    else if (key == "total_env_steps") c.total_env_steps = static_cast<uint64_t>(parse_double(val, key));
    else if (key == "cnm_enabled") c.cnm_enabled = parse_bool(val, key);
    else if (key == "visibility") {
      if (val == "global") c.visibility = Visibility::Global;
      else if (val == "local") c.visibility = Visibility::Local;
      else throw ConfigError("config: visibility must be global or local");
    } else if (key == "freeze_step") {
      c.freeze_step = (val == "never") ? 0 : static_cast<uint64_t>(parse_double(val, key));
    } else if (key == "alpha") c.alpha = parse_double(val, key);
    else if (key == "beta") c.beta = parse_double(val, key);
    else if (key == "profile") c.profile = val;
    else if (key == "seeds") {
      c.seeds.clear();
      std::stringstream ss(val);
      std::string item;
      while (std::getline(ss, item, ','))
        if (!trim(item).empty()) c.seeds.push_back(static_cast<uint64_t>(parse_int(trim(item), key)));
    } else if (key == "metric_stride") c.metric_stride = static_cast<int>(parse_int(val, key));
    else if (key == "output_dir") c.output_dir = val;
    else if (key == "policy") c.policy = val;
    else if (key == "scripted_rules") c.scripted_rules = val;
    else if (key == "batch_size") c.batch_size = static_cast<int>(parse_int(val, key));
    else if (key == "unroll_length") c.unroll_length = static_cast<int>(parse_int(val, key));
    else if (key == "cpc_shifts") c.cpc_shifts = static_cast<int>(parse_int(val, key));
    else if (key == "cpc_latent") c.cpc_latent = static_cast<int>(parse_int(val, key));
    else if (key == "lambda_cpc") c.lambda_cpc = parse_double(val, key);
    else if (key == "lambda_critic") c.lambda_critic = parse_double(val, key);
    else if (key == "lambda_class") c.lambda_class = parse_double(val, key);
    else if (key == "gamma") c.gamma = parse_double(val, key);
    else if (key == "lr_min") c.lr_min = parse_double(val, key);
    else if (key == "lr_max") c.lr_max = parse_double(val, key);
    else if (key == "entropy_min") c.entropy_min = parse_double(val, key);
    else if (key == "entropy_max") c.entropy_max = parse_double(val, key);
    else if (key == "rms_eps") c.rms_eps = parse_double(val, key);
    else if (key == "rms_decay") c.rms_decay = parse_double(val, key);
    else if (key == "rms_momentum") c.rms_momentum = parse_double(val, key);
    else if (key == "classifier_positive_batch") c.classifier_positive_batch = static_cast<int>(parse_int(val, key));
    else if (key == "classifier_negative_batch") c.classifier_negative_batch = static_cast<int>(parse_int(val, key));
    else if (key == "classifier_segment_len") c.classifier_segment_len = static_cast<int>(parse_int(val, key));
    else if (key == "zap_cooldown") c.zap_cooldown = static_cast<int>(parse_int(val, key));
    else if (key == "context_len") c.context_len = static_cast<int>(parse_int(val, key));
    else if (key == "spawn_variant") c.spawn_variant = val;
    else if (key == "export_sanction_logs") c.export_sanction_logs = parse_bool(val, key);
    else if (key == "record_replays") c.record_replays = parse_bool(val, key);
    else throw ConfigError("config: unknown key '" + key + "'");
  }
  c.resolve_and_validate();
  return c;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

namespace {

const std::map<std::string, std::string>& preset_table() {
  static const std::map<std::string, std::string> kPresets = {
      {"ah-paper",
       "environment=ah\nprofile=full\ntotal_env_steps=5e8\nfreeze_step=1e8\n"
       "batch_size=16\nunroll_length=100\ncpc_shifts=20\nalpha=0.2\nbeta=0.4\n"
       "gamma=0.99\nn_agents=16\ncnm_enabled=true\nseeds=0,1,2,3,4,5,6,7,8,9,"
       "10,11,12,13,14,15,16,17,18,19\n"},
      {"csp-paper",
       "environment=csp\nprofile=full\ntotal_env_steps=5e8\nfreeze_step=0.5e8\n"
       "batch_size=16\nunroll_length=100\ncpc_shifts=20\nalpha=1.0\nbeta=2.0\n"
       "gamma=0.99\nn_agents=7\ncnm_enabled=true\nseeds=0,1,2,3,4,5,6,7,8,9\n"},
      {"ah-mini-cnm",
       "environment=ah-mini\nprofile=desk\ntotal_env_steps=2e6\nfreeze_step=2e5\n"
       "batch_size=4\nunroll_length=20\ncpc_shifts=5\nalpha=0.2\nbeta=0.4\n"
       "classifier_negative_batch=256\ncnm_enabled=true\nseeds=0,1,2,3,4\n"},
      {"csp-mini-cnm",
       "environment=csp-mini\nprofile=desk\ntotal_env_steps=2e6\nfreeze_step=2e5\n"
       "batch_size=4\nunroll_length=20\ncpc_shifts=5\nalpha=1.0\nbeta=2.0\n"
       "classifier_negative_batch=256\ncnm_enabled=true\nseeds=0,1,2,3,4\n"},
      {"ah-mini-base",
       "environment=ah-mini\nprofile=desk\ntotal_env_steps=2e6\nfreeze_step=never\n"
       "batch_size=4\nunroll_length=20\ncpc_shifts=5\ncnm_enabled=false\nseeds=0,1,2,3,4\n"},
      {"csp-mini-base",
       "environment=csp-mini\nprofile=desk\ntotal_env_steps=2e6\nfreeze_step=never\n"
       "batch_size=4\nunroll_length=20\ncpc_shifts=5\ncnm_enabled=false\nseeds=0,1,2,3,4\n"},
  };
  return kPresets;
}

}  // namespace

bool is_preset_name(const std::string& name) { return preset_table().count(name) > 0; }

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : preset_table()) out.push_back(k);
  return out;
}

ExperimentConfig preset_config(const std::string& name) {
  const auto it = preset_table().find(name);
  if (it == preset_table().end()) throw UnknownPreset("unknown preset: " + name);
  ExperimentConfig c = parse_config_text(it->second);
  c.output_dir = "runs/" + name;
  return c;
}

std::vector<std::pair<std::string, std::string>> ablation_preset(const std::string& name,
                                                                 ExperimentConfig& config) {
  std::vector<std::pair<std::string, std::string>> delta;
  if (name == "no-freeze") {
    config.freeze_step = 0;
    delta.emplace_back("freeze_step", "never");
  } else if (name == "local-sanctions") {
    config.visibility = Visibility::Local;
    delta.emplace_back("visibility", "local");
  } else if (name == "flat-pseudoreward") {
    config.alpha = 0.9;
    config.beta = 0.9;
    delta.emplace_back("alpha", "0.9");
    delta.emplace_back("beta", "0.9");
  } else {
    throw UnknownPreset("unknown ablation preset: " + name);
  }
  return delta;
}

}  // namespace normsim
