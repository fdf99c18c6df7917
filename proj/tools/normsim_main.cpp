#include <cstring>
#include <filesystem>
#include <iostream>
#include <string>

#include "normsim/config.hpp"
#include "normsim/engine.hpp"
#include "normsim/errors.hpp"
#include "normsim/experiment.hpp"
#include "normsim/png.hpp"
#include "normsim/replay.hpp"
#include "normsim/trainer.hpp"
#include "normsim/version.hpp"

namespace {

using namespace normsim;

constexpr int kOk = 0, kConfigError = 1, kRuntimeError = 2;

void print_usage() {
  std::cout
      << "normsim " << kEngineVersion << "\n"
      << "usage:\n"
      << "  normsim run <config-file|preset>       train/simulate all seeds\n"
      << "  normsim replay <file> [--dump-frame T:AGENT:OUT.png]\n"
      << "                                         re-simulate one episode\n"
      << "  normsim plot <run-dir>                 emit SVG plots from CSVs\n"
      << "  normsim ablate <name> <config|preset>  apply ablation preset and run\n"
      << "  normsim validate <run-dir>             re-simulate replays, check CSVs\n"
      << "presets:";
  for (const auto& n : preset_names()) std::cout << ' ' << n;
  std::cout << "\nablations: no-freeze local-sanctions flat-pseudoreward\n"
            << "output root override: $" << kOutputRootEnv << "\n";
}

ExperimentConfig config_from_arg(const std::string& arg) {
  if (is_preset_name(arg)) return preset_config(arg);
  return load_config_file(arg);
}

int cmd_run(const std::string& arg) {
  const std::string dir = run_experiment(config_from_arg(arg));
  std::cout << "run complete: " << dir << "\n";
  return kOk;
}

int cmd_ablate(const std::string& name, const std::string& arg) {
  ExperimentConfig cfg = config_from_arg(arg);
  const auto delta = ablation_preset(name, cfg);
  cfg.output_dir += "-" + name;
  std::cout << "ablation " << name << ":";
  for (const auto& [k, v] : delta) std::cout << ' ' << k << '=' << v;
  std::cout << "\n";
  const std::string dir = run_experiment(cfg);
  std::cout << "run complete: " << dir << "\n";
  return kOk;
}

int cmd_replay(int argc, char** argv) {
  const std::string path = argv[2];
  int dump_step = -1, dump_agent = -1;
  std::string dump_path;
  for (int i = 3; i < argc; ++i) {
    if (std::strcmp(argv[i], "--dump-frame") == 0 && i + 1 < argc) {
      const std::string spec = argv[++i];
      const size_t c1 = spec.find(':'), c2 = spec.find(':', c1 + 1);
      if (c1 == std::string::npos || c2 == std::string::npos)
        throw ConfigError("--dump-frame expects T:AGENT:OUT.png");
      dump_step = std::stoi(spec.substr(0, c1));
      dump_agent = std::stoi(spec.substr(c1 + 1, c2 - c1 - 1));
      dump_path = spec.substr(c2 + 1);
    } else {
      throw ConfigError(std::string("unknown replay option: ") + argv[i]);
    }
  }

  const Replay rep = read_replay(path);
  EnvParams params;
  params.n_agents = static_cast<int>(rep.n_agents);
  params.episode_length = static_cast<int>(rep.steps);
  Engine engine(map_asset(rep.map_name), params, rep.episode_seed);
  double collective = 0.0;
  std::vector<int> actions(rep.n_agents);
  for (uint32_t t = 0; t < rep.steps; ++t) {
    for (uint32_t i = 0; i < rep.n_agents; ++i)
      actions[i] = rep.actions[static_cast<size_t>(t) * rep.n_agents + i];
    const StepOutput out = engine.step(actions);
    for (double r : out.rewards) collective += r;
    if (static_cast<int>(t) + 1 == dump_step && dump_agent >= 0 &&
        dump_agent < static_cast<int>(rep.n_agents)) {
      write_png(*out.observations[dump_agent], dump_path);
      std::cout << "wrote " << dump_path << "\n";
    }
  }
  const bool hash_ok = engine.state().state_hash() == rep.final_state_hash;
  const bool ret_ok = collective == rep.collective_return;
  std::cout << "replay " << path << ": steps=" << rep.steps << " agents=" << rep.n_agents
            << " map=" << rep.map_name << " collective_return=" << collective
            << (hash_ok ? " state=ok" : " state=MISMATCH")
            << (ret_ok ? " return=ok" : " return=MISMATCH") << "\n";
  return hash_ok && ret_ok ? kOk : kRuntimeError;
}

int cmd_plot(const std::string& dir) {
  emit_plots(dir);
  std::cout << "plots written to " << dir << " (see emission_report.txt)\n";
  return kOk;
}

int cmd_validate(const std::string& dir) {
  const int mismatches = validate_run(dir);
  if (mismatches == 0) {
    std::cout << "validate " << dir << ": ok\n";
    return kOk;
  }
  std::cout << "validate " << dir << ": " << mismatches << " mismatches\n";
  return kRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    print_usage();
    return kConfigError;
  }
  const std::string verb = argv[1];
  try {
    if (verb == "run" && argc == 3) return cmd_run(argv[2]);
    if (verb == "replay" && argc >= 3) return cmd_replay(argc, argv);
    if (verb == "plot" && argc == 3) return cmd_plot(argv[2]);
    if (verb == "ablate" && argc == 4) return cmd_ablate(argv[2], argv[3]);
    if (verb == "validate" && argc == 3) return cmd_validate(argv[2]);
    print_usage();
    return kConfigError;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const UnknownPreset& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}
