#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "normsim/config.hpp"
#include "normsim/csvio.hpp"
#include "normsim/errors.hpp"
#include "normsim/experiment.hpp"
#include "normsim/replay.hpp"
#include "normsim/trainer.hpp"

using namespace normsim;
namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& name) {
  const std::string dir = "/tmp/normsim_tests/" + name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig scripted_mini(const std::string& env, const std::string& rules, int episodes,
                               const std::string& out) {
  ExperimentConfig cfg;
  cfg.environment = env;
  cfg.policy = "scripted";
  cfg.scripted_rules = rules;
  cfg.episode_length = 400;
  cfg.classifier_segment_len = 100;
  cfg.total_env_steps = static_cast<uint64_t>(episodes) * 400;
  cfg.seeds = {0};
  cfg.cnm_enabled = false;
  cfg.output_dir = out;
  cfg.resolve_and_validate();
  return cfg;
}

}  // namespace

TEST_CASE("config: parse, canonical form, hash stability") {
  const std::string text =
      "environment=csp-mini\n"
      "# comment line\n"
      "alpha=1.5\n"
      "seeds=3,4\n"
      "policy=scripted\n"
      "scripted_rules=random-walk\n";
  ExperimentConfig cfg = parse_config_text(text);
  CHECK(cfg.environment == "csp-mini");
  CHECK(cfg.alpha == 1.5);
  CHECK(cfg.beta == 2.0);  // CSP default
  CHECK(cfg.resolved_agents() == 3);
  CHECK(cfg.seeds == std::vector<uint64_t>{3, 4});

  // Round-trip through the canonical text preserves the hash.
  const ExperimentConfig again = parse_config_text(cfg.canonical());
  CHECK(again.hash() == cfg.hash());
  // output_dir does not contribute to the hash.
  ExperimentConfig moved = cfg;
  moved.output_dir = "elsewhere";
  CHECK(moved.hash() == cfg.hash());

  CHECK_THROWS_AS(parse_config_text("bogus_key=1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("environment=nowhere\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("environment=ah\nepisode_length=130\nunroll_length=20\n"),
                  ConfigError);
}

TEST_CASE("paper presets pin the published hyperparameters") {
  const ExperimentConfig ah = preset_config("ah-paper");
  CHECK(ah.resolved_alpha() == 0.2);
  CHECK(ah.resolved_beta() == 0.4);
  CHECK(ah.freeze_step == 100000000ull);
  CHECK(ah.gamma == 0.99);
  CHECK(ah.batch_size == 16);
  CHECK(ah.unroll_length == 100);
  CHECK(ah.cpc_shifts == 20);
  CHECK(ah.cpc_latent == 64);
  CHECK(ah.lambda_cpc == 10.0);
  CHECK(ah.lambda_critic == 0.5);
  CHECK(ah.lambda_class == 0.01);
  CHECK(ah.classifier_positive_batch == 32);
  CHECK(ah.classifier_negative_batch == 1024);
  CHECK(ah.seeds.size() == 20);
  const std::string canon = ah.canonical();
  CHECK(canon.find("alpha=0.2") != std::string::npos);
  CHECK(canon.find("beta=0.4") != std::string::npos);
  CHECK(canon.find("freeze_step=100000000") != std::string::npos);

  const ExperimentConfig csp = preset_config("csp-paper");
  CHECK(csp.resolved_alpha() == 1.0);
  CHECK(csp.resolved_beta() == 2.0);
  CHECK(csp.freeze_step == 50000000ull);
  CHECK(csp.seeds.size() == 10);
  CHECK(csp.resolved_agents() == 7);

  // Desk presets keep the paper's freeze/total ratio of 10%.
  const ExperimentConfig mini = preset_config("csp-mini-cnm");
  CHECK(mini.total_env_steps == 2000000ull);
  CHECK(mini.freeze_step == 200000ull);

  CHECK_THROWS_AS(preset_config("no-such"), UnknownPreset);
}

TEST_CASE("ablation presets produce the stated deltas") {
  ExperimentConfig base = preset_config("csp-mini-cnm");
  {
    ExperimentConfig cfg = base;
    const auto delta = ablation_preset("no-freeze", cfg);
    CHECK(cfg.freeze_step == 0);
    CHECK(delta == std::vector<std::pair<std::string, std::string>>{{"freeze_step", "never"}});
    CHECK(cfg.canonical().find("freeze_step=never") != std::string::npos);
  }
  {
    ExperimentConfig cfg = base;
    ablation_preset("local-sanctions", cfg);
    CHECK(cfg.visibility == Visibility::Local);
    CHECK(cfg.canonical().find("visibility=local") != std::string::npos);
  }
  {
    ExperimentConfig cfg = base;
    ablation_preset("flat-pseudoreward", cfg);
    CHECK(cfg.alpha == 0.9);
    CHECK(cfg.beta == 0.9);
  }
  ExperimentConfig cfg = base;
  CHECK_THROWS_AS(ablation_preset("spurious", cfg), UnknownPreset);
}

TEST_CASE("scripted no-op run: monoculture metric constant at the map's initial value") {
  const std::string dir = fresh_dir("noop_run");
  ExperimentConfig cfg = scripted_mini("ah-mini", "always-no-op", 2, dir + "/run");
  const std::string run_dir = run_experiment(cfg);
  const CsvTable episodes = read_csv(run_dir + "/seed_0/episodes.csv");
  REQUIRE(episodes.rows.size() == 2);
  const int metric_col = episodes.column("env_metric");
  // 14/40 is the mini map's initial dominant share; spawns preserve color.
  for (const auto& row : episodes.rows)
    CHECK(std::stod(row[metric_col]) == doctest::Approx(14.0 / 40.0));
  // Zero zaps under no-op policies.
  const int zap_col = episodes.column("zap_actions");
  for (const auto& row : episodes.rows) CHECK(row[zap_col] == "0");
}

TEST_CASE("same config and seed run twice: byte-identical replays and CSVs") {
  const std::string dir = fresh_dir("determinism");
  ExperimentConfig cfg =
      scripted_mini("csp-mini", "random-walk,zap-gray-in-view,clean-type-1", 2, dir + "/a");
  const std::string run_a = run_experiment(cfg);
  cfg.output_dir = dir + "/b";
  const std::string run_b = run_experiment(cfg);

  CHECK(slurp(run_a + "/seed_0/episodes.csv") == slurp(run_b + "/seed_0/episodes.csv"));
  CHECK(slurp(run_a + "/seed_0/teaching_signals.csv") ==
        slurp(run_b + "/seed_0/teaching_signals.csv"));
  CHECK(slurp(run_a + "/seed_0/replays/ep_0_0.replay") ==
        slurp(run_b + "/seed_0/replays/ep_0_0.replay"));
  CHECK(slurp(run_a + "/seed_0/replays/ep_0_1.replay") ==
        slurp(run_b + "/seed_0/replays/ep_0_1.replay"));
}

TEST_CASE("replays re-simulate exactly and validate_run passes") {
  const std::string dir = fresh_dir("validate");
  ExperimentConfig cfg =
      scripted_mini("ah-mini", "random-walk,zap-gray-in-view,plant-color-red,plant-color-green",
                    2, dir + "/run");
  const std::string run_dir = run_experiment(cfg);
  CHECK(validate_run(run_dir) == 0);

  // Re-simulation reproduces the recorded footer.
  const Replay rep = read_replay(run_dir + "/seed_0/replays/ep_0_0.replay");
  CHECK(rep.steps == 400);
  const EpisodeStats stats = resimulate_replay(cfg, run_dir + "/seed_0/replays/ep_0_0.replay");
  CHECK(stats.collective_return() == rep.collective_return);

  // Corrupt a CSV row: validation notices.
  {
    const std::string path = run_dir + "/seed_0/episodes.csv";
    std::string text = slurp(path);
    const size_t pos = text.rfind("\n", text.size() - 2);
    text.insert(pos, "");
    // Flip a digit in the last row.
    for (size_t i = text.size() - 2; i > 0; --i) {
      if (isdigit(text[i])) {
        text[i] = text[i] == '7' ? '8' : '7';
        break;
      }
    }
    std::ofstream out(path, std::ios::trunc);
    out << text;
  }
  CHECK(validate_run(run_dir) > 0);
}

TEST_CASE("learned desk run: trains, writes diagnostics, resumes deterministically") {
  const std::string dir = fresh_dir("learned");
  ExperimentConfig cfg;
  cfg.environment = "csp-mini";
  cfg.policy = "learned";
  cfg.cnm_enabled = true;
  cfg.profile = "desk";
  cfg.episode_length = 200;
  cfg.classifier_segment_len = 100;
  cfg.unroll_length = 20;
  cfg.cpc_shifts = 5;
  cfg.batch_size = 2;
  cfg.classifier_negative_batch = 64;
  cfg.seeds = {1};
  cfg.metric_stride = 50;
  cfg.total_env_steps = 2 * 200 * 2;  // two episodes per worker
  cfg.output_dir = dir + "/full";
  cfg.resolve_and_validate();

  const std::string full_run = run_experiment(cfg);
  const CsvTable episodes = read_csv(full_run + "/seed_1/episodes.csv");
  CHECK(episodes.rows.size() == 4);  // 2 episodes x 2 workers
  const CsvTable diag = read_csv(full_run + "/seed_1/diagnostics.csv");
  CHECK(diag.rows.size() >= 3 * (cfg.total_env_steps / (cfg.batch_size * cfg.unroll_length)));
  const CsvTable acc = read_csv(full_run + "/seed_1/balanced_accuracy.csv");
  CHECK(acc.header.size() == 5);

  // Interrupted run: first run half the steps, then extend to the full
  // budget in the same directory; artifacts must match the uninterrupted run.
  ExperimentConfig half = cfg;
  half.total_env_steps = cfg.total_env_steps / 2;
  half.output_dir = dir + "/resumed";
  run_experiment(half);
  ExperimentConfig extended = cfg;
  extended.output_dir = dir + "/resumed";
  const std::string resumed_run = run_experiment(extended);

  CHECK(slurp(resumed_run + "/seed_1/episodes.csv") == slurp(full_run + "/seed_1/episodes.csv"));
  CHECK(slurp(resumed_run + "/seed_1/replays/ep_1_1.replay") ==
        slurp(full_run + "/seed_1/replays/ep_1_1.replay"));
  CHECK(slurp(resumed_run + "/seed_1/diagnostics.csv") ==
        slurp(full_run + "/seed_1/diagnostics.csv"));
  CHECK(slurp(resumed_run + "/seed_1/pseudorewards.csv") ==
        slurp(full_run + "/seed_1/pseudorewards.csv"));

  // Replays from learned runs validate too.
  CHECK(validate_run(full_run) == 0);
}

TEST_CASE("plots: emitted for present CSVs, skipped with warnings otherwise") {
  const std::string dir = fresh_dir("plots");
  ExperimentConfig cfg =
      scripted_mini("csp-mini", "random-walk,clean-type-1,clean-type-2", 2, dir + "/run");
  const std::string run_dir = run_experiment(cfg);
  emit_plots(run_dir);
  const std::string report = slurp(run_dir + "/emission_report.txt");
  CHECK(report.find("wrote collective_return.svg") != std::string::npos);
  CHECK(report.find("wrote env_metric.svg") != std::string::npos);
  // CSP runs have no simplex CSV: skipped with a warning.
  CHECK(report.find("skipped simplex") != std::string::npos);
  CHECK(fs::exists(run_dir + "/collective_return.svg"));
  CHECK_FALSE(fs::exists(run_dir + "/simplex_early.svg"));
  // Single seed: the mean line coincides with the seed line (same data).
  const CsvTable agg = read_csv(run_dir + "/aggregate_returns.csv");
  const int mean_col = agg.column("mean"), seed_col = agg.column("seed_0");
  for (const auto& row : agg.rows) CHECK(row[mean_col] == row[seed_col]);
}

TEST_CASE("output root environment variable overrides the run directory") {
  ExperimentConfig cfg;
  cfg.environment = "csp-mini";
  cfg.output_dir = "runs/deep/nested";
  setenv(kOutputRootEnv, "/tmp/normsim_tests/root_override", 1);
  CHECK(resolve_run_dir(cfg) == "/tmp/normsim_tests/root_override/nested");
  unsetenv(kOutputRootEnv);
  CHECK(resolve_run_dir(cfg) == "runs/deep/nested");
}
