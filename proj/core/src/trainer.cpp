#include "normsim/trainer.hpp"

#include <filesystem>
#include <fstream>
#include <memory>

#include "normsim/checkpoint.hpp"
#include "normsim/csvio.hpp"
#include "normsim/errors.hpp"
#include "normsim/replay.hpp"
#include "normsim/sanctions.hpp"
#include "normsim/scripted.hpp"
#include "normsim/version.hpp"

namespace normsim {

namespace fs = std::filesystem;

uint64_t episode_seed_for(uint64_t run_seed, int worker, uint64_t episode) {
  return derive_seed(derive_seed(run_seed, "worker", static_cast<uint64_t>(worker)), "episode",
                     episode);
}

std::vector<std::string> episode_csv_header(int n_agents) {
  std::vector<std::string> h = {"episode",       "worker",        "env_step_start",
                                "collective_return", "env_metric", "zap_actions",
                                "disapprovals",  "opportunities"};
  for (int i = 0; i < n_agents; ++i) h.push_back("return_" + std::to_string(i));
  return h;
}

std::vector<std::string> episode_csv_row(const EpisodeStats& s) {
  std::vector<std::string> row = {
      std::to_string(s.episode_index),
      std::to_string(s.worker),
      std::to_string(s.env_step_start),
      format_double(s.collective_return()),
      format_double(s.kind == EnvKind::AllelopathicHarvest ? s.monoculture_second_half_mean()
                                                           : s.inverted_minimal_mean()),
      std::to_string(s.zap_actions),
      std::to_string(s.disapprovals),
      std::to_string(s.opportunities)};
  for (double r : s.extrinsic_return) row.push_back(format_double(r));
  return row;
}

std::vector<std::string> teaching_csv_row(const EpisodeStats& s) {
  const TeachingSignals t = teaching_signals(s);
  return {std::to_string(s.episode_index), std::to_string(s.worker), format_double(t.signal1),
          format_double(t.signal2)};
}

std::vector<std::vector<std::string>> simplex_csv_rows(const EpisodeStats& s, int stride) {
  std::vector<std::vector<std::string>> rows;
  const auto samples = simplex_samples(s, stride);
  for (size_t k = 0; k < samples.size(); ++k) {
    const uint64_t step = s.env_step_start + k * static_cast<size_t>(stride);
    rows.push_back({std::to_string(step), format_double(samples[k][0]),
                    format_double(samples[k][1]), format_double(samples[k][2])});
  }
  return rows;
}

namespace {

using Scalar = float;

struct StatsAccumulator {
  EpisodeStats stats;

  void begin(const ExperimentConfig& cfg, int worker, uint64_t episode,
             uint64_t env_step_start) {
    stats = EpisodeStats{};
    stats.kind = cfg.env_params().kind;
    stats.episode_index = static_cast<int>(episode);
    stats.worker = worker;
    stats.env_step_start = env_step_start;
    stats.n_agents = cfg.resolved_agents();
    stats.extrinsic_return.assign(stats.n_agents, 0.0);
    stats.pseudo_return.assign(stats.n_agents, 0.0);
  }

  void record_step(const Engine& engine, const StepOutput& out,
                   const std::vector<double>& pseudo) {
    const WorldState& st = engine.state();
    if (st.kind == EnvKind::AllelopathicHarvest) {
      stats.berry_counts.push_back(st.berry_counts);
    } else {
      stats.pollution_counts.push_back(st.pollution_present);
    }
    for (int i = 0; i < stats.n_agents; ++i) {
      stats.extrinsic_return[i] += out.rewards[i];
      stats.pseudo_return[i] += pseudo.empty() ? 0.0 : pseudo[i];
      const AgentBody& a = st.agents[i];
      if (!a.removed()) stats.agent_steps_by_color[static_cast<int>(a.display_color)]++;
    }
    stats.zap_actions += static_cast<long>(out.events.zaps_fired.size());
    for (const auto& hit : out.events.hits)
      stats.hits_by_color[static_cast<int>(hit.target_color)]++;
    for (const auto& clean : out.events.cleans) stats.cleans_by_type[clean.ptype - 1]++;
    for (size_t k = out.new_records_begin; k < out.new_records_end; ++k) {
      stats.opportunities++;
      if (engine.log()[k].outcome == 1) stats.disapprovals++;
    }
  }
};

// Everything owned per parallel episode worker.
struct Worker {
  std::unique_ptr<Engine> engine;
  uint64_t episode = 0;
  StatsAccumulator acc;
  std::vector<uint8_t> replay_actions;
  // learned mode:
  std::vector<nn::Mat<Scalar>> h, c;             // per agent
  std::vector<TrajectorySegment> segments;       // per agent, filling
  std::vector<RngStream> act_streams;            // per agent, re-derived per episode
  // per-call-index ring of per-agent network inputs (classifier contexts)
  std::vector<std::vector<std::shared_ptr<std::vector<float>>>> input_ring;
  std::vector<double> psi;  // last-step classifier outputs
};

struct RunState {
  uint64_t env_steps = 0;
  uint64_t episodes_done = 0;  // per worker (kept in lockstep)
};

constexpr char kRunStateMagic[4] = {'N', 'S', 'R', 'S'};

void save_run_state(const std::string& dir, const ExperimentConfig& cfg, const RunState& rs,
                    std::vector<std::unique_ptr<AgentLearner<Scalar>>>& learners,
                    std::vector<std::unique_ptr<NormClassifier<Scalar>>>& classifiers) {
  const std::string tmp = dir + "/run_state.bin.tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out.write(kRunStateMagic, 4);
    const uint64_t hash = cfg.resume_hash();
    out.write(reinterpret_cast<const char*>(&hash), sizeof(hash));
    out.write(reinterpret_cast<const char*>(&rs.env_steps), sizeof(rs.env_steps));
    out.write(reinterpret_cast<const char*>(&rs.episodes_done), sizeof(rs.episodes_done));
  }
  for (size_t i = 0; i < learners.size(); ++i) {
    save_checkpoint(dir + "/checkpoints/policy_" + std::to_string(i) + ".ckpt",
                    learners[i]->policy().params(), &learners[i]->optimizer(),
                    {rs.env_steps, false});
  }
  for (size_t i = 0; i < classifiers.size(); ++i) {
    save_checkpoint(dir + "/checkpoints/classifier_" + std::to_string(i) + ".ckpt",
                    classifiers[i]->params(), &classifiers[i]->optimizer(),
                    {rs.env_steps, classifiers[i]->frozen()});
  }
  fs::rename(tmp, dir + "/run_state.bin");
}

bool load_run_state(const std::string& dir, const ExperimentConfig& cfg, RunState& rs,
                    std::vector<std::unique_ptr<AgentLearner<Scalar>>>& learners,
                    std::vector<std::unique_ptr<NormClassifier<Scalar>>>& classifiers) {
  std::ifstream in(dir + "/run_state.bin", std::ios::binary);
  if (!in) return false;
  char magic[4];
  in.read(magic, 4);
  uint64_t hash = 0;
  in.read(reinterpret_cast<char*>(&hash), sizeof(hash));
  if (std::memcmp(magic, kRunStateMagic, 4) != 0 || hash != cfg.resume_hash())
    throw ConfigError("run_state.bin does not match this config");
  in.read(reinterpret_cast<char*>(&rs.env_steps), sizeof(rs.env_steps));
  in.read(reinterpret_cast<char*>(&rs.episodes_done), sizeof(rs.episodes_done));
  if (!in) throw std::runtime_error("run_state.bin truncated");
  for (size_t i = 0; i < learners.size(); ++i) {
    load_checkpoint(dir + "/checkpoints/policy_" + std::to_string(i) + ".ckpt",
                    learners[i]->policy().params(), &learners[i]->optimizer());
  }
  for (size_t i = 0; i < classifiers.size(); ++i) {
    const CheckpointMeta meta =
        load_checkpoint(dir + "/checkpoints/classifier_" + std::to_string(i) + ".ckpt",
                        classifiers[i]->params(), &classifiers[i]->optimizer());
    if (meta.frozen) classifiers[i]->freeze();
  }
  return true;
}

}  // namespace

EpisodeStats resimulate_replay(const ExperimentConfig& cfg, const std::string& replay_path) {
  const Replay rep = read_replay(replay_path);
  const MapAsset& asset = map_asset(rep.map_name);
  EnvParams params = cfg.env_params();
  Engine engine(asset, params, rep.episode_seed);
  const uint64_t workers = cfg.policy == "learned" ? cfg.batch_size : 1;
  StatsAccumulator acc;
  acc.begin(cfg, static_cast<int>(rep.worker), rep.episode_index,
            static_cast<uint64_t>(rep.episode_index) * cfg.episode_length * workers);
  const std::vector<double> no_pseudo;
  std::vector<int> actions(rep.n_agents);
  for (uint32_t t = 0; t < rep.steps; ++t) {
    for (uint32_t i = 0; i < rep.n_agents; ++i)
      actions[i] = rep.actions[static_cast<size_t>(t) * rep.n_agents + i];
    const StepOutput out = engine.step(actions);
    acc.record_step(engine, out, no_pseudo);
  }
  if (engine.state().state_hash() != rep.final_state_hash)
    throw ReplayError("replay diverged: state hash mismatch in " + replay_path);
  return acc.stats;
}

uint64_t run_seed(const ExperimentConfig& cfg, uint64_t seed, const std::string& seed_dir) {
  const MapAsset& asset = map_asset(cfg.environment);
  const EnvParams env_params = cfg.env_params();
  const NetProfile profile = cfg.net_profile();
  const int N = cfg.resolved_agents();
  const bool learned = cfg.policy == "learned";
  const bool cnm = cfg.cnm_enabled && learned;
  const int B = learned ? cfg.batch_size : 1;
  const int L = learned ? cfg.unroll_length : cfg.classifier_segment_len;
  const int side = profile.torso.in_side;
  const double alpha = cfg.resolved_alpha(), beta = cfg.resolved_beta();

  fs::create_directories(seed_dir);
  fs::create_directories(seed_dir + "/checkpoints");
  if (cfg.record_replays) fs::create_directories(seed_dir + "/replays");
  if (cfg.export_sanction_logs) fs::create_directories(seed_dir + "/sanction_logs");

  // Per-agent nets and hyperparameters (sampled once, in agent order).
  std::vector<std::unique_ptr<AgentLearner<Scalar>>> learners;
  std::vector<std::unique_ptr<NormClassifier<Scalar>>> classifiers;
  std::vector<std::pair<double, double>> sampled_hp;  // (lr, entropy_bonus)
  int dummy_engine_actions = 0;
  {
    Engine probe(asset, env_params, 0);
    dummy_engine_actions = probe.action_count();
  }
  if (learned) {
    RngStream hyper(derive_seed(seed, "hyper"));
    for (int i = 0; i < N; ++i) {
      LearnerHyperparams hp = cfg.learner_hyperparams();
      hp.learning_rate = sample_log_uniform(hyper, cfg.lr_min, cfg.lr_max);
      hp.entropy_bonus = sample_log_uniform(hyper, cfg.entropy_min, cfg.entropy_max);
      sampled_hp.emplace_back(hp.learning_rate, hp.entropy_bonus);
      learners.push_back(std::make_unique<AgentLearner<Scalar>>(
          profile, dummy_engine_actions, derive_seed(seed, "policy", i), hp));
    }
    if (cnm) {
      for (int i = 0; i < N; ++i)
        classifiers.push_back(std::make_unique<NormClassifier<Scalar>>(
            profile, derive_seed(seed, "classifier", i), cfg.rms_decay, cfg.rms_eps));
    }
  }

  // Seed manifest.
  {
    std::ofstream m(seed_dir + "/manifest.txt");
    m << "engine_version=" << kEngineVersion << "\n";
    m << "config_hash=" << cfg.hash() << "\n";
    m << "seed=" << seed << "\n";
    m << "sprite_table=" << kSpriteTableVersion << "\n";
    for (int i = 0; i < N && learned; ++i)
      m << "agent" << i << ".learning_rate=" << format_double(sampled_hp[i].first)
        << "\nagent" << i << ".entropy_bonus=" << format_double(sampled_hp[i].second) << "\n";
    std::ofstream c(seed_dir + "/config.txt");
    c << cfg.canonical();
  }

  RunState rs;
  const bool resumed = learned && load_run_state(seed_dir, cfg, rs, learners, classifiers);
  if (!resumed) rs = RunState{};

  // Scripted roster (also used to drive "scripted" policy mode).
  std::vector<ScriptedPolicy> roster;
  if (!learned) roster = ScriptedPolicy::parse_roster(cfg.scripted_rules, N);

  // CSV sinks (append on resume).
  CsvWriter episodes(seed_dir + "/episodes.csv", episode_csv_header(N), resumed);
  CsvWriter teaching(seed_dir + "/teaching_signals.csv",
                     {"episode", "worker", "signal1", "signal2"}, resumed);
  CsvWriter simplex;
  if (env_params.kind == EnvKind::AllelopathicHarvest)
    simplex = CsvWriter(seed_dir + "/simplex.csv", {"env_step", "r", "g", "b"}, resumed);
  CsvWriter pseudo_csv;
  CsvWriter acc_csv;
  CsvWriter diag_csv;
  if (learned) {
    std::vector<std::string> ph = {"episode", "worker"};
    for (int i = 0; i < N; ++i) ph.push_back("pseudo_" + std::to_string(i));
    pseudo_csv = CsvWriter(seed_dir + "/pseudorewards.csv", ph, resumed);
    diag_csv = CsvWriter(seed_dir + "/diagnostics.csv",
                         {"env_step", "agent", "total", "policy", "baseline", "entropy", "cpc",
                          "grad_norm"},
                         resumed);
  }
  if (cnm)
    acc_csv = CsvWriter(seed_dir + "/balanced_accuracy.csv",
                        {"env_step", "agent", "balanced_accuracy", "n_pos", "n_neg"}, resumed);

  // Workers.
  std::vector<Worker> workers(B);
  const int H = profile.lstm_units;
  auto reset_worker_episode = [&](int w) {
    Worker& wk = workers[w];
    const uint64_t ep_seed = episode_seed_for(seed, w, wk.episode);
    if (wk.engine == nullptr)
      wk.engine = std::make_unique<Engine>(asset, env_params, ep_seed);
    else
      wk.engine->reset(ep_seed);
    wk.acc.begin(cfg, w, wk.episode,
                 wk.episode * static_cast<uint64_t>(cfg.episode_length) * B);
    wk.replay_actions.clear();
    if (learned) {
      wk.h.assign(N, nn::Mat<Scalar>::Zero(H, 1));
      wk.c.assign(N, nn::Mat<Scalar>::Zero(H, 1));
      wk.act_streams.clear();
      for (int i = 0; i < N; ++i)
        wk.act_streams.emplace_back(derive_seed(ep_seed, "act", i));
      wk.segments.assign(N, TrajectorySegment{});
      wk.input_ring.assign(cfg.classifier_segment_len,
                           std::vector<std::shared_ptr<std::vector<float>>>(N));
      wk.psi.assign(N, 0.0);
    } else {
      wk.act_streams.clear();
      for (int i = 0; i < N; ++i)
        wk.act_streams.emplace_back(derive_seed(ep_seed, "script", i));
    }
  };
  for (int w = 0; w < B; ++w) {
    workers[w].episode = rs.episodes_done;
    reset_worker_episode(w);
  }

  const int n_actions = dummy_engine_actions;
  uint64_t next_classifier_boundary = cfg.classifier_segment_len;
  uint64_t classifier_segment_index =
      rs.episodes_done * (cfg.episode_length / cfg.classifier_segment_len);

  auto flush_episode = [&](int w) {
    Worker& wk = workers[w];
    episodes.row(episode_csv_row(wk.acc.stats));
    teaching.row(teaching_csv_row(wk.acc.stats));
    if (env_params.kind == EnvKind::AllelopathicHarvest)
      for (const auto& row : simplex_csv_rows(wk.acc.stats, cfg.metric_stride)) simplex.row(row);
    if (learned) {
      std::vector<std::string> prow = {std::to_string(wk.episode), std::to_string(w)};
      for (int i = 0; i < N; ++i) prow.push_back(format_double(wk.acc.stats.pseudo_return[i]));
      pseudo_csv.row(prow);
    }
    if (cfg.record_replays) {
      Replay rep;
      rep.engine_version = kEngineVersion;
      rep.map_name = cfg.environment;
      rep.config_hash = cfg.hash();
      rep.episode_seed = wk.engine->state().episode_seed;
      rep.worker = static_cast<uint32_t>(w);
      rep.episode_index = static_cast<uint32_t>(wk.episode);
      rep.n_agents = static_cast<uint32_t>(N);
      rep.steps = static_cast<uint32_t>(cfg.episode_length);
      rep.actions = wk.replay_actions;
      rep.final_state_hash = wk.engine->state().state_hash();
      rep.collective_return = wk.acc.stats.collective_return();
      write_replay(seed_dir + "/replays/ep_" + std::to_string(w) + "_" +
                       std::to_string(wk.episode) + ".replay",
                   rep);
    }
    if (cfg.export_sanction_logs) {
      const std::string base = seed_dir + "/sanction_logs/ep_" + std::to_string(w) + "_" +
                               std::to_string(wk.episode);
      export_sanction_log(wk.engine->log(), base + ".log", base + ".blob");
    }
    episodes.flush();
  };

  // Main loop: rounds of L steps on every worker, then updates.
  while (rs.env_steps < cfg.total_env_steps) {
    bool episode_finished = false;
    for (int w = 0; w < B; ++w) {
      Worker& wk = workers[w];
      Engine& engine = *wk.engine;
      std::vector<int> actions(N);
      for (int t = 0; t < L; ++t) {
        const uint32_t call_index = engine.state().step_index;
        std::vector<double> pseudo(learned ? N : 0, 0.0);
        if (learned) {
          const auto& obs = engine.last_observations();
          for (int i = 0; i < N; ++i) {
            auto input = std::make_shared<std::vector<float>>(
                frame_to_input(downsample(*obs[i], side)));
            wk.input_ring[call_index % cfg.classifier_segment_len][i] = input;
            Eigen::Map<const nn::Vec<Scalar>> iv(input->data(),
                                                 static_cast<Eigen::Index>(input->size()));
            double psi = 0.0;
            float p_bit = 0.0f;
            if (cnm) {
              psi = classifiers[i]->predict(iv);
              p_bit = psi >= 0.5 ? 1.0f : 0.0f;
            }
            wk.psi[i] = psi;
            nn::Vec<Scalar> logits;
            Scalar value = 0;
            TrajectorySegment& seg = wk.segments[i];
            if (seg.length == 0) {
              seg.h0.assign(wk.h[i].data(), wk.h[i].data() + H);
              seg.c0.assign(wk.c[i].data(), wk.c[i].data() + H);
            }
            learners[i]->policy().act(iv, p_bit, wk.h[i], wk.c[i], logits, value);
            // Sample from the softmax in double precision.
            nn::Vec<double> pr = nn::softmax<double>(logits.template cast<double>());
            double u = wk.act_streams[i].next_double();
            int act = 0;
            for (; act < n_actions - 1; ++act) {
              u -= pr(act);
              if (u < 0) break;
            }
            seg.obs.push_back(*input);
            seg.p_bits.push_back(p_bit);
            seg.actions.push_back(act);
            seg.behavior_logp.push_back(std::log(std::max(pr(act), 1e-30)));
            seg.logits.push_back(std::vector<float>(logits.data(), logits.data() + logits.size()));
            seg.reset_before.push_back(0);
            seg.length++;
            actions[i] = act;
          }
        } else {
          for (int i = 0; i < N; ++i) actions[i] = roster[i].act(engine, i, wk.act_streams[i]);
        }

        for (int i = 0; i < N; ++i)
          wk.replay_actions.push_back(static_cast<uint8_t>(actions[i]));
        const StepOutput out = engine.step(actions);
        rs.env_steps++;

        if (learned) {
          if (cnm) {
            for (size_t k = out.new_records_begin; k < out.new_records_end; ++k) {
              const SanctionRecord& rec = engine.log()[k];
              if (rec.outcome == 1)
                pseudo[rec.sanctioner] =
                    pseudoreward_value(true, wk.psi[rec.sanctioner], alpha, beta);
            }
          }
          for (int i = 0; i < N; ++i) {
            TrajectorySegment& seg = wk.segments[i];
            seg.rewards_ext.push_back(out.rewards[i]);
            seg.rewards_pseudo.push_back(pseudo[i]);
            seg.done.push_back(out.episode_done ? 1 : 0);
          }
        }
        wk.acc.record_step(engine, out, pseudo);
      }
      if (learned) {
        // Bootstrap inputs from the post-segment observation.
        const auto& obs = engine.last_observations();
        for (int i = 0; i < N; ++i) {
          TrajectorySegment& seg = wk.segments[i];
          const Frame small = downsample(*obs[i], side);
          seg.obs_bootstrap = frame_to_input(small);
          if (cnm) {
            Eigen::Map<const nn::Vec<Scalar>> iv(
                seg.obs_bootstrap.data(), static_cast<Eigen::Index>(seg.obs_bootstrap.size()));
            seg.p_bootstrap = classifiers[i]->predict(iv) >= 0.5 ? 1.0f : 0.0f;
          }
        }
      }
    }

    // Policy updates on the completed round.
    if (learned) {
      for (int i = 0; i < N; ++i) {
        std::vector<const TrajectorySegment*> batch;
        for (int w = 0; w < B; ++w) batch.push_back(&workers[w].segments[i]);
        const UpdateDiagnostics diag = learners[i]->update(batch);
        diag_csv.row({std::to_string(rs.env_steps), std::to_string(i),
                      format_double(diag.total), format_double(diag.policy),
                      format_double(diag.baseline), format_double(diag.entropy),
                      format_double(diag.cpc), format_double(diag.grad_norm)});
        for (int w = 0; w < B; ++w) workers[w].segments[i] = TrajectorySegment{};
      }
    }

    // Classifier training at 100-step segment boundaries.
    const uint32_t worker_step = workers[0].engine->state().step_index;
    if (cnm && worker_step >= next_classifier_boundary) {
      const uint32_t seg_end = worker_step;
      const uint32_t seg_start = seg_end - cfg.classifier_segment_len;
      const bool should_freeze = cfg.freeze_step > 0 && rs.env_steps >= cfg.freeze_step;
      for (int i = 0; i < N; ++i) {
        if (should_freeze && !classifiers[i]->frozen()) classifiers[i]->freeze();
        // Pools from each worker's view of its episode log.
        std::vector<std::pair<int, uint32_t>> pos_pool, neg_pool;  // (worker, record idx)
        for (int w = 0; w < B; ++w) {
          const auto& records = workers[w].engine->log().records();
          const uint32_t bit = 1u << i;
          for (uint32_t k = 0; k < records.size(); ++k) {
            const SanctionRecord& rec = records[k];
            if (rec.step <= seg_start || rec.step > seg_end) continue;
            if (cfg.visibility == Visibility::Local && rec.sanctioner != i && rec.target != i &&
                (rec.witnesses & bit) == 0)
              continue;
            (rec.outcome == 1 ? pos_pool : neg_pool).emplace_back(w, k);
          }
        }
        // Balanced accuracy on the full pool before updating.
        auto input_of = [&](const std::pair<int, uint32_t>& ref) {
          const SanctionRecord& rec = workers[ref.first].engine->log()[ref.second];
          return workers[ref.first]
              .input_ring[(rec.step - 1) % cfg.classifier_segment_len][rec.sanctioner];
        };
        if (!pos_pool.empty() && !neg_pool.empty()) {
          std::vector<double> psis;
          std::vector<int> labels;
          nn::Mat<Scalar> eval(classifiers[i]->input_dim(),
                               static_cast<Eigen::Index>(pos_pool.size() + neg_pool.size()));
          Eigen::Index col = 0;
          for (const auto& ref : pos_pool) {
            eval.col(col++) = Eigen::Map<const nn::Vec<Scalar>>(
                input_of(ref)->data(), classifiers[i]->input_dim());
            labels.push_back(1);
          }
          for (const auto& ref : neg_pool) {
            eval.col(col++) = Eigen::Map<const nn::Vec<Scalar>>(
                input_of(ref)->data(), classifiers[i]->input_dim());
            labels.push_back(0);
          }
          psis = classifiers[i]->predict_batch(eval);
          acc_csv.row({std::to_string(rs.env_steps), std::to_string(i),
                       format_double(balanced_accuracy(psis, labels)),
                       std::to_string(pos_pool.size()), std::to_string(neg_pool.size())});
          if (!classifiers[i]->frozen()) {
            RngStream batch_rng(
                derive_seed(seed, "classbatch", (classifier_segment_index << 6) + i));
            std::vector<uint32_t> pos_idx(pos_pool.size()), neg_idx(neg_pool.size());
            for (uint32_t k = 0; k < pos_idx.size(); ++k) pos_idx[k] = k;
            for (uint32_t k = 0; k < neg_idx.size(); ++k) neg_idx[k] = k;
            pos_idx = subsample(std::move(pos_idx),
                                static_cast<size_t>(cfg.classifier_positive_batch), batch_rng);
            neg_idx = subsample(std::move(neg_idx),
                                static_cast<size_t>(cfg.classifier_negative_batch), batch_rng);
            nn::Mat<Scalar> pos(classifiers[i]->input_dim(),
                                static_cast<Eigen::Index>(pos_idx.size()));
            nn::Mat<Scalar> neg(classifiers[i]->input_dim(),
                                static_cast<Eigen::Index>(neg_idx.size()));
            for (Eigen::Index k = 0; k < pos.cols(); ++k)
              pos.col(k) = Eigen::Map<const nn::Vec<Scalar>>(input_of(pos_pool[pos_idx[k]])->data(),
                                                             classifiers[i]->input_dim());
            for (Eigen::Index k = 0; k < neg.cols(); ++k)
              neg.col(k) = Eigen::Map<const nn::Vec<Scalar>>(input_of(neg_pool[neg_idx[k]])->data(),
                                                             classifiers[i]->input_dim());
            classifiers[i]->loss(pos, neg, cfg.lambda_class, true);
            classifiers[i]->apply_update(learners[i]->hyperparams().learning_rate);
          }
        }
      }
      classifier_segment_index++;
      next_classifier_boundary += cfg.classifier_segment_len;
      for (int w = 0; w < B; ++w)
        workers[w].engine->mutable_log().release_contexts_before(seg_start + 1);
    }

    // Episode boundaries (workers stay in lockstep).
    if (static_cast<int>(worker_step) >= cfg.episode_length) {
      for (int w = 0; w < B; ++w) {
        flush_episode(w);
        workers[w].episode++;
      }
      rs.episodes_done++;
      next_classifier_boundary = cfg.classifier_segment_len;
      for (int w = 0; w < B; ++w) reset_worker_episode(w);
      if (learned) save_run_state(seed_dir, cfg, rs, learners, classifiers);
      episode_finished = true;
    }
    (void)episode_finished;
  }
  return rs.env_steps;
}

}  // namespace normsim
