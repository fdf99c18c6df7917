// Acceptance suite: every criterion runs at its stated tolerance and prints
// one PASS/FAIL line. Exit code 0 only when all pass.
//
// Heavy statistical runs (criterion 7) land in /tmp/normsim_acceptance and
// resume if already complete; pass --fresh to wipe and rerun everything.

#include <chrono>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "normsim/checkpoint.hpp"
#include "normsim/config.hpp"
#include "normsim/csvio.hpp"
#include "normsim/engine.hpp"
#include "normsim/env_ah.hpp"
#include "normsim/env_csp.hpp"
#include "normsim/experiment.hpp"
#include "normsim/learner.hpp"
#include "normsim/scripted.hpp"
#include "normsim/trainer.hpp"
#include "normsim/version.hpp"

namespace fs = std::filesystem;
using namespace normsim;

namespace {

std::string g_root = "/tmp/normsim_acceptance";

struct Check {
  bool ok = true;
  std::string detail;
  void fail(const std::string& why) {
    ok = false;
    detail += (detail.empty() ? "" : "; ") + why;
  }
  void note(const std::string& what) {
    detail += (detail.empty() ? "" : "; ") + what;
  }
  void expect(bool cond, const std::string& why) {
    if (!cond) fail(why);
  }
};

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "<missing:" + path + ">";
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

NetProfile tiny_profile() {
  NetProfile p;
  p.torso.in_side = 2;
  p.torso.in_ch = 3;
  p.torso.convs = {};
  p.torso.fcs = {4};
  p.lstm_units = 3;
  return p;
}

// ---------------------------------------------------------------- criterion 1
Check environment_dynamics_oracles() {
  Check c;
  // Berry spawn: empirical rate vs 0.0000025 * c over >= 1e7 site-steps.
  {
    WorldState s = make_world(map_asset("ah"), 1, 11);
    EnvParams params;
    const int sites = static_cast<int>(s.berries.size());
    const double expected = params.berry_spawn_coeff * s.berry_counts[0];
    long site_steps = 0, events = 0;
    const int ticks = static_cast<int>(1e7 / sites) + 1;
    for (int t = 0; t < ticks; ++t) {
      for (auto& b : s.berries) {
        b.ripe = false;
        b.refractory_timer = 0;
      }
      berry_spawn_tick(s, params);
      for (const auto& b : s.berries) events += b.ripe ? 1 : 0;
      site_steps += sites - 1;  // one site holds the parked agent
    }
    const double rate = static_cast<double>(events) / site_steps;
    const double se = std::sqrt(expected * (1 - expected) / site_steps);
    c.expect(std::abs(rate - expected) < 3 * se,
             "berry spawn rate " + format_double(rate) + " vs " + format_double(expected));
  }
  // Pollution respawn: 0.05 over >= 1e6 cell-steps.
  {
    WorldState s = make_world(map_asset("csp"), 1, 5);
    EnvParams params;
    params.kind = EnvKind::CleanUp;
    long eligible = 0, events = 0;
    while (eligible < 1'000'000) {
      for (auto& p : s.pollution) {
        p.present = false;
        p.protect_timer = 0;
      }
      s.pollution_present = {0, 0};
      pollution_respawn_tick(s, params);
      for (const auto& p : s.pollution) events += p.present ? 1 : 0;
      eligible += static_cast<long>(s.pollution.size());
    }
    const double rate = static_cast<double>(events) / eligible;
    const double se = std::sqrt(0.05 * 0.95 / eligible);
    c.expect(std::abs(rate - 0.05) < 3 * se, "pollution respawn rate " + format_double(rate));
  }
  // Gray reversion matches 1 - m.
  {
    WorldState s = make_world(map_asset("ah"), 1, 19);
    EnvParams params;
    const int sites = static_cast<int>(s.berries.size());
    for (auto& b : s.berries) b.color = DisplayColor::Green;
    for (int k = 0; k < 200; ++k) s.berries[k].color = DisplayColor::Red;
    s.berry_counts = {200, sites - 200, 0};
    const double m = 200.0 / sites;
    const int trials = 300000;
    long reverted = 0;
    for (int t = 0; t < trials; ++t) {
      s.agents[0].display_color = DisplayColor::Red;
      s.berries[0].ripe = true;
      eat_berry(s, params, 0, 0);
      reverted += s.agents[0].display_color == DisplayColor::Gray ? 1 : 0;
    }
    const double expect = 1.0 - m;
    const double rate = static_cast<double>(reverted) / trials;
    const double se = std::sqrt(expect * (1 - expect) / trials);
    c.expect(std::abs(rate - expect) < 3 * se, "gray reversion rate " + format_double(rate));
  }
  // Apple spawn probability anchors.
  c.expect(apple_spawn_prob(7, 7, false) == 0.0, "prose variant not exactly 0 at d1=d2");
  c.expect(apple_spawn_prob(120, 120, false) == 0.0, "prose variant not exactly 0 at d1=d2");
  c.expect(std::abs(apple_spawn_prob(120, 120, true) - 0.049999988079071044) < 1e-9,
           "literal variant anchor off: " + format_double(apple_spawn_prob(120, 120, true)));
  return c;
}

// ---------------------------------------------------------------- criterion 2
Check sanction_state_machine() {
  Check c;
  auto scenario = [&](int gap, bool expect_removal) {
    WorldState raw;
    raw.kind = EnvKind::CleanUp;
    raw.geom.rows = 24;
    raw.geom.cols = 24;
    raw.geom.wall.assign(24 * 24, 0);
    raw.berry_at.assign(24 * 24, -1);
    raw.pollution_at.assign(24 * 24, -1);
    raw.apple_at.assign(24 * 24, -1);
    raw.occupancy.assign(24 * 24, -1);
    raw.agents.assign(2, AgentBody{});
    raw.spawn_cells.push_back({0, 0});
    raw.seed_streams(3);
    raw.agents[0].pos = {10, 10};
    raw.agents[0].orientation = Orientation::North;
    raw.agents[1].pos = {9, 10};
    raw.occupancy[raw.geom.index({10, 10})] = 0;
    raw.occupancy[raw.geom.index({9, 10})] = 1;
    EnvParams params;
    params.kind = EnvKind::CleanUp;
    params.n_agents = 2;
    params.episode_length = 1 << 20;
    Engine engine(std::move(raw), params);

    StepOutput out = engine.step({action::kZap, action::kNoop});
    c.expect(out.events.hits.size() == 1 && !out.events.hits[0].removal,
             "first hit should mark, not remove");
    c.expect(engine.state().agents[1].mark_timer == 49, "mark timer should start at 50");
    c.expect(engine.state().agents[1].freeze_timer == 24, "freeze timer should start at 25");
    for (int t = 1; t < gap; ++t) out = engine.step({action::kNoop, action::kNoop});
    out = engine.step({action::kZap, action::kNoop});
    if (out.events.hits.size() != 1) {
      c.fail("second zap at gap " + std::to_string(gap) + " missed");
      return;
    }
    if (expect_removal) {
      c.expect(out.events.hits[0].removal, "gap " + std::to_string(gap) + ": expected removal");
      c.expect(out.rewards[1] == -10.0, "removal must cost -10");
      c.expect(engine.state().agents[1].removal_timer == 24, "removal timer should start at 25");
      // The removed agent returns after 25 steps.
      for (int t = 0; t < 24; ++t) {
        engine.step({action::kNoop, action::kNoop});
        c.expect(engine.state().agents[1].removed(), "agent returned early");
      }
      engine.step({action::kNoop, action::kNoop});
      c.expect(!engine.state().agents[1].removed(), "agent should return after 25 steps");
    } else {
      c.expect(!out.events.hits[0].removal,
               "gap " + std::to_string(gap) + ": mark should have faded");
      c.expect(out.rewards[1] == 0.0, "fresh hit must not cost -10");
    }
  };
  scenario(30, true);   // within the mark window
  scenario(49, true);   // boundary: still marked at t+49
  scenario(50, false);  // boundary: fades at exactly t+50
  scenario(80, false);
  return c;
}

// ---------------------------------------------------------------- criterion 3
Check determinism_and_replay() {
  Check c;
  const std::string root = g_root + "/determinism";
  fs::remove_all(root);
  auto run_pair = [&](ExperimentConfig cfg, const std::string& name) {
    cfg.output_dir = root + "/" + name + "_a";
    const std::string a = run_experiment(cfg);
    cfg.output_dir = root + "/" + name + "_b";
    const std::string b = run_experiment(cfg);
    for (uint64_t seed : cfg.seeds) {
      const std::string sa = a + "/seed_" + std::to_string(seed);
      const std::string sb = b + "/seed_" + std::to_string(seed);
      c.expect(slurp(sa + "/episodes.csv") == slurp(sb + "/episodes.csv"),
               name + ": episodes.csv differs between reruns");
      c.expect(slurp(sa + "/teaching_signals.csv") == slurp(sb + "/teaching_signals.csv"),
               name + ": teaching_signals.csv differs");
      for (const auto& entry : fs::directory_iterator(sa + "/replays")) {
        const std::string fname = entry.path().filename().string();
        c.expect(slurp(entry.path().string()) == slurp(sb + "/replays/" + fname),
                 name + ": replay " + fname + " differs");
      }
    }
    c.expect(validate_run(a) == 0, name + ": replays fail validation");
  };

  ExperimentConfig one;
  one.environment = "ah-mini";
  one.policy = "scripted";
  one.scripted_rules = "random-walk,zap-gray-in-view,plant-color-red,plant-color-blue";
  one.episode_length = 400;
  one.total_env_steps = 800;
  one.seeds = {7};
  one.cnm_enabled = false;
  one.resolve_and_validate();
  run_pair(one, "ah_scripted");

  ExperimentConfig two;
  two.environment = "csp-mini";
  two.policy = "scripted";
  two.scripted_rules = "random-walk,clean-type-1,zap-gray-in-view";
  two.episode_length = 600;
  two.classifier_segment_len = 100;
  two.total_env_steps = 1200;
  two.seeds = {9, 10};
  two.cnm_enabled = false;
  two.resolve_and_validate();
  run_pair(two, "csp_scripted");

  ExperimentConfig three;
  three.environment = "csp-mini";
  three.policy = "learned";
  three.cnm_enabled = true;
  three.episode_length = 200;
  three.classifier_segment_len = 100;
  three.unroll_length = 20;
  three.cpc_shifts = 5;
  three.batch_size = 2;
  three.classifier_negative_batch = 64;
  three.total_env_steps = 800;
  three.seeds = {3};
  three.resolve_and_validate();
  run_pair(three, "csp_learned");
  return c;
}

// ---------------------------------------------------------------- criterion 4
Check classifier_correctness() {
  Check c;
  // (a) Gradient vs central finite differences on a toy network.
  {
    NormClassifier<double> clf(tiny_profile(), 21);
    nn::Mat<double> pos(clf.input_dim(), 4), neg(clf.input_dim(), 7);
    RngStream rng(22);
    for (int i = 0; i < pos.size(); ++i) pos.data()[i] = rng.next_double();
    for (int i = 0; i < neg.size(); ++i) neg.data()[i] = rng.next_double();
    clf.params().zero_grad();
    clf.loss(pos, neg, 0.01, true);
    const nn::Vec<double> analytic = clf.params().grad;
    double worst = 0.0;
    const double h = 1e-6;
    for (int k = 0; k < clf.params().size(); ++k) {
      const double saved = clf.params().value(k);
      clf.params().value(k) = saved + h;
      const double up = clf.loss(pos, neg, 0.01, false);
      clf.params().value(k) = saved - h;
      const double down = clf.loss(pos, neg, 0.01, false);
      clf.params().value(k) = saved;
      const double fd = (up - down) / (2 * h);
      const double denom = std::max({std::abs(fd), std::abs(analytic(k)), 1e-10});
      worst = std::max(worst, std::abs(fd - analytic(k)) / denom);
    }
    c.expect(worst <= 1e-4, "classifier gradcheck worst rel err " + format_double(worst));
  }

  // (b) Scripted corpus where zaps target gray agents: balanced accuracy
  // reaches 0.9 within 500 updates on the desk profile.
  {
    const auto t0 = std::chrono::steady_clock::now();
    const NetProfile profile = NetProfile::desk();
    EnvParams params;
    params.n_agents = 4;
    params.episode_length = 400;
    const auto roster = ScriptedPolicy::parse_roster(
        "zap-gray-in-view,plant-color-red,always-no-op,random-walk", 4);
    struct Sample {
      std::vector<float> input;
      int label;
    };
    std::vector<Sample> train, eval;
    Engine engine(map_asset("ah-mini"), params, 77);
    for (int episode = 0; episode < 24; ++episode) {
      engine.reset(derive_seed(77, "corpus", episode));
      RngStream act(derive_seed(78, "act", episode));
      std::vector<std::vector<std::vector<float>>> inputs;  // step -> agent -> input
      std::vector<int> actions(4);
      for (int t = 0; t < params.episode_length; ++t) {
        const auto& obs = engine.last_observations();
        std::vector<std::vector<float>> step_inputs(4);
        for (int i = 0; i < 4; ++i)
          step_inputs[i] = frame_to_input(downsample(*obs[i], profile.torso.in_side));
        inputs.push_back(std::move(step_inputs));
        for (int i = 0; i < 4; ++i) actions[i] = roster[i].act(engine, i, act);
        engine.step(actions);
      }
      auto& sink = episode % 4 == 3 ? eval : train;
      for (const auto& rec : engine.log().records())
        sink.push_back({inputs[rec.step - 1][rec.sanctioner], rec.outcome});
    }
    std::vector<const Sample*> train_pos, train_neg;
    for (const auto& s : train) (s.label ? train_pos : train_neg).push_back(&s);
    c.note("corpus " + std::to_string(train_pos.size()) + " pos / " +
           std::to_string(train_neg.size()) + " neg");
    c.expect(train_pos.size() >= 64 && train_neg.size() >= 512, "corpus too small");

    NormClassifier<float> clf(profile, 501);
    RngStream batch_rng(502);
    const int dim = clf.input_dim();
    int updates = 0;
    double acc = 0.0;
    for (int update = 0; update < 500; ++update) {
      nn::Mat<float> pos(dim, std::min<size_t>(32, train_pos.size()));
      nn::Mat<float> neg(dim, std::min<size_t>(256, train_neg.size()));
      for (int k = 0; k < pos.cols(); ++k) {
        const Sample* s = train_pos[batch_rng.next_below(
            static_cast<uint32_t>(train_pos.size()))];
        pos.col(k) = Eigen::Map<const nn::Vec<float>>(s->input.data(), dim);
      }
      for (int k = 0; k < neg.cols(); ++k) {
        const Sample* s = train_neg[batch_rng.next_below(
            static_cast<uint32_t>(train_neg.size()))];
        neg.col(k) = Eigen::Map<const nn::Vec<float>>(s->input.data(), dim);
      }
      clf.loss(pos, neg, 0.01, true);
      clf.apply_update(1e-3);
      updates = update + 1;
      if (update % 50 == 49) {
        std::vector<double> psi;
        std::vector<int> labels;
        for (const auto& s : eval) {
          psi.push_back(clf.predict(Eigen::Map<const nn::Vec<float>>(s.input.data(), dim)));
          labels.push_back(s.label);
        }
        acc = balanced_accuracy(psi, labels);
        if (acc >= 0.9) break;
      }
    }
    const double secs = std::chrono::duration<double>(
        std::chrono::steady_clock::now() - t0).count();
    c.note("balanced accuracy " + format_double(acc) + " after " + std::to_string(updates) +
           " updates, " + format_double(secs) + "s");
    c.expect(acc >= 0.9, "balanced accuracy below 0.9 within 500 updates");
    c.expect(secs < 600, "took longer than 10 minutes");
  }
  return c;
}

// ---------------------------------------------------------------- criterion 5
Check pseudoreward_and_prediction_bit() {
  Check c;
  // Exhaustive truth table over {zap-at-opportunity, otherwise} x {psi}.
  c.expect(pseudoreward_value(true, 0.73, 0.2, 0.4) == 0.2, "AH +alpha");
  c.expect(pseudoreward_value(true, 0.5, 0.2, 0.4) == 0.2, "threshold 0.5 counts as accord");
  c.expect(pseudoreward_value(true, 0.4999, 0.2, 0.4) == -0.4, "AH -beta");
  c.expect(pseudoreward_value(true, 0.4999, 1.0, 2.0) == -2.0, "CSP -beta");
  c.expect(pseudoreward_value(false, 0.99, 0.2, 0.4) == 0.0, "no zap -> 0");
  c.expect(pseudoreward_value(false, 0.01, 1.0, 2.0) == 0.0, "no zap -> 0");
  c.expect(pseudoreward_value(true, 0.9, 0.9, 0.9) == 0.9, "flat preset +");
  c.expect(pseudoreward_value(true, 0.1, 0.9, 0.9) == -0.9, "flat preset -");

  // Prediction bit: psi == 0.5 maps to 1.
  NormClassifier<float> clf(tiny_profile(), 31);
  clf.params().value.setZero();
  nn::Vec<float> frame(clf.input_dim());
  frame.setConstant(0.3f);
  c.expect(clf.predict(frame) == 0.5, "zeroed classifier should output exactly 0.5");
  c.expect(clf.prediction_bit(frame) == 1, "psi = 0.5 must map to bit 1");

  // Zero gradient leakage: a full policy update leaves classifier gradients
  // exactly zero (p_t is stop-gradient by construction).
  {
    const NetProfile profile = tiny_profile();
    NormClassifier<float> classifier(profile, 41);
    LearnerHyperparams hp;
    hp.cpc_latent = 4;
    hp.cpc_shifts = 1;
    AgentLearner<float> learner(profile, 3, 42, hp);
    TrajectorySegment seg;
    const int L = 4, D = profile.torso.input_dim(), H = profile.lstm_units;
    seg.length = L;
    RngStream rng(43);
    for (int t = 0; t < L; ++t) {
      std::vector<float> obs(D);
      for (auto& v : obs) v = static_cast<float>(rng.next_double());
      // The prediction bit comes from the classifier, as in training.
      seg.p_bits.push_back(static_cast<float>(
          classifier.prediction_bit(Eigen::Map<const nn::Vec<float>>(obs.data(), D))));
      seg.obs.push_back(std::move(obs));
      seg.actions.push_back(static_cast<int>(rng.next_below(3)));
      seg.behavior_logp.push_back(std::log(1.0 / 3));
      seg.rewards_ext.push_back(rng.next_double());
      seg.rewards_pseudo.push_back(0.1);
      seg.done.push_back(0);
      seg.reset_before.push_back(0);
    }
    seg.h0.assign(H, 0.0f);
    seg.c0.assign(H, 0.0f);
    seg.obs_bootstrap.assign(D, 0.5f);
    classifier.params().zero_grad();
    learner.update({&seg});
    c.expect(classifier.params().grad.norm() == 0.0f,
             "classifier accumulated gradient from the policy loss");
  }
  return c;
}

// ---------------------------------------------------------------- criterion 6
Check learner_numerics() {
  Check c;
  // V-Trace == n-step oracle when all ratios are 1.
  {
    RngStream rng(5);
    const int L = 32;
    std::vector<double> rewards(L), values(L), logp(L, -1.1);
    std::vector<uint8_t> dones(L, 0);
    for (int t = 0; t < L; ++t) {
      rewards[t] = rng.next_double() * 2 - 1;
      values[t] = rng.next_double();
    }
    const double boot = 0.25, gamma = 0.99;
    const auto vt = vtrace_targets(rewards, values, boot, logp, logp, dones, gamma);
    std::vector<double> g(L + 1);
    g[L] = boot;
    for (int t = L - 1; t >= 0; --t) g[t] = rewards[t] + gamma * g[t + 1];
    for (int t = 0; t < L; ++t)
      c.expect(std::abs(vt.vs[t] - g[t]) < 1e-12, "vtrace deviates from n-step oracle");
  }
  // CPC anchors.
  {
    const int L = 5, B = 2;
    double total = 0.0;
    const int draws = 60;
    for (int d = 0; d < draws; ++d) {
      nn::ParamStore<float> ps;
      RngStream rng(9000 + d);
      CPCHead<float> cpc(ps, 24, 16, 8, rng);
      nn::Mat<float> q_in(24, L * B), q_out(16, L * B);
      for (int i = 0; i < q_in.size(); ++i)
        q_in.data()[i] = static_cast<float>(0.3 * (rng.next_double() - 0.5));
      for (int i = 0; i < q_out.size(); ++i)
        q_out.data()[i] = static_cast<float>(0.3 * (rng.next_double() - 0.5));
      total += cpc.loss(ps, q_in, q_out, L, B, 1);
    }
    const double mean = total / draws;
    c.expect(std::abs(mean - std::log(8.0)) <= 0.15,
             "random-stream CPC " + format_double(mean) + " vs ln 8");

    nn::ParamStore<float> ps;
    RngStream rng(3);
    const int N = 64;
    CPCHead<float> cpc(ps, N, N, N, rng);
    ps.mat(cpc.projection_in().w_off, N, N).setIdentity();
    ps.mat(cpc.projection_in().b_off, N, 1).setZero();
    ps.mat(cpc.projection_out().w_off, N, N).setIdentity();
    ps.mat(cpc.projection_out().b_off, N, 1).setZero();
    nn::Mat<float> q_in(N, 12 * 2), q_out(N, 12 * 2);
    RngStream bits(4);
    for (int i = 0; i < q_in.size(); ++i) q_in.data()[i] = bits.next_below(2) ? 1.0f : -1.0f;
    q_out.setZero();
    for (int t = 0; t + 1 < 12; ++t)
      for (int b = 0; b < 2; ++b) q_out.col(t * 2 + b) = q_in.col((t + 1) * 2 + b);
    const double aligned = cpc.loss(ps, q_in, q_out, 12, 2, 1);
    c.expect(aligned < 0.1, "aligned-stream CPC " + format_double(aligned));
  }
  // Total-loss gradient check on a tiny network.
  {
    const NetProfile profile = tiny_profile();
    LearnerHyperparams hp;
    hp.cpc_latent = 4;
    hp.cpc_shifts = 1;
    AgentLearner<double> learner(profile, 3, 99, hp);
    TrajectorySegment seg;
    const int L = 4, D = profile.torso.input_dim(), H = profile.lstm_units;
    seg.length = L;
    RngStream rng(123);
    for (int t = 0; t < L; ++t) {
      std::vector<float> obs(D);
      for (auto& v : obs) v = static_cast<float>(rng.next_double());
      seg.obs.push_back(std::move(obs));
      seg.p_bits.push_back(rng.next_below(2) ? 1.0f : 0.0f);
      seg.actions.push_back(static_cast<int>(rng.next_below(3)));
      seg.behavior_logp.push_back(std::log(1.0 / 3) + 0.1 * (rng.next_double() - 0.5));
      seg.rewards_ext.push_back(rng.next_double() - 0.3);
      seg.rewards_pseudo.push_back(0.2 * (rng.next_double() - 0.5));
      seg.done.push_back(0);
      seg.reset_before.push_back(0);
    }
    seg.h0.assign(H, 0.0f);
    seg.c0.assign(H, 0.0f);
    seg.obs_bootstrap.assign(D, 0.5f);
    const std::vector<const TrajectorySegment*> batch = {&seg};
    c.expect(learner.policy().params().size() <= 500, "tiny network is not tiny");

    FrozenTargets frozen;
    learner.policy().params().zero_grad();
    learner.compute(batch, false, nullptr, &frozen);
    learner.compute(batch, true, &frozen);
    const nn::Vec<double> analytic = learner.policy().params().grad;
    auto& ps = learner.policy().params();
    double worst = 0.0;
    const double h = 1e-5;
    for (int k = 0; k < ps.size(); ++k) {
      const double saved = ps.value(k);
      ps.value(k) = saved + h;
      const double up = learner.compute(batch, false, &frozen).total;
      ps.value(k) = saved - h;
      const double down = learner.compute(batch, false, &frozen).total;
      ps.value(k) = saved;
      const double fd = (up - down) / (2 * h);
      const double denom = std::max({std::abs(fd), std::abs(analytic(k)), 1e-8});
      worst = std::max(worst, std::abs(fd - analytic(k)) / denom);
    }
    c.expect(worst <= 1e-4, "total-loss gradcheck worst rel err " + format_double(worst));
  }
  // Bandit sanity.
  {
    const NetProfile profile = tiny_profile();
    LearnerHyperparams hp;
    hp.cpc_latent = 4;
    hp.cpc_shifts = 1;
    hp.learning_rate = 2e-3;
    hp.entropy_bonus = 1e-3;
    AgentLearner<float> learner(profile, 2, 50, hp);
    const int D = profile.torso.input_dim(), H = profile.lstm_units;
    const int L = 4, B = 2;
    std::vector<float> fixed_obs(D, 0.5f);
    RngStream rng(51);
    double greedy = 0.0;
    int used = 0;
    for (int update = 0; update < 2000 && greedy <= 0.95; ++update) {
      std::vector<TrajectorySegment> segs(B);
      for (int b = 0; b < B; ++b) {
        TrajectorySegment& seg = segs[b];
        seg.length = L;
        seg.h0.assign(H, 0.0f);
        seg.c0.assign(H, 0.0f);
        nn::Mat<float> hcell = nn::Mat<float>::Zero(H, 1), ccell = hcell;
        for (int t = 0; t < L; ++t) {
          hcell.setZero();
          ccell.setZero();
          Eigen::Map<const nn::Vec<float>> iv(fixed_obs.data(), D);
          nn::Vec<float> logits;
          float value;
          learner.policy().act(iv, 0.0f, hcell, ccell, logits, value);
          const nn::Vec<double> pr = nn::softmax<double>(logits.cast<double>());
          const int act = rng.next_double() < pr(0) ? 0 : 1;
          seg.obs.push_back(fixed_obs);
          seg.p_bits.push_back(0.0f);
          seg.actions.push_back(act);
          seg.behavior_logp.push_back(std::log(std::max(pr(act), 1e-30)));
          seg.rewards_ext.push_back(act == 0 ? 1.0 : 0.0);
          seg.rewards_pseudo.push_back(0.0);
          seg.done.push_back(1);
          seg.reset_before.push_back(t > 0 ? 1 : 0);
          greedy = pr(0);
        }
        seg.obs_bootstrap = fixed_obs;
      }
      learner.update({&segs[0], &segs[1]});
      used = update + 1;
    }
    c.note("bandit greedy " + format_double(greedy) + " after " + std::to_string(used) +
           " updates");
    c.expect(greedy > 0.95, "bandit failed to reach 0.95 in 2000 updates");
  }
  return c;
}

// ---------------------------------------------------------------- criterion 7
struct SmokeStats {
  double metric_mean = 0.0;
  double return_mean = 0.0;
  std::vector<double> per_seed_metric;
};

SmokeStats smoke_stats(const std::string& run_dir, const std::vector<uint64_t>& seeds,
                       uint64_t total_steps) {
  SmokeStats out;
  double metric_sum = 0.0, return_sum = 0.0;
  for (uint64_t s : seeds) {
    const CsvTable t = read_csv(run_dir + "/seed_" + std::to_string(s) + "/episodes.csv");
    const int xi = t.column("env_step_start");
    const int mi = t.column("env_metric");
    const int ri = t.column("collective_return");
    double m = 0.0, r = 0.0;
    int n = 0;
    for (const auto& row : t.rows) {
      if (std::stoull(row[xi]) < static_cast<uint64_t>(0.8 * total_steps)) continue;
      m += std::stod(row[mi]);
      r += std::stod(row[ri]);
      n++;
    }
    if (n > 0) {
      m /= n;
      r /= n;
    }
    out.per_seed_metric.push_back(m);
    metric_sum += m;
    return_sum += r;
  }
  out.metric_mean = metric_sum / seeds.size();
  out.return_mean = return_sum / seeds.size();
  return out;
}

Check norm_emergence_smoke() {
  Check c;
  const auto t0 = std::chrono::steady_clock::now();

  auto launch = [&](const std::string& preset) {
    ExperimentConfig cfg = preset_config(preset);
    cfg.output_dir = g_root + "/smoke/" + preset;
    return run_experiment(cfg);
  };
  const std::string csp_on = launch("csp-mini-cnm");
  const std::string csp_off = launch("csp-mini-base");
  const std::string ah_on = launch("ah-mini-cnm");

  const ExperimentConfig csp_cfg = preset_config("csp-mini-cnm");
  const SmokeStats on = smoke_stats(csp_on, csp_cfg.seeds, csp_cfg.total_env_steps);
  const SmokeStats off = smoke_stats(csp_off, csp_cfg.seeds, csp_cfg.total_env_steps);
  c.note("csp inverted-minimal on " + format_double(on.metric_mean) + " vs off " +
         format_double(off.metric_mean));
  c.note("csp return on " + format_double(on.return_mean) + " vs off " +
         format_double(off.return_mean));
  c.expect(on.metric_mean > off.metric_mean,
           "CNM-on inverted minimal fraction does not exceed CNM-off");
  c.expect(on.return_mean >= off.return_mean, "CNM-on collective return below CNM-off");

  const ExperimentConfig ah_cfg = preset_config("ah-mini-cnm");
  const SmokeStats ah = smoke_stats(ah_on, ah_cfg.seeds, ah_cfg.total_env_steps);
  int above = 0;
  std::string per_seed;
  for (double m : ah.per_seed_metric) {
    above += m > 1.0 / 3.0 + 0.1 ? 1 : 0;
    per_seed += (per_seed.empty() ? "" : ",") + format_double(m);
  }
  c.note("ah monoculture per seed [" + per_seed + "]");
  c.expect(above >= 3, "monoculture above 1/3 + 0.1 in only " + std::to_string(above) +
                           "/5 seeds");
  const double mins = std::chrono::duration<double>(
      std::chrono::steady_clock::now() - t0).count() / 60.0;
  c.note(format_double(mins) + " min");
  return c;
}

// ---------------------------------------------------------------- criterion 8
Check ablation_plumbing() {
  Check c;
  // Manifest deltas.
  {
    ExperimentConfig cfg = preset_config("csp-mini-cnm");
    ablation_preset("no-freeze", cfg);
    c.expect(cfg.canonical().find("freeze_step=never") != std::string::npos,
             "no-freeze delta missing");
    cfg = preset_config("csp-mini-cnm");
    ablation_preset("local-sanctions", cfg);
    c.expect(cfg.canonical().find("visibility=local") != std::string::npos,
             "local-sanctions delta missing");
    cfg = preset_config("csp-mini-cnm");
    ablation_preset("flat-pseudoreward", cfg);
    c.expect(cfg.canonical().find("alpha=0.9") != std::string::npos &&
                 cfg.canonical().find("beta=0.9") != std::string::npos,
             "flat-pseudoreward delta missing");
  }
  // Geographically isolated zaps are only visible to their witnesses.
  {
    WorldState raw;
    raw.kind = EnvKind::CleanUp;
    raw.geom.rows = 40;
    raw.geom.cols = 40;
    raw.geom.wall.assign(1600, 0);
    raw.berry_at.assign(1600, -1);
    raw.pollution_at.assign(1600, -1);
    raw.apple_at.assign(1600, -1);
    raw.occupancy.assign(1600, -1);
    raw.agents.assign(5, AgentBody{});
    raw.spawn_cells.push_back({0, 0});
    raw.seed_streams(8);
    auto place = [&](int id, int r, int q, Orientation o) {
      raw.agents[id].pos = {static_cast<int16_t>(r), static_cast<int16_t>(q)};
      raw.agents[id].orientation = o;
      raw.occupancy[raw.geom.index(raw.agents[id].pos)] = static_cast<int16_t>(id);
    };
    place(0, 5, 5, Orientation::North);
    place(1, 4, 5, Orientation::South);   // cluster one: 0 zaps 1
    place(2, 35, 35, Orientation::North);
    place(3, 34, 35, Orientation::South);  // cluster two: 2 zaps 3
    place(4, 20, 20, Orientation::East);   // far from both
    EnvParams params;
    params.kind = EnvKind::CleanUp;
    params.n_agents = 5;
    params.episode_length = 1 << 20;
    Engine engine(std::move(raw), params);
    engine.step({action::kZap, action::kNoop, action::kZap, action::kNoop, action::kNoop});

    const size_t global = build_sanction_view(engine.log(), Visibility::Global, 4).size();
    const size_t v0 = build_sanction_view(engine.log(), Visibility::Local, 0).size();
    const size_t v2 = build_sanction_view(engine.log(), Visibility::Local, 2).size();
    const size_t v4 = build_sanction_view(engine.log(), Visibility::Local, 4).size();
    c.expect(global >= 4, "expected opportunity records from both clusters");
    c.expect(v0 < global && v2 < global, "local views must be strictly smaller");
    c.expect(v4 == 0, "the isolated agent must see nothing");
    // Agent-dependent: the two clusters see different record sets.
    const auto l0 = build_sanction_view(engine.log(), Visibility::Local, 0);
    const auto l2 = build_sanction_view(engine.log(), Visibility::Local, 2);
    bool differ = l0.size() != l2.size();
    for (size_t k = 0; !differ && k < l0.size(); ++k)
      differ = l0[k].sanctioner != l2[k].sanctioner || l0[k].target != l2[k].target;
    c.expect(differ, "local views are not agent-dependent");
  }
  // Through the trainer: local visibility trains on smaller per-agent pools.
  {
    ExperimentConfig base;
    base.environment = "csp-mini";
    base.policy = "learned";
    base.cnm_enabled = true;
    base.episode_length = 400;
    base.classifier_segment_len = 100;
    base.unroll_length = 20;
    base.cpc_shifts = 5;
    base.batch_size = 2;
    base.classifier_negative_batch = 64;
    base.total_env_steps = 2 * 400 * 2;
    base.seeds = {5};
    base.output_dir = g_root + "/ablation/global";
    base.resolve_and_validate();
    fs::remove_all(g_root + "/ablation");
    run_experiment(base);

    ExperimentConfig local = base;
    ablation_preset("local-sanctions", local);
    local.output_dir = g_root + "/ablation/local";
    run_experiment(local);

    const CsvTable g = read_csv(g_root + "/ablation/global/seed_5/balanced_accuracy.csv");
    const CsvTable l = read_csv(g_root + "/ablation/local/seed_5/balanced_accuracy.csv");
    c.expect(!g.rows.empty(), "global run produced no classifier segments");
    std::map<std::pair<std::string, std::string>, long> global_sizes;
    for (const auto& row : g.rows)
      global_sizes[{row[0], row[1]}] = std::stol(row[3]) + std::stol(row[4]);
    long compared = 0, strictly_smaller = 0;
    std::set<long> local_sizes_per_agent;
    for (const auto& row : l.rows) {
      const auto it = global_sizes.find({row[0], row[1]});
      if (it == global_sizes.end()) continue;
      const long local_n = std::stol(row[3]) + std::stol(row[4]);
      compared++;
      c.expect(local_n <= it->second, "local pool larger than global at step " + row[0]);
      if (local_n < it->second) strictly_smaller++;
      local_sizes_per_agent.insert(local_n);
    }
    c.note(std::to_string(compared) + " segment pools compared, " +
           std::to_string(strictly_smaller) + " strictly smaller");
    c.expect(compared > 0, "no comparable classifier segments between runs");
    c.expect(strictly_smaller > 0, "local training sets never strictly smaller");
    c.expect(local_sizes_per_agent.size() > 1, "local training sets not agent-dependent");
  }
  return c;
}

// ---------------------------------------------------------------- criterion 9
Check throughput_target() {
  Check c;
  EnvParams params;
  params.n_agents = 16;
  params.episode_length = 1 << 30;
  Engine engine(map_asset("ah"), params, 7);
  const auto roster = ScriptedPolicy::parse_roster(
      "random-walk,zap-gray-in-view,plant-color-red,plant-color-green", 16);
  RngStream rng(11);
  std::vector<int> actions(16);
  // Warmup.
  for (int t = 0; t < 200; ++t) {
    for (int i = 0; i < 16; ++i) actions[i] = roster[i].act(engine, i, rng);
    engine.step(actions);
  }
  const int steps = 4000;
  const auto t0 = std::chrono::steady_clock::now();
  for (int t = 0; t < steps; ++t) {
    for (int i = 0; i < 16; ++i) actions[i] = roster[i].act(engine, i, rng);
    engine.step(actions);
  }
  const double secs = std::chrono::duration<double>(
      std::chrono::steady_clock::now() - t0).count();
  const double rate = steps / secs;
  c.note(format_double(rate) + " steps/s (16-agent AH incl. 16 rendered 88x88 observations)");
  c.expect(rate >= 1000.0, "below 1000 steps/s");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  bool fresh = false;
  for (int i = 1; i < argc; ++i)
    if (std::strcmp(argv[i], "--fresh") == 0) fresh = true;
  if (const char* root = std::getenv("NORMSIM_ACCEPTANCE_DIR"); root != nullptr) g_root = root;
  if (fresh) fs::remove_all(g_root);
  fs::create_directories(g_root);

  struct Criterion {
    const char* name;
    std::function<Check()> run;
  };
  const std::vector<Criterion> criteria = {
      {"1 environment-dynamics oracles", environment_dynamics_oracles},
      {"2 sanction state machine", sanction_state_machine},
      {"3 determinism & replay", determinism_and_replay},
      {"4 classifier correctness", classifier_correctness},
      {"5 pseudoreward and p_t", pseudoreward_and_prediction_bit},
      {"6 learner numerics", learner_numerics},
      {"7 norm-emergence smoke test", norm_emergence_smoke},
      {"8 ablation plumbing", ablation_plumbing},
      {"9 throughput target", throughput_target},
  };

  std::cout << "normsim acceptance suite (" << kEngineVersion << ")\n";
  bool all_ok = true;
  for (const auto& criterion : criteria) {
    Check result;
    try {
      result = criterion.run();
    } catch (const std::exception& e) {
      result.fail(std::string("exception: ") + e.what());
    }
    all_ok = all_ok && result.ok;
    std::cout << "[" << criterion.name << "] " << (result.ok ? "PASS" : "FAIL");
    if (!result.detail.empty()) std::cout << " — " << result.detail;
    std::cout << "\n" << std::flush;
  }
  return all_ok ? 0 : 1;
}
