#pragma once

#include <cmath>
#include <memory>
#include <vector>

#include "normsim/cpc.hpp"
#include "normsim/errors.hpp"
#include "normsim/policy.hpp"
#include "normsim/vtrace.hpp"

namespace normsim {

// One worker's fixed-length unroll for one agent. Extrinsic and pseudo
// rewards are stored split so metrics can exclude the pseudoreward term.
struct TrajectorySegment {
  int length = 0;
  std::vector<std::vector<float>> obs;    // network inputs per step
  std::vector<float> p_bits;              // prediction bit fed to the LSTM
  std::vector<int> actions;
  std::vector<double> behavior_logp;      // log pi_behavior(a_t) at acting time
  std::vector<std::vector<float>> logits; // acting-time logits (replay checks)
  std::vector<double> rewards_ext;
  std::vector<double> rewards_pseudo;
  std::vector<uint8_t> done;              // episode ended after this step
  std::vector<uint8_t> reset_before;      // state zeroed before this step
  std::vector<float> h0, c0;              // recurrent snapshot at segment start
  std::vector<float> obs_bootstrap;       // observation after the last step
  float p_bootstrap = 0.0f;
};

struct LearnerHyperparams {
  double learning_rate = 3e-4;
  double entropy_bonus = 3e-3;
  double gamma = 0.99;
  double lambda_critic = 0.5;
  double lambda_cpc = 10.0;
  int cpc_shifts = 20;
  int cpc_latent = 64;
  double rho_bar = 1.0;
  double c_bar = 1.0;
  double rms_decay = 0.99;
  double rms_eps = 1e-5;
};

struct UpdateDiagnostics {
  double total = 0.0;
  double policy = 0.0;
  double baseline = 0.0;  // unscaled 0.5 MSE; enters total as lambda_critic * baseline
  double entropy = 0.0;   // mean policy entropy; enters total as -bonus * entropy
  double cpc = 0.0;       // unscaled; enters total as lambda_cpc * cpc
  double grad_norm = 0.0;
};

// V-Trace baseline targets and advantages are treated as constants by the
// loss (stop-gradient); freezing them makes the loss a plain function of the
// parameters, which finite-difference checks rely on.
struct FrozenTargets {
  std::vector<std::vector<double>> vs;          // per segment, per step
  std::vector<std::vector<double>> advantages;
};

// Log-uniform draw on [a, b]. Throws InvalidRange unless 0 < a < b.
inline double sample_log_uniform(RngStream& rng, double a, double b) {
  if (!(a > 0.0) || !(a < b)) throw InvalidRange("log-uniform range requires 0 < a < b");
  return std::exp(std::log(a) + rng.next_double() * (std::log(b) - std::log(a)));
}

// Per-agent decentralized learner: policy + CPC head + RMSProp. An update is
// a function only of this agent's own segments (the public log enters solely
// through p_bits and pseudorewards recorded at acting time).
template <typename S>
class AgentLearner {
 public:
  AgentLearner(const NetProfile& profile, int n_actions, uint64_t init_seed,
               LearnerHyperparams hp)
      : hp_(hp), policy_(profile, n_actions, init_seed) {
    RngStream rng(derive_seed(init_seed, "cpc"));
    cpc_ = CPCHead<S>(policy_.params(), policy_.feature_dim() + 1, profile.lstm_units,
                      hp.cpc_latent, rng);
    opt_ = nn::RmsProp<S>(policy_.params().size(), hp.rms_decay, hp.rms_eps);
  }

  PolicyNet<S>& policy() { return policy_; }
  const PolicyNet<S>& policy() const { return policy_; }
  const LearnerHyperparams& hyperparams() const { return hp_; }
  nn::RmsProp<S>& optimizer() { return opt_; }
  uint64_t param_hash() const { return policy_.params().value_hash(); }

  // Total loss = policy gradient with V-Trace advantages
  //            + lambda_critic * baseline MSE
  //            - entropy_bonus * entropy
  //            + lambda_cpc * CPC,
  // means taken over L*B. Gradients accumulate into the parameter store when
  // `with_grad` (caller applies or discards them). Targets come from
  // `frozen` when given, otherwise fresh V-Trace off the current parameters
  // (exported through `targets_out`).
  UpdateDiagnostics compute(const std::vector<const TrajectorySegment*>& batch, bool with_grad,
                            const FrozenTargets* frozen = nullptr,
                            FrozenTargets* targets_out = nullptr) {
    const int B = static_cast<int>(batch.size());
    const int L = batch[0]->length;
    const int D = policy_.input_dim();
    const int A = policy_.n_actions();
    const int H = policy_.hidden();
    const double scale = 1.0 / (static_cast<double>(L) * B);

    nn::Mat<S> obs(D, static_cast<Eigen::Index>(L) * B);
    nn::Mat<S> p_bits(1, static_cast<Eigen::Index>(L) * B);
    std::vector<uint8_t> reset_before(static_cast<size_t>(L) * B);
    nn::Mat<S> h0(H, B), c0(H, B);
    nn::Mat<S> boot_obs = nn::Mat<S>::Zero(D, B), boot_p = nn::Mat<S>::Zero(1, B);
    bool need_bootstrap = false;
    for (int b = 0; b < B; ++b) {
      const TrajectorySegment& seg = *batch[b];
      for (int t = 0; t < L; ++t) {
        const Eigen::Index col = static_cast<Eigen::Index>(t) * B + b;
        for (int d = 0; d < D; ++d) obs(d, col) = static_cast<S>(seg.obs[t][d]);
        p_bits(0, col) = static_cast<S>(seg.p_bits[t]);
        reset_before[static_cast<size_t>(t) * B + b] = seg.reset_before[t];
      }
      for (int k = 0; k < H; ++k) {
        h0(k, b) = static_cast<S>(seg.h0[k]);
        c0(k, b) = static_cast<S>(seg.c0[k]);
      }
      if (!seg.done[L - 1]) {
        need_bootstrap = true;
        for (int d = 0; d < D; ++d) boot_obs(d, b) = static_cast<S>(seg.obs_bootstrap[d]);
        boot_p(0, b) = static_cast<S>(seg.p_bootstrap);
      }
    }

    typename PolicyNet<S>::ForwardCache cache;
    policy_.forward_segment(obs, p_bits, reset_before, h0, c0, L, B, cache);
    std::vector<double> boots(B, 0.0);
    if (need_bootstrap) boots = policy_.bootstrap_values(cache, boot_obs, boot_p);

    // Losses and head gradients; V-Trace per sample in double precision.
    nn::Mat<S> dlogits = nn::Mat<S>::Zero(A, static_cast<Eigen::Index>(L) * B);
    nn::Mat<S> dvalues = nn::Mat<S>::Zero(1, static_cast<Eigen::Index>(L) * B);
    double policy_loss = 0.0, baseline_loss = 0.0, entropy_sum = 0.0;
    std::vector<double> probs(A);
    for (int b = 0; b < B; ++b) {
      const TrajectorySegment& seg = *batch[b];
      std::vector<double> values(L), target_logp(L), entropies(L);
      std::vector<std::vector<double>> all_probs(L);
      for (int t = 0; t < L; ++t) {
        const Eigen::Index col = static_cast<Eigen::Index>(t) * B + b;
        values[t] = static_cast<double>(cache.values(0, col));
        double mx = -1e300;
        for (int a = 0; a < A; ++a) mx = std::max(mx, static_cast<double>(cache.logits(a, col)));
        double z = 0.0;
        for (int a = 0; a < A; ++a) {
          probs[a] = std::exp(static_cast<double>(cache.logits(a, col)) - mx);
          z += probs[a];
        }
        double ent = 0.0;
        for (int a = 0; a < A; ++a) {
          probs[a] /= z;
          if (probs[a] > 0.0) ent -= probs[a] * std::log(probs[a]);
        }
        entropies[t] = ent;
        all_probs[t] = probs;
        target_logp[t] = std::log(std::max(probs[seg.actions[t]], 1e-30));
      }
      std::vector<double> vs_t, adv_t;
      if (frozen != nullptr) {
        vs_t = frozen->vs[b];
        adv_t = frozen->advantages[b];
      } else {
        std::vector<double> rewards(L);
        for (int t = 0; t < L; ++t) rewards[t] = seg.rewards_ext[t] + seg.rewards_pseudo[t];
        const VTraceResult vt =
            vtrace_targets(rewards, values, boots[b], seg.behavior_logp, target_logp, seg.done,
                           hp_.gamma, hp_.rho_bar, hp_.c_bar);
        vs_t = vt.vs;
        adv_t = vt.advantages;
      }
      if (targets_out != nullptr) {
        targets_out->vs.push_back(vs_t);
        targets_out->advantages.push_back(adv_t);
      }
      for (int t = 0; t < L; ++t) {
        const Eigen::Index col = static_cast<Eigen::Index>(t) * B + b;
        policy_loss += -target_logp[t] * adv_t[t] * scale;
        const double verr = values[t] - vs_t[t];
        baseline_loss += 0.5 * verr * verr * scale;
        entropy_sum += entropies[t] * scale;
        if (!with_grad) continue;
        dvalues(0, col) = static_cast<S>(hp_.lambda_critic * verr * scale);
        for (int a = 0; a < A; ++a) {
          const double p = all_probs[t][a];
          const double logp = std::log(std::max(p, 1e-30));
          double g = adv_t[t] * (p - (a == seg.actions[t] ? 1.0 : 0.0));
          g += hp_.entropy_bonus * p * (logp + entropies[t]);
          dlogits(a, col) = static_cast<S>(g * scale);
        }
      }
    }

    nn::Mat<S> dq_in, dq_out;
    const double cpc_loss =
        cpc_.loss(policy_.params(), cache.x_all, cache.h_all, L, B, hp_.cpc_shifts,
                  with_grad ? &dq_in : nullptr, with_grad ? &dq_out : nullptr, hp_.lambda_cpc);

    UpdateDiagnostics diag;
    diag.policy = policy_loss;
    diag.baseline = baseline_loss;
    diag.entropy = entropy_sum;
    diag.cpc = cpc_loss;
    diag.total = policy_loss + hp_.lambda_critic * baseline_loss -
                 hp_.entropy_bonus * entropy_sum + hp_.lambda_cpc * cpc_loss;

    if (with_grad) {
      policy_.backward_segment(cache, dlogits, dvalues, dq_out, dq_in);
      diag.grad_norm = policy_.params().grad_norm();
    }
    return diag;
  }

  // One A3C step. Throws NonFiniteLoss (gradients discarded) when the total
  // loss is not finite.
  UpdateDiagnostics update(const std::vector<const TrajectorySegment*>& batch) {
    UpdateDiagnostics diag = compute(batch, true);
    if (!std::isfinite(diag.total) || !std::isfinite(diag.grad_norm)) {
      policy_.params().zero_grad();
      throw NonFiniteLoss("non-finite loss; update aborted");
    }
    opt_.apply(policy_.params(), hp_.learning_rate);
    policy_.params().zero_grad();
    return diag;
  }

 private:
  LearnerHyperparams hp_;
  PolicyNet<S> policy_;
  CPCHead<S> cpc_;
  nn::RmsProp<S> opt_;
};

}  // namespace normsim
