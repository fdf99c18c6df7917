#pragma once

#include <vector>

#include "normsim/classifier.hpp"
#include "normsim/nn.hpp"

namespace normsim {

// Per-agent policy: torso -> concat(prediction bit) -> LSTM -> linear policy
// logits + linear scalar baseline. No parameter sharing between agents.
template <typename S>
class PolicyNet {
 public:
  PolicyNet(const NetProfile& profile, int n_actions, uint64_t init_seed)
      : input_dim_(profile.torso.input_dim()),
        hidden_(profile.lstm_units),
        n_actions_(n_actions) {
    RngStream rng(init_seed);
    torso_ = nn::Torso<S>(params_, profile.torso, rng);
    lstm_ = nn::LSTMCell<S>(params_, torso_.out_dim + 1, hidden_, rng);
    policy_head_ = nn::Dense<S>(params_, hidden_, n_actions_, rng);
    value_head_ = nn::Dense<S>(params_, hidden_, 1, rng);
  }

  int input_dim() const { return input_dim_; }
  int hidden() const { return hidden_; }
  int n_actions() const { return n_actions_; }
  int feature_dim() const { return torso_.out_dim; }
  nn::ParamStore<S>& params() { return params_; }
  const nn::ParamStore<S>& params() const { return params_; }

  // Single-step acting path; h and c are hidden x 1, updated in place.
  // The same code path replays stored segments bit-exactly.
  void act(const nn::Vec<S>& obs_input, S p_bit, nn::Mat<S>& h, nn::Mat<S>& c,
           nn::Vec<S>& logits_out, S& value_out) const {
    if (obs_input.size() != input_dim_) throw ShapeMismatch("policy input has wrong dimensions");
    const nn::Mat<S> m = torso_.forward(params_, obs_input);
    nn::Mat<S> x(torso_.out_dim + 1, 1);
    x.topRows(torso_.out_dim) = m;
    x(torso_.out_dim, 0) = p_bit;
    lstm_.step(params_, x, h, c);
    logits_out = policy_head_.forward(params_, h).col(0);
    value_out = value_head_.forward(params_, h)(0, 0);
  }

  struct ForwardCache {
    int L = 0, B = 0;
    typename nn::Torso<S>::Cache torso;
    nn::Mat<S> m;  // feature_dim x (L*B), time-major columns t*B + b
    std::vector<typename nn::LSTMCell<S>::StepCache> steps;
    std::vector<nn::Mat<S>> reset_mask;  // per-step 1 x B (1 keeps state)
    nn::Mat<S> x_all;                    // (feature_dim+1) x (L*B) LSTM inputs
    nn::Mat<S> h_all;                    // hidden x (L*B)
    nn::Mat<S> logits;                   // n_actions x (L*B)
    nn::Mat<S> values;                   // 1 x (L*B)
  };

  // Batched training forward. `obs` is input_dim x (L*B) with time-major
  // columns; `p_bits` is 1 x (L*B); `reset_before` marks (t, b) pairs whose
  // recurrent state zeroes before the step (episode boundary inside the
  // batch); h0/c0 are the recorded segment-start snapshots (hidden x B).
  void forward_segment(const nn::Mat<S>& obs, const nn::Mat<S>& p_bits,
                       const std::vector<uint8_t>& reset_before, nn::Mat<S> h0, nn::Mat<S> c0,
                       int L, int B, ForwardCache& cache) const {
    cache.L = L;
    cache.B = B;
    cache.m = torso_.forward(params_, obs, &cache.torso);
    cache.steps.resize(L);
    cache.reset_mask.resize(L);
    cache.x_all.resize(torso_.out_dim + 1, static_cast<Eigen::Index>(L) * B);
    cache.h_all.resize(hidden_, static_cast<Eigen::Index>(L) * B);
    nn::Mat<S> h = std::move(h0), c = std::move(c0);
    for (int t = 0; t < L; ++t) {
      nn::Mat<S> mask = nn::Mat<S>::Ones(1, B);
      for (int b = 0; b < B; ++b)
        if (reset_before[static_cast<size_t>(t) * B + b]) mask(0, b) = S(0);
      cache.reset_mask[t] = mask;
      for (int b = 0; b < B; ++b) {
        if (mask(0, b) == S(0)) {
          h.col(b).setZero();
          c.col(b).setZero();
        }
      }
      nn::Mat<S> x(torso_.out_dim + 1, B);
      x.topRows(torso_.out_dim) = cache.m.middleCols(static_cast<Eigen::Index>(t) * B, B);
      x.bottomRows(1) = p_bits.middleCols(static_cast<Eigen::Index>(t) * B, B);
      cache.x_all.middleCols(static_cast<Eigen::Index>(t) * B, B) = x;
      lstm_.step(params_, x, h, c, &cache.steps[t]);
      cache.h_all.middleCols(static_cast<Eigen::Index>(t) * B, B) = h;
    }
    cache.logits = policy_head_.forward(params_, cache.h_all);
    cache.values = value_head_.forward(params_, cache.h_all);
  }

  // Value of the state after the segment's last step, continuing the
  // recurrent state (used as the off-policy bootstrap).
  std::vector<double> bootstrap_values(const ForwardCache& cache, const nn::Mat<S>& boot_obs,
                                       const nn::Mat<S>& boot_p) const {
    const int B = cache.B;
    nn::Mat<S> h = cache.h_all.rightCols(B);
    nn::Mat<S> c = cache.steps.back().f.cwiseProduct(cache.steps.back().c_prev) +
                   cache.steps.back().i.cwiseProduct(cache.steps.back().g);
    const nn::Mat<S> m = torso_.forward(params_, boot_obs);
    nn::Mat<S> x(torso_.out_dim + 1, B);
    x.topRows(torso_.out_dim) = m;
    x.bottomRows(1) = boot_p;
    lstm_.step(params_, x, h, c);
    const nn::Mat<S> v = value_head_.forward(params_, h);
    std::vector<double> out(B);
    for (int b = 0; b < B; ++b) out[b] = static_cast<double>(v(0, b));
    return out;
  }

  // Backward pass. dlogits/dvalues are the loss gradients at the heads;
  // dh_extra and dx_extra carry the CPC gradients on LSTM outputs/inputs
  // (pass empty matrices to skip). The prediction-bit row of dx is dropped:
  // no gradient flows into the classifier through p_t.
  void backward_segment(const ForwardCache& cache, const nn::Mat<S>& dlogits,
                        const nn::Mat<S>& dvalues, const nn::Mat<S>& dh_extra,
                        const nn::Mat<S>& dx_extra) {
    const int L = cache.L, B = cache.B;
    nn::Mat<S> dh_all = policy_head_.backward(params_, cache.h_all, dlogits);
    dh_all += value_head_.backward(params_, cache.h_all, dvalues);
    if (dh_extra.size() > 0) dh_all += dh_extra;

    nn::Mat<S> dm(torso_.out_dim, static_cast<Eigen::Index>(L) * B);
    nn::Mat<S> dh = nn::Mat<S>::Zero(hidden_, B);
    nn::Mat<S> dc = nn::Mat<S>::Zero(hidden_, B);
    for (int t = L - 1; t >= 0; --t) {
      dh += dh_all.middleCols(static_cast<Eigen::Index>(t) * B, B);
      nn::Mat<S> dx = lstm_.backward_step(params_, cache.steps[t], dh, dc);
      if (dx_extra.size() > 0)
        dx.topRows(torso_.out_dim) +=
            dx_extra.middleCols(static_cast<Eigen::Index>(t) * B, B).topRows(torso_.out_dim);
      dm.middleCols(static_cast<Eigen::Index>(t) * B, B) = dx.topRows(torso_.out_dim);
      for (int b = 0; b < B; ++b) {
        if (cache.reset_mask[t](0, b) == S(0)) {
          dh.col(b).setZero();
          dc.col(b).setZero();
        }
      }
    }
    torso_.backward(params_, cache.torso, dm);
  }

 private:
  int input_dim_, hidden_, n_actions_;
  nn::ParamStore<S> params_;
  nn::Torso<S> torso_;
  nn::LSTMCell<S> lstm_;
  nn::Dense<S> policy_head_;
  nn::Dense<S> value_head_;
};

}  // namespace normsim
