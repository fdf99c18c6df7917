#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "normsim/errors.hpp"
#include "normsim/nn.hpp"
#include "normsim/rng.hpp"

namespace normsim {

// Network shape profiles. The full profile is the source architecture; the
// desk profile trades the deep conv stack for a single conv over downsampled
// 24x24 frames so the whole pipeline runs on a workstation.
struct NetProfile {
  nn::TorsoSpec torso;
  int lstm_units = 128;

  static NetProfile full() {
    NetProfile p;
    p.torso.in_side = 88;
    p.torso.convs = {{16, 8, 8}, {32, 4, 1}};
    p.torso.fcs = {64, 64};
    p.lstm_units = 128;
    return p;
  }
  static NetProfile desk() {
    NetProfile p;
    p.torso.in_side = 24;
    p.torso.convs = {{16, 8, 8}};
    p.torso.fcs = {64, 64};
    p.lstm_units = 32;
    return p;
  }
};

inline double pseudoreward_value(bool zap_at_opportunity, double psi, double alpha,
                                 double beta) {
  if (!zap_at_opportunity) return 0.0;
  return psi >= 0.5 ? alpha : -beta;
}

// Per-agent norm classifier: torso -> linear (2) -> softmax over
// {approve, disapprove}. Owns its parameters and optimizer state.
template <typename S>
class NormClassifier {
 public:
  NormClassifier(const NetProfile& profile, uint64_t init_seed, double rms_decay = 0.99,
                 double rms_eps = 1e-5)
      : input_dim_(profile.torso.input_dim()) {
    RngStream rng(init_seed);
    torso_ = nn::Torso<S>(params_, profile.torso, rng);
    head_ = nn::Dense<S>(params_, torso_.out_dim, 2, rng);
    opt_ = nn::RmsProp<S>(params_.size(), rms_decay, rms_eps);
  }

  int input_dim() const { return input_dim_; }
  bool frozen() const { return frozen_; }
  void freeze() { frozen_ = true; }
  uint64_t param_hash() const { return params_.value_hash(); }
  nn::ParamStore<S>& params() { return params_; }
  const nn::ParamStore<S>& params() const { return params_; }
  nn::RmsProp<S>& optimizer() { return opt_; }

  // Probability of disapproval for one context frame.
  double predict(const nn::Vec<S>& input) const {
    if (input.size() != input_dim_)
      throw ShapeMismatch("classifier input has wrong dimensions");
    const nn::Mat<S> feat = torso_.forward(params_, input);
    const nn::Vec<S> p = nn::softmax<S>(head_.forward(params_, feat).col(0));
    return static_cast<double>(p(1));
  }

  std::vector<double> predict_batch(const nn::Mat<S>& inputs) const {
    if (inputs.rows() != input_dim_)
      throw ShapeMismatch("classifier input has wrong dimensions");
    const nn::Mat<S> feat = torso_.forward(params_, inputs);
    const nn::Mat<S> logits = head_.forward(params_, feat);
    std::vector<double> out(inputs.cols());
    for (Eigen::Index i = 0; i < inputs.cols(); ++i)
      out[i] = static_cast<double>(nn::softmax<S>(logits.col(i))(1));
    return out;
  }

  int prediction_bit(const nn::Vec<S>& input) const { return predict(input) >= 0.5 ? 1 : 0; }

  // Subsampled negative-log-likelihood, scaled by lambda_class. Columns of
  // `positives` carry outcome-1 contexts, `negatives` outcome-0 contexts.
  // Psi is clamped to [1e-6, 1-1e-6] inside the logs. Accumulates gradients
  // when `with_grad`; returns the loss. Throws EmptyBatch when both sides
  // are empty.
  double loss(const nn::Mat<S>& positives, const nn::Mat<S>& negatives, double lambda_class,
              bool with_grad) {
    const Eigen::Index np = positives.cols(), nn_ = negatives.cols();
    if (np == 0 && nn_ == 0) throw EmptyBatch("classifier batch empty on both sides");
    nn::Mat<S> inputs(input_dim_, np + nn_);
    if (np > 0) inputs.leftCols(np) = positives;
    if (nn_ > 0) inputs.rightCols(nn_) = negatives;

    typename nn::Torso<S>::Cache cache;
    const nn::Mat<S> feat = torso_.forward(params_, inputs, with_grad ? &cache : nullptr);
    const nn::Mat<S> logits = head_.forward(params_, feat);

    constexpr double kClip = 1e-6;
    double total = 0.0;
    nn::Mat<S> dlogits = nn::Mat<S>::Zero(2, np + nn_);
    for (Eigen::Index k = 0; k < np + nn_; ++k) {
      const nn::Vec<S> p = nn::softmax<S>(logits.col(k));
      const double psi = static_cast<double>(p(1));
      const bool positive = k < np;
      const double weight = lambda_class / static_cast<double>(positive ? np : nn_);
      const double clamped = std::clamp(positive ? psi : 1.0 - psi, kClip, 1.0 - kClip);
      total += -std::log(clamped) * weight;
      if (!with_grad) continue;
      // d(-log psi)/dpsi = -1/psi, zero in the clamped region; chain through
      // the two-way softmax: dpsi/dz1 = psi (1 - psi) = -dpsi/dz0.
      const double inner = positive ? psi : 1.0 - psi;
      if (inner <= kClip || inner >= 1.0 - kClip) continue;
      const double dpsi = (positive ? -1.0 / psi : 1.0 / (1.0 - psi)) * weight;
      const double dz1 = dpsi * psi * (1.0 - psi);
      dlogits(1, k) = static_cast<S>(dz1);
      dlogits(0, k) = static_cast<S>(-dz1);
    }
    if (with_grad) {
      const nn::Mat<S> dfeat = head_.backward(params_, feat, dlogits);
      torso_.backward(params_, cache, dfeat);
    }
    return total;
  }

  // One RMSProp step on accumulated gradients; no-op once frozen.
  void apply_update(double lr) {
    if (frozen_) {
      params_.zero_grad();
      return;
    }
    opt_.apply(params_, lr);
    params_.zero_grad();
  }

 private:
  int input_dim_;
  nn::ParamStore<S> params_;
  nn::Torso<S> torso_;
  nn::Dense<S> head_;
  nn::RmsProp<S> opt_;
  bool frozen_ = false;
};

// 0.5 (TP/(TP+FN) + TN/(TN+FP)) at the 0.5 threshold. Throws
// DegenerateEvalSet when a class is absent.
inline double balanced_accuracy(const std::vector<double>& psi, const std::vector<int>& labels) {
  int tp = 0, fn = 0, tn = 0, fp = 0;
  for (size_t i = 0; i < psi.size(); ++i) {
    const bool pred = psi[i] >= 0.5;
    if (labels[i] == 1)
      (pred ? tp : fn)++;
    else
      (pred ? fp : tn)++;
  }
  if (tp + fn == 0 || tn + fp == 0)
    throw DegenerateEvalSet("balanced accuracy needs both classes");
  return 0.5 * (static_cast<double>(tp) / (tp + fn) + static_cast<double>(tn) / (tn + fp));
}

// Uniform subsample without replacement: keeps all when the pool is small.
inline std::vector<uint32_t> subsample(std::vector<uint32_t> pool, size_t cap, RngStream& rng) {
  if (pool.size() <= cap) return pool;
  for (size_t i = 0; i < cap; ++i) {
    const size_t j = i + rng.next_below(static_cast<uint32_t>(pool.size() - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(cap);
  return pool;
}

}  // namespace normsim
