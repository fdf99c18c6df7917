#pragma once

#include "normsim/errors.hpp"
#include "normsim/nn.hpp"

namespace normsim {

// Contrastive predictive coding over the recurrent core: width-1 projections
// of LSTM inputs and outputs into a shared latent space; for each shift s the
// ((L-s)*B)^2 inner-product score matrix is pushed towards the identity
// pairing with softmax cross-entropy, averaged over shifts.
template <typename S>
class CPCHead {
 public:
  CPCHead() = default;
  CPCHead(nn::ParamStore<S>& ps, int in_dim, int out_dim, int latent, RngStream& rng)
      : latent_(latent),
        proj_in_(ps, in_dim, latent, rng),
        proj_out_(ps, out_dim, latent, rng) {}

  int latent() const { return latent_; }
  nn::Dense<S>& projection_in() { return proj_in_; }
  nn::Dense<S>& projection_out() { return proj_out_; }

  // q_in: LSTM inputs (N x L*B), q_out: LSTM outputs (N' x L*B), time-major
  // columns. Returns the unscaled loss; when gradients are requested the
  // matching d(grad_scale * loss)/d(q_in), d(.)/d(q_out) are written (same
  // shapes) and projection parameter grads accumulate into `ps` with the
  // same scaling (callers fold their loss weight into grad_scale).
  double loss(nn::ParamStore<S>& ps, const nn::Mat<S>& q_in, const nn::Mat<S>& q_out, int L,
              int B, int shifts, nn::Mat<S>* dq_in = nullptr, nn::Mat<S>* dq_out = nullptr,
              double grad_scale = 1.0) {
    if (shifts >= L) throw ShiftTooLarge("CPC shift count must be < unroll length");
    const nn::Mat<S> a = proj_in_.forward(ps, q_in);    // latent x L*B
    const nn::Mat<S> b = proj_out_.forward(ps, q_out);  // latent x L*B

    nn::Mat<S> da, db;
    const bool with_grad = dq_in != nullptr;
    if (with_grad) {
      da = nn::Mat<S>::Zero(latent_, q_in.cols());
      db = nn::Mat<S>::Zero(latent_, q_out.cols());
    }

    double total = 0.0;
    for (int s = 1; s <= shifts; ++s) {
      const Eigen::Index n = static_cast<Eigen::Index>(L - s) * B;
      const auto a_s = a.middleCols(static_cast<Eigen::Index>(s) * B, n);
      const auto b_s = b.leftCols(n);
      nn::Mat<S> scores = a_s.transpose() * b_s;  // n x n, rows = shifted inputs
      // Row-wise log-softmax against the diagonal target.
      double shift_loss = 0.0;
      nn::Mat<S> dscores;
      if (with_grad) dscores.resize(n, n);
      for (Eigen::Index r = 0; r < n; ++r) {
        const S mx = scores.row(r).maxCoeff();
        nn::Vec<S> e = (scores.row(r).array() - mx).exp().matrix().transpose();
        const S z = e.sum();
        shift_loss += -static_cast<double>(scores(r, r) - mx - std::log(static_cast<double>(z)));
        if (with_grad) {
          dscores.row(r) = (e / z).transpose();
          dscores(r, r) -= S(1);
        }
      }
      shift_loss /= static_cast<double>(n);
      total += shift_loss;
      if (with_grad) {
        dscores *= S(grad_scale / (static_cast<double>(n) * shifts));
        da.middleCols(static_cast<Eigen::Index>(s) * B, n) += b_s * dscores.transpose();
        db.leftCols(n) += a_s * dscores;
      }
    }
    total /= static_cast<double>(shifts);

    if (with_grad) {
      *dq_in = proj_in_.backward(ps, q_in, da);
      *dq_out = proj_out_.backward(ps, q_out, db);
    }
    return total;
  }

 private:
  int latent_ = 0;
  nn::Dense<S> proj_in_;
  nn::Dense<S> proj_out_;
};

}  // namespace normsim
