#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "normsim/errors.hpp"
#include "normsim/rng.hpp"

// Small dense-net toolkit: flat parameter store, conv/dense/LSTM layers and
// RMSProp. Templated on the scalar so production runs float while gradient
// checks instantiate double.
namespace normsim::nn {

template <typename S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;
template <typename S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;

template <typename S>
class ParamStore {
 public:
  int allocate(int rows, int cols) {
    const int off = static_cast<int>(value.size());
    value.conservativeResize(off + rows * cols);
    grad.conservativeResize(off + rows * cols);
    value.segment(off, rows * cols).setZero();
    grad.segment(off, rows * cols).setZero();
    return off;
  }
  Eigen::Map<Mat<S>> mat(int off, int rows, int cols) {
    return Eigen::Map<Mat<S>>(value.data() + off, rows, cols);
  }
  Eigen::Map<const Mat<S>> mat(int off, int rows, int cols) const {
    return Eigen::Map<const Mat<S>>(value.data() + off, rows, cols);
  }
  Eigen::Map<Mat<S>> gmat(int off, int rows, int cols) {
    return Eigen::Map<Mat<S>>(grad.data() + off, rows, cols);
  }
  void zero_grad() { grad.setZero(); }
  int size() const { return static_cast<int>(value.size()); }
  uint64_t value_hash() const {
    return hash_bytes(value.data(), value.size() * sizeof(S));
  }
  double grad_norm() const { return std::sqrt(static_cast<double>(grad.squaredNorm())); }

  Vec<S> value;
  Vec<S> grad;
};

template <typename S>
void glorot_init(Eigen::Map<Mat<S>> w, int fan_in, int fan_out, RngStream& rng) {
  const double a = std::sqrt(6.0 / (fan_in + fan_out));
  for (int i = 0; i < w.size(); ++i)
    w.data()[i] = static_cast<S>((rng.next_double() * 2.0 - 1.0) * a);
}

template <typename S>
struct Dense {
  int in = 0, out = 0, w_off = 0, b_off = 0;

  Dense() = default;
  Dense(ParamStore<S>& ps, int in_dim, int out_dim, RngStream& rng) : in(in_dim), out(out_dim) {
    w_off = ps.allocate(out, in);
    b_off = ps.allocate(out, 1);
    glorot_init<S>(ps.mat(w_off, out, in), in, out, rng);
  }

  Mat<S> forward(const ParamStore<S>& ps, const Mat<S>& x) const {
    return (ps.mat(w_off, out, in) * x).colwise() + ps.mat(b_off, out, 1).col(0);
  }
  // Accumulates parameter grads; returns dx.
  Mat<S> backward(ParamStore<S>& ps, const Mat<S>& x, const Mat<S>& dy) const {
    ps.gmat(w_off, out, in) += dy * x.transpose();
    ps.gmat(b_off, out, 1) += dy.rowwise().sum();
    return ps.mat(w_off, out, in).transpose() * dy;
  }
};

// Square-input convolution, channel-major layout: column b of the activation
// matrix holds sample b as [c * H * W + y * W + x].
template <typename S>
struct Conv2d {
  int in_ch = 0, out_ch = 0, kernel = 0, stride = 0;
  int in_h = 0, in_w = 0, out_h = 0, out_w = 0;
  int w_off = 0, b_off = 0;

  Conv2d() = default;
  Conv2d(ParamStore<S>& ps, int in_channels, int out_channels, int k, int s, int h, int w,
         RngStream& rng)
      : in_ch(in_channels), out_ch(out_channels), kernel(k), stride(s), in_h(h), in_w(w) {
    out_h = (in_h - kernel) / stride + 1;
    out_w = (in_w - kernel) / stride + 1;
    const int patch = in_ch * kernel * kernel;
    w_off = ps.allocate(out_ch, patch);
    b_off = ps.allocate(out_ch, 1);
    glorot_init<S>(ps.mat(w_off, out_ch, patch), patch, out_ch, rng);
  }

  int out_dim() const { return out_ch * out_h * out_w; }
  int positions() const { return out_h * out_w; }

  Mat<S> im2col(const Mat<S>& x) const {
    const int patch = in_ch * kernel * kernel;
    const int pos = positions();
    const int batch = static_cast<int>(x.cols());
    Mat<S> k(patch, static_cast<Eigen::Index>(pos) * batch);
    for (int b = 0; b < batch; ++b) {
      const S* src = x.col(b).data();
      for (int oy = 0; oy < out_h; ++oy) {
        for (int ox = 0; ox < out_w; ++ox) {
          S* dst = k.col(static_cast<Eigen::Index>(b) * pos + oy * out_w + ox).data();
          for (int c = 0; c < in_ch; ++c) {
            const S* plane = src + c * in_h * in_w;
            for (int ky = 0; ky < kernel; ++ky) {
              const S* row = plane + (oy * stride + ky) * in_w + ox * stride;
              for (int kx = 0; kx < kernel; ++kx) *dst++ = row[kx];
            }
          }
        }
      }
    }
    return k;
  }

  Mat<S> forward(const ParamStore<S>& ps, const Mat<S>& x, Mat<S>* cols_cache = nullptr) const {
    const int pos = positions();
    const int batch = static_cast<int>(x.cols());
    Mat<S> k = im2col(x);
    Mat<S> y = ps.mat(w_off, out_ch, in_ch * kernel * kernel) * k;  // out_ch x (pos*batch)
    y.colwise() += ps.mat(b_off, out_ch, 1).col(0);
    if (cols_cache != nullptr) *cols_cache = std::move(k);
    Mat<S> out(out_dim(), batch);
    for (int b = 0; b < batch; ++b)
      for (int c = 0; c < out_ch; ++c)
        for (int p = 0; p < pos; ++p)
          out(c * pos + p, b) = y(c, static_cast<Eigen::Index>(b) * pos + p);
    return out;
  }

  Mat<S> backward(ParamStore<S>& ps, const Mat<S>& cols, const Mat<S>& dy_shaped) const {
    const int pos = positions();
    const int batch = static_cast<int>(dy_shaped.cols());
    const int patch = in_ch * kernel * kernel;
    Mat<S> dy(out_ch, static_cast<Eigen::Index>(pos) * batch);
    for (int b = 0; b < batch; ++b)
      for (int c = 0; c < out_ch; ++c)
        for (int p = 0; p < pos; ++p)
          dy(c, static_cast<Eigen::Index>(b) * pos + p) = dy_shaped(c * pos + p, b);
    ps.gmat(w_off, out_ch, patch) += dy * cols.transpose();
    ps.gmat(b_off, out_ch, 1) += dy.rowwise().sum();
    const Mat<S> dk = ps.mat(w_off, out_ch, patch).transpose() * dy;
    Mat<S> dx = Mat<S>::Zero(in_ch * in_h * in_w, batch);
    for (int b = 0; b < batch; ++b) {
      S* dst = dx.col(b).data();
      for (int oy = 0; oy < out_h; ++oy) {
        for (int ox = 0; ox < out_w; ++ox) {
          const S* src = dk.col(static_cast<Eigen::Index>(b) * pos + oy * out_w + ox).data();
          for (int c = 0; c < in_ch; ++c) {
            S* plane = dst + c * in_h * in_w;
            for (int ky = 0; ky < kernel; ++ky) {
              S* row = plane + (oy * stride + ky) * in_w + ox * stride;
              for (int kx = 0; kx < kernel; ++kx) row[kx] += *src++;
            }
          }
        }
      }
    }
    return dx;
  }
};

template <typename S>
inline void relu_inplace(Mat<S>& x) {
  x = x.cwiseMax(S(0));
}
template <typename S>
inline Mat<S> relu_backward(const Mat<S>& y, const Mat<S>& dy) {
  return (y.array() > S(0)).template cast<S>() * dy.array();
}

template <typename S>
struct LSTMCell {
  int in = 0, hidden = 0;
  int wx_off = 0, wh_off = 0, b_off = 0;

  struct StepCache {
    Mat<S> x, h_prev, c_prev, i, f, g, o, tanh_c;
  };

  LSTMCell() = default;
  LSTMCell(ParamStore<S>& ps, int in_dim, int hidden_dim, RngStream& rng)
      : in(in_dim), hidden(hidden_dim) {
    wx_off = ps.allocate(4 * hidden, in);
    wh_off = ps.allocate(4 * hidden, hidden);
    b_off = ps.allocate(4 * hidden, 1);
    glorot_init<S>(ps.mat(wx_off, 4 * hidden, in), in + hidden, hidden, rng);
    glorot_init<S>(ps.mat(wh_off, 4 * hidden, hidden), in + hidden, hidden, rng);
    ps.mat(b_off, 4 * hidden, 1).block(hidden, 0, hidden, 1).setConstant(S(1));  // forget bias
  }

  static Mat<S> sigmoid(const Mat<S>& z) {
    return ((-z.array()).exp() + S(1)).inverse().matrix();
  }

  // h and c are hidden x B, updated in place.
  void step(const ParamStore<S>& ps, const Mat<S>& x, Mat<S>& h, Mat<S>& c,
            StepCache* cache = nullptr) const {
    Mat<S> z = ps.mat(wx_off, 4 * hidden, in) * x + ps.mat(wh_off, 4 * hidden, hidden) * h;
    z.colwise() += ps.mat(b_off, 4 * hidden, 1).col(0);
    const int b = static_cast<int>(x.cols());
    Mat<S> i = sigmoid(z.topRows(hidden));
    Mat<S> f = sigmoid(z.middleRows(hidden, hidden));
    Mat<S> g = z.middleRows(2 * hidden, hidden).array().tanh().matrix();
    Mat<S> o = sigmoid(z.bottomRows(hidden));
    Mat<S> c_new = f.cwiseProduct(c) + i.cwiseProduct(g);
    Mat<S> tanh_c = c_new.array().tanh().matrix();
    Mat<S> h_new = o.cwiseProduct(tanh_c);
    if (cache != nullptr) {
      cache->x = x;
      cache->h_prev = h;
      cache->c_prev = c;
      cache->i = std::move(i);
      cache->f = std::move(f);
      cache->g = std::move(g);
      cache->o = std::move(o);
      cache->tanh_c = std::move(tanh_c);
    }
    h = std::move(h_new);
    c = std::move(c_new);
    (void)b;
  }

  // Accumulates param grads; given (dh, dc) flowing into this step, returns
  // dx and updates (dh, dc) to the previous step's gradients.
  Mat<S> backward_step(ParamStore<S>& ps, const StepCache& cc, Mat<S>& dh, Mat<S>& dc) const {
    const Mat<S> ones = Mat<S>::Ones(dh.rows(), dh.cols());
    Mat<S> dtanh = dh.cwiseProduct(cc.o);
    Mat<S> dcell = dc + dtanh.cwiseProduct(ones - cc.tanh_c.cwiseProduct(cc.tanh_c));
    Mat<S> do_ = dh.cwiseProduct(cc.tanh_c);
    Mat<S> di = dcell.cwiseProduct(cc.g);
    Mat<S> dg = dcell.cwiseProduct(cc.i);
    Mat<S> df = dcell.cwiseProduct(cc.c_prev);
    dc = dcell.cwiseProduct(cc.f);

    Mat<S> dz(4 * hidden, dh.cols());
    dz.topRows(hidden) = di.cwiseProduct(cc.i).cwiseProduct(ones - cc.i);
    dz.middleRows(hidden, hidden) = df.cwiseProduct(cc.f).cwiseProduct(ones - cc.f);
    dz.middleRows(2 * hidden, hidden) = dg.cwiseProduct(ones - cc.g.cwiseProduct(cc.g));
    dz.bottomRows(hidden) = do_.cwiseProduct(cc.o).cwiseProduct(ones - cc.o);

    ps.gmat(wx_off, 4 * hidden, in) += dz * cc.x.transpose();
    ps.gmat(wh_off, 4 * hidden, hidden) += dz * cc.h_prev.transpose();
    ps.gmat(b_off, 4 * hidden, 1) += dz.rowwise().sum();
    dh = ps.mat(wh_off, 4 * hidden, hidden).transpose() * dz;
    return ps.mat(wx_off, 4 * hidden, in).transpose() * dz;
  }
};

// RMSProp with TF conventions: ms <- decay ms + (1-decay) g^2,
// x <- x - lr g / sqrt(ms + eps). Momentum 0.
template <typename S>
class RmsProp {
 public:
  RmsProp() = default;
  RmsProp(int size, double decay, double eps) : decay_(decay), eps_(eps) {
    ms_ = Vec<S>::Zero(size);
  }
  void apply(ParamStore<S>& ps, double lr) {
    ms_ = S(decay_) * ms_ + S(1.0 - decay_) * ps.grad.cwiseProduct(ps.grad);
    ps.value -= S(lr) * ps.grad.cwiseQuotient((ms_.array() + S(eps_)).sqrt().matrix());
  }
  Vec<S>& state() { return ms_; }
  const Vec<S>& state() const { return ms_; }

 private:
  Vec<S> ms_;
  double decay_ = 0.99;
  double eps_ = 1e-5;
};

template <typename S>
inline Vec<S> softmax(const Vec<S>& logits) {
  Vec<S> z = logits.array() - logits.maxCoeff();
  Vec<S> e = z.array().exp();
  return e / e.sum();
}

// Conv backbone + MLP shared by classifier and policy. ReLU on every layer
// including the final fully connected one.
struct TorsoSpec {
  int in_side = 88;
  int in_ch = 3;
  std::vector<std::array<int, 3>> convs;  // {out_ch, kernel, stride}
  std::vector<int> fcs;                   // hidden widths

  int input_dim() const { return in_side * in_side * in_ch; }
};

template <typename S>
struct Torso {
  std::vector<Conv2d<S>> convs;
  std::vector<Dense<S>> fcs;
  int in_dim = 0, out_dim = 0;

  struct Cache {
    Mat<S> input;
    std::vector<Mat<S>> conv_cols;
    std::vector<Mat<S>> conv_out;  // post-activation
    std::vector<Mat<S>> fc_in;
    std::vector<Mat<S>> fc_out;  // post-activation
  };

  Torso() = default;
  Torso(ParamStore<S>& ps, const TorsoSpec& spec, RngStream& rng) {
    in_dim = spec.input_dim();
    int side = spec.in_side, ch = spec.in_ch, dim = in_dim;
    for (const auto& c : spec.convs) {
      convs.emplace_back(ps, ch, c[0], c[1], c[2], side, side, rng);
      side = convs.back().out_h;
      ch = c[0];
      dim = convs.back().out_dim();
    }
    for (int width : spec.fcs) {
      fcs.emplace_back(ps, dim, width, rng);
      dim = width;
    }
    out_dim = dim;
  }

  Mat<S> forward(const ParamStore<S>& ps, const Mat<S>& x, Cache* cache = nullptr) const {
    if (cache != nullptr) {
      cache->input = x;
      cache->conv_cols.resize(convs.size());
      cache->conv_out.resize(convs.size());
      cache->fc_in.resize(fcs.size());
      cache->fc_out.resize(fcs.size());
    }
    Mat<S> h = x;
    for (size_t k = 0; k < convs.size(); ++k) {
      h = convs[k].forward(ps, h, cache != nullptr ? &cache->conv_cols[k] : nullptr);
      relu_inplace(h);
      if (cache != nullptr) cache->conv_out[k] = h;
    }
    for (size_t k = 0; k < fcs.size(); ++k) {
      if (cache != nullptr) cache->fc_in[k] = h;
      h = fcs[k].forward(ps, h);
      relu_inplace(h);
      if (cache != nullptr) cache->fc_out[k] = h;
    }
    return h;
  }

  void backward(ParamStore<S>& ps, const Cache& cache, Mat<S> dy) const {
    for (int k = static_cast<int>(fcs.size()) - 1; k >= 0; --k) {
      dy = relu_backward(cache.fc_out[k], dy);
      dy = fcs[k].backward(ps, cache.fc_in[k], dy);
    }
    for (int k = static_cast<int>(convs.size()) - 1; k >= 0; --k) {
      dy = relu_backward(cache.conv_out[k], dy);
      dy = convs[k].backward(ps, cache.conv_cols[k], dy);
    }
  }
};

}  // namespace normsim::nn
