#include "normsim/frame.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "normsim/rng.hpp"

namespace normsim {

void Frame::fill(uint8_t r, uint8_t g, uint8_t b) {
  for (size_t i = 0; i + 2 < rgb.size(); i += 3) {
    rgb[i] = r;
    rgb[i + 1] = g;
    rgb[i + 2] = b;
  }
}

bool Frame::all_black() const {
  return std::all_of(rgb.begin(), rgb.end(), [](uint8_t v) { return v == 0; });
}

uint64_t Frame::content_hash() const {
  Fnv64 h;
  h.update_value(height);
  h.update_value(width);
  h.update(rgb.data(), rgb.size());
  return h.digest();
}

namespace {

// Box-filter taps for one axis: which source texels each output texel
// covers and with what weight. Cached per (in, out) pair; rendering feeds
// the same shapes every step.
struct AxisTaps {
  std::vector<int> begin, end;      // half-open texel range per output index
  std::vector<std::vector<double>> weight;
};

AxisTaps make_taps(int in, int out) {
  AxisTaps taps;
  taps.begin.resize(out);
  taps.end.resize(out);
  taps.weight.resize(out);
  const double scale = static_cast<double>(in) / out;
  for (int o = 0; o < out; ++o) {
    const double lo = o * scale, hi = (o + 1) * scale;
    const int b = static_cast<int>(lo);
    const int e = std::min(in, static_cast<int>(std::ceil(hi)));
    taps.begin[o] = b;
    taps.end[o] = e;
    double total = 0;
    for (int i = b; i < e; ++i) {
      const double w = std::min<double>(hi, i + 1) - std::max<double>(lo, i);
      taps.weight[o].push_back(w);
      total += w;
    }
    for (auto& w : taps.weight[o]) w /= total;
  }
  return taps;
}

const AxisTaps& cached_taps(int in, int out) {
  // Thread-local: parallel seed workers each keep their own table.
  thread_local AxisTaps cache;
  thread_local int cached_in = -1, cached_out = -1;
  if (in != cached_in || out != cached_out) {
    cache = make_taps(in, out);
    cached_in = in;
    cached_out = out;
  }
  return cache;
}

}  // namespace

Frame downsample(const Frame& in, int side) {
  if (in.height == side && in.width == side) return in;
  Frame out(side, side);
  const AxisTaps& ty = (in.height == in.width) ? cached_taps(in.height, side)
                                               : make_taps(in.height, side);
  const AxisTaps& tx = (in.height == in.width) ? ty : make_taps(in.width, side);
  std::vector<double> row_acc(static_cast<size_t>(side) * 3);
  for (int oy = 0; oy < side; ++oy) {
    std::fill(row_acc.begin(), row_acc.end(), 0.0);
    for (int iy = ty.begin[oy]; iy < ty.end[oy]; ++iy) {
      const double wy = ty.weight[oy][iy - ty.begin[oy]];
      const uint8_t* src = in.pixel(iy, 0);
      for (int ox = 0; ox < side; ++ox) {
        double r = 0, g = 0, b = 0;
        for (int ix = tx.begin[ox]; ix < tx.end[ox]; ++ix) {
          const double wx = tx.weight[ox][ix - tx.begin[ox]];
          const uint8_t* p = src + ix * 3;
          r += wx * p[0];
          g += wx * p[1];
          b += wx * p[2];
        }
        row_acc[ox * 3] += wy * r;
        row_acc[ox * 3 + 1] += wy * g;
        row_acc[ox * 3 + 2] += wy * b;
      }
    }
    uint8_t* q = out.pixel(oy, 0);
    for (int k = 0; k < side * 3; ++k)
      q[k] = static_cast<uint8_t>(std::clamp(row_acc[k] + 0.5, 0.0, 255.0));
  }
  return out;
}

std::vector<float> frame_to_input(const Frame& f) {
  const size_t pixels = static_cast<size_t>(f.height) * f.width;
  std::vector<float> v(pixels * 3);
  for (size_t p = 0; p < pixels; ++p)
    for (int c = 0; c < 3; ++c) v[c * pixels + p] = f.rgb[p * 3 + c] * (1.0f / 255.0f);
  return v;
}

}  // namespace normsim
