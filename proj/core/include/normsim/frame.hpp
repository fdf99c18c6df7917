#pragma once

#include <cstdint>
#include <vector>

namespace normsim {

// Interleaved RGB, row-major. Observations are 88x88x3 at full resolution.
struct Frame {
  int height = 0;
  int width = 0;
  std::vector<uint8_t> rgb;

  Frame() = default;
  Frame(int h, int w) : height(h), width(w), rgb(static_cast<size_t>(h) * w * 3, 0) {}

  uint8_t* pixel(int y, int x) { return rgb.data() + (static_cast<size_t>(y) * width + x) * 3; }
  const uint8_t* pixel(int y, int x) const {
    return rgb.data() + (static_cast<size_t>(y) * width + x) * 3;
  }
  void fill(uint8_t r, uint8_t g, uint8_t b);
  bool all_black() const;
  uint64_t content_hash() const;

  bool operator==(const Frame& other) const {
    return height == other.height && width == other.width && rgb == other.rgb;
  }
};

// Box-filter downsample to side x side (area-weighted, handles non-integer
// ratios). Used to produce the desk-profile 24x24 network inputs.
Frame downsample(const Frame& in, int side);

// Frame -> normalized float vector in channel-major layout: v[c*H*W + p],
// p in row-major pixel order, values in [0, 1].
std::vector<float> frame_to_input(const Frame& f);

}  // namespace normsim
