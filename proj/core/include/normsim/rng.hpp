#pragma once

#include <cstdint>
#include <string_view>

namespace normsim {

// Counter-based stream: the n-th output is a pure function of (seed, n),
// so draws in one subsystem never perturb another subsystem's sequence.
class RngStream {
 public:
  RngStream() = default;
  explicit RngStream(uint64_t seed) : seed_(mix(seed ^ 0x9e3779b97f4a7c15ull)) {}

  static uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  uint64_t next_u64() { return mix(seed_ + counter_++ * 0x9e3779b97f4a7c15ull); }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in {0, ..., n-1}, n > 0. Lemire reduction, no modulo bias worth
  // caring about at 64 bits.
  uint32_t next_below(uint32_t n) {
    return static_cast<uint32_t>((static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  bool bernoulli(double p) { return next_double() < p; }

  uint64_t seed() const { return seed_; }
  uint64_t counter() const { return counter_; }
  void restore(uint64_t seed, uint64_t counter) {
    seed_ = seed;
    counter_ = counter;
  }

 private:
  uint64_t seed_ = 0;
  uint64_t counter_ = 0;
};

// Stable 64-bit FNV-1a, used for config hashes, parameter hashes and state
// digests in replay footers.
class Fnv64 {
 public:
  void update(const void* data, size_t len) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (size_t i = 0; i < len; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ull;
    }
  }
  template <typename T>
  void update_value(const T& v) {
    static_assert(std::is_trivially_copyable_v<T>);
    update(&v, sizeof(v));
  }
  void update_string(std::string_view s) { update(s.data(), s.size()); }
  uint64_t digest() const { return hash_; }

 private:
  uint64_t hash_ = 0xcbf29ce484222325ull;
};

inline uint64_t hash_bytes(const void* data, size_t len) {
  Fnv64 h;
  h.update(data, len);
  return h.digest();
}

// Derives a child seed for a named subsystem / worker / episode.
inline uint64_t derive_seed(uint64_t base, std::string_view tag, uint64_t index = 0) {
  Fnv64 h;
  h.update_value(base);
  h.update_string(tag);
  h.update_value(index);
  return RngStream::mix(h.digest());
}

}  // namespace normsim
