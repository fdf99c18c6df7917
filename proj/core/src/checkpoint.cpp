#include "normsim/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace normsim {
namespace {

constexpr char kMagic[4] = {'N', 'S', 'C', 'K'};
constexpr uint32_t kVersion = 1;

}  // namespace

void save_checkpoint(const std::string& path, const nn::ParamStore<float>& params,
                     const nn::RmsProp<float>* opt, CheckpointMeta meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("checkpoint: cannot open " + path);
  out.write(kMagic, 4);
  out.write(reinterpret_cast<const char*>(&kVersion), sizeof(kVersion));
  out.write(reinterpret_cast<const char*>(&meta.step_count), sizeof(meta.step_count));
  const uint8_t frozen = meta.frozen ? 1 : 0;
  out.write(reinterpret_cast<const char*>(&frozen), 1);
  const uint64_t n = static_cast<uint64_t>(params.value.size());
  out.write(reinterpret_cast<const char*>(&n), sizeof(n));
  out.write(reinterpret_cast<const char*>(params.value.data()),
            static_cast<std::streamsize>(n * sizeof(float)));
  const uint8_t has_opt = opt != nullptr ? 1 : 0;
  out.write(reinterpret_cast<const char*>(&has_opt), 1);
  if (opt != nullptr)
    out.write(reinterpret_cast<const char*>(opt->state().data()),
              static_cast<std::streamsize>(n * sizeof(float)));
  if (!out) throw std::runtime_error("checkpoint: write failed for " + path);
}

CheckpointMeta load_checkpoint(const std::string& path, nn::ParamStore<float>& params,
                               nn::RmsProp<float>* opt) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  uint32_t version = 0;
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (std::memcmp(magic, kMagic, 4) != 0 || version != kVersion)
    throw std::runtime_error("checkpoint: bad header in " + path);
  CheckpointMeta meta;
  in.read(reinterpret_cast<char*>(&meta.step_count), sizeof(meta.step_count));
  uint8_t frozen = 0;
  in.read(reinterpret_cast<char*>(&frozen), 1);
  meta.frozen = frozen != 0;
  uint64_t n = 0;
  in.read(reinterpret_cast<char*>(&n), sizeof(n));
  if (n != static_cast<uint64_t>(params.value.size()))
    throw std::runtime_error("checkpoint: parameter count mismatch in " + path);
  in.read(reinterpret_cast<char*>(params.value.data()),
          static_cast<std::streamsize>(n * sizeof(float)));
  uint8_t has_opt = 0;
  in.read(reinterpret_cast<char*>(&has_opt), 1);
  if (has_opt && opt != nullptr)
    in.read(reinterpret_cast<char*>(opt->state().data()),
            static_cast<std::streamsize>(n * sizeof(float)));
  if (!in) throw std::runtime_error("checkpoint: truncated file " + path);
  return meta;
}

}  // namespace normsim
