#include "normsim/replay.hpp"

#include <cstring>
#include <fstream>

#include "normsim/errors.hpp"

namespace normsim {
namespace {

constexpr char kMagic[4] = {'N', 'S', 'R', 'P'};
constexpr uint32_t kVersion = 1;

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
template <typename T>
void get(std::ifstream& in, T& v) {
  in.read(reinterpret_cast<char*>(&v), sizeof(v));
}
void put_string(std::ofstream& out, const std::string& s) {
  const uint32_t len = static_cast<uint32_t>(s.size());
  put(out, len);
  out.write(s.data(), len);
}
std::string get_string(std::ifstream& in) {
  uint32_t len = 0;
  get(in, len);
  if (len > 4096) throw ReplayError("replay: corrupt string length");
  std::string s(len, '\0');
  in.read(s.data(), len);
  return s;
}

}  // namespace

void write_replay(const std::string& path, const Replay& r) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ReplayError("replay: cannot open " + path);
  out.write(kMagic, 4);
  put(out, kVersion);
  put_string(out, r.engine_version);
  put_string(out, r.map_name);
  put(out, r.config_hash);
  put(out, r.episode_seed);
  put(out, r.worker);
  put(out, r.episode_index);
  put(out, r.n_agents);
  put(out, r.steps);
  out.write(reinterpret_cast<const char*>(r.actions.data()),
            static_cast<std::streamsize>(r.actions.size()));
  put(out, r.final_state_hash);
  put(out, r.collective_return);
  if (!out) throw ReplayError("replay: write failed for " + path);
}

Replay read_replay(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ReplayError("replay: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0) throw ReplayError("replay: bad magic");
  uint32_t version = 0;
  get(in, version);
  if (version != kVersion) throw ReplayError("replay: unsupported version");
  Replay r;
  r.engine_version = get_string(in);
  r.map_name = get_string(in);
  get(in, r.config_hash);
  get(in, r.episode_seed);
  get(in, r.worker);
  get(in, r.episode_index);
  get(in, r.n_agents);
  get(in, r.steps);
  r.actions.resize(static_cast<size_t>(r.steps) * r.n_agents);
  in.read(reinterpret_cast<char*>(r.actions.data()),
          static_cast<std::streamsize>(r.actions.size()));
  get(in, r.final_state_hash);
  get(in, r.collective_return);
  if (!in) throw ReplayError("replay: truncated file " + path);
  return r;
}

}  // namespace normsim
