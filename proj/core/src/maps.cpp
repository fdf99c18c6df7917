#include "normsim/maps.hpp"

#include <sstream>

#include "normsim/errors.hpp"

namespace normsim {
namespace {

constexpr const char* kAhFull =
    "333PPPP12PPP322P32PPP1P13P3P3\n"
    "1PPPP2PP122PPP3P232121P2PP2P1\n"
    "P1P3P11PPP13PPP31PPPP23PPPPPP\n"
    "PPPPP2P2P1P2P3P33P23PP2P2PPPP\n"
    "P1PPPPPPP2PPP12311PP3321PPPPP\n"
    "133P2PP2PPP3PPP1PPP2213P112P1\n"
    "3PPPPPPPPPPPPP31PPPPPP1P3112P\n"
    "PP2P21P21P33PPPPPPP3PP2PPPP1P\n"
    "PPPPP1P1P32P3PPP22PP1P2PPPP2P\n"
    "PPP3PP3122211PPP2113P3PPP1332\n"
    "PP12132PP1PP1P321PP1PPPPPP1P3\n"
    "PPP222P12PPPP1PPPP1PPP321P11P\n"
    "PPP2PPPP3P2P1PPP1P23322PP1P13\n"
    "23PPP2PPPP2P3PPPP3PP3PPP3PPP2\n"
    "2PPPP3P3P3PP3PP3P1P3PP11P21P1\n"
    "21PPP2PP331PP3PPP2PPPPP2PP3PP\n"
    "P32P2PP2P1PPPPPPP12P2PPP1PPPP\n"
    "P3PP3P2P21P3PP2PP11PP1323P312\n"
    "2P1PPPPP1PPP1P2PPP3P32P2P331P\n"
    "PPPPP1312P3P2PPPP3P32PPPP2P11\n"
    "P3PPPP221PPP2PPPPPPPP1PPP311P\n"
    "32P3PPPPPPPPPP31PPPP3PPP13PPP\n"
    "PPP3PPPPP3PPPPPP232P13PPPPP1P\n"
    "P1PP1PPP2PP3PPPPP33321PP2P3PP\n"
    "P13PPPP1P333PPPP2PP213PP2P3PP\n"
    "1PPPPP3PP2P1PP21P3PPPP231P2PP\n"
    "1331P2P12P2PPPP2PPP3P23P21PPP\n"
    "P3P131P3PPP13P1PPP222PPPP11PP\n"
    "2P3PPPPPPPP2P323PPP2PPP1PPP2P\n"
    "21PPPPPPP12P23P1PPPPPP13P3P11\n";

constexpr const char* kAhMini =
    "1P2P3PP1P2P\n"
    "P3PP1PPPP3P\n"
    "2PP3PP1P3PP\n"
    "P1P2PP3PP2P\n"
    "3PP1P2PP1PP\n"
    "P2P3PP2PPP1\n"
    "PP1PP3PP2PP\n"
    "3P2P1PPPP1P\n"
    "P3PPP2PPPPP\n"
    "1P2P3PPPP3P\n"
    "PP1PP2P3PPP\n";

constexpr const char* kCspFull =
    "WWWWWWWWWWWWWWWWWWWWWWWWWWWWWW\n"
    "WFFFFFFFFFFFFFFDDDDDDDDDDDDDDW\n"
    "WFFFFFFFFFFFFFFDDDDDDDDDDDDDDW\n"
    "WFFFFFFFFFFFFFFDDDDDDDDDDDDDDW\n"
    "WFFFFFFFFFFFFFFDDDDDDDDDDDDDDW\n"
    "WPPPPPPPPPPPPPPPPPPPPPPPPPPPPW\n"
    "WPPPPPPPPPPPPPPPPPPPPPPPPPPPPW\n"
    "WBBBBBBBBBBBBBBBBBBBBBBBBBBBBW\n"
    "WBBBBBBBBBBBBBBBBBBBBBBBBBBBBW\n"
    "WBBBBBBBBBBBBBBBBBBBBBBBBBBBBW\n"
    "WWWWWWWWWWWWWWWWWWWWWWWWWWWWWW\n";

constexpr const char* kCspMini =
    "WWWWWWWWWWWWWWWW\n"
    "WFFFFFFFDDDDDDDW\n"
    "WFFFFFFFDDDDDDDW\n"
    "WPPPPPPPPPPPPPPW\n"
    "WBBBBBBBBBBBBBBW\n"
    "WBBBBBBBBBBBBBBW\n"
    "WWWWWWWWWWWWWWWW\n";

std::vector<std::string> split_rows(const std::string& ascii) {
  std::vector<std::string> rows;
  std::istringstream in(ascii);
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (!line.empty()) rows.push_back(line);
  }
  if (rows.empty()) throw MapParseError("map: empty");
  for (const auto& r : rows)
    if (r.size() != rows[0].size())
      throw MapParseError("map: ragged rows (wrong dimensions)");
  return rows;
}

}  // namespace

const MapAsset& map_asset(const std::string& name) {
  static const std::vector<MapAsset> kAssets = {
      {"ah", kAhFull, EnvKind::AllelopathicHarvest, 16, 1.0},
      {"ah-mini", kAhMini, EnvKind::AllelopathicHarvest, 4, 384.0 / 40.0},
      {"csp", kCspFull, EnvKind::CleanUp, 7, 1.0},
      {"csp-mini", kCspMini, EnvKind::CleanUp, 3, 1.0},
  };
  for (const auto& a : kAssets)
    if (a.name == name) return a;
  throw ConfigError("unknown map: " + name);
}

WorldState parse_ah_map(const std::string& ascii) {
  const auto rows = split_rows(ascii);
  WorldState s;
  s.kind = EnvKind::AllelopathicHarvest;
  s.geom.rows = static_cast<int>(rows.size());
  s.geom.cols = static_cast<int>(rows[0].size());
  s.geom.toroidal = true;
  s.geom.wall.assign(s.geom.rows * s.geom.cols, 0);
  s.berry_at.assign(s.geom.rows * s.geom.cols, -1);
  s.pollution_at.assign(s.geom.rows * s.geom.cols, -1);
  s.apple_at.assign(s.geom.rows * s.geom.cols, -1);
  for (int r = 0; r < s.geom.rows; ++r) {
    for (int c = 0; c < s.geom.cols; ++c) {
      const char ch = rows[r][c];
      const Coord pos{static_cast<int16_t>(r), static_cast<int16_t>(c)};
      if (ch == 'P') {
        s.spawn_cells.push_back(pos);
      } else if (ch == '1' || ch == '2' || ch == '3') {
        BerrySite b;
        b.color = static_cast<DisplayColor>(ch - '1' + 1);  // Red/Green/Blue
        b.ripe = true;
        b.pos = pos;
        s.berry_at[s.geom.index(pos)] = static_cast<int16_t>(s.berries.size());
        s.berries.push_back(b);
        s.berry_counts[ch - '1']++;
      } else {
        throw MapParseError(std::string("ah map: unknown symbol '") + ch + "'");
      }
    }
  }
  return s;
}

WorldState parse_csp_map(const std::string& ascii) {
  const auto rows = split_rows(ascii);
  WorldState s;
  s.kind = EnvKind::CleanUp;
  s.geom.rows = static_cast<int>(rows.size());
  s.geom.cols = static_cast<int>(rows[0].size());
  s.geom.toroidal = false;
  s.geom.wall.assign(s.geom.rows * s.geom.cols, 0);
  s.berry_at.assign(s.geom.rows * s.geom.cols, -1);
  s.pollution_at.assign(s.geom.rows * s.geom.cols, -1);
  s.apple_at.assign(s.geom.rows * s.geom.cols, -1);
  for (int r = 0; r < s.geom.rows; ++r) {
    for (int c = 0; c < s.geom.cols; ++c) {
      const char ch = rows[r][c];
      const Coord pos{static_cast<int16_t>(r), static_cast<int16_t>(c)};
      switch (ch) {
        case 'W':
          s.geom.wall[s.geom.index(pos)] = 1;
          break;
        case 'P':
          s.spawn_cells.push_back(pos);
          break;
        case 'B': {
          AppleSite a;
          a.pos = pos;
          s.apple_at[s.geom.index(pos)] = static_cast<int16_t>(s.apples.size());
          s.apples.push_back(a);
          break;
        }
        case 'F':
        case 'D': {
          PollutionCell p;
          p.ptype = (ch == 'F') ? 1 : 2;
          p.present = true;
          p.pos = pos;
          s.pollution_at[s.geom.index(pos)] = static_cast<int16_t>(s.pollution.size());
          s.pollution.push_back(p);
          s.pollution_present[p.ptype - 1]++;
          break;
        }
        default:
          throw MapParseError(std::string("csp map: unknown symbol '") + ch + "'");
      }
    }
  }
  return s;
}

WorldState make_world(const MapAsset& asset, int n_agents, uint64_t episode_seed) {
  WorldState s = asset.kind == EnvKind::AllelopathicHarvest ? parse_ah_map(asset.ascii)
                                                            : parse_csp_map(asset.ascii);
  if (n_agents < 1 || n_agents > static_cast<int>(s.spawn_cells.size()))
    throw ConfigError("n_agents out of range for map");
  s.seed_streams(episode_seed);
  s.place_agents(n_agents);
  return s;
}

}  // namespace normsim
