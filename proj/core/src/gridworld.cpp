#include "normsim/gridworld.hpp"

#include <algorithm>

namespace normsim {

BeamFootprint beam_footprint(const GridGeometry& geom, Coord pos, Orientation orientation,
                             BeamKind kind, const BlockerPred& blocker) {
  BeamFootprint fp;
  const Coord fwd = forward_of(orientation);
  const Coord right = right_of(orientation);

  struct ColumnSpec {
    int lateral;        // -1 left, 0 center, +1 right
    int start_forward;  // forward offset of the first cell
  };
  static constexpr ColumnSpec kZapColumns[3] = {{-1, 0}, {0, 1}, {1, 0}};

  const int first = (kind == BeamKind::Zap) ? 0 : 1;
  const int last = (kind == BeamKind::Zap) ? 2 : 1;
  for (int ci = first; ci <= last; ++ci) {
    const ColumnSpec spec = kZapColumns[ci];
    Coord c = pos;
    bool alive = true;
    if (spec.lateral != 0)
      alive = geom.advance(c, {static_cast<int16_t>(spec.lateral * right.row),
                               static_cast<int16_t>(spec.lateral * right.col)});
    for (int f = 0; alive && f < spec.start_forward; ++f) alive = geom.advance(c, fwd);
    for (int n = 0; alive && n < 3; ++n) {
      fp.columns[ci].push_back(c);
      if (blocker(c)) {
        fp.blocked_at[ci] = n;
        break;
      }
      alive = geom.advance(c, fwd);
    }
  }
  return fp;
}

bool in_observation_window(const GridGeometry& geom, Coord pos, Orientation orientation,
                           Coord cell) {
  const Coord d = geom.delta(pos, cell);
  const Coord fwd = forward_of(orientation);
  const Coord right = right_of(orientation);
  const int f = d.row * fwd.row + d.col * fwd.col;
  const int l = d.row * right.row + d.col * right.col;
  return f >= -kViewBehind && f <= kViewAhead && l >= -kViewSide && l <= kViewSide;
}

std::vector<Coord> resolve_moves(const GridGeometry& geom, const std::vector<AgentBody>& agents,
                                 std::vector<Coord> target, std::vector<int16_t>& occupant,
                                 RngStream& rng) {
  const int n = static_cast<int>(agents.size());

  // Contested cells: exactly one mover wins, chosen uniformly. Iterate cells
  // in row-major order so the draw sequence is reproducible.
  std::vector<std::vector<int>> incoming(geom.rows * geom.cols);
  for (int i = 0; i < n; ++i) {
    if (agents[i].removed()) continue;
    if (target[i] == agents[i].pos) continue;
    incoming[geom.index(target[i])].push_back(i);
  }
  for (auto& movers : incoming) {
    if (movers.size() < 2) continue;
    const uint32_t win = rng.next_below(static_cast<uint32_t>(movers.size()));
    for (size_t k = 0; k < movers.size(); ++k)
      if (k != win) target[movers[k]] = agents[movers[k]].pos;
  }

  // Chain resolution: a mover goes through only if its target cell ends up
  // vacated. Cycles (swaps and longer rotations) block entirely.
  enum Status : uint8_t { kUnknown, kMoves, kStays };
  std::vector<Status> status(n, kUnknown);
  for (int i = 0; i < n; ++i)
    if (agents[i].removed() || target[i] == agents[i].pos) status[i] = kStays;

  std::vector<int> path;
  for (int i = 0; i < n; ++i) {
    if (status[i] != kUnknown) continue;
    path.clear();
    int cur = i;
    Status verdict = kMoves;
    while (true) {
      path.push_back(cur);
      const int16_t occ = occupant[geom.index(target[cur])];
      if (occ < 0) break;
      if (status[occ] == kStays) {
        verdict = kStays;
        break;
      }
      if (status[occ] == kMoves) break;
      if (std::find(path.begin(), path.end(), occ) != path.end()) {
        verdict = kStays;
        break;
      }
      cur = occ;
    }
    for (int a : path) status[a] = verdict;
  }

  std::vector<Coord> result(n);
  for (int i = 0; i < n; ++i) {
    result[i] = (status[i] == kMoves) ? target[i] : agents[i].pos;
    if (!agents[i].removed() && status[i] == kMoves) occupant[geom.index(agents[i].pos)] = -1;
  }
  for (int i = 0; i < n; ++i)
    if (!agents[i].removed() && status[i] == kMoves) occupant[geom.index(result[i])] = i;
  return result;
}

}  // namespace normsim
