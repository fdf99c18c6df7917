#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "normsim/rng.hpp"

namespace normsim {

enum class Orientation : uint8_t { North = 0, East = 1, South = 2, West = 3 };
enum class DisplayColor : uint8_t { Gray = 0, Red = 1, Green = 2, Blue = 3 };

// Stable action-id table shared by both environments.
// 8+ are environment tools: AH plant-red/green/blue = 8/9/10, CSP clean = 8.
namespace action {
inline constexpr int kNoop = 0;
inline constexpr int kMoveUp = 1;
inline constexpr int kMoveLeft = 2;
inline constexpr int kMoveDown = 3;
inline constexpr int kMoveRight = 4;
inline constexpr int kTurnLeft = 5;
inline constexpr int kTurnRight = 6;
inline constexpr int kZap = 7;
inline constexpr int kPlantRed = 8;
inline constexpr int kPlantGreen = 9;
inline constexpr int kPlantBlue = 10;
inline constexpr int kClean = 8;
}  // namespace action

struct Coord {
  int16_t row = 0;
  int16_t col = 0;
  bool operator==(const Coord&) const = default;
};

// (row, col) deltas; row grows south, col grows east.
inline Coord forward_of(Orientation o) {
  static constexpr Coord k[4] = {{-1, 0}, {0, 1}, {1, 0}, {0, -1}};
  return k[static_cast<int>(o)];
}
inline Coord right_of(Orientation o) {
  return forward_of(static_cast<Orientation>((static_cast<int>(o) + 1) & 3));
}
inline Orientation turned(Orientation o, int quarter_turns) {
  return static_cast<Orientation>((static_cast<int>(o) + quarter_turns) & 3);
}

// Displacement of a movement action relative to the agent's rotation
// (rotation 1 + Up moves East).
inline Coord move_delta(int act, Orientation o) {
  switch (act) {
    case action::kMoveUp: return forward_of(o);
    case action::kMoveLeft: return forward_of(turned(o, 3));
    case action::kMoveDown: return forward_of(turned(o, 2));
    case action::kMoveRight: return right_of(o);
    default: return {0, 0};
  }
}

struct AgentBody {
  Coord pos;
  Orientation orientation = Orientation::North;
  DisplayColor display_color = DisplayColor::Gray;
  int16_t mark_timer = 0;      // 50 on zap, fades to 0
  int16_t freeze_timer = 0;    // 25 on first zap
  int16_t removal_timer = 0;   // 25 on zap while marked
  int16_t zap_cooldown = 0;
  int16_t tool_cooldown = 0;
  int16_t eat_streak = 0;      // CSP: consecutive eats since last successful clean
  DisplayColor taste = DisplayColor::Red;  // AH taste preference (Red or Green)

  bool removed() const { return removal_timer > 0; }
  bool frozen() const { return freeze_timer > 0; }
  bool marked() const { return mark_timer > 0; }
};

// Grid geometry: AH is toroidal, CSP is bounded with walls.
struct GridGeometry {
  int rows = 0;
  int cols = 0;
  bool toroidal = false;
  std::vector<uint8_t> wall;  // rows*cols

  int index(Coord c) const { return c.row * cols + c.col; }
  bool is_wall(Coord c) const { return wall[index(c)] != 0; }

  // Moves one step from `c` by `d`; returns false when leaving a bounded grid
  // or entering a wall.
  bool advance(Coord& c, Coord d) const {
    int r = c.row + d.row, q = c.col + d.col;
    if (toroidal) {
      r = (r % rows + rows) % rows;
      q = (q % cols + cols) % cols;
    } else if (r < 0 || r >= rows || q < 0 || q >= cols) {
      return false;
    }
    Coord n{static_cast<int16_t>(r), static_cast<int16_t>(q)};
    if (is_wall(n)) return false;
    return c = n, true;
  }

  // Shortest wrapped delta from a to b (plain difference when bounded).
  Coord delta(Coord a, Coord b) const {
    int dr = b.row - a.row, dc = b.col - a.col;
    if (toroidal) {
      if (dr > rows / 2) dr -= rows;
      if (dr < -(rows - 1) / 2) dr += rows;
      if (dc > cols / 2) dc -= cols;
      if (dc < -(cols - 1) / 2) dc += cols;
    }
    return {static_cast<int16_t>(dr), static_cast<int16_t>(dc)};
  }
};

enum class BeamKind : uint8_t { Zap = 0, Narrow = 1 };

// Columns hold cells near-to-far after truncation at the first blocker
// (blocker cell included). Zap: left/center/right, side columns start at
// forward offset 0, the center at offset 1; narrow beams are center-only.
struct BeamFootprint {
  std::array<std::vector<Coord>, 3> columns;  // 0=left, 1=center, 2=right
  std::array<int, 3> blocked_at = {-1, -1, -1};

  size_t cell_count() const {
    return columns[0].size() + columns[1].size() + columns[2].size();
  }
  template <typename F>
  void for_each_cell(F&& f) const {
    for (const auto& col : columns)
      for (Coord c : col) f(c);
  }
};

using BlockerPred = std::function<bool(Coord)>;

BeamFootprint beam_footprint(const GridGeometry& geom, Coord pos, Orientation orientation,
                             BeamKind kind, const BlockerPred& blocker);

// 11x11 egocentric window: 9 cells ahead, 1 behind, 5 per side.
inline constexpr int kViewAhead = 9;
inline constexpr int kViewBehind = 1;
inline constexpr int kViewSide = 5;
inline constexpr int kViewCells = 11;
inline constexpr int kCellPixels = 8;
inline constexpr int kObsPixels = kViewCells * kCellPixels;  // 88

// True when `cell` falls inside the observation window of an agent at
// `pos`/`orientation`.
bool in_observation_window(const GridGeometry& geom, Coord pos, Orientation orientation,
                           Coord cell);

// Movement resolution. `target[i]` is where agent i wants to be (equal to its
// current position for non-movers). Contested cells are won uniformly at
// random; losers stay; chains into vacated cells succeed; cycles block so
// agents never stack or swap through each other.
// `occupant[cell]` is the pre-move occupancy (-1 when free); updated in place.
std::vector<Coord> resolve_moves(const GridGeometry& geom, const std::vector<AgentBody>& agents,
                                 std::vector<Coord> target, std::vector<int16_t>& occupant,
                                 RngStream& rng);

}  // namespace normsim
