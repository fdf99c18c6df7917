#pragma once

#include <array>
#include <cstdint>

#include "normsim/frame.hpp"
#include "normsim/gridworld.hpp"

namespace normsim {

// Versioned palette/sprite table. Rendered frames are classifier inputs, so
// any change here must bump the version.
inline constexpr const char* kSpriteTableVersion = "palette-v1";

enum class PaletteIdx : uint8_t {
  Transparent = 0,
  Black,
  SoilAH,
  GroundCSP,
  Wall,
  BodyGray,
  Red,
  Green,
  Blue,
  BeamZap,
  BeamClean,
  MarkWhite,
  Apple,
  PollutionOne,
  PollutionTwo,
  Outline,
  Count
};

std::array<uint8_t, 3> palette_rgb(PaletteIdx idx);

enum class SpriteId : uint8_t {
  None = 0,
  BerryRipe,    // tinted by berry color
  BerryUnripe,  // tinted
  AppleFruit,
  PollutionPatch,  // tinted by type color
  AgentBody,       // tinted by display color; directional
  Count
};

// One grid cell's render recipe, derived purely from WorldState.
struct CellRender {
  PaletteIdx background = PaletteIdx::Black;
  SpriteId sprite = SpriteId::None;
  uint8_t world_rot = 0;  // quarter turns of the sprite pattern in world space
  PaletteIdx tint = PaletteIdx::Transparent;
  uint8_t marked = 0;   // overlay mark stripes
  PaletteIdx beam = PaletteIdx::Transparent;  // overlay beam dots
};

// Paints the 8x8 cell at view-cell (vy, vx) of `frame`. `view_rot` is the
// viewer's orientation; the blitted pattern is the sprite's world pattern
// rotated so the viewer's forward axis points up.
void blit_cell(Frame& frame, int vy, int vx, const CellRender& cell, uint8_t view_rot);

}  // namespace normsim
