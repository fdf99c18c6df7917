#include "normsim/sprites.hpp"

#include <cstring>

namespace normsim {
namespace {

constexpr std::array<std::array<uint8_t, 3>, static_cast<size_t>(PaletteIdx::Count)> kPalette = {{
    {0, 0, 0},        // Transparent (unused as a color)
    {0, 0, 0},        // Black
    {58, 40, 26},     // SoilAH
    {64, 62, 58},     // GroundCSP
    {96, 96, 100},    // Wall
    {150, 150, 150},  // BodyGray
    {212, 50, 46},    // Red
    {56, 188, 74},    // Green
    {70, 92, 218},    // Blue
    {248, 228, 60},   // BeamZap
    {120, 200, 240},  // BeamClean
    {255, 255, 255},  // MarkWhite
    {206, 34, 56},    // Apple
    {168, 88, 46},    // PollutionOne
    {96, 142, 62},    // PollutionTwo
    {32, 32, 32},     // Outline
}};

// Pattern legend: '.' transparent, 'T' tint color, 'O' outline, 'W' white.
using Pattern = std::array<const char*, 8>;

constexpr Pattern kBerryRipe = {
    "........",
    "..TTTT..",
    ".TTTTTT.",
    ".TTTTTT.",
    ".TTTTTT.",
    ".TTTTTT.",
    "..TTTT..",
    "........",
};
constexpr Pattern kBerryUnripe = {
    "........",
    "........",
    "........",
    "...TT...",
    "...TT...",
    "........",
    "........",
    "........",
};
constexpr Pattern kApple = {
    "........",
    "........",
    "..TTTT..",
    ".TTTTTT.",
    ".TTTTTT.",
    "..TTTT..",
    "........",
    "........",
};
constexpr Pattern kPollution = {
    "T..TT..T",
    ".TT..TT.",
    "..TTT..T",
    "TT..TT..",
    "..TT..TT",
    "T..TTT..",
    ".TT..TT.",
    "T..TT..T",
};
// Directional body: the light "nose" band marks the facing edge (north in
// the base pattern).
constexpr Pattern kAgent = {
    "..WWWW..",
    ".OTTTTO.",
    ".TTTTTT.",
    ".TTTTTT.",
    ".TTTTTT.",
    ".TTTTTT.",
    ".OTTTTO.",
    "........",
};
constexpr Pattern kMark = {
    "W......W",
    ".W....W.",
    "........",
    "........",
    "........",
    "........",
    ".W....W.",
    "W......W",
};

struct CompiledSprite {
  // 4 rotation variants, 64 cells each; values: 0 none, 1 tint,
  // otherwise a PaletteIdx.
  std::array<std::array<uint8_t, 64>, 4> rot;
};

uint8_t classify(char c) {
  switch (c) {
    case 'T': return 1;
    case 'O': return static_cast<uint8_t>(PaletteIdx::Outline);
    case 'W': return static_cast<uint8_t>(PaletteIdx::MarkWhite);
    default: return 0;
  }
}

// Quarter-turn family used by the egocentric view transform:
// rot1[y][x] = src[x][7-y]; rotk composes rot1 k times.
void rotate_once(const std::array<uint8_t, 64>& src, std::array<uint8_t, 64>& dst) {
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) dst[y * 8 + x] = src[x * 8 + (7 - y)];
}

CompiledSprite compile(const Pattern& p) {
  CompiledSprite s{};
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) s.rot[0][y * 8 + x] = classify(p[y][x]);
  for (int r = 1; r < 4; ++r) rotate_once(s.rot[r - 1], s.rot[r]);
  return s;
}

struct SpriteTable {
  std::array<CompiledSprite, static_cast<size_t>(SpriteId::Count)> sprites;
  CompiledSprite mark;
  SpriteTable() {
    sprites[static_cast<size_t>(SpriteId::BerryRipe)] = compile(kBerryRipe);
    sprites[static_cast<size_t>(SpriteId::BerryUnripe)] = compile(kBerryUnripe);
    sprites[static_cast<size_t>(SpriteId::AppleFruit)] = compile(kApple);
    sprites[static_cast<size_t>(SpriteId::PollutionPatch)] = compile(kPollution);
    sprites[static_cast<size_t>(SpriteId::AgentBody)] = compile(kAgent);
    mark = compile(kMark);
  }
};

const SpriteTable& table() {
  static const SpriteTable t;
  return t;
}

}  // namespace

std::array<uint8_t, 3> palette_rgb(PaletteIdx idx) { return kPalette[static_cast<size_t>(idx)]; }

void blit_cell(Frame& frame, int vy, int vx, const CellRender& cell, uint8_t view_rot) {
  const int py0 = vy * kCellPixels, px0 = vx * kCellPixels;
  const auto bg = kPalette[static_cast<size_t>(cell.background)];
  for (int y = 0; y < kCellPixels; ++y) {
    uint8_t* row = frame.pixel(py0 + y, px0);
    for (int x = 0; x < kCellPixels; ++x) {
      row[x * 3] = bg[0];
      row[x * 3 + 1] = bg[1];
      row[x * 3 + 2] = bg[2];
    }
  }
  auto blit_pattern = [&](const std::array<uint8_t, 64>& pat, PaletteIdx tint) {
    const auto tc = kPalette[static_cast<size_t>(tint)];
    for (int y = 0; y < 8; ++y) {
      uint8_t* row = frame.pixel(py0 + y, px0);
      for (int x = 0; x < 8; ++x) {
        const uint8_t v = pat[y * 8 + x];
        if (v == 0) continue;
        const auto c = (v == 1) ? tc : kPalette[v];
        row[x * 3] = c[0];
        row[x * 3 + 1] = c[1];
        row[x * 3 + 2] = c[2];
      }
    }
  };
  if (cell.sprite != SpriteId::None) {
    const uint8_t r = (cell.world_rot + view_rot) & 3;
    blit_pattern(table().sprites[static_cast<size_t>(cell.sprite)].rot[r], cell.tint);
  }
  if (cell.marked) blit_pattern(table().mark.rot[view_rot & 3], PaletteIdx::MarkWhite);
  if (cell.beam != PaletteIdx::Transparent) {
    const auto c = kPalette[static_cast<size_t>(cell.beam)];
    for (int y = 0; y < 8; ++y) {
      uint8_t* row = frame.pixel(py0 + y, px0);
      for (int x = (y & 1); x < 8; x += 2) {
        row[x * 3] = c[0];
        row[x * 3 + 1] = c[1];
        row[x * 3 + 2] = c[2];
      }
    }
  }
}

}  // namespace normsim
