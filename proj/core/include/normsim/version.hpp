#pragma once

namespace normsim {

inline constexpr const char* kEngineVersion = "normsim-0.1.0";

}  // namespace normsim
