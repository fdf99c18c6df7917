#pragma once

#include <string>

#include "normsim/frame.hpp"

namespace normsim {

// Debug dump of a rendered frame. Throws std::runtime_error on IO failure.
void write_png(const Frame& frame, const std::string& path);

}  // namespace normsim
