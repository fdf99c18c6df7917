#pragma once

#include <stdexcept>
#include <string>

namespace normsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct MapParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidActionId : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ZapUnavailable : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShapeMismatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EmptyBatch : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DegenerateEvalSet : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ShiftTooLarge : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NonFiniteLoss : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidRange : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnknownPreset : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ReplayError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BothZero : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace normsim
