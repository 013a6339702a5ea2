#pragma once

#include <stdexcept>
#include <string>

namespace ecsim {

/// Base class for all library errors.
struct SimError : std::runtime_error {
  explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

// Construction / validation
struct ZeroNorm final : SimError {
  using SimError::SimError;
};
struct DimensionMismatch final : SimError {
  using SimError::SimError;
};
struct InvariantViolation final : SimError {
  using SimError::SimError;
};
struct OutOfRange final : SimError {
  using SimError::SimError;
};

// Gate application / measurement
struct IndexOutOfRange final : SimError {
  using SimError::SimError;
};
struct SameQubit final : SimError {
  using SimError::SimError;
};
struct NotUnitary final : SimError {
  using SimError::SimError;
};
struct EmptyBranchList final : SimError {
  using SimError::SimError;
};
struct BadCut final : SimError {
  using SimError::SimError;
};

// Protocol preconditions
struct MaximalInput final : SimError {
  using SimError::SimError;
};

// Optical elements
struct ModeEmpty final : SimError {
  using SimError::SimError;
};
struct WrongModes final : SimError {
  using SimError::SimError;
};
struct WrongPhotonCount final : SimError {
  using SimError::SimError;
};

// Entanglement accounting
struct NotBellType final : SimError {
  using SimError::SimError;
};
struct DepthExceedsTree final : SimError {
  using SimError::SimError;
};

}  // namespace ecsim
