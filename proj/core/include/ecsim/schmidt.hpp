#pragma once

#include <vector>

#include "ecsim/state.hpp"

namespace ecsim {

/// Result of a bipartite Schmidt decomposition across a left/right qubit cut.
/// Coefficients are real, positive, sorted descending; terms below 1e-12 are
/// dropped. left[k] spans the first cut_after qubits, right[k] the rest, and
/// the original state equals sum_k coefficients[k] * left[k] (x) right[k]
/// within 1e-10.
struct SchmidtDecomposition {
  std::vector<double> coefficients;
  std::vector<PureState> left;
  std::vector<PureState> right;
};

/// Decompose across the cut after qubit `cut_after` (1-based, so the left
/// factor holds qubits 1..cut_after). Throws BadCut unless
/// 1 <= cut_after < num_qubits.
SchmidtDecomposition schmidt_extract(const PureState& state, int cut_after);

}  // namespace ecsim
