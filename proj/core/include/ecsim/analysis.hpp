#pragma once

#include <string>
#include <vector>

#include "ecsim/state.hpp"

namespace ecsim {

/// Node of an unconditional-probability branch tree: `probability` is the
/// weight of reaching the node from the root, not the conditional branch
/// weight. Success nodes are terminal; failure nodes branch again until the
/// tree saturates or the requested depth is reached.
struct BranchNode {
  std::string label;
  int depth = 0;
  double probability = 0.0;
  PureState state;
  bool terminal = false;
};

struct BranchTree {
  std::vector<BranchNode> nodes;
  int max_depth = 0;
};

enum class TreeProtocol { Circuit, Qnd };

/// Expand the round-by-round outcome tree of a protocol to `depth` rounds.
/// Expansion stops early ("saturates") when next_round_saturated() reports
/// the upcoming round as numerically meaningless; the last failure node then
/// stays terminal and represents all deeper cuts. Throws OutOfRange when
/// depth < 0, MaximalInput for balanced inputs when depth >= 1.
BranchTree build_branch_tree(const SchmidtForm& input, int depth, TreeProtocol protocol);

/// Entanglement success-probability potential of a two-term state across the
/// given cut: 2 * min(c1^2, c2^2) over its Schmidt coefficients. Throws
/// NotBellType when a third coefficient exceeds 1e-9.
double espp(const PureState& state, int cut_after);

/// Probability-weighted ESPP over the leaves of the tree cut at `depth`:
/// success leaves up to the cut plus the deepest failure node at or above
/// it. Conserved across depths. Throws DepthExceedsTree when depth >
/// tree.max_depth, InvariantViolation when the leaf probabilities do not sum
/// to 1 within 1e-10.
double average_espp(const BranchTree& tree, int depth);

/// Closed-form cumulative success probability of the iterated protocol,
/// computed purely from the coefficient recurrence (no state vectors):
/// p_k = 2 a_k b_k with (a, b) -> (a^2, b^2)/(a^2 + b^2) between rounds,
/// accumulated over up to `rounds` rounds with the same stopping rules as
/// iterate(). Serves as an independent cross-check of the simulated path.
/// Throws OutOfRange when alpha is outside (0,1), balanced within 1e-9, or
/// rounds < 1.
double series_total(double alpha, int rounds);

}  // namespace ecsim
