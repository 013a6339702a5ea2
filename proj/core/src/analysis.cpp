#include "ecsim/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "ecsim/protocol_circuit.hpp"
#include "ecsim/qnd.hpp"
#include "ecsim/schmidt.hpp"

namespace ecsim {

BranchTree build_branch_tree(const SchmidtForm& input, int depth, TreeProtocol protocol) {
  if (depth < 0) {
    throw OutOfRange("tree depth must be >= 0, got " + std::to_string(depth));
  }
  BranchTree tree;
  tree.max_depth = depth;
  tree.nodes.push_back({"root", 0, 1.0, assemble(input), depth == 0});
  if (depth == 0) return tree;

  SchmidtForm current = input;
  double survive = 1.0;
  for (int round = 1; round <= depth; ++round) {
    const double a2 = current.alpha * current.alpha;
    const double b2 = current.beta * current.beta;
    if (round > 1 && next_round_saturated(a2, b2)) {
      // Saturated: deeper rounds are below the enumeration resolution or the
      // residual leaves double range, so the previous failure node stays
      // terminal and represents every deeper cut.
      break;
    }
    const RoundResult rr =
        protocol == TreeProtocol::Circuit
            ? run_round(current)
            : (round == 1 ? qnd_round(current) : recycle_round(current));
    tree.nodes.push_back({"success@" + std::to_string(round), round, survive * rr.success_prob,
                          rr.success_state, true});
    survive *= rr.failure_prob;
    tree.nodes.push_back(
        {"fail@" + std::to_string(round), round, survive, assemble(rr.residual), round == depth});
    current = rr.residual;
  }
  // Whatever failure node we stopped at is a leaf.
  for (auto it = tree.nodes.rbegin(); it != tree.nodes.rend(); ++it) {
    if (it->label.rfind("fail@", 0) == 0 || it->label == "root") {
      it->terminal = true;
      break;
    }
  }
  return tree;
}

double espp(const PureState& state, int cut_after) {
  const SchmidtDecomposition decomp = schmidt_extract(state, cut_after);
  if (decomp.coefficients.size() > 2 && decomp.coefficients[2] > 1e-9) {
    throw NotBellType("state has a third Schmidt coefficient " +
                      std::to_string(decomp.coefficients[2]) + " across the cut");
  }
  const double c1 = decomp.coefficients.empty() ? 0.0 : decomp.coefficients[0];
  const double c2 = decomp.coefficients.size() > 1 ? decomp.coefficients[1] : 0.0;
  const double smaller = std::min(c1, c2);
  return 2.0 * smaller * smaller;
}

double average_espp(const BranchTree& tree, int depth) {
  if (depth < 0) {
    throw OutOfRange("cut depth must be >= 0, got " + std::to_string(depth));
  }
  if (depth > tree.max_depth) {
    throw DepthExceedsTree("cut depth " + std::to_string(depth) + " exceeds tree depth " +
                           std::to_string(tree.max_depth));
  }

  // Leaves of the cut: every success node at or above the cut plus the
  // deepest continuing (failure/root) node at or above it.
  const BranchNode* continuing = nullptr;
  double total_prob = 0.0;
  double total = 0.0;
  for (const auto& node : tree.nodes) {
    if (node.depth > depth) continue;
    if (node.label.rfind("success@", 0) == 0) {
      total_prob += node.probability;
      total += node.probability * espp(node.state, node.state.num_qubits - 1);
    } else if (continuing == nullptr || node.depth > continuing->depth) {
      continuing = &node;
    }
  }
  if (continuing == nullptr) {
    throw InvariantViolation("branch tree has no continuing node");
  }
  total_prob += continuing->probability;
  total += continuing->probability * espp(continuing->state, continuing->state.num_qubits - 1);
  if (std::abs(total_prob - 1.0) > 1e-10) {
    throw InvariantViolation("leaf probabilities sum to " + std::to_string(total_prob) +
                             ", expected 1");
  }
  return total;
}

double series_total(double alpha, int rounds) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw OutOfRange("alpha must lie strictly inside (0, 1), got " + std::to_string(alpha));
  }
  if (std::abs(alpha * alpha - 0.5) <= kMaximalTol) {
    throw OutOfRange("alpha^2 = 1/2 has nothing to concentrate");
  }
  if (rounds < 1) {
    throw OutOfRange("round count must be >= 1, got " + std::to_string(rounds));
  }

  double a = alpha * alpha;  // squared coefficients carried exactly
  double b = 1.0 - a;
  const double bound = 2.0 * std::min(a, b);
  double survive = 1.0;
  double total = 0.0;
  for (int round = 1; round <= rounds; ++round) {
    if (round > 1 && next_round_saturated(a, b)) break;
    const double p = 2.0 * a * b;
    total += survive * p;
    survive *= 1.0 - p;
    if (p < 1e-15) break;
    if (bound - total < 1e-12) break;
    const double a2 = a * a;
    const double b2 = b * b;
    a = a2 / (a2 + b2);
    b = b2 / (a2 + b2);
  }
  return total;
}

}  // namespace ecsim
