#include "ecsim/gates.hpp"

#include <cmath>

#include "ecsim/rng.hpp"

namespace ecsim {

namespace {

void check_qubit_index(const PureState& state, int qubit, const char* what) {
  if (qubit < 1 || qubit > state.num_qubits) {
    throw IndexOutOfRange(std::string(what) + " qubit " + std::to_string(qubit) +
                          " out of range for " + std::to_string(state.num_qubits) + " qubits");
  }
}

}  // namespace

Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Eigen::Matrix2cd pauli_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

Eigen::Matrix2cd r45() {
  const double r = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd m;
  m << r, r, r, -r;
  return m;
}

PureState apply_single_qubit(const PureState& state, int qubit, const Eigen::Matrix2cd& u) {
  check_qubit_index(state, qubit, "target");
  const Eigen::Matrix2cd defect = u.adjoint() * u - Eigen::Matrix2cd::Identity();
  if (defect.cwiseAbs().maxCoeff() > 1e-12) {
    throw NotUnitary("2x2 matrix is not unitary within 1e-12");
  }
  const std::size_t mask = std::size_t{1} << bit_position(state.num_qubits, qubit);
  PureState out = state;
  for (std::size_t i = 0; i < out.dim(); ++i) {
    if (i & mask) continue;
    const Amplitude a0 = state.amps[i];
    const Amplitude a1 = state.amps[i | mask];
    out.amps[i] = u(0, 0) * a0 + u(0, 1) * a1;
    out.amps[i | mask] = u(1, 0) * a0 + u(1, 1) * a1;
  }
  return out;
}

PureState apply_cnot(const PureState& state, int control, int target) {
  check_qubit_index(state, control, "control");
  check_qubit_index(state, target, "target");
  if (control == target) {
    throw SameQubit("control and target must differ, both are " + std::to_string(control));
  }
  const std::size_t cmask = std::size_t{1} << bit_position(state.num_qubits, control);
  const std::size_t tmask = std::size_t{1} << bit_position(state.num_qubits, target);
  PureState out = state;
  for (std::size_t i = 0; i < out.dim(); ++i) {
    if ((i & cmask) && !(i & tmask)) {
      std::swap(out.amps[i], out.amps[i | tmask]);
    }
  }
  return out;
}

std::vector<BranchOutcome> measure_qubit(const PureState& state, int qubit) {
  check_qubit_index(state, qubit, "measured");
  const std::size_t mask = std::size_t{1} << bit_position(state.num_qubits, qubit);
  double weight[2] = {0.0, 0.0};
  for (std::size_t i = 0; i < state.dim(); ++i) {
    weight[(i & mask) ? 1 : 0] += std::norm(state.amps[i]);
  }

  std::vector<BranchOutcome> branches;
  for (int outcome = 0; outcome < 2; ++outcome) {
    const double p = weight[outcome];
    if (p < kBranchPruneTol) continue;
    BranchOutcome b;
    b.label = outcome == 0 ? "0" : "1";
    b.probability = p;
    b.post_state.num_qubits = state.num_qubits;
    b.post_state.amps.assign(state.dim(), Amplitude{0.0, 0.0});
    const double scale = 1.0 / std::sqrt(p);
    for (std::size_t i = 0; i < state.dim(); ++i) {
      const int bit = (i & mask) ? 1 : 0;
      if (bit == outcome) b.post_state.amps[i] = state.amps[i] * scale;
    }
    branches.push_back(std::move(b));
  }
  return branches;
}

PureState drop_qubit(const PureState& state, int qubit, int outcome) {
  check_qubit_index(state, qubit, "dropped");
  if (outcome != 0 && outcome != 1) {
    throw OutOfRange("qubit outcome must be 0 or 1, got " + std::to_string(outcome));
  }
  const std::size_t mask = std::size_t{1} << bit_position(state.num_qubits, qubit);
  double other_weight = 0.0;
  for (std::size_t i = 0; i < state.dim(); ++i) {
    const int bit = (i & mask) ? 1 : 0;
    if (bit != outcome) other_weight += std::norm(state.amps[i]);
  }
  if (other_weight > kNormTol) {
    throw InvariantViolation("qubit " + std::to_string(qubit) +
                             " is not determined; stray weight " + std::to_string(other_weight));
  }

  PureState out;
  out.num_qubits = state.num_qubits - 1;
  out.amps.resize(state.dim() / 2);
  const std::size_t low = mask - 1;  // bits below the dropped qubit
  for (std::size_t j = 0; j < out.amps.size(); ++j) {
    const std::size_t i = ((j & ~low) << 1) | (static_cast<std::size_t>(outcome) * mask) | (j & low);
    out.amps[j] = state.amps[i];
  }
  return out;
}

std::pair<BranchOutcome, std::uint64_t> sample_branch(const std::vector<BranchOutcome>& branches,
                                                      std::uint64_t seed) {
  if (branches.empty()) {
    throw EmptyBranchList("cannot sample from an empty branch list");
  }
  double total = 0.0;
  for (const auto& b : branches) total += b.probability;
  if (std::abs(total - 1.0) > 1e-9) {
    throw InvariantViolation("branch probabilities sum to " + std::to_string(total) +
                             ", expected 1");
  }
  SplitMix64 rng(seed);
  const double u = rng.next_double();
  double acc = 0.0;
  for (const auto& b : branches) {
    acc += b.probability;
    if (u < acc) return {b, rng.state()};
  }
  return {branches.back(), rng.state()};  // u landed in the rounding gap at 1.0
}

}  // namespace ecsim
