#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ecsim/state.hpp"

namespace ecsim {

// Single-qubit gate matrices. r45 is the balanced real rotation mapping
// |0> -> (|0>+|1>)/sqrt(2) and |1> -> (|0>-|1>)/sqrt(2); it doubles as the
// Hadamard and as the 45-degree polarization rotation of the optical model.
Eigen::Matrix2cd pauli_x();
Eigen::Matrix2cd pauli_z();
Eigen::Matrix2cd r45();

/// Apply a 2x2 unitary to one qubit (1-based index).
/// Throws IndexOutOfRange for a bad index, NotUnitary when
/// max|U^dag U - I| > 1e-12.
PureState apply_single_qubit(const PureState& state, int qubit, const Eigen::Matrix2cd& u);

/// CNOT with 1-based control/target. Throws IndexOutOfRange / SameQubit.
PureState apply_cnot(const PureState& state, int control, int target);

/// One outcome of a projective measurement or other probabilistic split:
/// label, probability, and the normalized post-measurement state (the full
/// register is kept; see drop_qubit to peel a now-determined qubit off).
struct BranchOutcome {
  std::string label;
  double probability = 0.0;
  PureState post_state;
};

/// Z-basis measurement of one qubit. Returns the surviving branches, labeled
/// "0" and "1", in that order; branches with probability below 1e-14 are
/// pruned. Probabilities of the returned branches sum to 1 within 1e-12.
std::vector<BranchOutcome> measure_qubit(const PureState& state, int qubit);

/// Remove a qubit whose value is determined (all amplitude on `outcome`),
/// e.g. after measurement. Throws InvariantViolation when the qubit still
/// carries weight > 1e-12 on the other value.
PureState drop_qubit(const PureState& state, int qubit, int outcome);

/// Draw one branch from a normalized branch list using the SplitMix64 stream
/// seeded with `seed`. Returns the chosen branch and the follow-on seed so a
/// caller can chain draws. Throws EmptyBranchList on an empty list and
/// InvariantViolation when the probabilities do not sum to 1 within 1e-9.
std::pair<BranchOutcome, std::uint64_t> sample_branch(const std::vector<BranchOutcome>& branches,
                                                      std::uint64_t seed);

}  // namespace ecsim
