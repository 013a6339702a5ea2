#pragma once

#include <string>
#include <vector>

#include "ecsim/optics.hpp"
#include "ecsim/protocol_circuit.hpp"
#include "ecsim/state.hpp"

namespace ecsim {

/// Phase class picked up by the probe beam in the cross-Kerr cell: photons
/// of equal polarization shift the probe by one unit, the HV pair by two,
/// the VH pair not at all. The unit shift is kept symbolic — only the class
/// matters for discrimination.
enum class PhaseClass { Zero, Theta, TwoTheta };

std::string to_string(PhaseClass c);

/// Optical term annotated with its probe phase class.
struct TaggedTerm {
  Amplitude amp;
  int branch = 0;
  PhotonConfig config;
  PhaseClass tag = PhaseClass::Zero;
};

struct TaggedState {
  PureState phi0;
  PureState phi1;
  std::vector<TaggedTerm> terms;

  double class_weight(PhaseClass c) const;
};

/// Tag every term of a two-photon a/b state with its probe phase class
/// (polarization of the a photon first, then b). Throws WrongPhotonCount
/// when a term does not hold exactly two photons, WrongModes when they are
/// not one-per-mode in a and b.
TaggedState qnd_parity_tag(const PhotonicState& state);

/// Coherent split of a tagged state into the kept (Theta) part and the
/// recycled (Zero + TwoTheta) part, both renormalized and returned in the
/// original photonic encoding.
struct HomodyneSplit {
  double keep_prob = 0.0;
  PhotonicState keep;
  double recycle_prob = 0.0;
  PhotonicState recycle;
};

HomodyneSplit homodyne_split(const TaggedState& state);

/// Homodyne discrimination of the probe phase: branch "keep" collects the
/// Theta class, branch "recycle" the rest. Post states are decoded to the
/// (n+2)-qubit register (photon a above photon b); branches below the
/// pruning threshold are dropped.
std::vector<BranchOutcome> homodyne_select(const TaggedState& state);

/// One full QND round from a fresh two-photon encoding: encode, flip the b
/// photon, parity-tag, homodyne-select, and detect the kept b photon.
/// Throws MaximalInput for balanced inputs.
RoundResult qnd_round(const SchmidtForm& input);

/// One recycling round: retire the failed round's b photon through a
/// 45-degree rotation and detection (both detector outcomes collapse, after
/// the phase-flip correction, onto the same single-photon state), attach a
/// fresh ancilla photon carrying the current coefficients, and run the
/// parity tag + homodyne selection again. Throws MaximalInput for balanced
/// residuals.
RoundResult recycle_round(const SchmidtForm& residual);

/// Full iterated QND protocol. Same recording and stopping rules as
/// iterate(); produces identical records for identical inputs.
std::vector<IterationRecord> run_qnd(const SchmidtForm& input, int max_rounds);

}  // namespace ecsim
