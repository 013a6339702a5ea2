#pragma once

#include <array>
#include <compare>
#include <string>
#include <vector>

#include "ecsim/gates.hpp"
#include "ecsim/state.hpp"

namespace ecsim {

/// Photon polarization: horizontal encodes bit 0, vertical bit 1.
enum class Pol { H = 0, V = 1 };

/// Spatial modes of the two-photon interferometer: the two source modes a/b
/// and the two beam-splitter output modes a'/b'.
enum class Mode { A = 0, B = 1, APrime = 2, BPrime = 3 };

std::string to_string(Pol p);
std::string to_string(Mode m);

/// One photon sitting in a spatial mode with a polarization.
struct Placement {
  Mode mode = Mode::A;
  Pol pol = Pol::H;

  friend auto operator<=>(const Placement&, const Placement&) = default;
};

/// Multiset of photon placements, kept sorted so configurations compare and
/// hash structurally. Bunched configurations (two photons in one mode) are
/// representable; no bosonic symmetrization factors are applied.
struct PhotonConfig {
  std::vector<Placement> placements;

  PhotonConfig() = default;
  explicit PhotonConfig(std::vector<Placement> p);

  int photons_in_mode(Mode m) const;
  int total_photons() const { return static_cast<int>(placements.size()); }

  /// Index of the unique photon in mode m; throws ModeEmpty when the count
  /// in that mode is not exactly one.
  std::size_t index_of_single_photon(Mode m) const;

  friend auto operator<=>(const PhotonConfig&, const PhotonConfig&) = default;
};

/// One term of a polarization-encoded superposition: amplitude times
/// (system branch phi0/phi1) times a photon configuration.
struct OpticalTerm {
  Amplitude amp;
  int branch = 0;  // 0 -> phi0, 1 -> phi1
  PhotonConfig config;
};

/// Superposition over (branch, configuration) pairs with the two system
/// branch states carried alongside. Terms with equal keys are merged and
/// near-zero terms pruned by canonicalize(); total weight sums to 1 for
/// normalized states.
struct PhotonicState {
  PureState phi0;
  PureState phi1;
  std::vector<OpticalTerm> terms;

  double total_weight() const;

  /// Merge duplicate (branch, config) keys, drop |amp| < 1e-15, sort.
  void canonicalize();
};

/// Output routing of the polarizing beam splitter, indexed by input mode
/// (A/B) and polarization. The standard cell transmits H from a into b',
/// reflects V from a into a', and symmetrically routes b's photon (H -> a',
/// V -> b').
struct PbsPorts {
  std::array<std::array<Mode, 2>, 2> out;  // [input A=0 / B=1][Pol]

  Mode route(Mode input, Pol p) const;
};

PbsPorts standard_pbs_ports();

/// Encode a Schmidt-form input into the two-photon optical register:
/// the system branch rides on photon a's polarization and a fresh ancilla
/// photon in mode b carries (alpha, beta) directly.
PhotonicState encode_optical(const SchmidtForm& input);

/// Half-wave plate at 90 degrees in one mode: swaps H and V of the single
/// photon there. Throws ModeEmpty when the mode does not hold exactly one
/// photon in some term.
PhotonicState hwp90(const PhotonicState& state, Mode mode);

/// Route both photons through the polarizing beam splitter. Requires one
/// photon in a and one in b per term (WrongModes otherwise). Outputs live in
/// a'/b' and may bunch.
PhotonicState pbs(const PhotonicState& state, const PbsPorts& ports = standard_pbs_ports());

/// Result of post-selecting on one photon per output mode.
struct Postselection {
  double probability = 0.0;
  PhotonicState kept;
  bool empty = false;  // set when the kept weight is below 1e-14
};

/// Keep only terms with exactly one photon in a' and one in b'; probability
/// is the discarded-inclusive weight of the kept set, and kept is
/// renormalized.
Postselection postselect_one_per_mode(const PhotonicState& state);

/// 45-degree polarization rotation of the single photon in `mode`:
/// H -> (H+V)/sqrt(2), V -> (H-V)/sqrt(2). Throws ModeEmpty as hwp90.
PhotonicState apply_r45(const PhotonicState& state, Mode mode);

/// Rotate the photon in `mode` by 45 degrees and detect it. Returns branches
/// labeled "D_H" and "D_V" whose post states are decoded back to the
/// (n+1)-qubit register carried by the remaining photon; branches below the
/// 1e-14 pruning threshold are dropped.
std::vector<BranchOutcome> r45_and_detect(const PhotonicState& state, Mode mode = Mode::BPrime);

/// Map selected modes to new ones (e.g. fold the primed outputs back onto
/// the inputs). Throws WrongModes when a target mode is already occupied by
/// a photon that is not itself being relabeled.
PhotonicState relabel_modes(const PhotonicState& state, const std::vector<std::pair<Mode, Mode>>& mapping);

/// Decode a one-photon-per-term state back to qubits: the photon must sit in
/// expected_mode in every term and its polarization becomes the last qubit.
PureState decode_single_photon(const PhotonicState& state, Mode expected_mode);

/// Decode a two-photon state (one in `first`, one in `second`) to an
/// (n+2)-qubit register, first's polarization above second's.
PureState decode_two_photons(const PhotonicState& state, Mode first, Mode second);

/// Detect the photon in `mode` behind a 45-degree rotation and apply the
/// phase-flip correction on the D_V branch. Both branches must then agree
/// (fidelity >= 1 - 1e-12); returns the common decoded state.
PureState detect_and_correct(const PhotonicState& state, Mode mode);

struct OpticsResult {
  double success_prob = 0.0;
  PureState output;  // (n+1)-qubit maximally entangled state
};

/// Single-shot optical run: encode, hwp90 on b, beam splitter, post-select
/// one photon per output mode, rotate + detect the b' photon, correct.
/// No recycling — the discarded weight is lost. Throws MaximalInput for a
/// balanced input.
OpticsResult run_optics(const SchmidtForm& input, const PbsPorts& ports = standard_pbs_ports());

}  // namespace ecsim
