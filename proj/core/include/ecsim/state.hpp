#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "ecsim/errors.hpp"

namespace ecsim {

using Amplitude = std::complex<double>;

// Shared numerical tolerances. Algebraic identities on small registers hold
// to nearly full double precision; SVD-based extraction loses a couple of
// digits, hence the looser decomposition tolerance.
inline constexpr double kNormTol = 1e-12;
inline constexpr double kDecompositionTol = 1e-10;
inline constexpr double kMaximalTol = 1e-9;
inline constexpr double kBranchPruneTol = 1e-14;

// Iteration floor on the squared minor coefficient of the next failure
// residual. Below it the two-term form saturates double precision: the
// major coefficient sits within a few ulp of 1 and the minor one, re-derived
// as sqrt(1 - alpha^2), can no longer be carried to 1e-12 absolute accuracy.
// Deeper rounds contribute less than ~1e-6 of probability, so iterating
// routes treat this as converged and stop.
inline constexpr double kResidualSqFloor = 1e-13;

/// Dense state vector over num_qubits qubits.
///
/// Basis-index convention: qubit 1 is the most significant bit of the index,
/// qubit num_qubits the least significant. Appended qubits (ancillas) always
/// land at the least significant end, so tensor(a, b) puts b's qubits below
/// a's. Qubit arguments throughout the library are 1-based.
struct PureState {
  int num_qubits = 0;
  std::vector<Amplitude> amps;

  std::size_t dim() const { return amps.size(); }
  double norm_sq() const;
};

/// Bit position (0 = least significant) occupied by a 1-based qubit index.
inline int bit_position(int num_qubits, int qubit) { return num_qubits - qubit; }

/// Value of the given qubit in a basis index.
inline int qubit_value(std::size_t basis_index, int num_qubits, int qubit) {
  return static_cast<int>((basis_index >> bit_position(num_qubits, qubit)) & 1u);
}

/// Validating constructor for PureState.
///
/// Normalizes the amplitude vector. Throws ZeroNorm when the norm is too
/// small to normalize, DimensionMismatch when amps.size() != 2^num_qubits,
/// InvariantViolation on non-finite entries. If renormalization_warning is
/// non-null it is set when the input norm deviated from 1 by more than 1e-9.
PureState make_pure_state(int num_qubits, std::vector<Amplitude> amps,
                          bool* renormalization_warning = nullptr);

/// Computational basis state |index> on num_qubits qubits.
PureState basis_state(int num_qubits, std::size_t index);

/// Kronecker product; b's qubits become the least significant block.
PureState tensor(const PureState& a, const PureState& b);

/// <a|b>; throws DimensionMismatch when sizes differ.
Amplitude inner_product(const PureState& a, const PureState& b);

/// |<a|b>|^2 — global-phase-insensitive overlap.
double fidelity(const PureState& a, const PureState& b);

/// Largest |a_i - b_i| over the amplitude vectors (phase sensitive).
double max_abs_diff(const PureState& a, const PureState& b);

/// Two-term Schmidt form alpha*|phi0>|0> + beta*|phi1>|1> across the cut
/// that separates the n system qubits from one extra qubit.
///
/// Invariants enforced at construction: alpha in (0,1) with beta =
/// sqrt(1 - alpha^2); phi0 and phi1 normalized, mutually orthogonal, and of
/// equal qubit count. alpha and beta are real and positive by convention —
/// phases are absorbed into phi0/phi1.
struct SchmidtForm {
  double alpha = 0.0;
  double beta = 0.0;
  PureState phi0;
  PureState phi1;

  SchmidtForm(double alpha_in, PureState phi0_in, PureState phi1_in);

  int system_qubits() const { return phi0.num_qubits; }

  /// True when the coefficients are balanced within 1e-9 of alpha^2 = 1/2;
  /// concentration protocols reject such inputs.
  bool is_maximal() const;
};

/// Expand a SchmidtForm into its (n+1)-qubit state vector: the extra qubit
/// sits at the least significant position.
PureState assemble(const SchmidtForm& form);

/// Built-in family of system-pair states (phi0, phi1) used throughout the
/// test and verification tooling.
struct CatalogId {
  enum class Kind { Bell, Ghz3, CatN, GhzLike, Q5, Cluster4 };

  Kind kind = Kind::Bell;
  int cat_n = 0;  // only meaningful for CatN

  static CatalogId bell() { return {Kind::Bell, 0}; }
  static CatalogId ghz3() { return {Kind::Ghz3, 0}; }
  static CatalogId cat(int n);
  static CatalogId ghz_like() { return {Kind::GhzLike, 0}; }
  static CatalogId q5() { return {Kind::Q5, 0}; }
  static CatalogId cluster4() { return {Kind::Cluster4, 0}; }

  /// Parse "bell", "ghz3", "ghzlike", "q5", "cluster4", or "cat<n>".
  /// Throws OutOfRange on anything else.
  static CatalogId parse(const std::string& text);

  std::string name() const;

  /// System qubit count n of phi0/phi1 (the assembled state has n+1).
  int system_qubits() const;
};

/// Construct the catalog entry with the requested alpha (beta follows).
/// Throws OutOfRange when alpha is outside (0,1).
SchmidtForm catalog_state(const CatalogId& id, double alpha);

}  // namespace ecsim
