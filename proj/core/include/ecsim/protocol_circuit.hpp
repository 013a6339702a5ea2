#pragma once

#include <vector>

#include "ecsim/gates.hpp"
#include "ecsim/state.hpp"

namespace ecsim {

/// Outcome of one concentration round.
///
/// success_prob + failure_prob = 1 within 1e-12. success_state is the
/// maximally entangled (n+1)-qubit state reached on success (Schmidt
/// coefficients 1/sqrt(2) across the system/extra cut). residual is the
/// surviving Schmidt form on failure, ready for the next round.
struct RoundResult {
  double success_prob = 0.0;
  double failure_prob = 0.0;
  PureState success_state;
  SchmidtForm residual;
};

/// Per-round log entry of an iterated run. alpha_k/beta_k are the
/// coefficients entering round k (1-based); p_k the round's conditional
/// success probability; cumulative_success the unconditional total after the
/// round.
struct IterationRecord {
  int round = 0;
  double alpha_k = 0.0;
  double beta_k = 0.0;
  double p_k = 0.0;
  double cumulative_success = 0.0;
};

/// Adjoin the protocol ancilla: |in> (x) (alpha|0> + beta|1>) with the
/// ancilla at the least significant position, giving an (n+2)-qubit state.
/// Throws MaximalInput when the input is already balanced.
PureState attach_ancilla(const SchmidtForm& input);

/// One round of the gate-based protocol: attach the ancilla, CNOT from the
/// extra qubit (n+1) onto the ancilla (n+2), measure the ancilla. Outcome 1
/// heralds success. Throws MaximalInput via attach_ancilla.
RoundResult run_round(const SchmidtForm& input);

/// Saturation predicate shared by every iterating route (gate-based, QND,
/// branch trees, and the closed-form series): a further round at squared
/// coefficients (alpha_sq, beta_sq) is pointless when its success weight
/// 2*alpha_sq*beta_sq falls below the branch-pruning resolution, or when the
/// failure residual's squared minor coefficient min(a^4,b^4)/(a^4+b^4) would
/// drop below kResidualSqFloor and the two-term form saturates double
/// precision.
bool next_round_saturated(double alpha_sq, double beta_sq);

/// Run up to max_rounds rounds, feeding each failure residual into the next
/// round. Stops early when next_round_saturated() reports the upcoming round
/// as numerically meaningless, when p_k < 1e-15, or when the cumulative
/// total is within 1e-12 of the 2*min(alpha^2, beta^2) bound. Throws
/// OutOfRange when max_rounds < 1.
std::vector<IterationRecord> iterate(const SchmidtForm& input, int max_rounds);

/// Asymptotic ceiling of the cumulative success probability.
double asymptotic_bound(const SchmidtForm& input);

}  // namespace ecsim
