#include "ecsim/protocol_circuit.hpp"

#include <algorithm>
#include <cmath>

namespace ecsim {

namespace {

const BranchOutcome* find_branch(const std::vector<BranchOutcome>& branches,
                                 const std::string& label) {
  for (const auto& b : branches) {
    if (b.label == label) return &b;
  }
  return nullptr;
}

}  // namespace

PureState attach_ancilla(const SchmidtForm& input) {
  if (input.is_maximal()) {
    throw MaximalInput("input is already maximally entangled (alpha^2 = 1/2)");
  }
  PureState ancilla;
  ancilla.num_qubits = 1;
  ancilla.amps = {Amplitude{input.alpha, 0.0}, Amplitude{input.beta, 0.0}};
  return tensor(assemble(input), ancilla);
}

RoundResult run_round(const SchmidtForm& input) {
  const PureState joint = attach_ancilla(input);
  const int m = joint.num_qubits;  // n system qubits + extra + ancilla

  // Copy the extra qubit's value onto the ancilla and read the ancilla out.
  // The cross terms (weight 2*alpha^2*beta^2) flip it; reading 1 heralds a
  // balanced pair of survivors.
  const PureState evolved = apply_cnot(joint, m - 1, m);
  const auto branches = measure_qubit(evolved, m);

  const BranchOutcome* success = find_branch(branches, "1");
  const BranchOutcome* failure = find_branch(branches, "0");
  if (success == nullptr || failure == nullptr) {
    throw InvariantViolation(
        "round branch missing: success weight below the enumeration resolution");
  }

  RoundResult result{success->probability, failure->probability,
                     drop_qubit(success->post_state, m, 1),
                     [&] {
                       // Project the failure survivor back onto the two-term
                       // form; both coefficients stay real and positive.
                       const PureState fail_state = drop_qubit(failure->post_state, m, 0);
                       const Amplitude c0 =
                           inner_product(tensor(input.phi0, basis_state(1, 0)), fail_state);
                       const Amplitude c1 =
                           inner_product(tensor(input.phi1, basis_state(1, 1)), fail_state);
                       if (std::abs(c0.imag()) > kNormTol || std::abs(c1.imag()) > kNormTol ||
                           c0.real() <= 0.0 || c1.real() <= 0.0) {
                         throw InvariantViolation("failure branch left the two-term form");
                       }
                       if (std::abs(std::norm(c0) + std::norm(c1) - 1.0) > kNormTol) {
                         throw InvariantViolation("failure branch leaked outside phi0/phi1 span");
                       }
                       if (c0.real() >= 1.0) {
                         throw InvariantViolation(
                             "failure residual underflows to a product state; the input is "
                             "beyond double-precision concentration range");
                       }
                       SchmidtForm residual(c0.real(), input.phi0, input.phi1);
                       // The form re-derives beta from alpha, which cancels
                       // catastrophically for tiny minor weights; the squares
                       // stay exact to ~1e-15, so compare those.
                       if (std::abs(residual.beta * residual.beta - std::norm(c1)) > kNormTol) {
                         throw InvariantViolation("residual coefficients are inconsistent");
                       }
                       return residual;
                     }()};

  if (std::abs(result.success_prob + result.failure_prob - 1.0) > kNormTol) {
    throw InvariantViolation("branch probabilities do not sum to 1");
  }
  // The success branch must be maximally entangled across the system/extra
  // cut: compare against the balanced assembly of the same branch states.
  const PureState expected_mes =
      assemble(SchmidtForm(1.0 / std::sqrt(2.0), input.phi0, input.phi1));
  if (fidelity(result.success_state, expected_mes) < 1.0 - kNormTol) {
    throw InvariantViolation("success branch is not the balanced two-term state");
  }
  return result;
}

bool next_round_saturated(double alpha_sq, double beta_sq) {
  const double upcoming = 2.0 * alpha_sq * beta_sq;
  if (upcoming < kBranchPruneTol) return true;
  const double a4 = alpha_sq * alpha_sq;
  const double b4 = beta_sq * beta_sq;
  return std::min(a4, b4) / (a4 + b4) < kResidualSqFloor;
}

std::vector<IterationRecord> iterate(const SchmidtForm& input, int max_rounds) {
  if (max_rounds < 1) {
    throw OutOfRange("round count must be >= 1, got " + std::to_string(max_rounds));
  }
  const double bound = asymptotic_bound(input);
  std::vector<IterationRecord> records;
  records.reserve(static_cast<std::size_t>(std::min(max_rounds, 64)));

  SchmidtForm current = input;
  double survive = 1.0;
  double cumulative = 0.0;
  for (int round = 1; round <= max_rounds; ++round) {
    // After the first round the success weight collapses double
    // exponentially; stop before it falls under the measurement pruning
    // resolution or the residual drops out of double range.
    const double a2 = current.alpha * current.alpha;
    const double b2 = current.beta * current.beta;
    if (round > 1 && next_round_saturated(a2, b2)) break;

    const RoundResult rr = run_round(current);
    cumulative += survive * rr.success_prob;
    survive *= rr.failure_prob;
    records.push_back({round, current.alpha, current.beta, rr.success_prob, cumulative});

    if (rr.success_prob < 1e-15) break;
    if (bound - cumulative < 1e-12) break;
    current = rr.residual;
  }
  return records;
}

double asymptotic_bound(const SchmidtForm& input) {
  return 2.0 * std::min(input.alpha * input.alpha, input.beta * input.beta);
}

}  // namespace ecsim
