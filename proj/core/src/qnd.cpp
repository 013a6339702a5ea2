#include "ecsim/qnd.hpp"

#include <algorithm>
#include <cmath>

namespace ecsim {

namespace {

// Shared body of a QND round: starting from the fresh two-photon encoding of
// `current`, flip the ancilla photon, tag, and homodyne-select. Both the
// first round and every recycled round reduce to this.
RoundResult qnd_round_core(const SchmidtForm& current) {
  const PhotonicState encoded = encode_optical(current);
  const PhotonicState flipped = hwp90(encoded, Mode::B);
  const TaggedState tagged = qnd_parity_tag(flipped);
  const HomodyneSplit split = homodyne_split(tagged);

  if (split.keep_prob < kBranchPruneTol || split.recycle_prob < kBranchPruneTol) {
    throw InvariantViolation("homodyne branch below the enumeration resolution");
  }

  // Success: the Theta class holds the two balanced cross terms; detecting
  // the b photon behind a 45-degree rotation leaves the concentrated state.
  PureState success = detect_and_correct(split.keep, Mode::B);

  // Failure: the recycled part stays in the two-term form with squared
  // coefficients; read them off the photon configurations directly.
  Amplitude c0{0.0, 0.0};
  Amplitude c1{0.0, 0.0};
  for (const auto& term : split.recycle.terms) {
    if (term.branch == 0) {
      c0 += term.amp;
    } else {
      c1 += term.amp;
    }
  }
  if (std::abs(c0.imag()) > kNormTol || std::abs(c1.imag()) > kNormTol || c0.real() <= 0.0 ||
      c1.real() <= 0.0 || std::abs(std::norm(c0) + std::norm(c1) - 1.0) > kNormTol) {
    throw InvariantViolation("recycled branch left the two-term form");
  }
  if (c0.real() >= 1.0) {
    throw InvariantViolation(
        "recycled residual underflows to a product state; the input is beyond "
        "double-precision concentration range");
  }
  SchmidtForm residual(c0.real(), current.phi0, current.phi1);
  // Compare the squared coefficients: the form's re-derived beta cancels
  // catastrophically for tiny minor weights, the squares stay exact.
  if (std::abs(residual.beta * residual.beta - std::norm(c1)) > kNormTol) {
    throw InvariantViolation("recycled coefficients are inconsistent");
  }

  return {split.keep_prob, split.recycle_prob, std::move(success), std::move(residual)};
}

}  // namespace

std::string to_string(PhaseClass c) {
  switch (c) {
    case PhaseClass::Zero:
      return "0";
    case PhaseClass::Theta:
      return "theta";
    case PhaseClass::TwoTheta:
      return "2theta";
  }
  return "?";
}

double TaggedState::class_weight(PhaseClass c) const {
  double total = 0.0;
  for (const auto& t : terms) {
    if (t.tag == c) total += std::norm(t.amp);
  }
  return total;
}

TaggedState qnd_parity_tag(const PhotonicState& state) {
  TaggedState out;
  out.phi0 = state.phi0;
  out.phi1 = state.phi1;
  for (const auto& term : state.terms) {
    if (term.config.total_photons() != 2) {
      throw WrongPhotonCount("parity tag expects 2 photons, found " +
                             std::to_string(term.config.total_photons()));
    }
    if (term.config.photons_in_mode(Mode::A) != 1 || term.config.photons_in_mode(Mode::B) != 1) {
      throw WrongPhotonCount("parity tag expects one photon in a and one in b");
    }
    const auto ia = term.config.index_of_single_photon(Mode::A);
    const auto ib = term.config.index_of_single_photon(Mode::B);
    const Pol pa = term.config.placements[ia].pol;
    const Pol pb = term.config.placements[ib].pol;
    // Equal polarizations shift the probe by one unit; the HV pair by two,
    // the VH pair by none — so the balanced cross terms are the odd ones out.
    PhaseClass tag;
    if (pa == pb) {
      tag = PhaseClass::Theta;
    } else if (pa == Pol::H) {
      tag = PhaseClass::TwoTheta;
    } else {
      tag = PhaseClass::Zero;
    }
    out.terms.push_back({term.amp, term.branch, term.config, tag});
  }
  return out;
}

HomodyneSplit homodyne_split(const TaggedState& state) {
  HomodyneSplit split;
  split.keep.phi0 = state.phi0;
  split.keep.phi1 = state.phi1;
  split.recycle.phi0 = state.phi0;
  split.recycle.phi1 = state.phi1;
  for (const auto& term : state.terms) {
    const bool keep = term.tag == PhaseClass::Theta;
    auto& target = keep ? split.keep : split.recycle;
    auto& prob = keep ? split.keep_prob : split.recycle_prob;
    prob += std::norm(term.amp);
    target.terms.push_back({term.amp, term.branch, term.config});
  }
  if (split.keep_prob >= kBranchPruneTol) {
    const double scale = 1.0 / std::sqrt(split.keep_prob);
    for (auto& term : split.keep.terms) term.amp *= scale;
  }
  if (split.recycle_prob >= kBranchPruneTol) {
    const double scale = 1.0 / std::sqrt(split.recycle_prob);
    for (auto& term : split.recycle.terms) term.amp *= scale;
  }
  split.keep.canonicalize();
  split.recycle.canonicalize();
  return split;
}

std::vector<BranchOutcome> homodyne_select(const TaggedState& state) {
  const HomodyneSplit split = homodyne_split(state);
  std::vector<BranchOutcome> branches;
  if (split.keep_prob >= kBranchPruneTol) {
    branches.push_back(
        {"keep", split.keep_prob, decode_two_photons(split.keep, Mode::A, Mode::B)});
  }
  if (split.recycle_prob >= kBranchPruneTol) {
    branches.push_back(
        {"recycle", split.recycle_prob, decode_two_photons(split.recycle, Mode::A, Mode::B)});
  }
  return branches;
}

RoundResult qnd_round(const SchmidtForm& input) {
  if (input.is_maximal()) {
    throw MaximalInput("input is already maximally entangled (alpha^2 = 1/2)");
  }
  return qnd_round_core(input);
}

RoundResult recycle_round(const SchmidtForm& residual) {
  if (residual.is_maximal()) {
    throw MaximalInput("residual is already maximally entangled (alpha^2 = 1/2)");
  }

  // The failed parity classes carry anticorrelated polarizations with the
  // current (already renormalized) coefficients. Retire the stale b photon:
  // both detector outcomes collapse onto the same single-photon state once
  // the D_V phase flip is undone.
  PhotonicState failed;
  failed.phi0 = residual.phi0;
  failed.phi1 = residual.phi1;
  failed.terms = {
      {Amplitude{residual.alpha, 0.0}, 0, PhotonConfig({{Mode::A, Pol::H}, {Mode::B, Pol::V}})},
      {Amplitude{residual.beta, 0.0}, 1, PhotonConfig({{Mode::A, Pol::V}, {Mode::B, Pol::H}})},
  };
  failed.canonicalize();
  const PureState recovered = detect_and_correct(failed, Mode::B);
  if (fidelity(recovered, assemble(residual)) < 1.0 - kNormTol) {
    throw InvariantViolation("recycled photon recovery drifted from the residual form");
  }

  // With a fresh ancilla photon the round is the same process again.
  return qnd_round_core(residual);
}

std::vector<IterationRecord> run_qnd(const SchmidtForm& input, int max_rounds) {
  if (max_rounds < 1) {
    throw OutOfRange("round count must be >= 1, got " + std::to_string(max_rounds));
  }
  if (input.is_maximal()) {
    throw MaximalInput("input is already maximally entangled (alpha^2 = 1/2)");
  }
  const double bound = asymptotic_bound(input);
  std::vector<IterationRecord> records;

  SchmidtForm current = input;
  double survive = 1.0;
  double cumulative = 0.0;
  for (int round = 1; round <= max_rounds; ++round) {
    const double a2 = current.alpha * current.alpha;
    const double b2 = current.beta * current.beta;
    if (round > 1 && next_round_saturated(a2, b2)) break;

    const RoundResult rr = round == 1 ? qnd_round(current) : recycle_round(current);
    cumulative += survive * rr.success_prob;
    survive *= rr.failure_prob;
    records.push_back({round, current.alpha, current.beta, rr.success_prob, cumulative});

    if (rr.success_prob < 1e-15) break;
    if (bound - cumulative < 1e-12) break;
    current = rr.residual;
  }
  return records;
}

}  // namespace ecsim
