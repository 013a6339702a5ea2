#include "ecsim/optics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace ecsim {

namespace {

constexpr double kTermPruneTol = 1e-15;

void require_two_photons_in(const PhotonConfig& config, Mode first, Mode second,
                            const char* where) {
  if (config.total_photons() != 2) {
    throw WrongPhotonCount(std::string(where) + ": expected 2 photons, found " +
                           std::to_string(config.total_photons()));
  }
  if (config.photons_in_mode(first) != 1 || config.photons_in_mode(second) != 1) {
    throw WrongModes(std::string(where) + ": photons must sit one per mode in " +
                     to_string(first) + " and " + to_string(second));
  }
}

}  // namespace

std::string to_string(Pol p) { return p == Pol::H ? "H" : "V"; }

std::string to_string(Mode m) {
  switch (m) {
    case Mode::A:
      return "a";
    case Mode::B:
      return "b";
    case Mode::APrime:
      return "a'";
    case Mode::BPrime:
      return "b'";
  }
  return "?";
}

PhotonConfig::PhotonConfig(std::vector<Placement> p) : placements(std::move(p)) {
  std::sort(placements.begin(), placements.end());
}

int PhotonConfig::photons_in_mode(Mode m) const {
  int count = 0;
  for (const auto& pl : placements) {
    if (pl.mode == m) ++count;
  }
  return count;
}

std::size_t PhotonConfig::index_of_single_photon(Mode m) const {
  std::size_t found = placements.size();
  int count = 0;
  for (std::size_t i = 0; i < placements.size(); ++i) {
    if (placements[i].mode == m) {
      found = i;
      ++count;
    }
  }
  if (count != 1) {
    throw ModeEmpty("mode " + to_string(m) + " holds " + std::to_string(count) +
                    " photons, expected exactly 1");
  }
  return found;
}

double PhotonicState::total_weight() const {
  double total = 0.0;
  for (const auto& t : terms) total += std::norm(t.amp);
  return total;
}

void PhotonicState::canonicalize() {
  std::sort(terms.begin(), terms.end(), [](const OpticalTerm& x, const OpticalTerm& y) {
    return std::tie(x.branch, x.config) < std::tie(y.branch, y.config);
  });
  std::vector<OpticalTerm> merged;
  for (auto& t : terms) {
    if (!merged.empty() && merged.back().branch == t.branch && merged.back().config == t.config) {
      merged.back().amp += t.amp;
    } else {
      merged.push_back(std::move(t));
    }
  }
  std::erase_if(merged, [](const OpticalTerm& t) { return std::abs(t.amp) < kTermPruneTol; });
  terms = std::move(merged);
}

Mode PbsPorts::route(Mode input, Pol p) const {
  if (input != Mode::A && input != Mode::B) {
    throw WrongModes("beam splitter inputs are a and b, photon found in " + to_string(input));
  }
  return out[input == Mode::A ? 0 : 1][static_cast<int>(p)];
}

PbsPorts standard_pbs_ports() {
  PbsPorts ports;
  ports.out[0][static_cast<int>(Pol::H)] = Mode::BPrime;  // a: transmit H
  ports.out[0][static_cast<int>(Pol::V)] = Mode::APrime;  // a: reflect V
  ports.out[1][static_cast<int>(Pol::H)] = Mode::APrime;  // b: transmit H
  ports.out[1][static_cast<int>(Pol::V)] = Mode::BPrime;  // b: reflect V
  return ports;
}

PhotonicState encode_optical(const SchmidtForm& input) {
  const double a = input.alpha;
  const double b = input.beta;
  PhotonicState state;
  state.phi0 = input.phi0;
  state.phi1 = input.phi1;
  // (a |phi0 H_a> + b |phi1 V_a>) (x) (a |H_b> + b |V_b>)
  state.terms = {
      {Amplitude{a * a, 0.0}, 0, PhotonConfig({{Mode::A, Pol::H}, {Mode::B, Pol::H}})},
      {Amplitude{a * b, 0.0}, 0, PhotonConfig({{Mode::A, Pol::H}, {Mode::B, Pol::V}})},
      {Amplitude{a * b, 0.0}, 1, PhotonConfig({{Mode::A, Pol::V}, {Mode::B, Pol::H}})},
      {Amplitude{b * b, 0.0}, 1, PhotonConfig({{Mode::A, Pol::V}, {Mode::B, Pol::V}})},
  };
  state.canonicalize();
  return state;
}

PhotonicState hwp90(const PhotonicState& state, Mode mode) {
  PhotonicState out = state;
  for (auto& term : out.terms) {
    const std::size_t i = term.config.index_of_single_photon(mode);
    auto placements = term.config.placements;
    placements[i].pol = placements[i].pol == Pol::H ? Pol::V : Pol::H;
    term.config = PhotonConfig(std::move(placements));
  }
  out.canonicalize();
  return out;
}

PhotonicState pbs(const PhotonicState& state, const PbsPorts& ports) {
  PhotonicState out = state;
  for (auto& term : out.terms) {
    require_two_photons_in(term.config, Mode::A, Mode::B, "beam splitter");
    auto placements = term.config.placements;
    for (auto& pl : placements) pl.mode = ports.route(pl.mode, pl.pol);
    term.config = PhotonConfig(std::move(placements));
  }
  out.canonicalize();
  return out;
}

Postselection postselect_one_per_mode(const PhotonicState& state) {
  Postselection sel;
  sel.kept.phi0 = state.phi0;
  sel.kept.phi1 = state.phi1;
  for (const auto& term : state.terms) {
    if (term.config.photons_in_mode(Mode::APrime) == 1 &&
        term.config.photons_in_mode(Mode::BPrime) == 1 && term.config.total_photons() == 2) {
      sel.probability += std::norm(term.amp);
      sel.kept.terms.push_back(term);
    }
  }
  if (sel.probability < kBranchPruneTol) {
    sel.empty = true;
    sel.kept.terms.clear();
    return sel;
  }
  const double scale = 1.0 / std::sqrt(sel.probability);
  for (auto& term : sel.kept.terms) term.amp *= scale;
  sel.kept.canonicalize();
  return sel;
}

PhotonicState apply_r45(const PhotonicState& state, Mode mode) {
  const double r = 1.0 / std::sqrt(2.0);
  PhotonicState out;
  out.phi0 = state.phi0;
  out.phi1 = state.phi1;
  for (const auto& term : state.terms) {
    const std::size_t i = term.config.index_of_single_photon(mode);
    for (const Pol new_pol : {Pol::H, Pol::V}) {
      // H -> (H + V)/sqrt(2), V -> (H - V)/sqrt(2)
      const double sign =
          (term.config.placements[i].pol == Pol::V && new_pol == Pol::V) ? -1.0 : 1.0;
      auto placements = term.config.placements;
      placements[i].pol = new_pol;
      out.terms.push_back({term.amp * sign * r, term.branch, PhotonConfig(std::move(placements))});
    }
  }
  out.canonicalize();
  return out;
}

PureState decode_single_photon(const PhotonicState& state, Mode expected_mode) {
  if (state.terms.empty()) {
    throw InvariantViolation("cannot decode an empty photonic state");
  }
  PureState out;
  out.num_qubits = state.phi0.num_qubits + 1;
  out.amps.assign(state.phi0.dim() * 2, Amplitude{0.0, 0.0});
  for (const auto& term : state.terms) {
    if (term.config.total_photons() != 1) {
      throw WrongPhotonCount("decoding expects a single remaining photon per term");
    }
    const std::size_t i = term.config.index_of_single_photon(expected_mode);
    const int pol = static_cast<int>(term.config.placements[i].pol);
    const PureState& phi = term.branch == 0 ? state.phi0 : state.phi1;
    for (std::size_t k = 0; k < phi.dim(); ++k) {
      out.amps[2 * k + static_cast<std::size_t>(pol)] += term.amp * phi.amps[k];
    }
  }
  if (std::abs(out.norm_sq() - 1.0) > kNormTol) {
    throw InvariantViolation("decoded single-photon state is not normalized");
  }
  return out;
}

PureState decode_two_photons(const PhotonicState& state, Mode first, Mode second) {
  if (state.terms.empty()) {
    throw InvariantViolation("cannot decode an empty photonic state");
  }
  PureState out;
  out.num_qubits = state.phi0.num_qubits + 2;
  out.amps.assign(state.phi0.dim() * 4, Amplitude{0.0, 0.0});
  for (const auto& term : state.terms) {
    require_two_photons_in(term.config, first, second, "decoding");
    const std::size_t ia = term.config.index_of_single_photon(first);
    const std::size_t ib = term.config.index_of_single_photon(second);
    const std::size_t pa = static_cast<std::size_t>(term.config.placements[ia].pol);
    const std::size_t pb = static_cast<std::size_t>(term.config.placements[ib].pol);
    const PureState& phi = term.branch == 0 ? state.phi0 : state.phi1;
    for (std::size_t k = 0; k < phi.dim(); ++k) {
      out.amps[4 * k + 2 * pa + pb] += term.amp * phi.amps[k];
    }
  }
  if (std::abs(out.norm_sq() - 1.0) > kNormTol) {
    throw InvariantViolation("decoded two-photon state is not normalized");
  }
  return out;
}

std::vector<BranchOutcome> r45_and_detect(const PhotonicState& state, Mode mode) {
  const PhotonicState rotated = apply_r45(state, mode);

  // Split on the detected photon's polarization, then peel it off.
  PhotonicState bucket[2];
  double weight[2] = {0.0, 0.0};
  Mode remaining_mode{};
  bool remaining_known = false;
  for (int p = 0; p < 2; ++p) {
    bucket[p].phi0 = rotated.phi0;
    bucket[p].phi1 = rotated.phi1;
  }
  for (const auto& term : rotated.terms) {
    const std::size_t i = term.config.index_of_single_photon(mode);
    const int p = static_cast<int>(term.config.placements[i].pol);
    weight[p] += std::norm(term.amp);
    auto placements = term.config.placements;
    placements.erase(placements.begin() + static_cast<std::ptrdiff_t>(i));
    if (placements.size() != 1) {
      throw WrongPhotonCount("detection expects exactly one photon left behind");
    }
    if (!remaining_known) {
      remaining_mode = placements[0].mode;
      remaining_known = true;
    } else if (placements[0].mode != remaining_mode) {
      throw InvariantViolation("remaining photon sits in different modes across terms");
    }
    bucket[p].terms.push_back({term.amp, term.branch, PhotonConfig(std::move(placements))});
  }

  std::vector<BranchOutcome> branches;
  for (int p = 0; p < 2; ++p) {
    if (weight[p] < kBranchPruneTol) continue;
    const double scale = 1.0 / std::sqrt(weight[p]);
    for (auto& term : bucket[p].terms) term.amp *= scale;
    bucket[p].canonicalize();
    BranchOutcome b;
    b.label = p == 0 ? "D_H" : "D_V";
    b.probability = weight[p];
    b.post_state = decode_single_photon(bucket[p], remaining_mode);
    branches.push_back(std::move(b));
  }
  return branches;
}

PhotonicState relabel_modes(const PhotonicState& state,
                            const std::vector<std::pair<Mode, Mode>>& mapping) {
  PhotonicState out = state;
  for (auto& term : out.terms) {
    auto placements = term.config.placements;
    std::vector<bool> remapped(placements.size(), false);
    for (std::size_t i = 0; i < placements.size(); ++i) {
      for (const auto& [from, to] : mapping) {
        if (placements[i].mode == from) {
          placements[i].mode = to;
          remapped[i] = true;
          break;
        }
      }
    }
    for (std::size_t i = 0; i < placements.size(); ++i) {
      if (remapped[i]) continue;
      for (const auto& [from, to] : mapping) {
        if (placements[i].mode == to) {
          throw WrongModes("relabeling target mode " + to_string(to) + " is already occupied");
        }
      }
    }
    term.config = PhotonConfig(std::move(placements));
  }
  out.canonicalize();
  return out;
}

PureState detect_and_correct(const PhotonicState& state, Mode mode) {
  const auto branches = r45_and_detect(state, mode);
  if (branches.empty()) {
    throw InvariantViolation("detection produced no branches");
  }
  double total = 0.0;
  std::vector<PureState> corrected;
  for (const auto& b : branches) {
    total += b.probability;
    if (b.label == "D_V") {
      // The V outcome flips the relative sign; undo it on the last qubit.
      corrected.push_back(
          apply_single_qubit(b.post_state, b.post_state.num_qubits, pauli_z()));
    } else {
      corrected.push_back(b.post_state);
    }
  }
  if (std::abs(total - 1.0) > kNormTol) {
    throw InvariantViolation("detector branch probabilities do not sum to 1");
  }
  if (corrected.size() == 2 && fidelity(corrected[0], corrected[1]) < 1.0 - kNormTol) {
    throw InvariantViolation("detector outcomes disagree after phase correction");
  }
  return corrected.front();
}

OpticsResult run_optics(const SchmidtForm& input, const PbsPorts& ports) {
  if (input.is_maximal()) {
    throw MaximalInput("input is already maximally entangled (alpha^2 = 1/2)");
  }
  const PhotonicState encoded = encode_optical(input);
  const PhotonicState flipped = hwp90(encoded, Mode::B);
  const PhotonicState split = pbs(flipped, ports);
  const Postselection sel = postselect_one_per_mode(split);
  if (sel.empty) {
    throw InvariantViolation("post-selection kept no weight");
  }
  return {sel.probability, detect_and_correct(sel.kept, Mode::BPrime)};
}

}  // namespace ecsim
