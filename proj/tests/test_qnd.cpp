#include <doctest.h>

#include <cmath>
#include <vector>

#include "ecsim/protocol_circuit.hpp"
#include "ecsim/qnd.hpp"
#include "ecsim/state.hpp"
#include "oracles.hpp"

using namespace ecsim;

namespace {

const double kR2 = 1.0 / std::sqrt(2.0);

SchmidtForm bell_at(double alpha_sq) {
  return catalog_state(CatalogId::bell(), std::sqrt(alpha_sq));
}

PhotonicState probe_input(double alpha_sq) {
  return hwp90(encode_optical(bell_at(alpha_sq)), Mode::B);
}

const TaggedTerm* find_tagged(const TaggedState& s, int branch, const PhotonConfig& c) {
  for (const auto& t : s.terms) {
    if (t.branch == branch && t.config == c) return &t;
  }
  return nullptr;
}

}  // namespace

TEST_SUITE("protocol_qnd") {
  TEST_CASE("parity tag separates the three phase classes") {
    const TaggedState tagged = qnd_parity_tag(probe_input(0.8));
    REQUIRE(tagged.terms.size() == 4);

    const auto* even_hv = find_tagged(tagged, 0, PhotonConfig({{Mode::A, Pol::H}, {Mode::B, Pol::V}}));
    REQUIRE(even_hv != nullptr);
    CHECK(even_hv->tag == PhaseClass::TwoTheta);
    CHECK(even_hv->amp.real() == doctest::Approx(0.8).epsilon(1e-12));

    const auto* even_vh = find_tagged(tagged, 1, PhotonConfig({{Mode::A, Pol::V}, {Mode::B, Pol::H}}));
    REQUIRE(even_vh != nullptr);
    CHECK(even_vh->tag == PhaseClass::Zero);
    CHECK(even_vh->amp.real() == doctest::Approx(0.2).epsilon(1e-12));

    const auto* odd_hh = find_tagged(tagged, 0, PhotonConfig({{Mode::A, Pol::H}, {Mode::B, Pol::H}}));
    const auto* odd_vv = find_tagged(tagged, 1, PhotonConfig({{Mode::A, Pol::V}, {Mode::B, Pol::V}}));
    REQUIRE(odd_hh != nullptr);
    REQUIRE(odd_vv != nullptr);
    CHECK(odd_hh->tag == PhaseClass::Theta);
    CHECK(odd_vv->tag == PhaseClass::Theta);
    CHECK(odd_hh->amp.real() == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(odd_vv->amp.real() == doctest::Approx(0.4).epsilon(1e-12));
  }

  TEST_CASE("class weights follow the squared coefficients") {
    const TaggedState tagged = qnd_parity_tag(probe_input(0.8));
    CHECK(tagged.class_weight(PhaseClass::TwoTheta) == doctest::Approx(0.64).epsilon(1e-12));
    CHECK(tagged.class_weight(PhaseClass::Zero) == doctest::Approx(0.04).epsilon(1e-12));
    CHECK(tagged.class_weight(PhaseClass::Theta) == doctest::Approx(0.32).epsilon(1e-12));
  }

  TEST_CASE("parity tag rejects malformed photon configurations") {
    PhotonicState one_photon;
    one_photon.phi0 = basis_state(1, 0);
    one_photon.phi1 = basis_state(1, 1);
    one_photon.terms = {{Amplitude{1.0, 0.0}, 0, PhotonConfig({{Mode::A, Pol::H}})}};
    CHECK_THROWS_AS(qnd_parity_tag(one_photon), WrongPhotonCount);

    PhotonicState wrong_modes;
    wrong_modes.phi0 = basis_state(1, 0);
    wrong_modes.phi1 = basis_state(1, 1);
    wrong_modes.terms = {
        {Amplitude{1.0, 0.0}, 0, PhotonConfig({{Mode::APrime, Pol::H}, {Mode::BPrime, Pol::H}})}};
    CHECK_THROWS_AS(qnd_parity_tag(wrong_modes), WrongPhotonCount);
  }

  TEST_CASE("homodyne split keeps the balanced cross terms") {
    const HomodyneSplit split = homodyne_split(qnd_parity_tag(probe_input(0.8)));
    CHECK(split.keep_prob == doctest::Approx(0.32).epsilon(1e-12));
    CHECK(split.recycle_prob == doctest::Approx(0.68).epsilon(1e-12));
    CHECK(split.keep_prob + split.recycle_prob == doctest::Approx(1.0).epsilon(1e-12));

    REQUIRE(split.keep.terms.size() == 2);
    for (const auto& t : split.keep.terms) {
      CHECK(std::abs(t.amp) == doctest::Approx(kR2).epsilon(1e-12));
    }
    REQUIRE(split.recycle.terms.size() == 2);
    const double root = std::sqrt(0.68);
    for (const auto& t : split.recycle.terms) {
      const double expected = t.branch == 0 ? 0.8 / root : 0.2 / root;
      CHECK(t.amp.real() == doctest::Approx(expected).epsilon(1e-12));
    }
  }

  TEST_CASE("homodyne branches decode to the expected registers") {
    const auto branches = homodyne_select(qnd_parity_tag(probe_input(0.8)));
    REQUIRE(branches.size() == 2);
    CHECK(branches[0].label == "keep");
    CHECK(branches[0].probability == doctest::Approx(0.32).epsilon(1e-12));
    REQUIRE(branches[0].post_state.num_qubits == 3);
    CHECK(branches[0].post_state.amps[0b000].real() == doctest::Approx(kR2).epsilon(1e-12));
    CHECK(branches[0].post_state.amps[0b111].real() == doctest::Approx(kR2).epsilon(1e-12));

    CHECK(branches[1].label == "recycle");
    CHECK(branches[1].probability == doctest::Approx(0.68).epsilon(1e-12));
    const double root = std::sqrt(0.68);
    CHECK(branches[1].post_state.amps[0b001].real() ==
          doctest::Approx(0.8 / root).epsilon(1e-12));
    CHECK(branches[1].post_state.amps[0b110].real() ==
          doctest::Approx(0.2 / root).epsilon(1e-12));
  }

  TEST_CASE("qnd_round matches the gate-based round") {
    for (const double a2 : oracles::alpha_sq_grid()) {
      const SchmidtForm f = catalog_state(CatalogId::cluster4(), std::sqrt(a2));
      const RoundResult qnd = qnd_round(f);
      const RoundResult circuit = run_round(f);
      CHECK(std::abs(qnd.success_prob - circuit.success_prob) <= 1e-12);
      CHECK(std::abs(qnd.failure_prob - circuit.failure_prob) <= 1e-12);
      CHECK(fidelity(qnd.success_state, circuit.success_state) >= 1.0 - 1e-12);
      CHECK(std::abs(qnd.residual.alpha - circuit.residual.alpha) <= 1e-12);
    }
    CHECK_THROWS_AS(qnd_round(bell_at(0.5)), MaximalInput);
  }

  TEST_CASE("recycling continues from the residual coefficients") {
    const RoundResult first = qnd_round(bell_at(0.8));
    const RoundResult second = recycle_round(first.residual);
    CHECK(second.success_prob == doctest::Approx(0.11072664359861592).epsilon(1e-12));
    // residual alpha^2 after two failures: 256/257
    CHECK(second.residual.alpha * second.residual.alpha ==
          doctest::Approx(256.0 / 257.0).epsilon(1e-12));
    CHECK(fidelity(second.success_state,
                   assemble(SchmidtForm(kR2, basis_state(1, 0), basis_state(1, 1)))) >=
          1.0 - 1e-12);
    CHECK_THROWS_AS(recycle_round(bell_at(0.5)), MaximalInput);
  }

  TEST_CASE("run_qnd and iterate produce identical records") {
    for (const double a2 : {0.55, 0.80, 0.95}) {
      const SchmidtForm f = bell_at(a2);
      const auto qnd = run_qnd(f, 30);
      const auto circuit = iterate(f, 30);
      REQUIRE(qnd.size() == circuit.size());
      for (std::size_t k = 0; k < qnd.size(); ++k) {
        CHECK(qnd[k].round == circuit[k].round);
        CHECK(std::abs(qnd[k].alpha_k - circuit[k].alpha_k) <= 1e-12);
        CHECK(std::abs(qnd[k].beta_k - circuit[k].beta_k) <= 1e-12);
        CHECK(std::abs(qnd[k].p_k - circuit[k].p_k) <= 1e-12);
        CHECK(std::abs(qnd[k].cumulative_success - circuit[k].cumulative_success) <= 1e-12);
      }
    }
  }

  TEST_CASE("run_qnd validates its inputs") {
    CHECK_THROWS_AS(run_qnd(bell_at(0.8), 0), OutOfRange);
    CHECK_THROWS_AS(run_qnd(bell_at(0.5), 5), MaximalInput);
  }
}
