#include "verify.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ecsim/analysis.hpp"
#include "ecsim/io.hpp"
#include "ecsim/optics.hpp"
#include "ecsim/protocol_circuit.hpp"
#include "ecsim/qnd.hpp"
#include "ecsim/rng.hpp"
#include "ecsim/schmidt.hpp"
#include "ecsim/state.hpp"

namespace ecsim::cli {

namespace {

using Failure = std::optional<std::string>;

struct Check {
  std::string name;
  std::function<Failure()> fn;
};

std::vector<CatalogId> catalog_ids() {
  return {CatalogId::bell(),     CatalogId::ghz3(), CatalogId::cat(4),
          CatalogId::ghz_like(), CatalogId::q5(),   CatalogId::cluster4()};
}

std::vector<double> fine_grid() {
  return {0.55, 0.60, 0.65, 0.70, 0.75, 0.80, 0.85, 0.90, 0.95};
}

std::vector<double> coarse_grid() { return {0.55, 0.65, 0.75, 0.85, 0.95}; }

std::string where(const CatalogId& id, double a2) {
  return id.name() + " alpha_sq=" + format_real(a2);
}

// The optics checks take the (possibly faulted) port map so the injected
// defect reaches them; everything else is port-independent.
struct Context {
  PbsPorts ports = standard_pbs_ports();
  std::uint64_t seed = 42;
  std::vector<std::string> report_rows;
};

Failure check_catalog_orthonormality() {
  for (const auto& id : catalog_ids()) {
    const SchmidtForm f = catalog_state(id, std::sqrt(0.7));
    if (std::abs(f.phi0.norm_sq() - 1.0) > 1e-12 || std::abs(f.phi1.norm_sq() - 1.0) > 1e-12) {
      return "branch state of " + id.name() + " is not normalized";
    }
    if (std::abs(inner_product(f.phi0, f.phi1)) > 1e-12) {
      return "branch states of " + id.name() + " are not orthogonal";
    }
  }
  return std::nullopt;
}

Failure check_assembly_roundtrip() {
  for (const auto& id : catalog_ids()) {
    for (const double a2 : coarse_grid()) {
      const SchmidtForm f = catalog_state(id, std::sqrt(a2));
      const PureState s = assemble(f);
      const auto d = schmidt_extract(s, s.num_qubits - 1);
      if (d.coefficients.size() != 2) {
        return where(id, a2) + ": expected 2 Schmidt terms, got " +
               std::to_string(d.coefficients.size());
      }
      const double hi = std::max(f.alpha, f.beta);
      const double lo = std::min(f.alpha, f.beta);
      if (std::abs(d.coefficients[0] - hi) > 1e-10 || std::abs(d.coefficients[1] - lo) > 1e-10) {
        return where(id, a2) + ": extracted coefficients drifted";
      }
    }
  }
  return std::nullopt;
}

Failure check_single_round_circuit() {
  for (const auto& id : catalog_ids()) {
    for (const double a2 : fine_grid()) {
      const RoundResult rr = run_round(catalog_state(id, std::sqrt(a2)));
      const double expected = 2.0 * a2 * (1.0 - a2);
      if (std::abs(rr.success_prob - expected) > 1e-12) {
        return where(id, a2) + ": p=" + format_real(rr.success_prob) + " expected " +
               format_real(expected);
      }
    }
  }
  return std::nullopt;
}

Failure check_residual_form() {
  for (const double a2 : fine_grid()) {
    const RoundResult rr = run_round(catalog_state(CatalogId::bell(), std::sqrt(a2)));
    const double b2 = 1.0 - a2;
    const double expected = a2 * a2 / (a2 * a2 + b2 * b2);
    if (std::abs(rr.residual.alpha * rr.residual.alpha - expected) > 1e-12) {
      return "alpha_sq=" + format_real(a2) + ": residual drifted from the closed form";
    }
  }
  return std::nullopt;
}

Failure check_success_state_balanced(const Context& ctx) {
  for (const auto& id : catalog_ids()) {
    const SchmidtForm f = catalog_state(id, std::sqrt(0.8));
    const SchmidtForm balanced(1.0 / std::sqrt(2.0), f.phi0, f.phi1);
    const PureState expected = assemble(balanced);
    if (fidelity(run_round(f).success_state, expected) < 1.0 - 1e-12) {
      return id.name() + ": circuit success state is not balanced";
    }
    if (fidelity(run_optics(f, ctx.ports).output, expected) < 1.0 - 1e-12) {
      return id.name() + ": optics output is not balanced";
    }
    if (fidelity(qnd_round(f).success_state, expected) < 1.0 - 1e-12) {
      return id.name() + ": qnd success state is not balanced";
    }
  }
  return std::nullopt;
}

Failure check_optics_single_round(const Context& ctx) {
  for (const auto& id : catalog_ids()) {
    for (const double a2 : fine_grid()) {
      const OpticsResult r = run_optics(catalog_state(id, std::sqrt(a2)), ctx.ports);
      const double expected = 2.0 * a2 * (1.0 - a2);
      if (std::abs(r.success_prob - expected) > 1e-12) {
        return where(id, a2) + ": p=" + format_real(r.success_prob) + " expected " +
               format_real(expected);
      }
    }
  }
  return std::nullopt;
}

Failure check_beam_splitter_structure(const Context& ctx) {
  // alpha^2 = 0.8 reference input: after the wave plate and the beam
  // splitter the even terms bunch and the odd terms come out one per mode.
  const SchmidtForm f = catalog_state(CatalogId::bell(), std::sqrt(0.8));
  const PhotonicState split = pbs(hwp90(encode_optical(f), Mode::B), ctx.ports);
  const auto expect_term = [&](int branch, PhotonConfig config, double amp) -> Failure {
    for (const auto& t : split.terms) {
      if (t.branch == branch && t.config == config) {
        if (std::abs(t.amp - Amplitude{amp, 0.0}) > 1e-12) {
          return "term amplitude " + format_real(t.amp.real()) + " expected " + format_real(amp);
        }
        return std::nullopt;
      }
    }
    return std::string("expected beam splitter output term is missing");
  };
  if (auto f1 = expect_term(0, PhotonConfig({{Mode::BPrime, Pol::H}, {Mode::BPrime, Pol::V}}), 0.8))
    return f1;
  if (auto f2 = expect_term(1, PhotonConfig({{Mode::APrime, Pol::H}, {Mode::APrime, Pol::V}}), 0.2))
    return f2;
  if (auto f3 = expect_term(0, PhotonConfig({{Mode::APrime, Pol::H}, {Mode::BPrime, Pol::H}}), 0.4))
    return f3;
  if (auto f4 = expect_term(1, PhotonConfig({{Mode::APrime, Pol::V}, {Mode::BPrime, Pol::V}}), 0.4))
    return f4;
  return std::nullopt;
}

Failure check_beam_splitter_inverse(const Context& ctx) {
  PhotonicState s;
  s.phi0 = basis_state(1, 0);
  s.phi1 = basis_state(1, 1);
  const double r = 1.0 / std::sqrt(2.0);
  s.terms = {
      {Amplitude{r, 0.0}, 0, PhotonConfig({{Mode::A, Pol::H}, {Mode::B, Pol::H}})},
      {Amplitude{r, 0.0}, 1, PhotonConfig({{Mode::A, Pol::V}, {Mode::B, Pol::V}})},
  };
  s.canonicalize();
  const std::vector<std::pair<Mode, Mode>> fold = {{Mode::APrime, Mode::A},
                                                   {Mode::BPrime, Mode::B}};
  const PhotonicState twice = relabel_modes(pbs(relabel_modes(pbs(s, ctx.ports), fold), ctx.ports), fold);
  if (twice.terms.size() != s.terms.size()) {
    return std::string("term count changed through the double pass");
  }
  for (std::size_t i = 0; i < s.terms.size(); ++i) {
    if (!(twice.terms[i].branch == s.terms[i].branch &&
          twice.terms[i].config == s.terms[i].config &&
          std::abs(twice.terms[i].amp - s.terms[i].amp) <= 1e-12)) {
      return std::string("double pass is not the identity on pass-through configurations");
    }
  }
  return std::nullopt;
}

Failure check_detection_balance(const Context& ctx) {
  const SchmidtForm f = catalog_state(CatalogId::ghz3(), std::sqrt(0.75));
  const Postselection sel =
      postselect_one_per_mode(pbs(hwp90(encode_optical(f), Mode::B), ctx.ports));
  if (sel.empty) return std::string("post-selection kept nothing");
  const auto branches = r45_and_detect(sel.kept, Mode::BPrime);
  if (branches.size() != 2) return std::string("expected both detector branches");
  for (const auto& b : branches) {
    if (std::abs(b.probability - 0.5) > 1e-12) {
      return "detector branch " + b.label + " has probability " + format_real(b.probability);
    }
  }
  const PureState flipped = apply_single_qubit(
      branches[1].post_state, branches[1].post_state.num_qubits, pauli_z());
  if (fidelity(branches[0].post_state, flipped) < 1.0 - 1e-12) {
    return std::string("detector outcomes do not differ by the phase flip alone");
  }
  return std::nullopt;
}

Failure check_parity_classes() {
  const SchmidtForm f = catalog_state(CatalogId::bell(), std::sqrt(0.8));
  const TaggedState tagged = qnd_parity_tag(hwp90(encode_optical(f), Mode::B));
  const double a4 = 0.64, b4 = 0.04, cross = 0.32;
  if (std::abs(tagged.class_weight(PhaseClass::TwoTheta) - a4) > 1e-12) {
    return std::string("two-theta class weight drifted");
  }
  if (std::abs(tagged.class_weight(PhaseClass::Zero) - b4) > 1e-12) {
    return std::string("zero class weight drifted");
  }
  if (std::abs(tagged.class_weight(PhaseClass::Theta) - cross) > 1e-12) {
    return std::string("theta class weight drifted");
  }
  for (const auto& term : tagged.terms) {
    const bool even = term.branch == 0 ? term.tag == PhaseClass::TwoTheta &&
                                             term.config.placements[0].pol == Pol::H
                                       : term.tag == PhaseClass::Zero;
    const bool odd = term.tag == PhaseClass::Theta;
    if (!(even || odd)) return std::string("unexpected tag assignment");
  }
  return std::nullopt;
}

Failure check_qnd_keep_probability() {
  for (const auto& id : catalog_ids()) {
    for (const double a2 : fine_grid()) {
      const RoundResult rr = qnd_round(catalog_state(id, std::sqrt(a2)));
      const double expected = 2.0 * a2 * (1.0 - a2);
      if (std::abs(rr.success_prob - expected) > 1e-12) {
        return where(id, a2) + ": keep probability drifted";
      }
    }
  }
  return std::nullopt;
}

Failure check_cross_protocol_probabilities(const Context& ctx) {
  for (const auto& id : catalog_ids()) {
    for (const double a2 : fine_grid()) {
      const SchmidtForm f = catalog_state(id, std::sqrt(a2));
      const double pc = run_round(f).success_prob;
      const double po = run_optics(f, ctx.ports).success_prob;
      const double pq = qnd_round(f).success_prob;
      if (std::abs(pc - po) > 1e-12 || std::abs(pc - pq) > 1e-12) {
        return where(id, a2) + ": circuit=" + format_real(pc) + " optics=" + format_real(po) +
               " qnd=" + format_real(pq);
      }
    }
  }
  return std::nullopt;
}

Failure check_cross_protocol_outputs(const Context& ctx) {
  for (const auto& id : catalog_ids()) {
    for (const double a2 : coarse_grid()) {
      const SchmidtForm f = catalog_state(id, std::sqrt(a2));
      const PureState sc = run_round(f).success_state;
      const PureState so = run_optics(f, ctx.ports).output;
      const PureState sq = qnd_round(f).success_state;
      if (fidelity(sc, so) < 1.0 - 1e-12 || fidelity(sc, sq) < 1.0 - 1e-12) {
        return where(id, a2) + ": success states disagree across protocols";
      }
    }
  }
  return std::nullopt;
}

Failure check_iteration_equality() {
  for (const auto& id : {CatalogId::bell(), CatalogId::ghz3()}) {
    for (const double a2 : {0.55, 0.8, 0.95}) {
      const SchmidtForm f = catalog_state(id, std::sqrt(a2));
      const auto circuit = iterate(f, 30);
      const auto qnd = run_qnd(f, 30);
      if (circuit.size() != qnd.size()) {
        return where(id, a2) + ": different round counts";
      }
      for (std::size_t k = 0; k < circuit.size(); ++k) {
        if (std::abs(circuit[k].p_k - qnd[k].p_k) > 1e-12 ||
            std::abs(circuit[k].cumulative_success - qnd[k].cumulative_success) > 1e-12) {
          return where(id, a2) + ": records diverge at round " + std::to_string(k + 1);
        }
      }
    }
  }
  return std::nullopt;
}

Failure check_series_agreement() {
  for (const double a2 : fine_grid()) {
    const auto records = iterate(catalog_state(CatalogId::bell(), std::sqrt(a2)), 30);
    for (const auto& rec : records) {
      if (std::abs(rec.cumulative_success - series_total(std::sqrt(a2), rec.round)) > 1e-12) {
        return "alpha_sq=" + format_real(a2) + ": recurrence and simulation diverge at round " +
               std::to_string(rec.round);
      }
    }
  }
  return std::nullopt;
}

Failure check_series_limit() {
  for (const double a2 : fine_grid()) {
    const double limit = 2.0 * std::min(a2, 1.0 - a2);
    if (std::abs(series_total(std::sqrt(a2), 30) - limit) > 1e-6) {
      return "alpha_sq=" + format_real(a2) + ": series does not reach its bound";
    }
  }
  return std::nullopt;
}

Failure check_ratio_squaring() {
  const auto records = iterate(catalog_state(CatalogId::bell(), std::sqrt(0.501)), 12);
  if (records.size() < 11) return std::string("iteration stopped too early");
  for (std::size_t k = 0; k + 1 < records.size(); ++k) {
    const double x = records[k].beta_k / records[k].alpha_k;
    const double next = records[k + 1].beta_k / records[k + 1].alpha_k;
    if (std::abs(next - x * x) > 1e-12) {
      return "ratio fails to square at round " + std::to_string(k + 1);
    }
  }
  return std::nullopt;
}

Failure check_espp_conservation(Context& ctx) {
  ctx.report_rows.clear();
  for (const auto& id : catalog_ids()) {
    for (const double a2 : coarse_grid()) {
      const SchmidtForm f = catalog_state(id, std::sqrt(a2));
      const double expected = 2.0 * std::min(a2, 1.0 - a2);
      std::vector<double> by_depth;
      const BranchTree tree = build_branch_tree(f, 8, TreeProtocol::Circuit);
      for (int d = 0; d <= 8; ++d) {
        const double value = average_espp(tree, d);
        by_depth.push_back(value);
        if (std::abs(value - expected) > 1e-12) {
          return where(id, a2) + ": average drifted at depth " + std::to_string(d);
        }
      }
      const BranchTree qnd_tree = build_branch_tree(f, 8, TreeProtocol::Qnd);
      for (int d = 0; d <= 8; ++d) {
        if (std::abs(average_espp(qnd_tree, d) - expected) > 1e-12) {
          return where(id, a2) + ": qnd-route average drifted at depth " + std::to_string(d);
        }
      }
      ctx.report_rows.push_back(conservation_report(id.name(), a2, by_depth));
    }
  }
  return std::nullopt;
}

Failure check_sampling_determinism(const Context& ctx) {
  std::vector<BranchOutcome> branches;
  branches.push_back({"0", 0.68, basis_state(1, 0)});
  branches.push_back({"1", 0.32, basis_state(1, 1)});
  for (int t = 0; t < 64; ++t) {
    const auto seed = derive_stream_seed(ctx.seed, static_cast<std::uint64_t>(t));
    const auto [first, s1] = sample_branch(branches, seed);
    const auto [second, s2] = sample_branch(branches, seed);
    if (first.label != second.label || s1 != s2) {
      return "trial " + std::to_string(t) + " is not reproducible";
    }
  }
  return std::nullopt;
}

Failure check_sampling_frequency(const Context& ctx) {
  const RoundResult rr = run_round(catalog_state(CatalogId::bell(), std::sqrt(0.8)));
  std::vector<BranchOutcome> branches;
  branches.push_back({"fail", rr.failure_prob, assemble(rr.residual)});
  branches.push_back({"success", rr.success_prob, rr.success_state});
  const int trials = 100000;
  int hits = 0;
  for (int t = 0; t < trials; ++t) {
    const auto [chosen, next] =
        sample_branch(branches, derive_stream_seed(ctx.seed, static_cast<std::uint64_t>(t)));
    (void)next;
    if (chosen.label == "success") ++hits;
  }
  const double freq = static_cast<double>(hits) / trials;
  const double sigma = std::sqrt(0.32 * 0.68 / trials);
  if (std::abs(freq - 0.32) > 3.0 * sigma) {
    return "frequency " + format_real(freq) + " outside 3 sigma of 0.32";
  }
  return std::nullopt;
}

Failure check_state_documents() {
  for (const auto& id : catalog_ids()) {
    const LoadedState loaded = load_state_json(catalog_to_json(id, std::sqrt(0.8)));
    const SchmidtForm original = catalog_state(id, std::sqrt(0.8));
    if (loaded.id != id.name() ||
        max_abs_diff(assemble(loaded.form), assemble(original)) > 1e-12) {
      return id.name() + ": document round-trip drifted";
    }
  }
  return std::nullopt;
}

}  // namespace

int run_verify(const VerifyOptions& options) {
  Context ctx;
  ctx.seed = options.seed;
  if (options.inject_pbs_fault) {
    std::swap(ctx.ports.out[0][0], ctx.ports.out[0][1]);
    std::cout << "note: injected fault pbs-portmap (a-side outputs swapped)\n";
  }

  const std::vector<Check> checks = {
      {"catalog-orthonormality", check_catalog_orthonormality},
      {"assembly-roundtrip", check_assembly_roundtrip},
      {"single-round-closed-form", check_single_round_circuit},
      {"residual-closed-form", check_residual_form},
      {"success-state-balanced", [&] { return check_success_state_balanced(ctx); }},
      {"optics-single-round", [&] { return check_optics_single_round(ctx); }},
      {"beam-splitter-structure", [&] { return check_beam_splitter_structure(ctx); }},
      {"beam-splitter-inverse", [&] { return check_beam_splitter_inverse(ctx); }},
      {"detection-balance", [&] { return check_detection_balance(ctx); }},
      {"parity-classes", check_parity_classes},
      {"qnd-keep-probability", check_qnd_keep_probability},
      {"cross-protocol-probabilities", [&] { return check_cross_protocol_probabilities(ctx); }},
      {"cross-protocol-outputs", [&] { return check_cross_protocol_outputs(ctx); }},
      {"iteration-equality", check_iteration_equality},
      {"series-agreement", check_series_agreement},
      {"series-limit", check_series_limit},
      {"ratio-squaring", check_ratio_squaring},
      {"espp-conservation", [&] { return check_espp_conservation(ctx); }},
      {"sampling-determinism", [&] { return check_sampling_determinism(ctx); }},
      {"sampling-frequency", [&] { return check_sampling_frequency(ctx); }},
      {"state-documents", check_state_documents},
  };

  int failures = 0;
  for (const auto& check : checks) {
    Failure failure;
    try {
      failure = check.fn();
    } catch (const std::exception& e) {
      failure = std::string("exception: ") + e.what();
    }
    if (failure) {
      ++failures;
      std::cout << "[FAIL] " << check.name << ": " << *failure << "\n";
    } else {
      std::cout << "[PASS] " << check.name << "\n";
    }
  }

  if (!options.report_path.empty() && !ctx.report_rows.empty()) {
    std::ofstream out(options.report_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot write report to '" << options.report_path << "'\n";
      return 1;
    }
    out << "[\n";
    for (std::size_t i = 0; i < ctx.report_rows.size(); ++i) {
      std::string row = ctx.report_rows[i];
      while (!row.empty() && row.back() == '\n') row.pop_back();
      out << row << (i + 1 < ctx.report_rows.size() ? ",\n" : "\n");
    }
    out << "]\n";
  }

  std::cout << (failures == 0 ? "verification passed" : "verification FAILED") << " ("
            << checks.size() - failures << "/" << checks.size() << " checks)\n";
  return failures == 0 ? 0 : 1;
}

}  // namespace ecsim::cli
