#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ecsim/analysis.hpp"
#include "ecsim/io.hpp"
#include "ecsim/optics.hpp"
#include "ecsim/protocol_circuit.hpp"
#include "ecsim/qnd.hpp"
#include "ecsim/rng.hpp"
#include "ecsim/state.hpp"
#include "verify.hpp"

namespace {

using namespace ecsim;

/// Configuration problems (bad flags, unusable inputs) exit with code 2;
/// violated runtime invariants exit with code 3.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::string protocol = "circuit";  // circuit | optics | qnd
  std::string state;                 // catalog name or state-document path
  double alpha_sq = 0.0;
  bool alpha_sq_given = false;
  int rounds = 0;  // 0 -> protocol default (1 for run, 30/1 for sweep)
  std::string mode = "exact";  // exact | montecarlo
  std::int64_t trials = 100000;
  std::uint64_t seed = 42;
  std::string format = "csv";  // csv | json
  std::string output;
};

struct ResolvedInput {
  std::string id;
  SchmidtForm form;
};

ResolvedInput resolve_state(const std::string& text, std::optional<double> alpha_sq) {
  bool is_catalog = true;
  CatalogId id = CatalogId::bell();
  try {
    id = CatalogId::parse(text);
  } catch (const OutOfRange&) {
    is_catalog = false;
  }
  try {
    if (is_catalog) {
      if (!alpha_sq.has_value()) {
        throw ConfigError("catalog state '" + text + "' needs --alpha-sq");
      }
      if (!(*alpha_sq > 0.0 && *alpha_sq < 1.0)) {
        throw ConfigError("--alpha-sq must lie strictly inside (0, 1)");
      }
      return {id.name(), catalog_state(id, std::sqrt(*alpha_sq))};
    }
    if (alpha_sq.has_value()) {
      throw ConfigError("state documents carry their own alpha; drop --alpha-sq");
    }
    LoadedState loaded = load_state_file(text);
    return {loaded.id, loaded.form};
  } catch (const ConfigError&) {
    throw;
  } catch (const SimError& e) {
    // anything wrong with the input itself is a configuration problem
    throw ConfigError(e.what());
  }
}

void require_concentratable(const ResolvedInput& input) {
  if (input.form.is_maximal()) {
    throw ConfigError("input '" + input.id +
                      "' is already maximally entangled (alpha_sq = 1/2); nothing to concentrate");
  }
}

/// Independent closed-form audit of emitted records; a non-empty result is
/// reported and the process exits with code 3.
std::optional<std::string> closed_form_violation(const std::vector<IterationRecord>& records,
                                                 double bound) {
  double prev_cumulative = 0.0;
  double survive = 1.0;
  for (const auto& rec : records) {
    const double a2 = rec.alpha_k * rec.alpha_k;
    const double b2 = rec.beta_k * rec.beta_k;
    const std::string at = "round " + std::to_string(rec.round);
    if (std::abs(a2 + b2 - 1.0) > 1e-9) {
      return at + ": coefficients are not normalized";
    }
    if (std::abs(rec.p_k - 2.0 * a2 * b2) > 1e-9) {
      return at + ": success probability deviates from 2*alpha^2*beta^2";
    }
    if (rec.p_k < 0.0 || rec.p_k > 1.0 + 1e-12) {
      return at + ": success probability outside [0, 1]";
    }
    if (std::abs(rec.cumulative_success - (prev_cumulative + survive * rec.p_k)) > 1e-9) {
      return at + ": cumulative total is inconsistent with the round chain";
    }
    if (rec.cumulative_success + 1e-12 < prev_cumulative) {
      return at + ": cumulative total decreased";
    }
    if (rec.cumulative_success > bound + 1e-9) {
      return at + ": cumulative total exceeds the asymptotic bound";
    }
    survive *= 1.0 - rec.p_k;
    prev_cumulative = rec.cumulative_success;
  }
  return std::nullopt;
}

void emit(const std::string& payload, const std::string& output_path) {
  std::cout << payload;
  if (!output_path.empty()) {
    std::ofstream out(output_path, std::ios::binary);
    if (!out) {
      throw ConfigError("cannot write to '" + output_path + "'");
    }
    out << payload;
  }
}

std::vector<IterationRecord> run_protocol(const std::string& protocol, const SchmidtForm& form,
                                          int rounds) {
  if (protocol == "circuit") return iterate(form, rounds);
  if (protocol == "qnd") return run_qnd(form, rounds);
  // optics: single shot
  const OpticsResult r = run_optics(form);
  return {{1, form.alpha, form.beta, r.success_prob, r.success_prob}};
}

std::string records_to_json(const ResolvedInput& input, const RunConfig& cfg,
                            const std::vector<IterationRecord>& records, double bound) {
  nlohmann::json doc;
  doc["protocol"] = cfg.protocol;
  doc["state"] = input.id;
  doc["alpha_sq"] = input.form.alpha * input.form.alpha;
  doc["asymptotic_bound"] = bound;
  doc["records"] = nlohmann::json::array();
  for (const auto& rec : records) {
    doc["records"].push_back({{"round", rec.round},
                              {"alpha_sq", rec.alpha_k * rec.alpha_k},
                              {"p_k", rec.p_k},
                              {"cumulative", rec.cumulative_success}});
  }
  return doc.dump(2) + "\n";
}

int cmd_run_exact(const ResolvedInput& input, const RunConfig& cfg, int rounds) {
  const auto records = run_protocol(cfg.protocol, input.form, rounds);
  const double bound = asymptotic_bound(input.form);
  if (const auto violation = closed_form_violation(records, bound)) {
    std::cerr << "invariant violation: " << *violation << "\n";
    return 3;
  }
  std::string payload;
  if (cfg.format == "json") {
    payload = records_to_json(input, cfg, records, bound);
  } else {
    std::ostringstream out;
    write_iteration_csv(out, records);
    payload = out.str();
  }
  emit(payload, cfg.output);
  return 0;
}

int cmd_run_montecarlo(const ResolvedInput& input, const RunConfig& cfg, int rounds) {
  if (cfg.format == "json") {
    throw ConfigError("sampled runs emit CSV only");
  }
  if (cfg.trials < 1) {
    throw ConfigError("--trials must be >= 1");
  }

  // Enumerate the per-round branch pairs once; every trial walks the same
  // chain with its own decorrelated stream. A failed single-shot optics
  // attempt keeps no register, so its branch carries the fresh input.
  std::vector<std::vector<BranchOutcome>> chain;
  SchmidtForm current = input.form;
  for (int round = 1; round <= rounds; ++round) {
    const double a2 = current.alpha * current.alpha;
    const double b2 = current.beta * current.beta;
    if (round > 1 && next_round_saturated(a2, b2)) break;
    if (cfg.protocol == "optics") {
      const OpticsResult r = run_optics(current);
      chain.push_back({{"fail", 1.0 - r.success_prob, assemble(current)},
                       {"success", r.success_prob, r.output}});
      break;  // single shot
    }
    const RoundResult rr =
        cfg.protocol == "circuit" ? run_round(current)
                                  : (round == 1 ? qnd_round(current) : recycle_round(current));
    chain.push_back({{"fail", rr.failure_prob, assemble(rr.residual)},
                     {"success", rr.success_prob, rr.success_state}});
    current = rr.residual;
  }

  double expected = 0.0;
  double survive = 1.0;
  for (const auto& branches : chain) {
    expected += survive * branches[1].probability;
    survive *= branches[0].probability;
  }

  std::ostringstream out;
  out << "trial,success_round\n";
  std::int64_t successes = 0;
  for (std::int64_t trial = 0; trial < cfg.trials; ++trial) {
    std::uint64_t stream = derive_stream_seed(cfg.seed, static_cast<std::uint64_t>(trial));
    int success_round = 0;
    for (std::size_t k = 0; k < chain.size(); ++k) {
      const auto [outcome, next] = sample_branch(chain[k], stream);
      stream = next;
      if (outcome.label == "success") {
        success_round = static_cast<int>(k) + 1;
        break;
      }
    }
    if (success_round > 0) ++successes;
    out << trial << ',' << success_round << '\n';
  }

  const double freq = static_cast<double>(successes) / static_cast<double>(cfg.trials);
  const double stderr_est = std::sqrt(freq * (1.0 - freq) / static_cast<double>(cfg.trials));
  out << "# trials=" << cfg.trials << '\n';
  out << "# successes=" << successes << '\n';
  out << "# frequency=" << format_real(freq) << '\n';
  out << "# expected=" << format_real(expected) << '\n';
  out << "# stderr=" << format_real(stderr_est) << '\n';
  out << "# seed=" << cfg.seed << '\n';
  emit(out.str(), cfg.output);
  return 0;
}

int cmd_run(const RunConfig& cfg) {
  if (cfg.protocol != "circuit" && cfg.protocol != "optics" && cfg.protocol != "qnd") {
    throw ConfigError("unknown protocol '" + cfg.protocol + "'");
  }
  if (cfg.mode != "exact" && cfg.mode != "montecarlo") {
    throw ConfigError("unknown mode '" + cfg.mode + "'");
  }
  if (cfg.format != "csv" && cfg.format != "json") {
    throw ConfigError("unknown format '" + cfg.format + "'");
  }
  int rounds = cfg.rounds == 0 ? 1 : cfg.rounds;
  if (rounds < 1) {
    throw ConfigError("--rounds must be >= 1");
  }
  if (cfg.protocol == "optics" && rounds != 1) {
    throw ConfigError("the optics protocol is single shot; use --rounds 1");
  }

  const ResolvedInput input = resolve_state(
      cfg.state, cfg.alpha_sq_given ? std::optional<double>(cfg.alpha_sq) : std::nullopt);
  require_concentratable(input);

  if (cfg.mode == "montecarlo") {
    return cmd_run_montecarlo(input, cfg, rounds);
  }
  return cmd_run_exact(input, cfg, rounds);
}

struct SweepConfig {
  std::string protocol = "circuit";
  std::string state;
  double alpha_sq_min = 0.55;
  double alpha_sq_max = 0.95;
  int steps = 9;
  int rounds = 0;  // 0 -> 30 (1 for optics)
  std::string output;
};

int cmd_sweep(const SweepConfig& cfg) {
  if (cfg.protocol != "circuit" && cfg.protocol != "optics" && cfg.protocol != "qnd") {
    throw ConfigError("unknown protocol '" + cfg.protocol + "'");
  }
  if (!(cfg.alpha_sq_min > 0.0 && cfg.alpha_sq_max < 1.0 && cfg.alpha_sq_min <= cfg.alpha_sq_max)) {
    throw ConfigError("sweep range must satisfy 0 < min <= max < 1");
  }
  if (cfg.steps < 1 || (cfg.steps == 1 && cfg.alpha_sq_min != cfg.alpha_sq_max)) {
    throw ConfigError("--steps must be >= 1 (and the range a single point for --steps 1)");
  }
  const int rounds = cfg.rounds != 0 ? cfg.rounds : (cfg.protocol == "optics" ? 1 : 30);
  if (rounds < 1) {
    throw ConfigError("--rounds must be >= 1");
  }
  if (cfg.protocol == "optics" && rounds != 1) {
    throw ConfigError("the optics protocol is single shot; use --rounds 1");
  }

  // Catalog entries only: the sweep re-derives the state at every grid point.
  CatalogId id = CatalogId::bell();
  try {
    id = CatalogId::parse(cfg.state);
  } catch (const OutOfRange&) {
    throw ConfigError("sweeps need a catalog state, got '" + cfg.state + "'");
  }

  std::vector<double> grid;
  for (int i = 0; i < cfg.steps; ++i) {
    const double t = cfg.steps == 1 ? 0.0
                                    : static_cast<double>(i) / static_cast<double>(cfg.steps - 1);
    grid.push_back(cfg.alpha_sq_min + t * (cfg.alpha_sq_max - cfg.alpha_sq_min));
  }
  for (const double a2 : grid) {
    if (std::abs(a2 - 0.5) <= 1e-9) {
      throw ConfigError("sweep grid hits the balanced point alpha_sq = 0.5; adjust the range");
    }
  }

  std::ostringstream out;
  out << "alpha_sq,single_round_prob,asymptotic_bound,cumulative_at_N\n";
  for (const double a2 : grid) {
    const SchmidtForm form = catalog_state(id, std::sqrt(a2));
    const auto records = run_protocol(cfg.protocol, form, rounds);
    const double bound = asymptotic_bound(form);
    if (const auto violation = closed_form_violation(records, bound)) {
      std::cerr << "invariant violation at alpha_sq=" << format_real(a2) << ": " << *violation
                << "\n";
      return 3;
    }
    out << format_real(a2) << ',' << format_real(records.front().p_k) << ','
        << format_real(bound) << ',' << format_real(records.back().cumulative_success) << '\n';
  }
  emit(out.str(), cfg.output);
  return 0;
}

struct ExportConfig {
  std::string state;
  double alpha_sq = 0.0;
  std::string output;
};

int cmd_export(const ExportConfig& cfg) {
  CatalogId id = CatalogId::bell();
  try {
    id = CatalogId::parse(cfg.state);
  } catch (const OutOfRange&) {
    throw ConfigError("export needs a catalog state, got '" + cfg.state + "'");
  }
  if (!(cfg.alpha_sq > 0.0 && cfg.alpha_sq < 1.0)) {
    throw ConfigError("--alpha-sq must lie strictly inside (0, 1)");
  }
  emit(catalog_to_json(id, std::sqrt(cfg.alpha_sq)), cfg.output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact-amplitude simulator for two-term entanglement concentration"};
  app.require_subcommand(1);

  RunConfig run_cfg;
  CLI::App* run = app.add_subcommand("run", "simulate one input through a protocol");
  run->add_option("--protocol", run_cfg.protocol, "circuit | optics | qnd")
      ->default_str("circuit");
  run->add_option("--state", run_cfg.state, "catalog name or state-document path")->required();
  CLI::Option* run_alpha = run->add_option("--alpha-sq", run_cfg.alpha_sq,
                                           "squared large coefficient for catalog states");
  run->add_option("--rounds", run_cfg.rounds, "iteration rounds (default 1)");
  run->add_option("--mode", run_cfg.mode, "exact | montecarlo")->default_str("exact");
  run->add_option("--trials", run_cfg.trials, "sampled trials for montecarlo mode");
  run->add_option("--seed", run_cfg.seed, "sampling seed")->envname("ECP_SIM_SEED");
  run->add_option("--format", run_cfg.format, "csv | json")->default_str("csv");
  run->add_option("--output", run_cfg.output, "also write the payload to this file");

  SweepConfig sweep_cfg;
  CLI::App* sweep = app.add_subcommand("sweep", "tabulate probabilities over an alpha_sq grid");
  sweep->add_option("--protocol", sweep_cfg.protocol, "circuit | optics | qnd")
      ->default_str("circuit");
  sweep->add_option("--state", sweep_cfg.state, "catalog state name")->required();
  sweep->add_option("--alpha-sq-min", sweep_cfg.alpha_sq_min, "grid start (default 0.55)");
  sweep->add_option("--alpha-sq-max", sweep_cfg.alpha_sq_max, "grid end (default 0.95)");
  sweep->add_option("--steps", sweep_cfg.steps, "grid points (default 9)");
  sweep->add_option("--rounds", sweep_cfg.rounds, "rounds per point (default 30; optics 1)");
  sweep->add_option("--output", sweep_cfg.output, "also write the table to this file");

  ecsim::cli::VerifyOptions verify_cfg;
  CLI::App* verify = app.add_subcommand("verify", "run the invariant suite");
  verify->add_option("--report", verify_cfg.report_path, "write the conservation report here");
  verify->add_option("--seed", verify_cfg.seed, "sampling seed")->envname("ECP_SIM_SEED");
  std::string fault;
  verify->add_option("--inject-fault", fault, "deliberately break a component (pbs-portmap)");

  ExportConfig export_cfg;
  CLI::App* exp = app.add_subcommand("export-state", "write a catalog state document");
  exp->add_option("--state", export_cfg.state, "catalog state name")->required();
  exp->add_option("--alpha-sq", export_cfg.alpha_sq, "squared large coefficient")->required();
  exp->add_option("--output", export_cfg.output, "also write the document to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) {
      run_cfg.alpha_sq_given = run_alpha->count() > 0;
      return cmd_run(run_cfg);
    }
    if (sweep->parsed()) {
      return cmd_sweep(sweep_cfg);
    }
    if (verify->parsed()) {
      if (!fault.empty() && fault != "pbs-portmap") {
        throw ConfigError("unknown fault '" + fault + "' (available: pbs-portmap)");
      }
      verify_cfg.inject_pbs_fault = fault == "pbs-portmap";
      return ecsim::cli::run_verify(verify_cfg);
    }
    if (exp->parsed()) {
      return cmd_export(export_cfg);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const MaximalInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const SimError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
