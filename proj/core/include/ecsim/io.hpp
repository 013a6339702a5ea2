#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ecsim/protocol_circuit.hpp"
#include "ecsim/state.hpp"

namespace ecsim {

/// Format a real number with 12 significant digits, '.' decimal separator,
/// locale independent.
std::string format_real(double value);

/// CSV header "round,alpha_sq,p_k,cumulative" plus one row per record, '\n'
/// line endings, 12 significant digits.
void write_iteration_csv(std::ostream& os, const std::vector<IterationRecord>& records);

/// JSON document for an assembled state:
///   { "id": ..., "alpha": ..., "num_qubits": ..., "amplitudes": [[re, im], ...] }
/// amplitudes are listed in basis order over num_qubits qubits.
std::string state_to_json(const std::string& id, double alpha, const PureState& state);

/// Serialize a catalog entry at the given alpha.
std::string catalog_to_json(const CatalogId& id, double alpha);

struct LoadedState {
  std::string id;
  SchmidtForm form;
};

/// Parse a state document and recover its Schmidt form across the
/// last-qubit cut. The state must decompose into exactly two terms whose
/// right factors are the computational basis states |0> and |1> (up to
/// phase, within 1e-10) — i.e. it must already be written in the protocol
/// input form. The stored "alpha" field is cross-checked against the
/// recovered coefficient within 1e-6. Throws SimError subtypes with
/// descriptive messages on malformed documents or states outside this form.
LoadedState load_state_json(const std::string& json_text);

/// load_state_json applied to a file's contents.
LoadedState load_state_file(const std::string& path);

/// JSON conservation report for one state:
///   { "state": id, "alpha_sq": ..., "espp_by_depth": [...] }
std::string conservation_report(const std::string& id, double alpha_sq,
                                const std::vector<double>& espp_by_depth);

}  // namespace ecsim
