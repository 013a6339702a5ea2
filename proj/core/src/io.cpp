#include "ecsim/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace ecsim {

using nlohmann::json;

std::string format_real(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", value);
  return buffer;
}

void write_iteration_csv(std::ostream& os, const std::vector<IterationRecord>& records) {
  os << "round,alpha_sq,p_k,cumulative\n";
  for (const auto& r : records) {
    os << r.round << ',' << format_real(r.alpha_k * r.alpha_k) << ',' << format_real(r.p_k) << ','
       << format_real(r.cumulative_success) << '\n';
  }
}

std::string state_to_json(const std::string& id, double alpha, const PureState& state) {
  json doc;
  doc["id"] = id;
  doc["alpha"] = alpha;
  doc["num_qubits"] = state.num_qubits;
  json amps = json::array();
  for (const auto& a : state.amps) {
    amps.push_back(json::array({a.real(), a.imag()}));
  }
  doc["amplitudes"] = std::move(amps);
  return doc.dump(2) + "\n";
}

std::string catalog_to_json(const CatalogId& id, double alpha) {
  const SchmidtForm form = catalog_state(id, alpha);
  return state_to_json(id.name(), alpha, assemble(form));
}

LoadedState load_state_json(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvariantViolation(std::string("malformed state document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("id") || !doc.contains("alpha") ||
      !doc.contains("num_qubits") || !doc.contains("amplitudes")) {
    throw InvariantViolation(
        "state document needs fields id, alpha, num_qubits, amplitudes");
  }
  if (!doc["id"].is_string() || !doc["alpha"].is_number() ||
      !doc["num_qubits"].is_number_integer() || !doc["amplitudes"].is_array()) {
    throw InvariantViolation("state document field has the wrong type");
  }

  const int num_qubits = doc["num_qubits"].get<int>();
  if (num_qubits < 2) {
    throw DimensionMismatch("protocol inputs need at least 2 qubits, got " +
                            std::to_string(num_qubits));
  }
  std::vector<Amplitude> amps;
  amps.reserve(doc["amplitudes"].size());
  for (const auto& entry : doc["amplitudes"]) {
    if (!entry.is_array() || entry.size() != 2 || !entry[0].is_number() || !entry[1].is_number()) {
      throw InvariantViolation("amplitudes must be [re, im] pairs");
    }
    amps.emplace_back(entry[0].get<double>(), entry[1].get<double>());
  }

  bool renormalized = false;
  const PureState state = make_pure_state(num_qubits, std::move(amps), &renormalized);
  if (renormalized) {
    throw InvariantViolation("stored amplitudes deviate from unit norm by more than 1e-9");
  }

  // Recover the two-term form across the last-qubit cut: the even/odd
  // amplitude slices are the (unnormalized) branch states. They must be
  // orthogonal, otherwise the state is not of the required input form.
  const std::size_t half = state.dim() / 2;
  PureState raw0{num_qubits - 1, std::vector<Amplitude>(half)};
  PureState raw1{num_qubits - 1, std::vector<Amplitude>(half)};
  for (std::size_t k = 0; k < half; ++k) {
    raw0.amps[k] = state.amps[2 * k];
    raw1.amps[k] = state.amps[2 * k + 1];
  }
  const double c0 = std::sqrt(raw0.norm_sq());
  const double c1 = std::sqrt(raw1.norm_sq());
  if (c0 < 1e-9 || c1 < 1e-9) {
    throw OutOfRange("state is a product across the last-qubit cut; nothing to concentrate");
  }
  if (std::abs(inner_product(raw0, raw1)) > kDecompositionTol) {
    throw InvariantViolation(
        "branch states across the last-qubit cut are not orthogonal; the state is not in the "
        "two-term input form");
  }
  for (auto& a : raw0.amps) a /= c0;
  for (auto& a : raw1.amps) a /= c1;

  const double stored_alpha = doc["alpha"].get<double>();
  if (std::abs(stored_alpha - c0) > 1e-6) {
    throw InvariantViolation("stored alpha " + std::to_string(stored_alpha) +
                             " disagrees with the recovered coefficient " + std::to_string(c0));
  }

  return {doc["id"].get<std::string>(), SchmidtForm(c0, std::move(raw0), std::move(raw1))};
}

LoadedState load_state_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw OutOfRange("cannot open state file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return load_state_json(buffer.str());
}

std::string conservation_report(const std::string& id, double alpha_sq,
                                const std::vector<double>& espp_by_depth) {
  json doc;
  doc["state"] = id;
  doc["alpha_sq"] = alpha_sq;
  doc["espp_by_depth"] = espp_by_depth;
  return doc.dump(2) + "\n";
}

}  // namespace ecsim
