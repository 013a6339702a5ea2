#include "ecsim/state.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <utility>

namespace ecsim {

namespace {

bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

void check_qubit_count(int num_qubits, std::size_t dim) {
  if (num_qubits < 1 || num_qubits > 30) {
    throw DimensionMismatch("qubit count " + std::to_string(num_qubits) +
                            " outside supported range [1, 30]");
  }
  if (!is_power_of_two(dim) || dim != (std::size_t{1} << num_qubits)) {
    throw DimensionMismatch("amplitude vector of size " + std::to_string(dim) +
                            " does not match " + std::to_string(num_qubits) + " qubits");
  }
}

PureState uniform_pair(int num_qubits, std::size_t i, std::size_t j, double sign_j) {
  PureState s;
  s.num_qubits = num_qubits;
  s.amps.assign(std::size_t{1} << num_qubits, Amplitude{0.0, 0.0});
  const double r = 1.0 / std::sqrt(2.0);
  s.amps[i] = Amplitude{r, 0.0};
  s.amps[j] = Amplitude{sign_j * r, 0.0};
  return s;
}

}  // namespace

double PureState::norm_sq() const {
  double total = 0.0;
  for (const auto& a : amps) total += std::norm(a);
  return total;
}

PureState make_pure_state(int num_qubits, std::vector<Amplitude> amps,
                          bool* renormalization_warning) {
  check_qubit_count(num_qubits, amps.size());
  double norm_sq = 0.0;
  for (const auto& a : amps) {
    if (!std::isfinite(a.real()) || !std::isfinite(a.imag())) {
      throw InvariantViolation("non-finite amplitude in state vector");
    }
    norm_sq += std::norm(a);
  }
  if (norm_sq < 1e-24) {
    throw ZeroNorm("cannot normalize a state with norm " + std::to_string(std::sqrt(norm_sq)));
  }
  const double norm = std::sqrt(norm_sq);
  if (renormalization_warning != nullptr) {
    *renormalization_warning = std::abs(norm - 1.0) > 1e-9;
  }
  for (auto& a : amps) a /= norm;
  return PureState{num_qubits, std::move(amps)};
}

PureState basis_state(int num_qubits, std::size_t index) {
  check_qubit_count(num_qubits, std::size_t{1} << num_qubits);
  if (index >= (std::size_t{1} << num_qubits)) {
    throw IndexOutOfRange("basis index " + std::to_string(index) + " out of range");
  }
  PureState s;
  s.num_qubits = num_qubits;
  s.amps.assign(std::size_t{1} << num_qubits, Amplitude{0.0, 0.0});
  s.amps[index] = Amplitude{1.0, 0.0};
  return s;
}

PureState tensor(const PureState& a, const PureState& b) {
  PureState out;
  out.num_qubits = a.num_qubits + b.num_qubits;
  out.amps.resize(a.dim() * b.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    for (std::size_t j = 0; j < b.dim(); ++j) {
      out.amps[i * b.dim() + j] = a.amps[i] * b.amps[j];
    }
  }
  return out;
}

Amplitude inner_product(const PureState& a, const PureState& b) {
  if (a.dim() != b.dim() || a.num_qubits != b.num_qubits) {
    throw DimensionMismatch("inner product of states with different qubit counts");
  }
  Amplitude total{0.0, 0.0};
  for (std::size_t i = 0; i < a.dim(); ++i) total += std::conj(a.amps[i]) * b.amps[i];
  return total;
}

double fidelity(const PureState& a, const PureState& b) {
  return std::norm(inner_product(a, b));
}

double max_abs_diff(const PureState& a, const PureState& b) {
  if (a.dim() != b.dim()) {
    throw DimensionMismatch("comparing states with different dimensions");
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    worst = std::max(worst, std::abs(a.amps[i] - b.amps[i]));
  }
  return worst;
}

SchmidtForm::SchmidtForm(double alpha_in, PureState phi0_in, PureState phi1_in)
    : alpha(alpha_in), phi0(std::move(phi0_in)), phi1(std::move(phi1_in)) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw OutOfRange("alpha must lie strictly inside (0, 1), got " + std::to_string(alpha));
  }
  beta = std::sqrt(1.0 - alpha * alpha);
  if (phi0.num_qubits != phi1.num_qubits || phi0.dim() != phi1.dim()) {
    throw DimensionMismatch("phi0 and phi1 must span the same register");
  }
  if (phi0.num_qubits < 1) {
    throw DimensionMismatch("branch states need at least one qubit");
  }
  if (std::abs(phi0.norm_sq() - 1.0) > kNormTol || std::abs(phi1.norm_sq() - 1.0) > kNormTol) {
    throw InvariantViolation("branch states must be normalized");
  }
  if (std::abs(inner_product(phi0, phi1)) > kNormTol) {
    throw InvariantViolation("branch states must be orthogonal");
  }
}

bool SchmidtForm::is_maximal() const { return std::abs(alpha * alpha - 0.5) <= kMaximalTol; }

PureState assemble(const SchmidtForm& form) {
  PureState out;
  out.num_qubits = form.phi0.num_qubits + 1;
  out.amps.resize(form.phi0.dim() * 2);
  for (std::size_t i = 0; i < form.phi0.dim(); ++i) {
    out.amps[2 * i] = form.alpha * form.phi0.amps[i];
    out.amps[2 * i + 1] = form.beta * form.phi1.amps[i];
  }
  return out;
}

CatalogId CatalogId::cat(int n) {
  if (n < 1) {
    throw OutOfRange("cat state size must be >= 1, got " + std::to_string(n));
  }
  return {Kind::CatN, n};
}

CatalogId CatalogId::parse(const std::string& text) {
  if (text == "bell") return bell();
  if (text == "ghz3") return ghz3();
  if (text == "ghzlike") return ghz_like();
  if (text == "q5") return q5();
  if (text == "cluster4") return cluster4();
  if (text.size() > 3 && text.compare(0, 3, "cat") == 0) {
    const std::string digits = text.substr(3);
    if (!digits.empty() &&
        std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); })) {
      return cat(std::stoi(digits));
    }
  }
  throw OutOfRange("unknown catalog state '" + text + "'");
}

std::string CatalogId::name() const {
  switch (kind) {
    case Kind::Bell:
      return "bell";
    case Kind::Ghz3:
      return "ghz3";
    case Kind::CatN:
      return "cat" + std::to_string(cat_n);
    case Kind::GhzLike:
      return "ghzlike";
    case Kind::Q5:
      return "q5";
    case Kind::Cluster4:
      return "cluster4";
  }
  throw InvariantViolation("unreachable catalog kind");
}

int CatalogId::system_qubits() const {
  switch (kind) {
    case Kind::Bell:
      return 1;
    case Kind::Ghz3:
      return 2;
    case Kind::CatN:
      return cat_n;
    case Kind::GhzLike:
      return 2;
    case Kind::Q5:
      return 3;
    case Kind::Cluster4:
      return 3;
  }
  throw InvariantViolation("unreachable catalog kind");
}

SchmidtForm catalog_state(const CatalogId& id, double alpha) {
  if (!(alpha > 0.0) || !(alpha < 1.0)) {
    throw OutOfRange("alpha must lie strictly inside (0, 1), got " + std::to_string(alpha));
  }
  switch (id.kind) {
    case CatalogId::Kind::Bell:
      return SchmidtForm(alpha, basis_state(1, 0), basis_state(1, 1));
    case CatalogId::Kind::Ghz3:
      return SchmidtForm(alpha, basis_state(2, 0b00), basis_state(2, 0b11));
    case CatalogId::Kind::CatN: {
      const int n = id.cat_n;
      const std::size_t ones = (std::size_t{1} << n) - 1;
      return SchmidtForm(alpha, basis_state(n, 0), basis_state(n, ones));
    }
    case CatalogId::Kind::GhzLike:
      // phi0 = (|01> + |10>)/sqrt(2), phi1 = (|00> + |11>)/sqrt(2)
      return SchmidtForm(alpha, uniform_pair(2, 0b01, 0b10, +1.0), uniform_pair(2, 0b00, 0b11, +1.0));
    case CatalogId::Kind::Q5:
      // phi0 = (|000> + |111>)/sqrt(2), phi1 = (|101> + |110>)/sqrt(2)
      return SchmidtForm(alpha, uniform_pair(3, 0b000, 0b111, +1.0),
                         uniform_pair(3, 0b101, 0b110, +1.0));
    case CatalogId::Kind::Cluster4:
      // phi0 = (|000> + |110>)/sqrt(2), phi1 = (|001> - |111>)/sqrt(2)
      return SchmidtForm(alpha, uniform_pair(3, 0b000, 0b110, +1.0),
                         uniform_pair(3, 0b001, 0b111, -1.0));
  }
  throw InvariantViolation("unreachable catalog kind");
}

}  // namespace ecsim
