#include "ecsim/schmidt.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>

namespace ecsim {

SchmidtDecomposition schmidt_extract(const PureState& state, int cut_after) {
  if (cut_after < 1 || cut_after >= state.num_qubits) {
    throw BadCut("cut after qubit " + std::to_string(cut_after) + " invalid for " +
                 std::to_string(state.num_qubits) + " qubits");
  }
  const int left_qubits = cut_after;
  const int right_qubits = state.num_qubits - cut_after;
  const std::size_t rows = std::size_t{1} << left_qubits;
  const std::size_t cols = std::size_t{1} << right_qubits;

  // amps[r * cols + c] is the coefficient of |r>|c>; reshape and factor.
  Eigen::MatrixXcd m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = state.amps[r * cols + c];
    }
  }

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const auto& u = svd.matrixU();
  const auto& v = svd.matrixV();

  SchmidtDecomposition out;
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    if (sigma(k) < 1e-12) break;  // singular values come back sorted descending
    out.coefficients.push_back(sigma(k));

    PureState left;
    left.num_qubits = left_qubits;
    left.amps.resize(rows);
    for (std::size_t r = 0; r < rows; ++r) left.amps[r] = u(static_cast<Eigen::Index>(r), k);

    // m = U S V^dag, so the right factor paired with u_k is conj(v_k).
    PureState right;
    right.num_qubits = right_qubits;
    right.amps.resize(cols);
    for (std::size_t c = 0; c < cols; ++c) {
      right.amps[c] = std::conj(v(static_cast<Eigen::Index>(c), k));
    }

    out.left.push_back(std::move(left));
    out.right.push_back(std::move(right));
  }
  return out;
}

}  // namespace ecsim
