#pragma once

// Test-side oracles: independent computation routes used to cross-check the
// library. Nothing here calls the simulator's amplitude-update path or the
// Shapley reduction being tested.

#include <algorithm>
#include <complex>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

#include "qshap/circuit.hpp"
#include "qshap/rng.hpp"
#include "qshap/statevector.hpp"

namespace oracles {

/// Full 2^q x 2^q matrix of one gate, built from index arithmetic alone.
inline Eigen::MatrixXcd embed_gate(const qshap::Gate& gate, int qubits,
                                   std::span<const double> x, std::span<const double> theta) {
  const std::int64_t dim = std::int64_t{1} << qubits;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  const double angle = gate.params.empty() ? 0.0 : gate.params.front().eval(theta, x);
  if (qshap::gate_arity(gate.kind) == 1) {
    const Eigen::Matrix2cd g = qshap::gate_matrix_1q(gate.kind, angle);
    const std::int64_t bit = std::int64_t{1} << gate.qubits[0];
    for (std::int64_t col = 0; col < dim; ++col) {
      const int in = (col & bit) ? 1 : 0;
      for (int out = 0; out < 2; ++out) {
        std::int64_t row = (col & ~bit) | (std::int64_t{out} << gate.qubits[0]);
        m(row, col) += g(out, in);
      }
    }
  } else {
    const Eigen::Matrix4cd g = qshap::gate_matrix_2q(gate.kind, angle);
    const std::int64_t bit0 = std::int64_t{1} << gate.qubits[0];
    const std::int64_t bit1 = std::int64_t{1} << gate.qubits[1];
    for (std::int64_t col = 0; col < dim; ++col) {
      const int in = ((col & bit0) ? 1 : 0) + 2 * ((col & bit1) ? 1 : 0);
      for (int out = 0; out < 4; ++out) {
        std::int64_t row = (col & ~(bit0 | bit1)) | ((out & 1) ? bit0 : 0) | ((out & 2) ? bit1 : 0);
        m(row, col) += g(out, in);
      }
    }
  }
  return m;
}

/// Dense product U_G ... U_1 of a primitive-gate circuit.
inline Eigen::MatrixXcd dense_unitary(const qshap::Circuit& circuit,
                                      std::span<const double> x = {},
                                      std::span<const double> theta = {}) {
  const std::int64_t dim = std::int64_t{1} << circuit.qubits;
  Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);
  for (const qshap::Gate& gate : circuit.gates) u = embed_gate(gate, circuit.qubits, x, theta) * u;
  return u;
}

/// |Tr(A^dag B)| / dim, one exactly when A and B agree up to a global phase.
inline double phase_insensitive_fidelity(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return std::abs((a.adjoint() * b).trace()) / static_cast<double>(a.rows());
}

/// Shapley values as the average marginal contribution over all N! player
/// orders, straight from the definition.
inline std::vector<double> permutation_shapley(const std::vector<double>& values, int players) {
  std::vector<int> order(players);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> phi(players, 0.0);
  std::uint64_t permutations = 0;
  do {
    std::uint64_t mask = 0;
    for (int p : order) {
      phi[p] += values[mask | (1ULL << p)] - values[mask];
      mask |= 1ULL << p;
    }
    ++permutations;
  } while (std::next_permutation(order.begin(), order.end()));
  for (double& v : phi) v /= static_cast<double>(permutations);
  return phi;
}

/// Meyer-Wallach measure via single-qubit purities: 2 (1 - mean_j Tr rho_j^2).
inline double purity_form_q(const qshap::Statevector& state) {
  if (state.qubits < 2) return 0.0;
  double purity_sum = 0.0;
  const std::int64_t dim = state.amps.size();
  for (int j = 0; j < state.qubits; ++j) {
    const std::int64_t bit = std::int64_t{1} << j;
    Eigen::Matrix2cd rho = Eigen::Matrix2cd::Zero();
    for (std::int64_t i = 0; i < dim; ++i) {
      const int bi = (i & bit) ? 1 : 0;
      for (int bo = 0; bo < 2; ++bo) {
        std::int64_t other = (i & ~bit) | (std::int64_t{bo} << j);
        rho(bo, bi) += state.amps[other] * std::conj(state.amps[i]);
      }
    }
    purity_sum += (rho * rho).trace().real();
  }
  return 2.0 * (1.0 - purity_sum / state.qubits);
}

/// Random primitive circuit over the full gate vocabulary.
inline qshap::Circuit random_circuit(int qubits, int depth, qshap::SplitMix64& rng) {
  using qshap::GateKind;
  static const GateKind one_q[] = {GateKind::H,  GateKind::X,  GateKind::SX,
                                   GateKind::RX, GateKind::RY, GateKind::RZ, GateKind::P};
  static const GateKind two_q[] = {GateKind::CP, GateKind::CX, GateKind::Swap};
  qshap::Circuit c;
  c.qubits = qubits;
  for (int d = 0; d < depth; ++d) {
    qshap::Gate g;
    if (qubits >= 2 && rng.uniform() < 0.4) {
      g.kind = two_q[rng.below(3)];
      int a = static_cast<int>(rng.below(qubits));
      int b = static_cast<int>(rng.below(qubits - 1));
      if (b >= a) ++b;
      g.qubits = {a, b};
    } else {
      g.kind = one_q[rng.below(7)];
      g.qubits = {static_cast<int>(rng.below(qubits))};
    }
    for (int p = 0; p < qshap::gate_param_count(g.kind); ++p)
      g.params.push_back(qshap::ParamExpr::constant(rng.uniform(-6.0, 6.0)));
    c.gates.push_back(std::move(g));
  }
  c.validate();
  return c;
}

/// Random value table for an N-player game.
inline std::vector<double> random_game(int players, qshap::SplitMix64& rng) {
  std::vector<double> values(std::size_t{1} << players);
  for (double& v : values) v = rng.uniform(-1.0, 1.0);
  return values;
}

}  // namespace oracles
