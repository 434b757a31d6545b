#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "qshap/circuit.hpp"
#include "qshap/graph.hpp"
#include "qshap/svm.hpp"
#include "qshap/value_functions.hpp"

namespace qshap {

// ---------------------------------------------------------------------------
// Circuit builders

/// Two-qubit second-order Pauli-Z feature map with `repetitions` blocks of
/// seven gates: H, H, P(2 x0), P(2 x1), CX, P(2 (pi-x0)(pi-x1)), CX.
Circuit qsvm_feature_map(int repetitions);

/// Quantum Fourier transform: q Hadamards, q(q-1)/2 controlled phases and
/// floor(q/2) swaps.
Circuit qft_circuit(int qubits);

/// Two-qubit classifier ansatz, 19 gates: angle encoding via P(2 x_i),
/// four trainable RY gates, CX entanglers; the measured wire is qubit 0.
Circuit qnn_circuit();

/// Three-qubit generator ansatz, 16 gates: per-wire H + RY, then two more RY
/// layers interleaved with CX entanglers (9 trainable angles).
Circuit qgan_circuit();

/// q Hadamards followed by r (cost layer, mixing layer) pairs; layer i binds
/// theta[2i-2] (cost) and theta[2i-1] (mixing).
Circuit qaoa_circuit(const Graph& graph, int repetitions);

/// Gate indices of the 2r layer macros (the canonical player set).
std::vector<int> qaoa_active_gates(const Graph& graph, int repetitions);

// ---------------------------------------------------------------------------
// Max-cut

/// The bundled 7-vertex, 10-edge max-cut instance (max cut 9, unique optimal
/// bipartition up to complement).
Graph shipped_maxcut_graph();

struct MaxCutResult {
  int value = 0;
  std::uint64_t assignment = 0;  // lowest-index optimal bipartition
  int optima_count = 0;          // number of optimal assignments (2 if unique)
};

MaxCutResult brute_force_max_cut(const Graph& graph);

/// Cut value of the most probable basis state (lowest index on ties).
int best_cut_from_state(const Graph& graph, const Statevector& state);

// ---------------------------------------------------------------------------
// Datasets

struct Dataset {
  std::vector<Eigen::Vector2d> x;
  std::vector<int> y;  // labels in {0, 1}

  int size() const { return static_cast<int>(y.size()); }
};

/// Two-class data on (0, 2pi]^2 labeled by the sign of a fixed random
/// two-qubit observable in the r=2 feature-map state, kept only when the
/// expectation clears the separation gap 0.3. Balanced by construction.
Dataset make_havlicek_dataset(int count, std::uint64_t seed);

/// Linearly separable toy set on [-1, 1]^2 with margin 0.2, balanced.
Dataset make_qnn_toy_dataset(int count, std::uint64_t seed);

Dataset read_dataset_csv(std::istream& in);
void write_dataset_csv(std::ostream& out, const Dataset& data);

// ---------------------------------------------------------------------------
// QSVM

/// Transition-amplitude kernel: |<0| U(x2)^dag U(x1) |0>|^2.
double kernel_entry(const Circuit& subcircuit, const Eigen::Vector2d& x1,
                    const Eigen::Vector2d& x2);

Eigen::MatrixXd kernel_matrix(const Circuit& subcircuit, const Dataset& data);
Eigen::MatrixXd kernel_cross(const Circuit& subcircuit, const Dataset& rows,
                             const Dataset& columns);

/// Kernel on train -> deterministic SVM fit -> test accuracy, all with the
/// coalition subcircuit.
double qsvm_value(const CoalitionGame& game, std::uint64_t coalition, const Dataset& train,
                  const Dataset& test, double C);

// ---------------------------------------------------------------------------
// QNN: one-shot test accuracy (an uncertain value function)

double qnn_value(const CoalitionGame& game, std::uint64_t coalition, const Dataset& data,
                 const Eigen::VectorXd& theta, std::uint64_t seed);

// ---------------------------------------------------------------------------
// QGAN: Hellinger fidelity of noisy sampled output vs exact output

double qgan_value(const CoalitionGame& game, std::uint64_t coalition,
                  const Eigen::VectorXd& theta, const HellingerConfig& config,
                  std::uint64_t seed);

/// Discretized log-normal reference distribution (mu = 1, sigma = 1) on
/// {0..2^q-1}, renormalized; the generator's training target.
Eigen::VectorXd lognormal_reference(int qubits);

// ---------------------------------------------------------------------------
// Derivative-free optimizer (Nelder-Mead with seeded restarts)

struct SimplexOptions {
  int budget = 500;          // objective evaluations per optimize call
  double initial_step = 0.6; // simplex edge length
  std::uint64_t seed = 0;
};

struct OptimizeResult {
  Eigen::VectorXd point;
  double value = 0.0;
  int evaluations = 0;
  bool budget_exhausted = false;
};

OptimizeResult minimize_simplex(const std::function<double(const Eigen::VectorXd&)>& objective,
                                const Eigen::VectorXd& start, const SimplexOptions& options);

/// Minimizes the grand-coalition energy of the QAOA circuit over the 2r
/// layer angles; deterministic given the seed.
OptimizeResult optimize_qaoa(const Graph& graph, int repetitions, const SimplexOptions& options);

/// Cut value certified by the optimized state (most probable basis state).
int qaoa_cut_value(const Graph& graph, int repetitions, const Eigen::VectorXd& theta);

}  // namespace qshap
