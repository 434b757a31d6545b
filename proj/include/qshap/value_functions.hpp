#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include <Eigen/Dense>

#include "qshap/circuit.hpp"
#include "qshap/graph.hpp"
#include "qshap/shots.hpp"
#include "qshap/statevector.hpp"
#include "qshap/transpiler.hpp"

namespace qshap {

// ---------------------------------------------------------------------------
// Expressibility: KL divergence between the ansatz state-pair fidelity
// histogram (parameters drawn uniformly from [0, 2pi)^p) and the fidelity
// density of Haar-random states. Returned as eta >= 0; the value function is
// v = -eta so that larger values mean a more expressive circuit.

struct ExpressibilityConfig {
  int pairs = 5000;   // fidelity samples
  int bins = 75;      // histogram resolution
  bool swap_test_shots = false;  // estimate each fidelity from s Bernoulli draws
  std::uint64_t shots = 10000;   // s, shot mode only
  std::uint64_t seed = 0;        // parameter draws (shared across coalitions)
  std::optional<Graph> layer_graph;  // for circuits with layer macros
};

/// Histogram bin of a fidelity in [0, 1]; the F = 1 edge falls in the last bin.
int fidelity_bin(double fidelity, int bins);

/// Haar fidelity mass of one bin: (1-lo)^(2^q-1) - (1-hi)^(2^q-1).
double haar_bin_mass(int qubits, int bin, int bins);

/// KL divergence sum p log(p/q) with the 0*log(0/.) = 0 convention.
double kl_divergence(std::span<const double> p, std::span<const double> q);

double expressibility_eta(const CoalitionGame& game, std::uint64_t coalition,
                          const ExpressibilityConfig& config, const Eigen::VectorXd& x,
                          std::uint64_t eval_seed);

// ---------------------------------------------------------------------------
// Entangling capability: mean Meyer-Wallach measure over parameter samples.

struct EntanglingConfig {
  int samples = 1000;      // parameter draws
  std::uint64_t seed = 0;  // shared across coalitions
  std::optional<Graph> layer_graph;
};

/// Meyer-Wallach measure Q in [0, 1]: (4/q) sum_j D(i_j(0)psi, i_j(1)psi),
/// with the one-bit deletion maps i_j(b) and the generalized distance
/// D(u, v) = 1/2 sum_ij |u_i v_j - u_j v_i|^2. Zero exactly on product states.
double meyer_wallach_q(const Statevector& state);

double entangling_capability(const CoalitionGame& game, std::uint64_t coalition,
                             const EntanglingConfig& config, const Eigen::VectorXd& x);

// ---------------------------------------------------------------------------
// Hellinger fidelity between the exact output distribution of the coalition
// subcircuit and a finite-shot, readout-noisy measurement of the same
// subcircuit (optionally error-mitigated).

struct HellingerConfig {
  std::uint64_t shots = 10000;
  NoiseModel noise;
  bool mitigation = false;
  bool sampled_calibration = false;   // default: closed-form calibration
  std::uint64_t calibration_shots = 10000;
};

double hellinger_value(const CoalitionGame& game, std::uint64_t coalition,
                       const HellingerConfig& config, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& theta, std::uint64_t seed);

// ---------------------------------------------------------------------------

/// Fraction of matching entries; throws ConfigError on empty or mismatched
/// inputs.
double accuracy_value(std::span<const int> predictions, std::span<const int> labels);

/// Exact expectation of the max-cut cost observable on the coalition
/// subcircuit (layer macros expanded against the same graph).
double energy_value(const CoalitionGame& game, std::uint64_t coalition,
                    const Eigen::VectorXd& theta, const Graph& graph);

// ---------------------------------------------------------------------------
// Estimated execution efficiency: best (least negative) transpilation
// penalty over seeded trials. Always <= 0.

struct EfficiencyConfig {
  HardwareTarget target;
  double s1 = -1.0;  // one-qubit gate penalty
  double s2 = -10.0; // two-qubit gate penalty
  int trials = 50;
  Eigen::VectorXd x;      // parameter bindings used during transpilation
  Eigen::VectorXd theta;
  std::optional<Graph> layer_graph;
};

double execution_efficiency(const CoalitionGame& game, std::uint64_t coalition,
                            const EfficiencyConfig& config, std::uint64_t seed);

}  // namespace qshap
