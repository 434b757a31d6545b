#include "qshap/value_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "qshap/errors.hpp"
#include "qshap/rng.hpp"

namespace qshap {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

Circuit expanded_subcircuit(const CoalitionGame& game, std::uint64_t coalition,
                            const std::optional<Graph>& layer_graph) {
  Circuit sub = game.subcircuit(coalition);
  if (sub.has_layers()) sub = expand_layers(sub, layer_graph ? &*layer_graph : nullptr);
  return sub;
}

}  // namespace

int fidelity_bin(double fidelity, int bins) {
  fidelity = std::clamp(fidelity, 0.0, 1.0);
  if (fidelity >= 1.0) return bins - 1;
  return std::min(bins - 1, static_cast<int>(fidelity * bins));
}

double haar_bin_mass(int qubits, int bin, int bins) {
  const double lo = static_cast<double>(bin) / bins;
  const double hi = static_cast<double>(bin + 1) / bins;
  const double m = std::ldexp(1.0, qubits) - 1.0;  // 2^q - 1
  return std::pow(1.0 - lo, m) - std::pow(1.0 - hi, m);
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ConfigError("kl_divergence: size mismatch");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    if (q[i] <= 0.0) throw NumericError("kl_divergence: reference bin with zero mass");
    kl += p[i] * std::log(p[i] / q[i]);
  }
  return kl;
}

double expressibility_eta(const CoalitionGame& game, std::uint64_t coalition,
                          const ExpressibilityConfig& config, const Eigen::VectorXd& x,
                          std::uint64_t eval_seed) {
  if (config.pairs < 1) throw ConfigError("expressibility: pairs must be >= 1");
  if (config.bins < 1) throw ConfigError("expressibility: bins must be >= 1");
  if (config.swap_test_shots && config.shots < 1)
    throw ConfigError("expressibility: shots must be >= 1");
  const Circuit sub = expanded_subcircuit(game, coalition, config.layer_graph);
  const int p = sub.theta_dim;
  const std::span<const double> xs(x.data(), x.size());

  // Parameter pairs are drawn from the config seed only, so every coalition
  // sees the same draws (common random numbers across the game).
  SplitMix64 draw(derive_seed(config.seed, "expressibility-pairs"));
  std::vector<double> histogram(config.bins, 0.0);
  std::vector<double> theta1(p), theta2(p);
  for (int i = 0; i < config.pairs; ++i) {
    for (int d = 0; d < p; ++d) theta1[d] = draw.uniform(0.0, kTwoPi);
    for (int d = 0; d < p; ++d) theta2[d] = draw.uniform(0.0, kTwoPi);
    const Statevector psi1 = run(sub, xs, theta1);
    const Statevector psi2 = run(sub, xs, theta2);
    double fidelity = std::abs(overlap(psi1, psi2));
    if (config.swap_test_shots) {
      // Simulated one-ancilla overlap test: P(1) = 1/2 - F/2, F = 1 - 2 ones/s.
      SplitMix64 shot(derive_seed(derive_seed(eval_seed, "swap-shots"), static_cast<std::uint64_t>(i)));
      const double p_one = 0.5 - 0.5 * fidelity;
      std::uint64_t ones = 0;
      for (std::uint64_t s = 0; s < config.shots; ++s) ones += shot.uniform() < p_one;
      fidelity = std::clamp(
          1.0 - 2.0 * static_cast<double>(ones) / static_cast<double>(config.shots), 0.0, 1.0);
    }
    histogram[fidelity_bin(fidelity, config.bins)] += 1.0;
  }
  for (double& h : histogram) h /= config.pairs;
  std::vector<double> haar(config.bins);
  for (int b = 0; b < config.bins; ++b) haar[b] = haar_bin_mass(sub.qubits, b, config.bins);
  return kl_divergence(histogram, haar);
}

namespace {

/// Reduced vector with qubit `wire` projected onto bit value `bit` and
/// deleted: r[k] = psi[insert_bit(k, wire, bit)].
Eigen::VectorXcd project_delete(const Eigen::VectorXcd& amps, int qubits, int wire, int bit) {
  const std::int64_t dim = std::int64_t{1} << (qubits - 1);
  const std::int64_t low_mask = (std::int64_t{1} << wire) - 1;
  Eigen::VectorXcd r(dim);
  for (std::int64_t k = 0; k < dim; ++k) {
    std::int64_t idx = (k & low_mask) | ((k & ~low_mask) << 1) |
                       (static_cast<std::int64_t>(bit) << wire);
    r[k] = amps[idx];
  }
  return r;
}

double generalized_distance(const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) {
  double d = 0.0;
  for (std::int64_t i = 0; i < u.size(); ++i)
    for (std::int64_t j = 0; j < v.size(); ++j) d += std::norm(u[i] * v[j] - u[j] * v[i]);
  return 0.5 * d;
}

}  // namespace

double meyer_wallach_q(const Statevector& state) {
  if (state.qubits < 2) return 0.0;
  double sum = 0.0;
  for (int wire = 0; wire < state.qubits; ++wire) {
    Eigen::VectorXcd u = project_delete(state.amps, state.qubits, wire, 0);
    Eigen::VectorXcd v = project_delete(state.amps, state.qubits, wire, 1);
    sum += generalized_distance(u, v);
  }
  return std::clamp(4.0 / state.qubits * sum, 0.0, 1.0);
}

double entangling_capability(const CoalitionGame& game, std::uint64_t coalition,
                             const EntanglingConfig& config, const Eigen::VectorXd& x) {
  if (config.samples < 1) throw ConfigError("entangling capability: samples must be >= 1");
  const Circuit sub = expanded_subcircuit(game, coalition, config.layer_graph);
  const int p = sub.theta_dim;
  const std::span<const double> xs(x.data(), x.size());
  SplitMix64 draw(derive_seed(config.seed, "entangling-samples"));
  std::vector<double> qs(config.samples);
  std::vector<double> theta(p);
  for (int i = 0; i < config.samples; ++i) {
    for (int d = 0; d < p; ++d) theta[d] = draw.uniform(0.0, kTwoPi);
    qs[i] = meyer_wallach_q(run(sub, xs, theta));
  }
  double sum = 0.0;
  for (double q : qs) sum += q;
  return sum / config.samples;
}

double hellinger_value(const CoalitionGame& game, std::uint64_t coalition,
                       const HellingerConfig& config, const Eigen::VectorXd& x,
                       const Eigen::VectorXd& theta, std::uint64_t seed) {
  if (config.shots < 1) throw ConfigError("hellinger: shots must be >= 1");
  const Circuit sub = game.subcircuit(coalition);
  const Statevector psi = run(sub, x, theta);
  const Eigen::VectorXd m_sim = probabilities(psi);
  ShotRecord record = sample(m_sim, sub.qubits, config.shots, derive_seed(seed, "shots"));
  record = apply_noise(record, config.noise, derive_seed(seed, "noise"));
  Eigen::VectorXd m_qc;
  if (config.mitigation) {
    CalibrationMatrix cal =
        config.sampled_calibration
            ? calibrate(config.noise, config.calibration_shots, derive_seed(seed, "calibration"))
            : exact_calibration(config.noise);
    m_qc = mitigate(record, cal);
  } else {
    m_qc = distribution(record);
  }
  return hellinger_fidelity(m_qc, m_sim);
}

double accuracy_value(std::span<const int> predictions, std::span<const int> labels) {
  if (predictions.empty()) throw ConfigError("accuracy: empty input");
  if (predictions.size() != labels.size())
    throw ConfigError("accuracy: prediction/label length mismatch");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) correct += predictions[i] == labels[i];
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

double energy_value(const CoalitionGame& game, std::uint64_t coalition,
                    const Eigen::VectorXd& theta, const Graph& graph) {
  if (graph.vertices != game.circuit().qubits)
    throw ConfigError("energy value: graph/qubit count mismatch");
  const Circuit sub = expand_layers(game.subcircuit(coalition), &graph);
  return energy(run(sub, Eigen::VectorXd(), theta), maxcut_hamiltonian(graph));
}

double execution_efficiency(const CoalitionGame& game, std::uint64_t coalition,
                            const EfficiencyConfig& config, std::uint64_t seed) {
  if (config.trials < 1) throw ConfigError("execution efficiency: trials must be >= 1");
  if (!(config.s1 < 0.0) || !(config.s2 < config.s1))
    throw ConfigError("execution efficiency: penalties must satisfy s2 < s1 < 0");
  Circuit sub = expanded_subcircuit(game, coalition, config.layer_graph);
  const std::span<const double> xs(config.x.data(), config.x.size());
  const std::span<const double> ts(config.theta.data(), config.theta.size());
  double best = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < config.trials; ++t) {
    TranspiledCircuit transpiled =
        transpile(sub, config.target, derive_seed(derive_seed(seed, "trial"), static_cast<std::uint64_t>(t)), xs, ts);
    best = std::max(best, penalty(transpiled, config.s1, config.s2));
  }
  return best;
}

}  // namespace qshap
