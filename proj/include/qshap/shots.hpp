#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace qshap {

std::string bitstring(std::uint64_t index, int qubits);  // wire 0 printed first
std::uint64_t parse_bitstring(const std::string& bits);

/// Finite-shot measurement outcome: a multiset of bit strings, stored as
/// counts keyed by basis index.
struct ShotRecord {
  int qubits = 0;
  std::uint64_t shots = 0;
  std::map<std::uint64_t, std::uint64_t> counts;
};

/// shots i.i.d. draws from a distribution over basis indices. Deterministic
/// given the seed and independent of how the distribution was produced.
ShotRecord sample(const Eigen::VectorXd& distribution, int qubits, std::uint64_t shots,
                  std::uint64_t seed);

/// Empirical distribution counts/shots.
Eigen::VectorXd distribution(const ShotRecord& record);

/// Per-qubit independent readout flips: flip[q] = {p(0->1), p(1->0)}.
struct NoiseModel {
  std::vector<std::array<double, 2>> flip;
  std::uint64_t seed = 0;  // default stream; call sites pass explicit seeds

  int qubits() const { return static_cast<int>(flip.size()); }
  static NoiseModel none(int qubits) { return uniform(qubits, 0.0, 0.0); }
  static NoiseModel uniform(int qubits, double p01, double p10);
  void validate() const;
};

NoiseModel noise_from_json(const nlohmann::json& j);
nlohmann::json noise_to_json(const NoiseModel& noise);

/// Each recorded bit flips independently with its qubit's probability; the
/// shot count is preserved.
ShotRecord apply_noise(const ShotRecord& record, const NoiseModel& noise, std::uint64_t seed);

/// Tensored readout model: one column-stochastic 2x2 matrix per qubit,
/// column b = distribution of the measured bit given prepared bit b.
struct CalibrationMatrix {
  std::vector<Eigen::Matrix2d> per_qubit;
};

/// Estimates the calibration by sending the all-zeros and all-ones
/// preparations through the same noise, `shots` each.
CalibrationMatrix calibrate(const NoiseModel& noise, std::uint64_t shots, std::uint64_t seed);

/// Closed-form calibration from the model's true flip probabilities.
CalibrationMatrix exact_calibration(const NoiseModel& noise);

/// Applies the per-qubit inverse matrices to the empirical distribution,
/// clips negative quasi-probabilities to zero and renormalizes. Throws
/// NumericError when a per-qubit matrix is singular (flip probabilities
/// summing to one).
Eigen::VectorXd mitigate(const ShotRecord& record, const CalibrationMatrix& calibration);

/// Squared Bhattacharyya coefficient of two distributions; 1 iff identical.
double hellinger_fidelity(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

// CSV serialization: `bitstring,count` and `bitstring,probability` rows.
void write_counts_csv(std::ostream& out, const ShotRecord& record);
ShotRecord read_counts_csv(std::istream& in);
void write_distribution_csv(std::ostream& out, const Eigen::VectorXd& dist, int qubits);

}  // namespace qshap
