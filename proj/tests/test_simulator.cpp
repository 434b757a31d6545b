#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "oracles.hpp"
#include "qshap/errors.hpp"
#include "qshap/models.hpp"
#include "qshap/shots.hpp"
#include "qshap/statevector.hpp"

using namespace qshap;

TEST_CASE("empty circuit prepares the ground state") {
  Circuit c;
  c.qubits = 3;
  Statevector s = run(c);
  CHECK(s.amps[0] == std::complex<double>(1, 0));
  CHECK(s.norm_sq() == doctest::Approx(1.0));
}

TEST_CASE("hadamard gives the uniform single-qubit state") {
  Circuit c;
  c.qubits = 1;
  c.gates.push_back({GateKind::H, {0}, {}, 0});
  Statevector s = run(c);
  CHECK(std::abs(s.amps[0] - 1 / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(s.amps[1] - 1 / std::sqrt(2.0)) < 1e-14);
}

TEST_CASE("bell state probabilities") {
  Circuit c;
  c.qubits = 2;
  c.gates.push_back({GateKind::H, {0}, {}, 0});
  c.gates.push_back({GateKind::CX, {0, 1}, {}, 0});
  Eigen::VectorXd p = probabilities(run(c));
  CHECK(p[0] == doctest::Approx(0.5));
  CHECK(p[3] == doctest::Approx(0.5));
  CHECK(p[1] == doctest::Approx(0.0));
  CHECK(p[2] == doctest::Approx(0.0));
}

TEST_CASE("H H then CX matches the dense matrix product") {
  Circuit c;
  c.qubits = 2;
  c.gates.push_back({GateKind::H, {0}, {}, 0});
  c.gates.push_back({GateKind::H, {1}, {}, 0});
  c.gates.push_back({GateKind::CX, {0, 1}, {}, 0});
  Statevector s = run(c);
  Eigen::VectorXcd expect = oracles::dense_unitary(c).col(0);
  for (int i = 0; i < 4; ++i) CHECK(std::abs(s.amps[i] - expect[i]) < 1e-12);
}

TEST_CASE("gate matrices are unitary at random parameters") {
  SplitMix64 rng(5);
  for (GateKind kind : {GateKind::H, GateKind::X, GateKind::SX, GateKind::RX, GateKind::RY,
                        GateKind::RZ, GateKind::P}) {
    for (int trial = 0; trial < 5; ++trial) {
      Eigen::Matrix2cd u = gate_matrix_1q(kind, rng.uniform(-7, 7));
      CHECK((u.adjoint() * u - Eigen::Matrix2cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  for (GateKind kind : {GateKind::CP, GateKind::CX, GateKind::Swap}) {
    Eigen::Matrix4cd u = gate_matrix_2q(kind, rng.uniform(-7, 7));
    CHECK((u.adjoint() * u - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("random circuits match the dense oracle and preserve the norm") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    int qubits = 1 + static_cast<int>(rng.below(4));
    Circuit c = oracles::random_circuit(qubits, 1 + static_cast<int>(rng.below(20)), rng);
    Statevector s = run(c);
    CHECK(std::abs(s.norm_sq() - 1.0) < 1e-10);
    Eigen::VectorXcd expect = oracles::dense_unitary(c).col(0);
    for (Eigen::Index i = 0; i < expect.size(); ++i) CHECK(std::abs(s.amps[i] - expect[i]) < 1e-10);
  }
}

TEST_CASE("norm preservation over deep random circuits") {
  SplitMix64 rng(123);
  for (int trial = 0; trial < 1000; ++trial) {
    int qubits = 1 + static_cast<int>(rng.below(6));
    Circuit c = oracles::random_circuit(qubits, 1 + static_cast<int>(rng.below(50)), rng);
    CHECK(std::abs(run(c).norm_sq() - 1.0) < 1e-10);
  }
}

TEST_CASE("simulating an unexpanded layer is an error") {
  Graph g = shipped_maxcut_graph();
  Circuit layered = qaoa_circuit(g, 1);
  CHECK_THROWS_AS(run(layered), ConfigError);
}

TEST_CASE("probabilities sum to one") {
  SplitMix64 rng(17);
  Circuit c = oracles::random_circuit(3, 25, rng);
  Eigen::VectorXd p = probabilities(run(c));
  CHECK(p.sum() == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(p.minCoeff() >= 0.0);
}

TEST_CASE("sampling a point mass returns all shots on it") {
  Eigen::VectorXd dist = Eigen::VectorXd::Zero(2);
  dist[0] = 1.0;
  ShotRecord r = sample(dist, 1, 100, 7);
  CHECK(r.counts.at(0) == 100);
  CHECK(r.shots == 100);
}

TEST_CASE("bell sampling concentrates near one half") {
  Circuit c;
  c.qubits = 2;
  c.gates.push_back({GateKind::H, {0}, {}, 0});
  c.gates.push_back({GateKind::CX, {0, 1}, {}, 0});
  ShotRecord r = sample(probabilities(run(c)), 2, 100000, 2024);
  double frac = static_cast<double>(r.counts.at(0)) / r.shots;
  CHECK(frac > 0.49);
  CHECK(frac < 0.51);
  CHECK(r.counts.count(1) == 0);
}

TEST_CASE("sampling is reproducible under a fixed seed") {
  Eigen::VectorXd dist(4);
  dist << 0.1, 0.2, 0.3, 0.4;
  ShotRecord a = sample(dist, 2, 5000, 99);
  ShotRecord b = sample(dist, 2, 5000, 99);
  CHECK(a.counts == b.counts);
  ShotRecord c = sample(dist, 2, 5000, 100);
  CHECK(a.counts != c.counts);
  CHECK_THROWS_AS(sample(dist, 2, 0, 1), ConfigError);
}

TEST_CASE("bitstrings print wire 0 first") {
  CHECK(bitstring(1, 3) == "100");
  CHECK(bitstring(4, 3) == "001");
  CHECK(parse_bitstring("100") == 1);
  CHECK(parse_bitstring("011") == 6);
}

TEST_CASE("zero flip probabilities leave records unchanged") {
  ShotRecord r{2, 10, {{0, 4}, {3, 6}}};
  ShotRecord out = apply_noise(r, NoiseModel::none(2), 5);
  CHECK(out.counts == r.counts);
}

TEST_CASE("certain one-to-zero flips force the all-zeros record") {
  ShotRecord r{2, 10, {{3, 10}}};
  ShotRecord out = apply_noise(r, NoiseModel::uniform(2, 0.0, 1.0), 5);
  CHECK(out.counts.at(0) == 10);
  CHECK(out.shots == 10);
}

TEST_CASE("symmetric flips hit the binomial rate") {
  ShotRecord r{1, 100000, {{0, 100000}}};
  ShotRecord out = apply_noise(r, NoiseModel::uniform(1, 0.05, 0.05), 31);
  double ones = static_cast<double>(out.counts.count(1) ? out.counts.at(1) : 0) / out.shots;
  CHECK(ones == doctest::Approx(0.05).epsilon(0.2));
  CHECK(std::abs(ones - 0.05) < 0.01);
}

TEST_CASE("identity calibration leaves mitigation as renormalized counts") {
  ShotRecord r{2, 8, {{0, 2}, {1, 2}, {2, 2}, {3, 2}}};
  Eigen::VectorXd out = mitigate(r, exact_calibration(NoiseModel::none(2)));
  for (int i = 0; i < 4; ++i) CHECK(out[i] == doctest::Approx(0.25));
}

TEST_CASE("exact calibration inverts known symmetric readout noise") {
  // expected counts of a known distribution pushed through p = 0.1 flips
  const int qubits = 2;
  NoiseModel noise = NoiseModel::uniform(qubits, 0.1, 0.1);
  Eigen::VectorXd ideal(4);
  ideal << 0.5, 0.0, 0.2, 0.3;
  Eigen::Matrix2d m;
  m << 0.9, 0.1, 0.1, 0.9;
  Eigen::VectorXd noisy = Eigen::VectorXd::Zero(4);
  for (int in = 0; in < 4; ++in)
    for (int out = 0; out < 4; ++out) {
      double p = 1.0;
      for (int w = 0; w < qubits; ++w) p *= m((out >> w) & 1, (in >> w) & 1);
      noisy[out] += p * ideal[in];
    }
  const std::uint64_t shots = 1000000000ULL;
  ShotRecord record{qubits, 0, {}};
  for (int b = 0; b < 4; ++b) {
    auto count = static_cast<std::uint64_t>(std::llround(noisy[b] * shots));
    record.counts[b] = count;
    record.shots += count;
  }
  Eigen::VectorXd recovered = mitigate(record, exact_calibration(noise));
  for (int b = 0; b < 4; ++b) CHECK(std::abs(recovered[b] - ideal[b]) < 1e-6);
}

TEST_CASE("sampled calibration approaches the model probabilities") {
  NoiseModel noise = NoiseModel::uniform(3, 0.07, 0.02);
  CalibrationMatrix cal = calibrate(noise, 200000, 11);
  for (int w = 0; w < 3; ++w) {
    CHECK(cal.per_qubit[w](1, 0) == doctest::Approx(0.07).epsilon(0.1));
    CHECK(cal.per_qubit[w](0, 1) == doctest::Approx(0.02).epsilon(0.25));
    CHECK(cal.per_qubit[w].colwise().sum().isApproxToConstant(1.0));
  }
}

TEST_CASE("mitigation clips negative quasi-probabilities and renormalizes") {
  NoiseModel noise = NoiseModel::uniform(1, 0.2, 0.2);
  ShotRecord record{1, 10, {{1, 1}, {0, 9}}};  // fewer ones than the noise floor
  Eigen::VectorXd out = mitigate(record, exact_calibration(noise));
  CHECK(out[0] == doctest::Approx(1.0));
  CHECK(out[1] == doctest::Approx(0.0));
  CHECK(out.sum() == doctest::Approx(1.0));
}

TEST_CASE("half-probability flips make mitigation singular") {
  NoiseModel noise = NoiseModel::uniform(1, 0.5, 0.5);
  ShotRecord record{1, 4, {{0, 2}, {1, 2}}};
  CHECK_THROWS_AS(mitigate(record, exact_calibration(noise)), NumericError);
}

TEST_CASE("energy of basis states reads the diagonal") {
  Graph g = shipped_maxcut_graph();
  Eigen::VectorXd h = maxcut_hamiltonian(g);
  Statevector s = Statevector::zero(7);
  CHECK(energy(s, h) == doctest::Approx(h[0]));
  CHECK(h[0] == 0.0);

  // uniform superposition sees the mean: half the edges cut on average
  Circuit c;
  c.qubits = 7;
  for (int w = 0; w < 7; ++w) c.gates.push_back({GateKind::H, {w}, {}, 0});
  double mean_energy = 0.0;
  for (int b = 0; b < 128; ++b) mean_energy += h[b];
  mean_energy /= 128;
  CHECK(mean_energy == doctest::Approx(-5.0));
  CHECK(energy(run(c), h) == doctest::Approx(mean_energy).epsilon(1e-10));

  // optimal cut basis state attains the minimum eigenvalue
  MaxCutResult best = brute_force_max_cut(g);
  CHECK(h[best.assignment] == doctest::Approx(-9.0));
  CHECK(h.minCoeff() == doctest::Approx(-9.0));

  Eigen::VectorXd wrong(4);
  CHECK_THROWS_AS(energy(s, wrong), ConfigError);
}

TEST_CASE("empty graph has zero energy for every state") {
  Graph g;
  g.vertices = 2;
  Eigen::VectorXd h = maxcut_hamiltonian(g);
  SplitMix64 rng(8);
  Circuit c = oracles::random_circuit(2, 10, rng);
  CHECK(energy(run(c), h) == doctest::Approx(0.0));
}

TEST_CASE("counts csv round trip") {
  ShotRecord r{3, 12, {{0, 5}, {5, 3}, {7, 4}}};
  std::stringstream s;
  write_counts_csv(s, r);
  ShotRecord back = read_counts_csv(s);
  CHECK(back.counts == r.counts);
  CHECK(back.shots == r.shots);
}
