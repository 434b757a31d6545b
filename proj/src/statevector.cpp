#include "qshap/statevector.hpp"

#include <cmath>

#include "qshap/errors.hpp"

namespace qshap {

using std::complex;
namespace {
constexpr complex<double> I{0.0, 1.0};
}

Statevector Statevector::zero(int qubits) {
  Statevector s;
  s.qubits = qubits;
  s.amps = Eigen::VectorXcd::Zero(std::int64_t{1} << qubits);
  s.amps[0] = 1.0;
  return s;
}

Eigen::Matrix2cd gate_matrix_1q(GateKind kind, double angle) {
  Eigen::Matrix2cd m;
  const double c = std::cos(angle / 2), s = std::sin(angle / 2);
  switch (kind) {
    case GateKind::H:
      m << 1, 1, 1, -1;
      return m / std::sqrt(2.0);
    case GateKind::X:
      m << 0, 1, 1, 0;
      return m;
    case GateKind::SX:
      m << 1.0 + I, 1.0 - I, 1.0 - I, 1.0 + I;
      return m / 2.0;
    case GateKind::RX:
      m << c, -I * s, -I * s, c;
      return m;
    case GateKind::RY:
      m << c, -s, s, c;
      return m;
    case GateKind::RZ:
      m << std::exp(-I * (angle / 2)), 0, 0, std::exp(I * (angle / 2));
      return m;
    case GateKind::P:
      m << 1, 0, 0, std::exp(I * angle);
      return m;
    default:
      throw std::invalid_argument("gate_matrix_1q: not a one-qubit kind");
  }
}

Eigen::Matrix4cd gate_matrix_2q(GateKind kind, double angle) {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Identity();
  switch (kind) {
    case GateKind::CP:
      m(3, 3) = std::exp(I * angle);
      return m;
    case GateKind::CX:
      // control = bit 0, target = bit 1
      m.setZero();
      m(0, 0) = 1;
      m(2, 2) = 1;
      m(3, 1) = 1;
      m(1, 3) = 1;
      return m;
    case GateKind::Swap:
      m.setZero();
      m(0, 0) = 1;
      m(2, 1) = 1;
      m(1, 2) = 1;
      m(3, 3) = 1;
      return m;
    default:
      throw std::invalid_argument("gate_matrix_2q: not a two-qubit kind");
  }
}

void apply_1q(Eigen::VectorXcd& amps, int wire, const Eigen::Matrix2cd& m) {
  const std::int64_t n = amps.size();
  const std::int64_t stride = std::int64_t{1} << wire;
  const complex<double> m00 = m(0, 0), m01 = m(0, 1), m10 = m(1, 0), m11 = m(1, 1);
  for (std::int64_t base = 0; base < n; base += 2 * stride) {
    for (std::int64_t k = 0; k < stride; ++k) {
      const std::int64_t i0 = base + k;
      const std::int64_t i1 = i0 + stride;
      const complex<double> a0 = amps[i0], a1 = amps[i1];
      amps[i0] = m00 * a0 + m01 * a1;
      amps[i1] = m10 * a0 + m11 * a1;
    }
  }
}

void apply_cx(Eigen::VectorXcd& amps, int control, int target) {
  const std::int64_t n = amps.size();
  const std::int64_t cbit = std::int64_t{1} << control;
  const std::int64_t tbit = std::int64_t{1} << target;
  for (std::int64_t i = 0; i < n; ++i)
    if ((i & cbit) && !(i & tbit)) std::swap(amps[i], amps[i | tbit]);
}

void apply_cp(Eigen::VectorXcd& amps, int control, int target, double angle) {
  const std::int64_t n = amps.size();
  const std::int64_t mask = (std::int64_t{1} << control) | (std::int64_t{1} << target);
  const complex<double> phase = std::exp(I * angle);
  for (std::int64_t i = 0; i < n; ++i)
    if ((i & mask) == mask) amps[i] *= phase;
}

void apply_swap(Eigen::VectorXcd& amps, int a, int b) {
  const std::int64_t n = amps.size();
  const std::int64_t abit = std::int64_t{1} << a;
  const std::int64_t bbit = std::int64_t{1} << b;
  for (std::int64_t i = 0; i < n; ++i)
    if ((i & abit) && !(i & bbit)) std::swap(amps[i], amps[(i & ~abit) | bbit]);
}

void apply_gate(Statevector& state, const Gate& gate, std::span<const double> x,
                std::span<const double> theta) {
  if (is_layer(gate.kind))
    throw ConfigError("simulator: circuit contains an unexpanded " +
                      std::string(gate_kind_name(gate.kind)) + "; call expand_layers first");
  double angle = gate.params.empty() ? 0.0 : gate.params.front().eval(theta, x);
  switch (gate.kind) {
    case GateKind::CX:
      apply_cx(state.amps, gate.qubits[0], gate.qubits[1]);
      return;
    case GateKind::CP:
      apply_cp(state.amps, gate.qubits[0], gate.qubits[1], angle);
      return;
    case GateKind::Swap:
      apply_swap(state.amps, gate.qubits[0], gate.qubits[1]);
      return;
    case GateKind::RZ:
    case GateKind::P: {
      // diagonal fast path
      const Eigen::Matrix2cd m = gate_matrix_1q(gate.kind, angle);
      const complex<double> d0 = m(0, 0), d1 = m(1, 1);
      const std::int64_t bit = std::int64_t{1} << gate.qubits[0];
      for (std::int64_t i = 0; i < state.amps.size(); ++i)
        state.amps[i] *= (i & bit) ? d1 : d0;
      return;
    }
    default:
      apply_1q(state.amps, gate.qubits[0], gate_matrix_1q(gate.kind, angle));
      return;
  }
}

Statevector run(const Circuit& circuit, std::span<const double> x,
                std::span<const double> theta) {
  Statevector state = Statevector::zero(circuit.qubits);
  for (const Gate& gate : circuit.gates) apply_gate(state, gate, x, theta);
  return state;
}

Statevector run(const Circuit& circuit, const Eigen::VectorXd& x, const Eigen::VectorXd& theta) {
  return run(circuit, std::span<const double>(x.data(), x.size()),
             std::span<const double>(theta.data(), theta.size()));
}

Eigen::VectorXd probabilities(const Statevector& state) {
  return state.amps.cwiseAbs2();
}

std::complex<double> overlap(const Statevector& a, const Statevector& b) {
  return a.amps.dot(b.amps);  // Eigen conjugates the left operand
}

double energy(const Statevector& state, const Eigen::VectorXd& diagonal) {
  if (diagonal.size() != state.amps.size())
    throw ConfigError("energy: observable dimension " + std::to_string(diagonal.size()) +
                      " does not match state dimension " + std::to_string(state.amps.size()));
  return probabilities(state).dot(diagonal);
}

Eigen::VectorXd maxcut_hamiltonian(const Graph& graph) {
  const std::int64_t dim = std::int64_t{1} << graph.vertices;
  Eigen::VectorXd diag(dim);
  for (std::int64_t b = 0; b < dim; ++b)
    diag[b] = -static_cast<double>(cut_of_assignment(graph, static_cast<std::uint64_t>(b)));
  return diag;
}

int cut_of_assignment(const Graph& graph, std::uint64_t bits) {
  int cut = 0;
  for (const auto& [a, b] : graph.edges)
    cut += ((bits >> a) & 1) != ((bits >> b) & 1);
  return cut;
}

}  // namespace qshap
