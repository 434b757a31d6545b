#pragma once

#include <complex>
#include <span>

#include <Eigen/Dense>

#include "qshap/circuit.hpp"
#include "qshap/graph.hpp"

namespace qshap {

/// Exact amplitudes of a q-qubit register.
///
/// Bit convention (used everywhere, including printed bit strings): wire j
/// (0-based, top of the circuit) is bit j of the basis index, so
/// index = sum_j b_j * 2^j and bit strings are printed wire-0-first.
struct Statevector {
  int qubits = 0;
  Eigen::VectorXcd amps;

  static Statevector zero(int qubits);
  double norm_sq() const { return amps.squaredNorm(); }
};

/// Dense matrix of a one-qubit gate kind (Qiskit-convention phases: RZ is the
/// symmetric rotation exp(-i*angle*Z/2), P carries the phase on |1> only).
Eigen::Matrix2cd gate_matrix_1q(GateKind kind, double angle = 0.0);

/// Dense matrix of a two-qubit gate kind; basis index = b_first + 2*b_second
/// where "first" is the first listed operand (the control for CP/CX).
Eigen::Matrix4cd gate_matrix_2q(GateKind kind, double angle = 0.0);

void apply_1q(Eigen::VectorXcd& amps, int wire, const Eigen::Matrix2cd& m);
void apply_cx(Eigen::VectorXcd& amps, int control, int target);
void apply_cp(Eigen::VectorXcd& amps, int control, int target, double angle);
void apply_swap(Eigen::VectorXcd& amps, int a, int b);

/// Applies one bound gate in place. Layer macros are rejected; expand first.
void apply_gate(Statevector& state, const Gate& gate, std::span<const double> x,
                std::span<const double> theta);

/// |Psi> = U_G ... U_1 |0...0> with parameters bound from x and theta.
Statevector run(const Circuit& circuit, std::span<const double> x = {},
                std::span<const double> theta = {});
Statevector run(const Circuit& circuit, const Eigen::VectorXd& x,
                const Eigen::VectorXd& theta);

/// Born-rule distribution over basis indices; sums to one for normalized
/// input.
Eigen::VectorXd probabilities(const Statevector& state);

/// <a|b>
std::complex<double> overlap(const Statevector& a, const Statevector& b);

/// Expectation of a diagonal observable: sum_b P(b) * diag(b).
double energy(const Statevector& state, const Eigen::VectorXd& diagonal);

/// Max-cut cost observable: diag(b) = -cut(b), so the ground state is the
/// maximum cut and its energy is minus the cut value.
Eigen::VectorXd maxcut_hamiltonian(const Graph& graph);

int cut_of_assignment(const Graph& graph, std::uint64_t bits);

}  // namespace qshap
