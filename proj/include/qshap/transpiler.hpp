#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "qshap/circuit.hpp"
#include "qshap/graph.hpp"

namespace qshap {

/// A hardware device shape: physical qubit count and the coupling edges on
/// which CX gates can be realized. The native gate set is fixed to
/// {RZ(angle), X, SX, CX}.
struct HardwareTarget {
  Graph coupling;

  int qubits() const { return coupling.vertices; }
  bool adjacent(int a, int b) const { return coupling.has_edge(a, b); }

  static HardwareTarget ibm_oslo();        // 7-qubit heavy-hex fragment
  static HardwareTarget ibmq_ehningen();   // 27-qubit heavy-hex device
  static HardwareTarget from_json(const nlohmann::json& j);
  static std::optional<HardwareTarget> named(std::string_view name);
};

/// One gate from the native set with bound angle. q1 < 0 for one-qubit gates.
struct NativeGate {
  GateKind kind = GateKind::RZ;  // RZ, X, SX or CX
  int q0 = 0;
  int q1 = -1;
  double angle = 0.0;

  bool two_qubit() const { return kind == GateKind::CX; }
};

struct TranspiledCircuit {
  int qubits = 0;                  // physical register size
  std::vector<NativeGate> gates;   // every CX on a coupling edge
  std::vector<int> initial_layout; // logical wire -> physical qubit
  std::vector<int> final_layout;   // logical wire -> physical qubit after routing

  int one_qubit_count() const;
  int two_qubit_count() const;
};

/// Native realization of a one-qubit gate on `wire`, equal up to global
/// phase. Diagonal gates become a single RZ; the general case uses the
/// RZ-SX-RZ-SX-RZ Euler form, shortened when angles vanish.
std::vector<NativeGate> decompose_1q(GateKind kind, double angle, int wire);
std::vector<NativeGate> decompose_1q(const Eigen::Matrix2cd& unitary, int wire);

/// Native realization of a two-qubit gate, equal up to global phase:
/// CP via two CX and three RZ, SWAP via three CX.
std::vector<NativeGate> decompose_2q(GateKind kind, double angle, int q0, int q1);

/// Binds parameters and rewrites every gate into the native set (still on
/// logical wires, connectivity ignored).
std::vector<NativeGate> decompose_circuit(const Circuit& circuit, std::span<const double> x = {},
                                          std::span<const double> theta = {});

/// Merges adjacent RZ on the same wire, drops zero-angle RZ, and cancels
/// adjacent identical CX pairs. Never changes the unitary.
void peephole(std::vector<NativeGate>& gates);

/// Places logical wires on a seeded random layout and inserts SWAPs (three
/// CX) along shortest coupling paths for every non-adjacent CX. Throws
/// ConfigError when operands sit in disconnected coupling components.
TranspiledCircuit route(const std::vector<NativeGate>& gates, int logical_qubits,
                        const HardwareTarget& target, std::uint64_t seed);

/// decompose -> peephole -> route -> peephole.
TranspiledCircuit transpile(const Circuit& circuit, const HardwareTarget& target,
                            std::uint64_t seed, std::span<const double> x = {},
                            std::span<const double> theta = {});

/// n1*s1 + n2*s2 over the transpiled gate list (s1, s2 < 0).
double penalty(const TranspiledCircuit& transpiled, double s1, double s2);

/// Circuit-schema dump (native kinds only) plus layout and gate counts.
nlohmann::json transpiled_to_json(const TranspiledCircuit& transpiled);

}  // namespace qshap
