#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "qshap/graph.hpp"
#include "qshap/param_expr.hpp"

namespace qshap {

/// Gate vocabulary. CostLayer/MixLayer are macro gates: a whole trotterized
/// layer acting on every wire, expanded to primitives by expand_layers() but
/// treated as a single player for attribution.
enum class GateKind {
  H,
  X,
  SX,
  RX,
  RY,
  RZ,
  P,
  CP,
  CX,
  Swap,
  CostLayer,
  MixLayer,
};

bool is_layer(GateKind kind);
int gate_arity(GateKind kind);        // operand count; 0 for layer macros
int gate_param_count(GateKind kind);  // explicit parameter slots
std::string_view gate_kind_name(GateKind kind);
std::optional<GateKind> gate_kind_from_name(std::string_view name);

struct Gate {
  GateKind kind = GateKind::H;
  std::vector<int> qubits;       // ordered, distinct wire indices
  std::vector<ParamExpr> params; // one entry per parameter slot
  int layer = 0;                 // 1-based layer index for Cost/Mix macros
};

/// Ordered list of gates on q wires. Gate index g is 1-based list position.
/// Immutable by convention after construction; validate() checks every
/// structural invariant and reports offending gate indices.
struct Circuit {
  int qubits = 0;
  int theta_dim = 0;
  int feature_dim = 0;
  std::vector<Gate> gates;

  int size() const { return static_cast<int>(gates.size()); }
  bool has_layers() const;
  void validate() const;  // throws ConfigError
};

Circuit circuit_from_json(const nlohmann::json& doc);
nlohmann::json circuit_to_json(const Circuit& circuit);

/// Replaces every layer macro with its primitive realization:
///   cost layer i : per edge (a,b) in sorted order CX(a,b), RZ(2*theta[2i-2])
///                  on b, CX(a,b)
///   mixing layer i : RX(2*theta[2i-1]) on every wire, ascending
/// Circuits without layer macros pass through unchanged. A graph is required
/// (and must match the wire count) whenever a cost layer is present.
Circuit expand_layers(const Circuit& circuit, const Graph* graph);

/// A circuit plus the partition of its gates into players (active) and an
/// always-present remainder. Coalitions are bitmasks over player indices
/// 1..N (bit a-1 selects player a), never over gate indices.
class CoalitionGame {
 public:
  CoalitionGame(Circuit circuit, std::vector<int> active_gates);

  const Circuit& circuit() const { return circuit_; }
  const std::vector<int>& active() const { return active_; }
  std::vector<int> remaining() const;
  int players() const { return static_cast<int>(active_.size()); }

  std::uint64_t grand() const {
    int n = players();
    return n >= 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
  }

  /// Gates with index in {A_a | a in coalition} plus the remainder, original
  /// order preserved; qubit count and parameter dimensions unchanged.
  Circuit subcircuit(std::uint64_t coalition) const;

  /// 1-based gate index of a player (player in 1..N).
  int gate_index(int player) const { return active_.at(player - 1); }
  std::string gate_label(int player) const;

 private:
  Circuit circuit_;
  std::vector<int> active_;
};

}  // namespace qshap
