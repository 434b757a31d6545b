#include "qshap/transpiler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numbers>

#include "qshap/errors.hpp"
#include "qshap/rng.hpp"
#include "qshap/statevector.hpp"

namespace qshap {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAngleEps = 1e-12;

double normalize_angle(double a) {
  a = std::fmod(a, 2 * kPi);
  if (a > kPi) a -= 2 * kPi;
  if (a <= -kPi) a += 2 * kPi;
  return a;
}

bool zero_angle(double a) { return std::abs(normalize_angle(a)) < kAngleEps; }

void push_rz(std::vector<NativeGate>& out, int wire, double angle) {
  angle = normalize_angle(angle);
  if (!zero_angle(angle)) out.push_back({GateKind::RZ, wire, -1, angle});
}

/// ZYZ Euler angles of a 2x2 unitary: U = e^{i alpha} RZ(phi) RY(theta) RZ(lambda).
void euler_zyz(const Eigen::Matrix2cd& u, double& theta, double& phi, double& lambda) {
  const double a00 = std::abs(u(0, 0));
  const double a10 = std::abs(u(1, 0));
  theta = 2.0 * std::atan2(a10, a00);
  if (a10 < 1e-13) {  // diagonal
    phi = std::arg(u(1, 1) / u(0, 0));
    lambda = 0.0;
  } else if (a00 < 1e-13) {  // antidiagonal
    phi = std::arg(u(1, 0) / (-u(0, 1)));
    lambda = 0.0;
  } else {
    phi = std::arg(u(1, 0) / u(0, 0));
    lambda = std::arg(-u(0, 1) / u(0, 0));
  }
}

}  // namespace

int TranspiledCircuit::one_qubit_count() const {
  int n = 0;
  for (const NativeGate& g : gates) n += !g.two_qubit();
  return n;
}

int TranspiledCircuit::two_qubit_count() const {
  return static_cast<int>(gates.size()) - one_qubit_count();
}

HardwareTarget HardwareTarget::ibm_oslo() {
  HardwareTarget t;
  t.coupling.vertices = 7;
  t.coupling.edges = {{0, 1}, {1, 2}, {1, 3}, {3, 5}, {4, 5}, {5, 6}};
  return t;
}

HardwareTarget HardwareTarget::ibmq_ehningen() {
  HardwareTarget t;
  t.coupling.vertices = 27;
  t.coupling.edges = {{0, 1},   {1, 2},   {2, 3},   {3, 5},   {1, 4},   {4, 7},   {5, 8},
                      {6, 7},   {7, 10},  {8, 9},   {8, 11},  {10, 12}, {11, 14}, {12, 13},
                      {12, 15}, {13, 14}, {14, 16}, {15, 18}, {16, 19}, {17, 18}, {18, 21},
                      {19, 20}, {19, 22}, {21, 23}, {22, 25}, {23, 24}, {24, 25}, {25, 26}};
  return t;
}

HardwareTarget HardwareTarget::from_json(const nlohmann::json& j) {
  HardwareTarget t;
  t.coupling = graph_from_json(j);
  return t;
}

std::optional<HardwareTarget> HardwareTarget::named(std::string_view name) {
  if (name == "ibm-oslo" || name == "ibm_oslo" || name == "oslo") return ibm_oslo();
  if (name == "ibmq-ehningen" || name == "ibmq_ehningen" || name == "ehningen")
    return ibmq_ehningen();
  return std::nullopt;
}

std::vector<NativeGate> decompose_1q(const Eigen::Matrix2cd& unitary, int wire) {
  double theta, phi, lambda;
  euler_zyz(unitary, theta, phi, lambda);
  std::vector<NativeGate> out;
  if (std::abs(theta) < 1e-12) {
    push_rz(out, wire, phi + lambda);
  } else if (std::abs(theta - kPi / 2) < 1e-12) {
    push_rz(out, wire, lambda - kPi / 2);
    out.push_back({GateKind::SX, wire, -1, 0.0});
    push_rz(out, wire, phi + kPi / 2);
  } else {
    push_rz(out, wire, lambda);
    out.push_back({GateKind::SX, wire, -1, 0.0});
    push_rz(out, wire, theta + kPi);
    out.push_back({GateKind::SX, wire, -1, 0.0});
    push_rz(out, wire, phi + kPi);
  }
  return out;
}

std::vector<NativeGate> decompose_1q(GateKind kind, double angle, int wire) {
  switch (kind) {
    case GateKind::X:
      return {{GateKind::X, wire, -1, 0.0}};
    case GateKind::SX:
      return {{GateKind::SX, wire, -1, 0.0}};
    case GateKind::RZ:
    case GateKind::P: {
      std::vector<NativeGate> out;
      push_rz(out, wire, angle);
      return out;
    }
    default:
      if (gate_arity(kind) != 1)
        throw std::invalid_argument("decompose_1q: not a one-qubit kind");
      return decompose_1q(gate_matrix_1q(kind, angle), wire);
  }
}

std::vector<NativeGate> decompose_2q(GateKind kind, double angle, int q0, int q1) {
  std::vector<NativeGate> out;
  switch (kind) {
    case GateKind::CX:
      out.push_back({GateKind::CX, q0, q1, 0.0});
      return out;
    case GateKind::CP:
      if (zero_angle(angle)) return out;
      push_rz(out, q0, angle / 2);
      push_rz(out, q1, angle / 2);
      out.push_back({GateKind::CX, q0, q1, 0.0});
      push_rz(out, q1, -angle / 2);
      out.push_back({GateKind::CX, q0, q1, 0.0});
      return out;
    case GateKind::Swap:
      out.push_back({GateKind::CX, q0, q1, 0.0});
      out.push_back({GateKind::CX, q1, q0, 0.0});
      out.push_back({GateKind::CX, q0, q1, 0.0});
      return out;
    default:
      throw std::invalid_argument("decompose_2q: not a two-qubit kind");
  }
}

std::vector<NativeGate> decompose_circuit(const Circuit& circuit, std::span<const double> x,
                                          std::span<const double> theta) {
  std::vector<NativeGate> out;
  for (const Gate& gate : circuit.gates) {
    if (is_layer(gate.kind))
      throw ConfigError("transpile: circuit contains an unexpanded layer; call expand_layers");
    double angle = gate.params.empty() ? 0.0 : gate.params.front().eval(theta, x);
    std::vector<NativeGate> piece =
        gate_arity(gate.kind) == 1
            ? decompose_1q(gate.kind, angle, gate.qubits[0])
            : decompose_2q(gate.kind, angle, gate.qubits[0], gate.qubits[1]);
    out.insert(out.end(), piece.begin(), piece.end());
  }
  return out;
}

void peephole(std::vector<NativeGate>& gates) {
  int wires = 0;
  for (const NativeGate& g : gates) wires = std::max({wires, g.q0 + 1, g.q1 + 1});
  std::vector<NativeGate> out;
  std::vector<char> dead;
  std::vector<std::vector<int>> stack(wires);  // alive out-indices touching each wire
  auto top = [&](int w) -> int { return stack[w].empty() ? -1 : stack[w].back(); };
  for (const NativeGate& g : gates) {
    if (g.kind == GateKind::RZ) {
      if (zero_angle(g.angle)) continue;
      int j = top(g.q0);
      if (j >= 0 && out[j].kind == GateKind::RZ) {
        out[j].angle = normalize_angle(out[j].angle + g.angle);
        if (zero_angle(out[j].angle)) {
          dead[j] = 1;
          stack[g.q0].pop_back();
        }
        continue;
      }
    } else if (g.kind == GateKind::CX) {
      int j0 = top(g.q0), j1 = top(g.q1);
      if (j0 >= 0 && j0 == j1 && out[j0].kind == GateKind::CX && out[j0].q0 == g.q0 &&
          out[j0].q1 == g.q1) {
        dead[j0] = 1;
        stack[g.q0].pop_back();
        stack[g.q1].pop_back();
        continue;
      }
    }
    int index = static_cast<int>(out.size());
    out.push_back(g);
    dead.push_back(0);
    stack[g.q0].push_back(index);
    if (g.two_qubit()) stack[g.q1].push_back(index);
  }
  gates.clear();
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!dead[i]) gates.push_back(out[i]);
}

namespace {

std::vector<int> shortest_path(const Graph& g, int from, int to) {
  std::vector<int> prev(g.vertices, -1);
  std::deque<int> queue{from};
  prev[from] = from;
  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    if (u == to) break;
    for (const auto& [a, b] : g.edges) {
      int v = a == u ? b : b == u ? a : -1;
      if (v >= 0 && prev[v] < 0) {
        prev[v] = u;
        queue.push_back(v);
      }
    }
  }
  if (prev[to] < 0) return {};
  std::vector<int> path{to};
  while (path.back() != from) path.push_back(prev[path.back()]);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

TranspiledCircuit route(const std::vector<NativeGate>& gates, int logical_qubits,
                        const HardwareTarget& target, std::uint64_t seed) {
  if (logical_qubits > target.qubits())
    throw ConfigError("route: circuit needs " + std::to_string(logical_qubits) +
                      " qubits, target has " + std::to_string(target.qubits()));
  const int qp = target.qubits();
  SplitMix64 rng(seed);
  std::vector<int> slot_to_phys(qp);
  for (int i = 0; i < qp; ++i) slot_to_phys[i] = i;
  for (int i = qp - 1; i > 0; --i)
    std::swap(slot_to_phys[i], slot_to_phys[rng.below(i + 1)]);
  std::vector<int> phys_to_slot(qp);
  for (int i = 0; i < qp; ++i) phys_to_slot[slot_to_phys[i]] = i;

  TranspiledCircuit result;
  result.qubits = qp;
  result.initial_layout.assign(slot_to_phys.begin(), slot_to_phys.begin() + logical_qubits);

  auto swap_phys = [&](int u, int v) {
    result.gates.push_back({GateKind::CX, u, v, 0.0});
    result.gates.push_back({GateKind::CX, v, u, 0.0});
    result.gates.push_back({GateKind::CX, u, v, 0.0});
    std::swap(phys_to_slot[u], phys_to_slot[v]);
    slot_to_phys[phys_to_slot[u]] = u;
    slot_to_phys[phys_to_slot[v]] = v;
  };

  for (const NativeGate& g : gates) {
    if (!g.two_qubit()) {
      NativeGate placed = g;
      placed.q0 = slot_to_phys[g.q0];
      result.gates.push_back(placed);
      continue;
    }
    int pa = slot_to_phys[g.q0];
    int pb = slot_to_phys[g.q1];
    if (!target.adjacent(pa, pb)) {
      std::vector<int> path = shortest_path(target.coupling, pa, pb);
      if (path.empty())
        throw ConfigError("route: qubits " + std::to_string(pa) + " and " + std::to_string(pb) +
                          " lie in disconnected coupling components");
      for (std::size_t i = 0; i + 2 < path.size(); ++i) swap_phys(path[i], path[i + 1]);
      pa = path[path.size() - 2];
    }
    result.gates.push_back({GateKind::CX, pa, pb, 0.0});
  }
  result.final_layout.assign(slot_to_phys.begin(), slot_to_phys.begin() + logical_qubits);
  return result;
}

TranspiledCircuit transpile(const Circuit& circuit, const HardwareTarget& target,
                            std::uint64_t seed, std::span<const double> x,
                            std::span<const double> theta) {
  std::vector<NativeGate> logical = decompose_circuit(circuit, x, theta);
  peephole(logical);
  TranspiledCircuit routed = route(logical, circuit.qubits, target, seed);
  peephole(routed.gates);
  return routed;
}

double penalty(const TranspiledCircuit& transpiled, double s1, double s2) {
  if (!(s1 < 0.0)) throw ConfigError("penalty: s1 must be negative");
  if (!(s2 < s1)) throw ConfigError("penalty: s2 must be below s1");
  return transpiled.one_qubit_count() * s1 + transpiled.two_qubit_count() * s2;
}

nlohmann::json transpiled_to_json(const TranspiledCircuit& transpiled) {
  nlohmann::json gates = nlohmann::json::array();
  char buf[64];
  for (const NativeGate& g : transpiled.gates) {
    nlohmann::json item{{"kind", std::string(gate_kind_name(g.kind))}};
    if (g.two_qubit())
      item["qubits"] = {g.q0, g.q1};
    else
      item["qubits"] = {g.q0};
    if (g.kind == GateKind::RZ) {
      std::snprintf(buf, sizeof(buf), "%.17g", g.angle);
      item["param"] = std::string(buf);
    }
    gates.push_back(std::move(item));
  }
  return {{"qubits", transpiled.qubits},
          {"theta_dim", 0},
          {"feature_dim", 0},
          {"gates", gates},
          {"initial_layout", transpiled.initial_layout},
          {"final_layout", transpiled.final_layout},
          {"n1", transpiled.one_qubit_count()},
          {"n2", transpiled.two_qubit_count()}};
}

}  // namespace qshap
