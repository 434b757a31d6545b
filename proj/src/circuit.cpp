#include "qshap/circuit.hpp"

#include <algorithm>
#include <set>

#include "qshap/errors.hpp"

namespace qshap {

bool is_layer(GateKind kind) {
  return kind == GateKind::CostLayer || kind == GateKind::MixLayer;
}

int gate_arity(GateKind kind) {
  switch (kind) {
    case GateKind::H:
    case GateKind::X:
    case GateKind::SX:
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::P:
      return 1;
    case GateKind::CP:
    case GateKind::CX:
    case GateKind::Swap:
      return 2;
    case GateKind::CostLayer:
    case GateKind::MixLayer:
      return 0;
  }
  return 0;
}

int gate_param_count(GateKind kind) {
  switch (kind) {
    case GateKind::RX:
    case GateKind::RY:
    case GateKind::RZ:
    case GateKind::P:
    case GateKind::CP:
      return 1;
    default:
      return 0;
  }
}

std::string_view gate_kind_name(GateKind kind) {
  switch (kind) {
    case GateKind::H: return "H";
    case GateKind::X: return "X";
    case GateKind::SX: return "SX";
    case GateKind::RX: return "RX";
    case GateKind::RY: return "RY";
    case GateKind::RZ: return "RZ";
    case GateKind::P: return "P";
    case GateKind::CP: return "CP";
    case GateKind::CX: return "CX";
    case GateKind::Swap: return "SWAP";
    case GateKind::CostLayer: return "cost_layer";
    case GateKind::MixLayer: return "mixing_layer";
  }
  return "?";
}

std::optional<GateKind> gate_kind_from_name(std::string_view name) {
  static const std::pair<std::string_view, GateKind> table[] = {
      {"H", GateKind::H},           {"X", GateKind::X},
      {"SX", GateKind::SX},         {"RX", GateKind::RX},
      {"RY", GateKind::RY},         {"RZ", GateKind::RZ},
      {"P", GateKind::P},           {"CP", GateKind::CP},
      {"CX", GateKind::CX},         {"SWAP", GateKind::Swap},
      {"cost_layer", GateKind::CostLayer},
      {"mixing_layer", GateKind::MixLayer},
  };
  for (const auto& [n, k] : table)
    if (n == name) return k;
  return std::nullopt;
}

bool Circuit::has_layers() const {
  return std::any_of(gates.begin(), gates.end(),
                     [](const Gate& g) { return is_layer(g.kind); });
}

void Circuit::validate() const {
  if (qubits < 0 || theta_dim < 0 || feature_dim < 0)
    throw ConfigError("circuit: negative dimension");
  for (std::size_t i = 0; i < gates.size(); ++i) {
    const Gate& g = gates[i];
    const std::string where = "gate " + std::to_string(i + 1) + " (" +
                              std::string(gate_kind_name(g.kind)) + ")";
    int arity = gate_arity(g.kind);
    if (static_cast<int>(g.qubits.size()) != arity)
      throw ConfigError("circuit: " + where + ": expected " + std::to_string(arity) +
                        " qubit operand(s), got " + std::to_string(g.qubits.size()));
    std::set<int> seen;
    for (int q : g.qubits) {
      if (q < 0 || q >= qubits)
        throw ConfigError("circuit: " + where + ": qubit " + std::to_string(q) +
                          " out of range [0, " + std::to_string(qubits) + ")");
      if (!seen.insert(q).second)
        throw ConfigError("circuit: " + where + ": repeated qubit operand");
    }
    if (static_cast<int>(g.params.size()) != gate_param_count(g.kind))
      throw ConfigError("circuit: " + where + ": expected " +
                        std::to_string(gate_param_count(g.kind)) + " parameter(s), got " +
                        std::to_string(g.params.size()));
    for (const ParamExpr& p : g.params) {
      if (p.max_theta_index() >= theta_dim)
        throw ConfigError("circuit: " + where + ": theta[" +
                          std::to_string(p.max_theta_index()) + "] exceeds theta_dim " +
                          std::to_string(theta_dim));
      if (p.max_feature_index() >= feature_dim)
        throw ConfigError("circuit: " + where + ": x[" +
                          std::to_string(p.max_feature_index()) + "] exceeds feature_dim " +
                          std::to_string(feature_dim));
    }
    if (is_layer(g.kind)) {
      if (g.layer < 1) throw ConfigError("circuit: " + where + ": layer index must be >= 1");
      if (2 * g.layer > theta_dim)
        throw ConfigError("circuit: " + where + ": layer " + std::to_string(g.layer) +
                          " needs theta_dim >= " + std::to_string(2 * g.layer));
    }
  }
}

Circuit circuit_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("circuit: expected a JSON object");
  Circuit c;
  try {
    c.qubits = doc.at("qubits").get<int>();
    c.theta_dim = doc.value("theta_dim", 0);
    c.feature_dim = doc.value("feature_dim", 0);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("circuit: ") + e.what());
  }
  if (!doc.contains("gates") || !doc.at("gates").is_array())
    throw ConfigError("circuit: missing 'gates' array");
  int index = 0;
  for (const auto& item : doc.at("gates")) {
    ++index;
    const std::string where = "gate " + std::to_string(index);
    if (!item.is_object() || !item.contains("kind"))
      throw ConfigError("circuit: " + where + ": expected object with 'kind'");
    Gate g;
    std::string kind_name = item.at("kind").get<std::string>();
    auto kind = gate_kind_from_name(kind_name);
    if (!kind) throw ConfigError("circuit: " + where + ": unknown kind '" + kind_name + "'");
    g.kind = *kind;
    if (item.contains("qubits"))
      for (const auto& q : item.at("qubits")) g.qubits.push_back(q.get<int>());
    if (item.contains("param")) {
      try {
        g.params.push_back(ParamExpr::parse(item.at("param").get<std::string>()));
      } catch (const ConfigError& e) {
        throw ConfigError("circuit: " + where + ": " + e.what());
      }
    }
    g.layer = item.value("layer", 0);
    c.gates.push_back(std::move(g));
  }
  c.validate();
  return c;
}

nlohmann::json circuit_to_json(const Circuit& circuit) {
  nlohmann::json gates = nlohmann::json::array();
  for (const Gate& g : circuit.gates) {
    nlohmann::json item{{"kind", std::string(gate_kind_name(g.kind))}};
    if (!g.qubits.empty()) item["qubits"] = g.qubits;
    if (!g.params.empty()) item["param"] = g.params.front().to_string();
    if (is_layer(g.kind)) item["layer"] = g.layer;
    gates.push_back(std::move(item));
  }
  return {{"qubits", circuit.qubits},
          {"theta_dim", circuit.theta_dim},
          {"feature_dim", circuit.feature_dim},
          {"gates", gates}};
}

Circuit expand_layers(const Circuit& circuit, const Graph* graph) {
  if (!circuit.has_layers()) return circuit;
  Circuit out;
  out.qubits = circuit.qubits;
  out.theta_dim = circuit.theta_dim;
  out.feature_dim = circuit.feature_dim;
  for (std::size_t i = 0; i < circuit.gates.size(); ++i) {
    const Gate& g = circuit.gates[i];
    if (!is_layer(g.kind)) {
      out.gates.push_back(g);
      continue;
    }
    const std::string where = "gate " + std::to_string(i + 1);
    if (g.kind == GateKind::CostLayer) {
      if (graph == nullptr)
        throw ConfigError("expand_layers: " + where + ": cost layer needs a graph");
      if (graph->vertices != circuit.qubits)
        throw ConfigError("expand_layers: " + where + ": graph has " +
                          std::to_string(graph->vertices) + " vertices, circuit has " +
                          std::to_string(circuit.qubits) + " qubits");
      ParamExpr angle = ParamExpr::constant(2.0) * ParamExpr::theta(2 * (g.layer - 1));
      auto edges = graph->edges;
      std::sort(edges.begin(), edges.end());
      for (const auto& [a, b] : edges) {
        out.gates.push_back({GateKind::CX, {a, b}, {}, 0});
        out.gates.push_back({GateKind::RZ, {b}, {angle}, 0});
        out.gates.push_back({GateKind::CX, {a, b}, {}, 0});
      }
    } else {
      ParamExpr angle = ParamExpr::constant(2.0) * ParamExpr::theta(2 * (g.layer - 1) + 1);
      for (int w = 0; w < circuit.qubits; ++w)
        out.gates.push_back({GateKind::RX, {w}, {angle}, 0});
    }
  }
  return out;
}

CoalitionGame::CoalitionGame(Circuit circuit, std::vector<int> active_gates)
    : circuit_(std::move(circuit)), active_(std::move(active_gates)) {
  circuit_.validate();
  if (active_.empty()) throw ConfigError("coalition game: at least one active gate required");
  if (active_.size() > 63) throw ConfigError("coalition game: more than 63 players unsupported");
  std::set<int> seen;
  for (int g : active_) {
    if (g < 1 || g > circuit_.size())
      throw ConfigError("coalition game: active gate index " + std::to_string(g) +
                        " out of range [1, " + std::to_string(circuit_.size()) + "]");
    if (!seen.insert(g).second)
      throw ConfigError("coalition game: repeated active gate index " + std::to_string(g));
  }
}

std::vector<int> CoalitionGame::remaining() const {
  std::vector<int> rest;
  std::set<int> act(active_.begin(), active_.end());
  for (int g = 1; g <= circuit_.size(); ++g)
    if (!act.count(g)) rest.push_back(g);
  return rest;
}

Circuit CoalitionGame::subcircuit(std::uint64_t coalition) const {
  int n = players();
  if (n < 64 && (coalition >> n) != 0)
    throw std::invalid_argument("coalition mask has bits above the player count");
  std::vector<char> keep(circuit_.size() + 1, 1);
  for (int a = 0; a < n; ++a) keep[active_[a]] = (coalition >> a) & 1;
  Circuit out;
  out.qubits = circuit_.qubits;
  out.theta_dim = circuit_.theta_dim;
  out.feature_dim = circuit_.feature_dim;
  for (int g = 1; g <= circuit_.size(); ++g)
    if (keep[g]) out.gates.push_back(circuit_.gates[g - 1]);
  return out;
}

std::string CoalitionGame::gate_label(int player) const {
  const Gate& g = circuit_.gates[gate_index(player) - 1];
  switch (g.kind) {
    case GateKind::CostLayer: return "cost";
    case GateKind::MixLayer: return "mix";
    default: return std::string(gate_kind_name(g.kind));
  }
}

}  // namespace qshap
