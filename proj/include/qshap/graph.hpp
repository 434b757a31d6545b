#pragma once

#include <utility>
#include <vector>

#include <json.hpp>

#include "qshap/errors.hpp"

namespace qshap {

/// Simple undirected graph. Doubles as a hardware coupling map ("qubits" =
/// vertex count) and as the problem graph for max-cut.
struct Graph {
  int vertices = 0;
  std::vector<std::pair<int, int>> edges;  // normalized a < b, no duplicates

  bool has_edge(int a, int b) const {
    if (a > b) std::swap(a, b);
    for (const auto& [u, v] : edges)
      if (u == a && v == b) return true;
    return false;
  }

  void validate() const {
    if (vertices < 0) throw ConfigError("graph: negative vertex count");
    for (std::size_t i = 0; i < edges.size(); ++i) {
      auto [a, b] = edges[i];
      if (a < 0 || b < 0 || a >= vertices || b >= vertices)
        throw ConfigError("graph: edge " + std::to_string(i) + " references vertex out of range");
      if (a == b) throw ConfigError("graph: edge " + std::to_string(i) + " is a self loop");
    }
  }
};

inline Graph graph_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("qubits") || !j.contains("edges"))
    throw ConfigError("graph: expected object with 'qubits' and 'edges'");
  Graph g;
  g.vertices = j.at("qubits").get<int>();
  for (const auto& e : j.at("edges")) {
    if (!e.is_array() || e.size() != 2) throw ConfigError("graph: each edge must be a pair");
    int a = e.at(0).get<int>();
    int b = e.at(1).get<int>();
    if (a > b) std::swap(a, b);
    if (a != b && !g.has_edge(a, b)) g.edges.emplace_back(a, b);
  }
  g.validate();
  return g;
}

inline nlohmann::json graph_to_json(const Graph& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [a, b] : g.edges) edges.push_back({a, b});
  return {{"qubits", g.vertices}, {"edges", edges}};
}

}  // namespace qshap
