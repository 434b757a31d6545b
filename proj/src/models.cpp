#include "qshap/models.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>

#include "qshap/errors.hpp"
#include "qshap/rng.hpp"

namespace qshap {

namespace {
constexpr double kPi = std::numbers::pi;

ParamExpr two_x(int i) { return ParamExpr::constant(2.0) * ParamExpr::feature(i); }

ParamExpr interaction_phase() {
  // 2 (pi - x0) (pi - x1)
  return ParamExpr::constant(2.0) * (ParamExpr::pi() - ParamExpr::feature(0)) *
         (ParamExpr::pi() - ParamExpr::feature(1));
}
}  // namespace

Circuit qsvm_feature_map(int repetitions) {
  if (repetitions < 1) throw ConfigError("feature map: repetitions must be >= 1");
  Circuit c;
  c.qubits = 2;
  c.theta_dim = 0;
  c.feature_dim = 2;
  for (int r = 0; r < repetitions; ++r) {
    c.gates.push_back({GateKind::H, {0}, {}, 0});
    c.gates.push_back({GateKind::H, {1}, {}, 0});
    c.gates.push_back({GateKind::P, {0}, {two_x(0)}, 0});
    c.gates.push_back({GateKind::P, {1}, {two_x(1)}, 0});
    c.gates.push_back({GateKind::CX, {0, 1}, {}, 0});
    c.gates.push_back({GateKind::P, {1}, {interaction_phase()}, 0});
    c.gates.push_back({GateKind::CX, {0, 1}, {}, 0});
  }
  c.validate();
  return c;
}

Circuit qft_circuit(int qubits) {
  if (qubits < 1) throw ConfigError("qft: qubit count must be >= 1");
  Circuit c;
  c.qubits = qubits;
  for (int i = 0; i < qubits; ++i) {
    c.gates.push_back({GateKind::H, {i}, {}, 0});
    for (int j = i + 1; j < qubits; ++j) {
      double angle = kPi / std::ldexp(1.0, j - i);
      c.gates.push_back({GateKind::CP, {j, i}, {ParamExpr::constant(angle)}, 0});
    }
  }
  for (int i = 0; i < qubits / 2; ++i)
    c.gates.push_back({GateKind::Swap, {i, qubits - 1 - i}, {}, 0});
  c.validate();
  return c;
}

Circuit qnn_circuit() {
  Circuit c;
  c.qubits = 2;
  c.theta_dim = 4;
  c.feature_dim = 2;
  auto ry = [](int t, int wire) { return Gate{GateKind::RY, {wire}, {ParamExpr::theta(t)}, 0}; };
  c.gates = {
      {GateKind::H, {0}, {}, 0},          // 1
      {GateKind::P, {0}, {two_x(0)}, 0},  // 2
      {GateKind::H, {1}, {}, 0},          // 3
      {GateKind::P, {1}, {two_x(1)}, 0},  // 4
      {GateKind::CX, {0, 1}, {}, 0},      // 5
      ry(0, 0),                           // 6
      ry(1, 1),                           // 7
      {GateKind::CX, {0, 1}, {}, 0},      // 8
      {GateKind::P, {0}, {two_x(0)}, 0},  // 9
      {GateKind::P, {1}, {two_x(1)}, 0},  // 10
      {GateKind::CX, {0, 1}, {}, 0},      // 11
      {GateKind::P, {0}, {two_x(0)}, 0},  // 12
      {GateKind::P, {1}, {two_x(1)}, 0},  // 13
      {GateKind::CX, {0, 1}, {}, 0},      // 14
      {GateKind::P, {0}, {two_x(0)}, 0},  // 15
      {GateKind::P, {1}, {two_x(1)}, 0},  // 16
      {GateKind::CX, {0, 1}, {}, 0},      // 17
      ry(2, 0),                           // 18
      ry(3, 1),                           // 19
  };
  c.validate();
  return c;
}

Circuit qgan_circuit() {
  Circuit c;
  c.qubits = 3;
  c.theta_dim = 9;
  c.feature_dim = 0;
  auto ry = [](int t, int wire) { return Gate{GateKind::RY, {wire}, {ParamExpr::theta(t)}, 0}; };
  c.gates = {
      {GateKind::H, {0}, {}, 0},      // 1
      ry(0, 0),                       // 2
      {GateKind::H, {1}, {}, 0},      // 3
      ry(1, 1),                       // 4
      {GateKind::CX, {0, 1}, {}, 0},  // 5
      ry(2, 0),                       // 6
      {GateKind::H, {2}, {}, 0},      // 7
      ry(3, 2),                       // 8
      {GateKind::CX, {1, 2}, {}, 0},  // 9
      ry(4, 1),                       // 10
      ry(5, 2),                       // 11
      {GateKind::CX, {0, 1}, {}, 0},  // 12
      ry(6, 0),                       // 13
      ry(7, 1),                       // 14
      {GateKind::CX, {1, 2}, {}, 0},  // 15
      ry(8, 2),                       // 16
  };
  c.validate();
  return c;
}

Circuit qaoa_circuit(const Graph& graph, int repetitions) {
  if (repetitions < 1) throw ConfigError("qaoa: repetitions must be >= 1");
  graph.validate();
  Circuit c;
  c.qubits = graph.vertices;
  c.theta_dim = 2 * repetitions;
  for (int w = 0; w < graph.vertices; ++w) c.gates.push_back({GateKind::H, {w}, {}, 0});
  for (int i = 1; i <= repetitions; ++i) {
    c.gates.push_back({GateKind::CostLayer, {}, {}, i});
    c.gates.push_back({GateKind::MixLayer, {}, {}, i});
  }
  c.validate();
  return c;
}

std::vector<int> qaoa_active_gates(const Graph& graph, int repetitions) {
  std::vector<int> active;
  for (int i = 0; i < 2 * repetitions; ++i) active.push_back(graph.vertices + 1 + i);
  return active;
}

Graph shipped_maxcut_graph() {
  Graph g;
  g.vertices = 7;
  g.edges = {{0, 4}, {0, 5}, {0, 6}, {1, 3}, {1, 5}, {1, 6}, {2, 3}, {2, 4}, {2, 6}, {3, 4}};
  return g;
}

MaxCutResult brute_force_max_cut(const Graph& graph) {
  const std::uint64_t total = std::uint64_t{1} << graph.vertices;
  MaxCutResult result;
  result.value = -1;
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    int cut = cut_of_assignment(graph, bits);
    if (cut > result.value) {
      result.value = cut;
      result.assignment = bits;
      result.optima_count = 1;
    } else if (cut == result.value) {
      ++result.optima_count;
    }
  }
  return result;
}

int best_cut_from_state(const Graph& graph, const Statevector& state) {
  const Eigen::VectorXd probs = probabilities(state);
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < probs.size(); ++i)
    if (probs[i] > probs[best]) best = i;
  return cut_of_assignment(graph, static_cast<std::uint64_t>(best));
}

namespace {

Eigen::Matrix4cd fixed_random_unitary() {
  // One fixed observable basis for the data distribution; independent of the
  // per-dataset sampling seed.
  SplitMix64 rng(0x9D1C0FFEEULL);
  Eigen::Matrix4cd gauss;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) gauss(r, c) = std::complex<double>(rng.gaussian(), rng.gaussian());
  Eigen::HouseholderQR<Eigen::Matrix4cd> qr(gauss);
  Eigen::Matrix4cd q = qr.householderQ();
  Eigen::Matrix4cd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < 4; ++c) {
    std::complex<double> d = r(c, c);
    q.col(c) *= d / std::abs(d);
  }
  return q;
}

/// <psi| V^dag (Z x Z) V |psi> for the r=2 feature-map state of x.
double havlicek_expectation(const Circuit& map2, const Eigen::Matrix4cd& v,
                            const Eigen::Vector2d& x) {
  const Statevector psi = run(map2, x, Eigen::VectorXd());
  Eigen::Vector4cd rotated = v * psi.amps;
  // ZZ diagonal in the wire-bit convention: +1 when bits agree.
  double expectation = 0.0;
  for (int idx = 0; idx < 4; ++idx) {
    double zz = ((idx ^ (idx >> 1)) & 1) ? -1.0 : 1.0;
    expectation += zz * std::norm(rotated[idx]);
  }
  return expectation;
}

}  // namespace

Dataset make_havlicek_dataset(int count, std::uint64_t seed) {
  if (count < 2 || count % 2 != 0)
    throw ConfigError("dataset: count must be a positive even number");
  const Circuit map2 = qsvm_feature_map(2);
  const Eigen::Matrix4cd v = fixed_random_unitary();
  constexpr double kGap = 0.3;
  SplitMix64 rng(derive_seed(seed, "havlicek"));
  Dataset data;
  int want_per_class = count / 2;
  int have[2] = {0, 0};
  const long budget = 20000L * count;
  for (long draw = 0; draw < budget && data.size() < count; ++draw) {
    Eigen::Vector2d x(2 * kPi * (1.0 - rng.uniform()), 2 * kPi * (1.0 - rng.uniform()));
    double m = havlicek_expectation(map2, v, x);
    if (std::abs(m) < kGap) continue;
    int label = m > 0 ? 1 : 0;
    if (have[label] >= want_per_class) continue;
    data.x.push_back(x);
    data.y.push_back(label);
    ++have[label];
  }
  if (data.size() != count)
    throw NumericError("dataset: could not reach balanced classes within the draw budget");
  return data;
}

Dataset make_qnn_toy_dataset(int count, std::uint64_t seed) {
  if (count < 2 || count % 2 != 0)
    throw ConfigError("dataset: count must be a positive even number");
  constexpr double kMargin = 0.2;
  SplitMix64 rng(derive_seed(seed, "qnn-toy"));
  Dataset data;
  int want_per_class = count / 2;
  int have[2] = {0, 0};
  const long budget = 20000L * count;
  for (long draw = 0; draw < budget && data.size() < count; ++draw) {
    Eigen::Vector2d x(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
    if (std::abs(x[1] - x[0]) < kMargin) continue;
    int label = x[1] > x[0] ? 1 : 0;
    if (have[label] >= want_per_class) continue;
    data.x.push_back(x);
    data.y.push_back(label);
    ++have[label];
  }
  if (data.size() != count)
    throw NumericError("dataset: could not reach balanced classes within the draw budget");
  return data;
}

Dataset read_dataset_csv(std::istream& in) {
  Dataset data;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1 && line.find("x1") != std::string::npos) continue;  // header
    auto c1 = line.find(',');
    auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos)
      throw ConfigError("dataset csv: line " + std::to_string(lineno) + ": expected x1,x2,label");
    try {
      double x1 = std::stod(line.substr(0, c1));
      double x2 = std::stod(line.substr(c1 + 1, c2 - c1 - 1));
      int label = std::stoi(line.substr(c2 + 1));
      if (label != 0 && label != 1)
        throw ConfigError("dataset csv: line " + std::to_string(lineno) + ": label must be 0/1");
      data.x.emplace_back(x1, x2);
      data.y.push_back(label);
    } catch (const std::invalid_argument&) {
      throw ConfigError("dataset csv: line " + std::to_string(lineno) + ": malformed number");
    }
  }
  return data;
}

void write_dataset_csv(std::ostream& out, const Dataset& data) {
  out << "x1,x2,label\n";
  char buf[96];
  for (int i = 0; i < data.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%d\n", data.x[i][0], data.x[i][1], data.y[i]);
    out << buf;
  }
}

namespace {

std::vector<Eigen::VectorXcd> feature_states(const Circuit& subcircuit, const Dataset& data) {
  std::vector<Eigen::VectorXcd> states;
  states.reserve(data.size());
  for (const Eigen::Vector2d& x : data.x)
    states.push_back(run(subcircuit, std::span<const double>(x.data(), 2), {}).amps);
  return states;
}

}  // namespace

double kernel_entry(const Circuit& subcircuit, const Eigen::Vector2d& x1,
                    const Eigen::Vector2d& x2) {
  const Statevector a = run(subcircuit, std::span<const double>(x1.data(), 2), {});
  const Statevector b = run(subcircuit, std::span<const double>(x2.data(), 2), {});
  return std::norm(overlap(b, a));
}

Eigen::MatrixXd kernel_matrix(const Circuit& subcircuit, const Dataset& data) {
  const auto states = feature_states(subcircuit, data);
  const int n = data.size();
  Eigen::MatrixXd k(n, n);
  for (int i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (int j = i + 1; j < n; ++j) k(i, j) = k(j, i) = std::norm(states[i].dot(states[j]));
  }
  return k;
}

Eigen::MatrixXd kernel_cross(const Circuit& subcircuit, const Dataset& rows,
                             const Dataset& columns) {
  const auto row_states = feature_states(subcircuit, rows);
  const auto col_states = feature_states(subcircuit, columns);
  Eigen::MatrixXd k(rows.size(), columns.size());
  for (int i = 0; i < rows.size(); ++i)
    for (int j = 0; j < columns.size(); ++j) k(i, j) = std::norm(row_states[i].dot(col_states[j]));
  return k;
}

double qsvm_value(const CoalitionGame& game, std::uint64_t coalition, const Dataset& train,
                  const Dataset& test, double C) {
  const Circuit sub = game.subcircuit(coalition);
  const SvmModel model = train_svm(kernel_matrix(sub, train), train.y, C);
  const std::vector<int> predictions = predict_all(model, kernel_cross(sub, test, train));
  return accuracy_value(predictions, test.y);
}

double qnn_value(const CoalitionGame& game, std::uint64_t coalition, const Dataset& data,
                 const Eigen::VectorXd& theta, std::uint64_t seed) {
  const Circuit sub = game.subcircuit(coalition);
  SplitMix64 rng(derive_seed(seed, "qnn-shots"));
  int correct = 0;
  for (int d = 0; d < data.size(); ++d) {
    const Statevector psi =
        run(sub, std::span<const double>(data.x[d].data(), 2),
            std::span<const double>(theta.data(), theta.size()));
    double p_one = 0.0;
    for (Eigen::Index idx = 0; idx < psi.amps.size(); ++idx)
      if (idx & 1) p_one += std::norm(psi.amps[idx]);
    int predicted = rng.uniform() < p_one ? 1 : 0;
    correct += predicted == data.y[d];
  }
  return static_cast<double>(correct) / data.size();
}

double qgan_value(const CoalitionGame& game, std::uint64_t coalition,
                  const Eigen::VectorXd& theta, const HellingerConfig& config,
                  std::uint64_t seed) {
  return hellinger_value(game, coalition, config, Eigen::VectorXd(), theta, seed);
}

Eigen::VectorXd lognormal_reference(int qubits) {
  const int n = 1 << qubits;
  Eigen::VectorXd p(n);
  constexpr double mu = 1.0, sigma = 1.0;
  p[0] = 0.0;  // log-normal density vanishes at 0
  for (int j = 1; j < n; ++j) {
    double lj = std::log(static_cast<double>(j));
    p[j] = std::exp(-(lj - mu) * (lj - mu) / (2 * sigma * sigma)) / (j * sigma);
  }
  return p / p.sum();
}

OptimizeResult minimize_simplex(const std::function<double(const Eigen::VectorXd&)>& objective,
                                const Eigen::VectorXd& start, const SimplexOptions& options) {
  const int dim = static_cast<int>(start.size());
  if (dim < 1) throw ConfigError("minimize_simplex: empty start point");
  OptimizeResult result;
  result.point = start;
  result.value = std::numeric_limits<double>::infinity();
  int evals = 0;
  auto eval = [&](const Eigen::VectorXd& x) {
    double v = objective(x);
    ++evals;
    if (v < result.value) {
      result.value = v;
      result.point = x;
    }
    return v;
  };

  // standard coefficients: reflect 1, expand 2, contract 1/2, shrink 1/2
  std::vector<Eigen::VectorXd> simplex;
  std::vector<double> values;
  simplex.push_back(start);
  values.push_back(eval(start));
  for (int d = 0; d < dim && evals < options.budget; ++d) {
    Eigen::VectorXd vertex = start;
    vertex[d] += options.initial_step;
    simplex.push_back(vertex);
    values.push_back(eval(vertex));
  }
  while (evals < options.budget && static_cast<int>(simplex.size()) == dim + 1) {
    std::vector<int> order(simplex.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      return values[a] == values[b] ? a < b : values[a] < values[b];
    });
    const int best = order.front(), worst = order.back(), second = order[order.size() - 2];
    double spread = std::abs(values[worst] - values[best]);
    if (spread < 1e-10) break;

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (int idx : order)
      if (idx != worst) centroid += simplex[idx];
    centroid /= dim;

    Eigen::VectorXd reflected = centroid + (centroid - simplex[worst]);
    double fr = eval(reflected);
    if (fr < values[best]) {
      Eigen::VectorXd expanded = centroid + 2.0 * (centroid - simplex[worst]);
      double fe = evals < options.budget ? eval(expanded) : fr;
      if (fe < fr) {
        simplex[worst] = expanded;
        values[worst] = fe;
      } else {
        simplex[worst] = reflected;
        values[worst] = fr;
      }
    } else if (fr < values[second]) {
      simplex[worst] = reflected;
      values[worst] = fr;
    } else {
      Eigen::VectorXd contracted = centroid + 0.5 * (simplex[worst] - centroid);
      double fc = evals < options.budget ? eval(contracted) : fr;
      if (fc < values[worst]) {
        simplex[worst] = contracted;
        values[worst] = fc;
      } else {
        for (std::size_t i = 0; i < simplex.size(); ++i) {
          if (static_cast<int>(i) == best) continue;
          simplex[i] = simplex[best] + 0.5 * (simplex[i] - simplex[best]);
          if (evals >= options.budget) break;
          values[i] = eval(simplex[i]);
        }
      }
    }
  }
  result.evaluations = evals;
  result.budget_exhausted = evals >= options.budget;
  return result;
}

OptimizeResult optimize_qaoa(const Graph& graph, int repetitions, const SimplexOptions& options) {
  const Circuit expanded = expand_layers(qaoa_circuit(graph, repetitions), &graph);
  const Eigen::VectorXd hamiltonian = maxcut_hamiltonian(graph);
  auto objective = [&](const Eigen::VectorXd& theta) {
    return energy(run(expanded, Eigen::VectorXd(), theta), hamiltonian);
  };

  const int dim = 2 * repetitions;
  SplitMix64 rng(derive_seed(options.seed, "qaoa-init"));
  OptimizeResult best;
  best.value = std::numeric_limits<double>::infinity();
  int used = 0;
  int restart = 0;
  // restart schedule: capped simplex runs from perturbed ramp starts first,
  // then fully random starts, until the evaluation budget is spent
  const int per_restart = std::max(dim + 2, options.budget / 3);
  while (used < options.budget) {
    Eigen::VectorXd start(dim);
    if (restart < 2) {
      // ramp start: cost angles grow, mixing angles shrink with depth
      for (int i = 0; i < repetitions; ++i) {
        double f = (i + 0.5) / repetitions;
        start[2 * i] = 0.35 * f + 0.15 * rng.uniform(-1.0, 1.0);
        start[2 * i + 1] = 0.35 * (1.0 - f) + 0.15 * rng.uniform(-1.0, 1.0);
      }
    } else {
      for (int d = 0; d < dim; ++d) start[d] = rng.uniform(0.0, kPi);
    }
    SimplexOptions local = options;
    local.budget = std::min(options.budget - used, per_restart);
    OptimizeResult run_result = minimize_simplex(objective, start, local);
    used += run_result.evaluations;
    if (run_result.value < best.value) {
      best.point = run_result.point;
      best.value = run_result.value;
    }
    best.budget_exhausted = used >= options.budget;
    ++restart;
  }
  best.evaluations = used;
  return best;
}

int qaoa_cut_value(const Graph& graph, int repetitions, const Eigen::VectorXd& theta) {
  const Circuit expanded = expand_layers(qaoa_circuit(graph, repetitions), &graph);
  return best_cut_from_state(graph, run(expanded, Eigen::VectorXd(), theta));
}

}  // namespace qshap
