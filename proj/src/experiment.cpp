#include "qshap/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <istream>
#include <memory>
#include <sstream>

#include "qshap/errors.hpp"
#include "qshap/numeric.hpp"
#include "qshap/rng.hpp"

namespace qshap {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

ExperimentKind kind_from_name(const std::string& name) {
  if (name == "qsvm") return ExperimentKind::Qsvm;
  if (name == "qnn") return ExperimentKind::Qnn;
  if (name == "qgan") return ExperimentKind::Qgan;
  if (name == "transpile") return ExperimentKind::Transpile;
  if (name == "qaoa") return ExperimentKind::Qaoa;
  if (name == "custom-game") return ExperimentKind::CustomGame;
  throw ConfigError("experiment: unknown kind '" + name + "'");
}

std::string default_value_function(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Qsvm: return "accuracy_qsvm";
    case ExperimentKind::Qnn: return "accuracy_qnn";
    case ExperimentKind::Qgan: return "hellinger";
    case ExperimentKind::Transpile: return "exec_efficiency";
    case ExperimentKind::Qaoa: return "energy";
    case ExperimentKind::CustomGame: return "table";
  }
  return "table";
}

json file_or_inline(const ExperimentConfig& config, const std::string& inline_key,
                    const std::string& file_key) {
  if (config.raw.contains(inline_key)) return config.raw.at(inline_key);
  if (config.raw.contains(file_key)) {
    fs::path path = config.base_dir / config.raw.at(file_key).get<std::string>();
    std::ifstream in(path);
    if (!in) throw ConfigError(file_key + ": cannot open '" + path.string() + "'");
    try {
      return json::parse(in);
    } catch (const json::exception& e) {
      throw ConfigError(file_key + ": '" + path.string() + "': " + e.what());
    }
  }
  return json();
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(where + ": expected an array of numbers");
  Eigen::VectorXd v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) v[i] = j.at(i).get<double>();
  return v;
}

Eigen::VectorXd theta_from_config(const ExperimentConfig& config) {
  if (config.raw.contains("theta"))
    return vector_from_json(config.raw.at("theta"), "theta");
  json doc = file_or_inline(config, "-", "theta_file");
  if (!doc.is_null()) {
    if (!doc.contains("theta")) throw ConfigError("theta_file: missing 'theta' array");
    return vector_from_json(doc.at("theta"), "theta_file");
  }
  return Eigen::VectorXd();
}

Dataset dataset_from_config(const ExperimentConfig& config, const std::string& role, int fallback,
                            std::uint64_t seed_label) {
  const json& raw = config.raw;
  std::string file_key = role + "_file";  // e.g. train_file
  if (raw.contains("dataset") && raw.at("dataset").contains(file_key)) {
    fs::path path = config.base_dir / raw.at("dataset").at(file_key).get<std::string>();
    std::ifstream in(path);
    if (!in) throw ConfigError("dataset." + file_key + ": cannot open '" + path.string() + "'");
    return read_dataset_csv(in);
  }
  int count = fallback;
  std::uint64_t seed = 0;
  if (raw.contains("dataset")) {
    count = raw.at("dataset").value(role, fallback);
    seed = raw.at("dataset").value("seed", std::uint64_t{0});
  }
  std::uint64_t derived = derive_seed(derive_seed(seed, role), seed_label);
  if (config.kind == ExperimentKind::Qnn) return make_qnn_toy_dataset(count, derived);
  return make_havlicek_dataset(count, derived);
}

Graph graph_from_config(const ExperimentConfig& config) {
  json doc = file_or_inline(config, "graph", "graph_file");
  if (doc.is_null()) return shipped_maxcut_graph();
  return graph_from_json(doc);
}

HardwareTarget target_from_config(const ExperimentConfig& config) {
  if (!config.raw.contains("target")) return HardwareTarget::ibmq_ehningen();
  const json& t = config.raw.at("target");
  if (t.is_string()) {
    auto named = HardwareTarget::named(t.get<std::string>());
    if (!named) throw ConfigError("target: unknown device name '" + t.get<std::string>() + "'");
    return *named;
  }
  return HardwareTarget::from_json(t);
}

Circuit circuit_from_config_or_builtin(const ExperimentConfig& config) {
  json doc = file_or_inline(config, "circuit", "circuit_file");
  if (!doc.is_null()) return circuit_from_json(doc);
  switch (config.kind) {
    case ExperimentKind::Qsvm:
      return qsvm_feature_map(config.raw.value("feature_map_reps", 2));
    case ExperimentKind::Qnn:
      return qnn_circuit();
    case ExperimentKind::Qgan:
      return qgan_circuit();
    case ExperimentKind::Transpile:
      return qft_circuit(config.raw.value("qft_qubits", 3));
    default:
      throw ConfigError("experiment: no circuit given and no default for this kind");
  }
}

std::vector<int> active_gates_for(const ExperimentConfig& config, const Circuit& circuit) {
  if (config.raw.contains("active_gates")) {
    std::vector<int> active;
    for (const auto& g : config.raw.at("active_gates")) active.push_back(g.get<int>());
    return active;
  }
  std::vector<int> active;
  switch (config.kind) {
    case ExperimentKind::Qnn:
    case ExperimentKind::Qgan:
    case ExperimentKind::Qaoa:
      // default: every non-Hadamard gate plays; initial H gates remain
      for (int g = 1; g <= circuit.size(); ++g)
        if (circuit.gates[g - 1].kind != GateKind::H) active.push_back(g);
      return active;
    default:
      for (int g = 1; g <= circuit.size(); ++g) active.push_back(g);
      return active;
  }
}

ExpressibilityConfig expressibility_from_config(const ExperimentConfig& config) {
  ExpressibilityConfig e;
  if (config.raw.contains("expressibility")) {
    const json& j = config.raw.at("expressibility");
    e.pairs = j.value("pairs", e.pairs);
    e.bins = j.value("bins", e.bins);
    e.swap_test_shots = j.value("swap_shots", e.swap_test_shots);
    e.shots = j.value("shots", e.shots);
    e.seed = j.value("seed", e.seed);
  }
  return e;
}

EntanglingConfig entangling_from_config(const ExperimentConfig& config) {
  EntanglingConfig e;
  if (config.raw.contains("entangling")) {
    const json& j = config.raw.at("entangling");
    e.samples = j.value("samples", e.samples);
    e.seed = j.value("seed", e.seed);
  }
  return e;
}

HellingerConfig hellinger_from_config(const ExperimentConfig& config, int qubits) {
  HellingerConfig h;
  h.shots = config.raw.value("shots", std::uint64_t{10000});
  h.noise = config.raw.contains("noise") ? noise_from_json(config.raw.at("noise"))
                                         : NoiseModel::none(qubits);
  if (h.noise.qubits() != qubits)
    throw ConfigError("noise: flip list must cover " + std::to_string(qubits) + " qubits");
  h.mitigation = config.raw.value("mitigation", false);
  h.sampled_calibration = config.raw.value("sampled_calibration", false);
  h.calibration_shots = config.raw.value("calibration_shots", std::uint64_t{10000});
  return h;
}

}  // namespace

ExperimentConfig parse_experiment_config(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("experiment: expected a JSON object");
  if (!doc.contains("experiment")) throw ConfigError("experiment: missing 'experiment' kind");
  ExperimentConfig config;
  config.kind = kind_from_name(doc.at("experiment").get<std::string>());
  config.raw = doc;
  config.base_dir = base_dir;
  if (doc.contains("estimator")) {
    const json& e = doc.at("estimator");
    config.estimator.alpha = e.value("alpha", 1.0);
    config.estimator.K = e.value("K", 1);
    config.estimator.runs = e.value("runs", 1);
    config.estimator.seed = e.value("seed", std::uint64_t{0});
  }
  if (!(config.estimator.alpha > 0.0 && config.estimator.alpha <= 1.0))
    throw ConfigError("estimator.alpha: must lie in (0, 1]");
  if (config.estimator.K < 1) throw ConfigError("estimator.K: must be >= 1");
  if (config.estimator.runs < 1) throw ConfigError("estimator.runs: must be >= 1");
  config.output_dir = base_dir / doc.value("output_dir", std::string("out"));
  config.value_function = doc.value("value_function", default_value_function(config.kind));
  config.use_cache = doc.value("cache", true);
  return config;
}

ExperimentConfig load_experiment_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config: '" + path.string() + "': " + e.what());
  }
  return parse_experiment_config(doc, path.parent_path());
}

std::string config_hash(const json& doc) {
  const std::string dump = doc.dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ExperimentContext build_context(const ExperimentConfig& config) {
  const std::string& vf_name = config.value_function;

  if (config.kind == ExperimentKind::CustomGame) {
    json doc = file_or_inline(config, "value_table", "value_table_file");
    if (doc.is_null()) throw ConfigError("custom-game: missing 'value_table'");
    int players = doc.value("players", 0);
    if (players < 1 || players > 24) throw ConfigError("value_table: players must be in [1, 24]");
    std::vector<double> table;
    for (const auto& v : doc.at("values")) table.push_back(v.get<double>());
    if (table.size() != (std::size_t{1} << players))
      throw ConfigError("value_table: expected " + std::to_string(std::size_t{1} << players) +
                        " values, got " + std::to_string(table.size()));
    double sigma = config.raw.value("noise_sigma", 0.0);
    // placeholder circuit: one H per player so reports have gate labels
    Circuit c;
    c.qubits = 1;
    std::vector<int> active;
    for (int g = 0; g < players; ++g) {
      c.gates.push_back({GateKind::H, {0}, {}, 0});
      active.push_back(g + 1);
    }
    ExperimentContext ctx{CoalitionGame(std::move(c), std::move(active)), nullptr, {}};
    ctx.make_vf = [table, sigma](std::uint64_t, int) {
      ValueFunction vf;
      vf.name = "table";
      vf.deterministic = sigma == 0.0;
      vf.eval = [table, sigma](std::uint64_t mask, std::uint64_t seed) {
        double v = table[mask];
        if (sigma > 0.0) v += sigma * SplitMix64(seed).gaussian();
        return v;
      };
      return vf;
    };
    return ctx;
  }

  if (config.kind == ExperimentKind::Qaoa) {
    Graph graph = graph_from_config(config);
    int reps = config.raw.value("qaoa_reps", 1);
    Circuit circuit = qaoa_circuit(graph, reps);
    std::vector<int> active = config.raw.contains("active_gates")
                                  ? active_gates_for(config, circuit)
                                  : qaoa_active_gates(graph, reps);
    CoalitionGame game(circuit, active);
    ExperimentContext ctx{game, nullptr, {}};

    if (vf_name == "energy") {
      bool optimize = config.raw.value("optimize", !config.raw.contains("theta"));
      Eigen::VectorXd theta = theta_from_config(config);
      SimplexOptions opts;
      opts.budget = config.raw.value("optimizer_budget", 500);
      ctx.make_vf = [game, graph, reps, optimize, theta, opts](std::uint64_t run_seed,
                                                               int) mutable {
        Eigen::VectorXd bound = theta;
        if (optimize) {
          SimplexOptions local = opts;
          local.seed = derive_seed(run_seed, "optimizer");
          bound = optimize_qaoa(graph, reps, local).point;
        }
        if (bound.size() != 2 * reps)
          throw ConfigError("qaoa: theta must have dimension " + std::to_string(2 * reps));
        ValueFunction vf;
        vf.name = "energy";
        vf.deterministic = true;
        vf.eval = [game, graph, bound](std::uint64_t mask, std::uint64_t) {
          return energy_value(game, mask, bound, graph);
        };
        return vf;
      };
      if (config.raw.value("optimize", !config.raw.contains("theta"))) {
        for (int r = 0; r < config.estimator.runs; ++r) {
          SimplexOptions local = opts;
          local.seed = derive_seed(derive_seed(config.estimator.seed, "run"),
                                   static_cast<std::uint64_t>(r));
          local.seed = derive_seed(local.seed, "optimizer");
          OptimizeResult opt = optimize_qaoa(graph, reps, local);
          ctx.notes.push_back("run " + std::to_string(r) +
                              ": cut=" + std::to_string(qaoa_cut_value(graph, reps, opt.point)) +
                              " energy=" + std::to_string(opt.value));
        }
      }
      return ctx;
    }
    if (vf_name == "expressibility" || vf_name == "entangling") {
      ExpressibilityConfig expr = expressibility_from_config(config);
      EntanglingConfig ent = entangling_from_config(config);
      expr.layer_graph = graph;
      ent.layer_graph = graph;
      bool is_expr = vf_name == "expressibility";
      ctx.make_vf = [game, expr, ent, is_expr](std::uint64_t, int) {
        ValueFunction vf;
        vf.name = is_expr ? "expressibility" : "entangling";
        vf.deterministic = !(is_expr && expr.swap_test_shots);
        vf.eval = [game, expr, ent, is_expr](std::uint64_t mask, std::uint64_t seed) {
          Eigen::VectorXd x;
          if (is_expr) return -expressibility_eta(game, mask, expr, x, seed);
          return entangling_capability(game, mask, ent, x);
        };
        return vf;
      };
      return ctx;
    }
    throw ConfigError("qaoa: unsupported value function '" + vf_name + "'");
  }

  Circuit circuit = circuit_from_config_or_builtin(config);
  std::vector<int> active = active_gates_for(config, circuit);
  CoalitionGame game(circuit, active);
  ExperimentContext ctx{game, nullptr, {}};

  if (vf_name == "accuracy_qsvm") {
    if (config.kind != ExperimentKind::Qsvm)
      throw ConfigError("value_function accuracy_qsvm requires the qsvm experiment");
    Dataset train = dataset_from_config(config, "train", 40, 1);
    Dataset test = dataset_from_config(config, "test", 1000, 2);
    double C = config.raw.value("svm_c", 1.0);
    ctx.make_vf = [game, train, test, C](std::uint64_t, int) {
      ValueFunction vf;
      vf.name = "accuracy_qsvm";
      vf.deterministic = true;
      vf.eval = [game, train, test, C](std::uint64_t mask, std::uint64_t) {
        return qsvm_value(game, mask, train, test, C);
      };
      return vf;
    };
    return ctx;
  }
  if (vf_name == "accuracy_qnn") {
    if (config.kind != ExperimentKind::Qnn)
      throw ConfigError("value_function accuracy_qnn requires the qnn experiment");
    Dataset data = dataset_from_config(config, "train", 20, 1);
    Eigen::VectorXd theta = theta_from_config(config);
    if (theta.size() == 0)
      theta = (Eigen::VectorXd(4) << 3.860, -1.070, -1.583, 0.860).finished();
    if (theta.size() != circuit.theta_dim)
      throw ConfigError("qnn: theta must have dimension " + std::to_string(circuit.theta_dim));
    ctx.make_vf = [game, data, theta](std::uint64_t, int) {
      ValueFunction vf;
      vf.name = "accuracy_qnn";
      vf.deterministic = false;
      vf.eval = [game, data, theta](std::uint64_t mask, std::uint64_t seed) {
        return qnn_value(game, mask, data, theta, seed);
      };
      return vf;
    };
    return ctx;
  }
  if (vf_name == "hellinger") {
    HellingerConfig h = hellinger_from_config(config, circuit.qubits);
    Eigen::VectorXd theta = theta_from_config(config);
    if (config.kind == ExperimentKind::Qgan && theta.size() == 0)
      theta = (Eigen::VectorXd(9) << -1.328, -0.155, 3.025, 1.424, 0.427, 1.620, 0.980, 1.495,
               1.461)
                  .finished();
    if (theta.size() != circuit.theta_dim)
      throw ConfigError("hellinger: theta must have dimension " +
                        std::to_string(circuit.theta_dim));
    ctx.make_vf = [game, h, theta](std::uint64_t, int) {
      ValueFunction vf;
      vf.name = "hellinger";
      vf.deterministic = false;
      vf.eval = [game, h, theta](std::uint64_t mask, std::uint64_t seed) {
        return hellinger_value(game, mask, h, Eigen::VectorXd(), theta, seed);
      };
      return vf;
    };
    return ctx;
  }
  if (vf_name == "exec_efficiency") {
    EfficiencyConfig eff;
    eff.target = target_from_config(config);
    eff.s1 = config.raw.value("s1", -1.0);
    eff.s2 = config.raw.value("s2", -10.0);
    eff.trials = config.raw.value("trials", 50);
    eff.theta = theta_from_config(config);
    if (config.raw.contains("x")) eff.x = vector_from_json(config.raw.at("x"), "x");
    ctx.make_vf = [game, eff](std::uint64_t, int) {
      ValueFunction vf;
      vf.name = "exec_efficiency";
      vf.deterministic = false;
      vf.eval = [game, eff](std::uint64_t mask, std::uint64_t seed) {
        return execution_efficiency(game, mask, eff, seed);
      };
      return vf;
    };
    return ctx;
  }
  if (vf_name == "expressibility" || vf_name == "entangling") {
    ExpressibilityConfig expr = expressibility_from_config(config);
    EntanglingConfig ent = entangling_from_config(config);
    bool is_expr = vf_name == "expressibility";
    Eigen::VectorXd x = Eigen::VectorXd::Zero(circuit.feature_dim);
    if (config.raw.contains("x")) x = vector_from_json(config.raw.at("x"), "x");
    ctx.make_vf = [game, expr, ent, is_expr, x](std::uint64_t, int) {
      ValueFunction vf;
      vf.name = is_expr ? "expressibility" : "entangling";
      vf.deterministic = !(is_expr && expr.swap_test_shots);
      vf.eval = [game, expr, ent, is_expr, x](std::uint64_t mask, std::uint64_t seed) {
        if (is_expr) return -expressibility_eta(game, mask, expr, x, seed);
        return entangling_capability(game, mask, ent, x);
      };
      return vf;
    };
    return ctx;
  }
  throw ConfigError("experiment: unsupported value function '" + vf_name + "'");
}

FileValueCache::FileValueCache(const fs::path& path) {
  if (fs::exists(path)) {
    std::ifstream in(path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      try {
        json entry = json::parse(line);
        std::uint64_t mask = std::stoull(entry.at("mask").get<std::string>(), nullptr, 16);
        std::uint64_t rep = entry.at("rep").get<std::uint64_t>();
        entries_[{mask, rep}] = entry.at("value").get<double>();
      } catch (const std::exception&) {
        throw ConfigError("cache '" + path.string() + "': corrupt entry at line " +
                          std::to_string(lineno));
      }
    }
  }
  out_.open(path, std::ios::app);
  if (!out_) throw ConfigError("cache: cannot open '" + path.string() + "' for writing");
}

std::optional<double> FileValueCache::get(std::uint64_t mask, std::uint64_t rep) {
  auto it = entries_.find({mask, rep});
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

void FileValueCache::put(std::uint64_t mask, std::uint64_t rep, double value) {
  entries_[{mask, rep}] = value;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "{\"mask\":\"0x%llx\",\"rep\":%llu,\"value\":%.17g}\n",
                static_cast<unsigned long long>(mask), static_cast<unsigned long long>(rep),
                value);
  out_ << buf;
  out_.flush();
}

namespace {

/// Per-run cache adapter: shifts the replication key so runs stay
/// independent in the shared log.
class OffsetCache : public ValueCache {
 public:
  OffsetCache(ValueCache* inner, std::uint64_t offset) : inner_(inner), offset_(offset) {}
  std::optional<double> get(std::uint64_t mask, std::uint64_t rep) override {
    return inner_ ? inner_->get(mask, rep + offset_) : std::nullopt;
  }
  void put(std::uint64_t mask, std::uint64_t rep, double value) override {
    if (inner_) inner_->put(mask, rep + offset_, value);
  }

 private:
  ValueCache* inner_;
  std::uint64_t offset_;
};

double quantile(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  double pos = q * (sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - lo;
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

void write_wk_csv(std::ostream& out, const std::vector<ValueMultiset>& sets) {
  const std::vector<ParetoPoint> frontier = pareto_frontier(sets);
  out << "k,count,min,q1,median,q3,max,best,frontier,on_frontier\n";
  char buf[256];
  for (const ParetoPoint& p : frontier) {
    const ValueMultiset& s = sets[p.k];
    std::snprintf(buf, sizeof(buf), "%d,%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", p.k,
                  s.values.size(), s.values.front(), quantile(s.values, 0.25),
                  quantile(s.values, 0.5), quantile(s.values, 0.75), s.values.back(), p.best,
                  p.frontier, p.on_frontier ? 1 : 0);
    out << buf;
  }
}

}  // namespace

nlohmann::json aggregate_report(const std::vector<ShapleyReport>& runs,
                                const CoalitionGame* game) {
  if (runs.empty()) throw ConfigError("aggregate_report: no runs");
  const int players = static_cast<int>(runs.front().players.size());
  json players_json = json::array();
  std::vector<double> phis(runs.size()), dists;
  for (int p = 0; p < players; ++p) {
    for (std::size_t r = 0; r < runs.size(); ++r) phis[r] = runs[r].players[p].phi;
    json entry;
    entry["player"] = p + 1;
    entry["gate_index"] = game ? game->gate_index(p + 1) : p + 1;
    entry["gate_name"] = game ? game->gate_label(p + 1) : "player";
    entry["phi"] = mean(phis);
    entry["std_runs"] = sample_std(phis);
    dists.clear();
    for (const ShapleyReport& run : runs)
      if (run.players[p].std_dist) dists.push_back(*run.players[p].std_dist);
    if (dists.size() == runs.size()) entry["std_dist"] = mean(dists);
    players_json.push_back(std::move(entry));
  }
  std::uint64_t evaluations = 0;
  std::vector<std::uint64_t> seeds;
  for (const ShapleyReport& run : runs) {
    evaluations += run.evaluations;
    seeds.insert(seeds.end(), run.seeds.begin(), run.seeds.end());
  }
  return json{{"method", runs.front().method}, {"K", runs.front().K},
              {"n", runs.front().n},           {"alpha", runs.front().alpha},
              {"seeds", seeds},                {"evaluations", evaluations},
              {"players", players_json}};
}

RunRecord run_experiment(const ExperimentConfig& config) {
  const auto start_time = std::chrono::steady_clock::now();
  ExperimentContext ctx = build_context(config);
  const int players = ctx.game.players();

  fs::create_directories(config.output_dir);
  RunRecord record;
  record.config_hash = config_hash(config.raw);
  record.notes = ctx.notes;

  std::unique_ptr<FileValueCache> cache;
  if (config.use_cache)
    cache = std::make_unique<FileValueCache>(config.output_dir /
                                             ("cache_" + record.config_hash + ".jsonl"));

  std::vector<ShapleyReport> reports;
  std::optional<MarginalDistribution> marginals;
  std::vector<ValueMultiset> multisets;
  for (int r = 0; r < config.estimator.runs; ++r) {
    std::uint64_t run_seed =
        derive_seed(derive_seed(config.estimator.seed, "run"), static_cast<std::uint64_t>(r));
    record.run_seeds.push_back(run_seed);
    ValueFunction vf = ctx.make_vf(run_seed, r);
    ShapleyEngine engine(vf, players);
    OffsetCache offset(cache.get(), static_cast<std::uint64_t>(r) << 32);
    if (cache) engine.set_cache(&offset);
    ShapleyReport report = engine.run(config.estimator.alpha, config.estimator.K, run_seed);
    record.evaluations += report.evaluations;
    record.new_evaluations += engine.fresh_evaluations();
    if (r == 0) {
      if (!engine.values().empty()) {
        marginals = exact_marginals(engine.values(), players);
        multisets = value_multisets(engine.values(), players);
      } else {
        marginals = engine.sampled_marginals();
        multisets = value_multisets(engine.pool(), players);
      }
    }
    reports.push_back(std::move(report));
  }

  json report = aggregate_report(reports, &ctx.game);
  auto write_artifact = [&](const std::string& name, auto&& body) {
    fs::path path = config.output_dir / name;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    body(out);
    record.artifacts.push_back(path.string());
  };
  write_artifact("report.json", [&](std::ostream& out) { out << report.dump(2) << '\n'; });
  write_artifact("marginals.csv",
                 [&](std::ostream& out) { write_marginals_csv(out, *marginals); });
  write_artifact("wk.csv", [&](std::ostream& out) { write_wk_csv(out, multisets); });
  write_artifact("summary.txt", [&](std::ostream& out) {
    out << "player gate_index gate_name phi std_runs\n";
    char buf[192];
    for (const auto& p : report.at("players")) {
      std::snprintf(buf, sizeof(buf), "%d %d %s %.12g %.12g\n", p.at("player").get<int>(),
                    p.at("gate_index").get<int>(), p.at("gate_name").get<std::string>().c_str(),
                    p.at("phi").get<double>(), p.at("std_runs").get<double>());
      out << buf;
    }
  });

  record.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
  // diagnostic record; wall clock makes it non-reproducible by design
  json record_json{{"config_hash", record.config_hash},
                   {"run_seeds", record.run_seeds},
                   {"wall_seconds", record.wall_seconds},
                   {"evaluations", record.evaluations},
                   {"new_evaluations", record.new_evaluations},
                   {"artifacts", record.artifacts},
                   {"notes", record.notes}};
  std::ofstream rec(config.output_dir / "run_record.json");
  rec << record_json.dump(2) << '\n';
  return record;
}

void write_plotdata(const json& report, std::ostream& out) {
  out << "player,gate_index,gate_name,phi,std_runs,std_dist\n";
  char buf[256];
  for (const auto& p : report.at("players")) {
    double std_dist = p.contains("std_dist") ? p.at("std_dist").get<double>() : 0.0;
    std::snprintf(buf, sizeof(buf), "%d,%d,%s,%.17g,%.17g,%.17g\n", p.at("player").get<int>(),
                  p.at("gate_index").get<int>(), p.at("gate_name").get<std::string>().c_str(),
                  p.at("phi").get<double>(), p.at("std_runs").get<double>(), std_dist);
    out << buf;
  }
}

void filter_marginals_csv(std::istream& in, std::ostream& out, double min_weight) {
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (first) {
      out << line << '\n';
      first = false;
      continue;
    }
    auto c1 = line.find(',');
    auto c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
    if (c2 == std::string::npos) continue;
    if (std::stod(line.substr(c2 + 1)) >= min_weight) out << line << '\n';
  }
}

}  // namespace qshap
