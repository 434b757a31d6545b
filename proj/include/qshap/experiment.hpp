#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qshap/circuit.hpp"
#include "qshap/models.hpp"
#include "qshap/shapley.hpp"

namespace qshap {

enum class ExperimentKind { Qsvm, Qnn, Qgan, Transpile, Qaoa, CustomGame };

struct EstimatorSettings {
  double alpha = 1.0;
  int K = 1;
  int runs = 1;
  std::uint64_t seed = 0;
};

/// A parsed experiment document. `raw` keeps the original JSON; its dump is
/// the cache/config hash, so identical documents resume each other.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::CustomGame;
  nlohmann::json raw;
  std::filesystem::path base_dir;  // for resolving relative file references
  EstimatorSettings estimator;
  std::filesystem::path output_dir;
  std::string value_function;  // resolved name
  bool use_cache = true;
};

ExperimentConfig parse_experiment_config(const nlohmann::json& doc,
                                         const std::filesystem::path& base_dir);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// FNV-1a hash of the canonical config dump, hex-encoded.
std::string config_hash(const nlohmann::json& doc);

/// Game plus a per-run value-function factory (runs may re-optimize
/// parameters, so the evaluator can differ between runs).
struct ExperimentContext {
  CoalitionGame game;
  std::function<ValueFunction(std::uint64_t run_seed, int run_index)> make_vf;
  std::vector<std::string> notes;  // diagnostics for the run record
};

ExperimentContext build_context(const ExperimentConfig& config);

/// Append-only JSONL evaluation log: one {"mask","rep","value"} object per
/// line, 17 significant digits. Reloading replays previous evaluations.
class FileValueCache : public ValueCache {
 public:
  explicit FileValueCache(const std::filesystem::path& path);
  std::optional<double> get(std::uint64_t mask, std::uint64_t rep) override;
  void put(std::uint64_t mask, std::uint64_t rep, double value) override;
  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::pair<std::uint64_t, std::uint64_t>, double> entries_;
  std::ofstream out_;
};

struct RunRecord {
  std::string config_hash;
  std::vector<std::uint64_t> run_seeds;
  double wall_seconds = 0.0;
  std::uint64_t evaluations = 0;       // estimator-formula evaluation count
  std::uint64_t new_evaluations = 0;   // cache misses actually computed
  std::vector<std::string> artifacts;  // paths written under output_dir
  std::vector<std::string> notes;
};

/// Executes `runs` independent estimations and writes the report artifacts
/// (report.json, marginals.csv, wk.csv, summary.txt). Every report byte is a
/// function of (config, master seed) alone; the run record additionally
/// carries wall-clock diagnostics and is not byte-stable.
RunRecord run_experiment(const ExperimentConfig& config);

/// Aggregated report document (mean and std over runs per player).
nlohmann::json aggregate_report(const std::vector<ShapleyReport>& runs,
                                const CoalitionGame* game);

/// gnuplot-ready per-player CSV from a report document.
void write_plotdata(const nlohmann::json& report, std::ostream& out);

/// Re-emits a marginals CSV keeping rows with weight >= 0.001 (the plotting
/// convention).
void filter_marginals_csv(std::istream& in, std::ostream& out, double min_weight = 0.001);

}  // namespace qshap
