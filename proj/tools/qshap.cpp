#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "qshap/errors.hpp"
#include "qshap/experiment.hpp"
#include "qshap/models.hpp"
#include "qshap/rng.hpp"
#include "qshap/transpiler.hpp"
#include "qshap/value_functions.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw qshap::ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw qshap::ConfigError("'" + path.string() + "': " + e.what());
  }
}

int run_command(const std::string& config_path) {
  qshap::ExperimentConfig config = qshap::load_experiment_config(config_path);
  qshap::RunRecord record = qshap::run_experiment(config);
  std::printf("config hash      %s\n", record.config_hash.c_str());
  std::printf("evaluations      %llu (%llu fresh)\n",
              static_cast<unsigned long long>(record.evaluations),
              static_cast<unsigned long long>(record.new_evaluations));
  std::printf("wall time        %.2fs\n", record.wall_seconds);
  for (const std::string& note : record.notes) std::printf("note             %s\n", note.c_str());
  for (const std::string& artifact : record.artifacts)
    std::printf("wrote            %s\n", artifact.c_str());
  return 0;
}

/// `exact` and `estimate` run custom games straight from a value-table file.
int table_command(const std::string& table_path, bool estimate, double alpha, int K, int runs,
                  std::uint64_t seed, double noise_sigma, const std::string& out_path) {
  json doc{{"experiment", "custom-game"},
           {"value_table_file", fs::path(table_path).filename().string()},
           {"estimator", {{"alpha", estimate ? alpha : 1.0}, {"K", K}, {"runs", runs}, {"seed", seed}}},
           {"output_dir", out_path},
           {"cache", false}};
  if (noise_sigma > 0.0) doc["noise_sigma"] = noise_sigma;
  qshap::ExperimentConfig config =
      qshap::parse_experiment_config(doc, fs::path(table_path).parent_path());
  qshap::RunRecord record = qshap::run_experiment(config);
  std::ifstream report(fs::path(config.output_dir) / "report.json");
  std::cout << report.rdbuf();
  std::printf("evaluations %llu\n", static_cast<unsigned long long>(record.evaluations));
  return 0;
}

int transpile_command(const std::string& circuit_path, const std::string& target_name, int trials,
                      double s1, double s2, std::uint64_t seed, const std::string& out_path) {
  qshap::Circuit circuit = qshap::circuit_from_json(read_json(circuit_path));
  qshap::HardwareTarget target;
  if (auto named = qshap::HardwareTarget::named(target_name)) {
    target = *named;
  } else {
    target = qshap::HardwareTarget::from_json(read_json(target_name));
  }
  if (trials < 1) throw qshap::ConfigError("--trials must be >= 1");
  double best = -std::numeric_limits<double>::infinity();
  qshap::TranspiledCircuit best_circuit;
  for (int t = 0; t < trials; ++t) {
    qshap::TranspiledCircuit candidate = qshap::transpile(
        circuit, target, qshap::derive_seed(qshap::derive_seed(seed, "trial"), t));
    double p = qshap::penalty(candidate, s1, s2);
    if (p > best) {
      best = p;
      best_circuit = candidate;
    }
  }
  std::printf("penalty   %.17g\n", best);
  std::printf("gates     n1=%d n2=%d\n", best_circuit.one_qubit_count(),
              best_circuit.two_qubit_count());
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    out << qshap::transpiled_to_json(best_circuit).dump(2) << '\n';
    std::printf("wrote     %s\n", out_path.c_str());
  }
  return 0;
}

int maxcut_command(const std::string& graph_path) {
  qshap::Graph graph =
      graph_path.empty() ? qshap::shipped_maxcut_graph() : qshap::graph_from_json(read_json(graph_path));
  qshap::MaxCutResult result = qshap::brute_force_max_cut(graph);
  std::printf("max cut    %d\n", result.value);
  std::string partition(graph.vertices, '0');
  for (int v = 0; v < graph.vertices; ++v)
    if ((result.assignment >> v) & 1) partition[v] = '1';
  std::printf("partition  %s (and its complement)\n", partition.c_str());
  std::printf("optima     %d assignments\n", result.optima_count);
  return 0;
}

int plotdata_command(const std::string& report_path) {
  json report = read_json(report_path);
  qshap::write_plotdata(report, std::cout);
  fs::path marginals = fs::path(report_path).parent_path() / "marginals.csv";
  if (fs::exists(marginals)) {
    fs::path filtered = fs::path(report_path).parent_path() / "marginals_plot.csv";
    std::ifstream in(marginals);
    std::ofstream out(filtered);
    qshap::filter_marginals_csv(in, out);
    std::fprintf(stderr, "wrote %s\n", filtered.string().c_str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shapley-value attribution for gates in parameterized quantum circuits"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment config end to end");
  run->add_option("config", config_path, "experiment JSON document")->required();

  std::string table_path, out_dir = "out/custom";
  double alpha = 0.5, noise_sigma = 0.0;
  int K = 1, runs = 1;
  std::uint64_t seed = 0;
  auto* exact = app.add_subcommand("exact", "Exact Shapley values of a value-table game");
  exact->add_option("--table", table_path, "JSON {players, values[2^N]}")->required();
  exact->add_option("--out", out_dir, "output directory");
  auto* estimate = app.add_subcommand("estimate", "Sampled estimate of a value-table game");
  estimate->add_option("--table", table_path, "JSON {players, values[2^N]}")->required();
  estimate->add_option("--alpha", alpha, "sampling fraction in (0,1]");
  estimate->add_option("--K", K, "repetitions per coalition");
  estimate->add_option("--runs", runs, "independent runs");
  estimate->add_option("--seed", seed, "master seed");
  estimate->add_option("--noise-sigma", noise_sigma, "additive Gaussian value noise");
  estimate->add_option("--out", out_dir, "output directory");

  std::string circuit_path, target_name = "ibmq-ehningen", transpiled_out;
  int trials = 50;
  double s1 = -1.0, s2 = -10.0;
  auto* transpile = app.add_subcommand("transpile", "Best-of-trials native-gate transpilation");
  transpile->add_option("circuit", circuit_path, "circuit JSON document")->required();
  transpile->add_option("--target", target_name, "named device or target JSON path");
  transpile->add_option("--trials", trials, "transpilation trials");
  transpile->add_option("--s1", s1, "one-qubit gate penalty (negative)");
  transpile->add_option("--s2", s2, "two-qubit gate penalty (below s1)");
  transpile->add_option("--seed", seed, "trial seed");
  transpile->add_option("--out", transpiled_out, "write best transpiled circuit JSON here");

  std::string graph_path;
  auto* maxcut = app.add_subcommand("brute-force-maxcut", "Enumerate all cuts of a graph");
  maxcut->add_option("graph", graph_path, "graph JSON (default: bundled 7-vertex instance)");

  std::string report_path;
  auto* plotdata = app.add_subcommand("plotdata", "Emit gnuplot-ready CSV from a report");
  plotdata->add_option("report", report_path, "report.json path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(config_path);
    if (exact->parsed()) return table_command(table_path, false, 1.0, 1, 1, seed, 0.0, out_dir);
    if (estimate->parsed())
      return table_command(table_path, true, alpha, K, runs, seed, noise_sigma, out_dir);
    if (transpile->parsed())
      return transpile_command(circuit_path, target_name, trials, s1, s2, seed, transpiled_out);
    if (maxcut->parsed()) return maxcut_command(graph_path);
    if (plotdata->parsed()) return plotdata_command(report_path);
  } catch (const qshap::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const qshap::ResourceCapError& e) {
    std::fprintf(stderr, "resource cap: %s\n", e.what());
    return 3;
  } catch (const qshap::NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
