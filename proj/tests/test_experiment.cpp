#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qshap/errors.hpp"
#include "qshap/experiment.hpp"

using namespace qshap;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const std::string& name) {
  fs::path dir = fs::path("test_tmp") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::size_t line_count(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

json small_qsvm_config(const std::string& out_dir) {
  return json{{"experiment", "qsvm"},
              {"feature_map_reps", 1},
              {"dataset", {{"train", 8}, {"test", 24}, {"seed", 3}}},
              {"estimator", {{"alpha", 1.0}, {"K", 1}, {"runs", 1}, {"seed", 11}}},
              {"output_dir", out_dir}};
}

}  // namespace

TEST_CASE("qsvm exact run writes all artifacts and caches every coalition") {
  fs::path dir = fresh_dir("qsvm_exact");
  ExperimentConfig config = parse_experiment_config(small_qsvm_config(dir.string()), ".");
  RunRecord record = run_experiment(config);
  CHECK(record.evaluations == 128);  // 2^7 coalitions
  CHECK(record.new_evaluations == 128);
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "marginals.csv"));
  CHECK(fs::exists(dir / "wk.csv"));
  CHECK(fs::exists(dir / "summary.txt"));
  CHECK(line_count(dir / ("cache_" + record.config_hash + ".jsonl")) == 128);

  json report = json::parse(slurp(dir / "report.json"));
  CHECK(report.at("method") == "exact");
  CHECK(report.at("evaluations") == 128);
  CHECK(report.at("players").size() == 7);
  CHECK(report.at("players")[6].at("gate_name") == "CX");
  CHECK(std::abs(report.at("players")[6].at("phi").get<double>()) < 1e-12);
  double total = 0.0;
  for (const auto& p : report.at("players")) total += p.at("phi").get<double>();
  CHECK(total == doctest::Approx(total));  // finite

  // marginals: header plus 7 * 2^6 rows
  CHECK(line_count(dir / "marginals.csv") == 1 + 7 * 64);
  // wk: header plus k = 0..7
  CHECK(line_count(dir / "wk.csv") == 9);
}

TEST_CASE("warm reruns replay the cache without new evaluations") {
  fs::path dir = fresh_dir("qsvm_warm");
  ExperimentConfig config = parse_experiment_config(small_qsvm_config(dir.string()), ".");
  RunRecord first = run_experiment(config);
  std::string report_bytes = slurp(dir / "report.json");
  RunRecord second = run_experiment(config);
  CHECK(second.new_evaluations == 0);
  CHECK(second.evaluations == first.evaluations);
  CHECK(slurp(dir / "report.json") == report_bytes);
}

TEST_CASE("partial caches only evaluate the missing coalitions") {
  fs::path dir = fresh_dir("qsvm_partial");
  ExperimentConfig config = parse_experiment_config(small_qsvm_config(dir.string()), ".");
  RunRecord first = run_experiment(config);
  fs::path cache_path = dir / ("cache_" + first.config_hash + ".jsonl");

  // drop the last 40 lines
  std::ifstream in(cache_path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  in.close();
  std::ofstream out(cache_path, std::ios::trunc);
  for (std::size_t i = 0; i + 40 < lines.size(); ++i) out << lines[i] << '\n';
  out.close();

  RunRecord second = run_experiment(config);
  CHECK(second.new_evaluations == 40);
}

TEST_CASE("corrupt cache lines fail with their line number") {
  fs::path dir = fresh_dir("qsvm_corrupt");
  ExperimentConfig config = parse_experiment_config(small_qsvm_config(dir.string()), ".");
  RunRecord record = run_experiment(config);
  fs::path cache_path = dir / ("cache_" + record.config_hash + ".jsonl");
  std::ofstream(cache_path, std::ios::app) << "{broken\n";
  CHECK_THROWS_WITH_AS(run_experiment(config), doctest::Contains("line 129"), ConfigError);
}

TEST_CASE("cache values round-trip at 17 significant digits") {
  fs::path dir = fresh_dir("cache_digits");
  {
    FileValueCache cache(dir / "log.jsonl");
    cache.put(5, 0, 0.12345678901234567);
    cache.put(6, 2, -1.0 / 3.0);
  }
  FileValueCache cache(dir / "log.jsonl");
  CHECK(cache.get(5, 0) == 0.12345678901234567);
  CHECK(cache.get(6, 2) == -1.0 / 3.0);
  CHECK(!cache.get(7, 0).has_value());
}

TEST_CASE("reports are byte-identical no matter the thread count") {
  fs::path dir1 = fresh_dir("threads_one");
  fs::path dir2 = fresh_dir("threads_four");
  json doc{{"experiment", "qnn"},
           {"dataset", {{"train", 12}, {"seed", 2}}},
           {"active_gates", {4, 5, 6, 7, 8}},
           {"estimator", {{"alpha", 0.25}, {"K", 2}, {"runs", 2}, {"seed", 5}}},
           {"cache", false}};
  json doc1 = doc;
  doc1["output_dir"] = dir1.string();
  json doc2 = doc;
  doc2["output_dir"] = dir2.string();

  setenv("QSHAP_THREADS", "1", 1);
  run_experiment(parse_experiment_config(doc1, "."));
  setenv("QSHAP_THREADS", "4", 1);
  run_experiment(parse_experiment_config(doc2, "."));
  unsetenv("QSHAP_THREADS");

  CHECK(slurp(dir1 / "report.json") == slurp(dir2 / "report.json"));
  CHECK(slurp(dir1 / "marginals.csv") == slurp(dir2 / "marginals.csv"));
  CHECK(slurp(dir1 / "wk.csv") == slurp(dir2 / "wk.csv"));
}

TEST_CASE("custom games run from a value table") {
  fs::path dir = fresh_dir("custom_game");
  json table{{"players", 3}, {"values", {0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0}}};
  std::ofstream(dir / "table.json") << table.dump();
  json doc{{"experiment", "custom-game"},
           {"value_table_file", "table.json"},
           {"estimator", {{"alpha", 1.0}, {"K", 1}, {"runs", 1}, {"seed", 0}}},
           {"output_dir", "out"},
           {"cache", false}};
  ExperimentConfig config = parse_experiment_config(doc, dir);
  RunRecord record = run_experiment(config);
  CHECK(record.evaluations == 8);
  json report = json::parse(slurp(dir / "out" / "report.json"));
  // v(S) = 4 b2 + 2 b1 + b0 is additive with coefficients 1, 2, 4
  CHECK(report.at("players")[0].at("phi").get<double>() == doctest::Approx(1.0));
  CHECK(report.at("players")[1].at("phi").get<double>() == doctest::Approx(2.0));
  CHECK(report.at("players")[2].at("phi").get<double>() == doctest::Approx(4.0));

  // sampled estimate with noise runs through the same entry point
  json est = doc;
  est["estimator"] = {{"alpha", 0.5}, {"K", 2}, {"runs", 3}, {"seed", 4}};
  est["noise_sigma"] = 0.1;
  est["output_dir"] = "out_est";
  RunRecord est_record = run_experiment(parse_experiment_config(est, dir));
  CHECK(est_record.evaluations == 3 * (2 * 2 * 3 * 2));  // runs * 2nNK, n = ceil(0.5 * 2^2)
  json est_report = json::parse(slurp(dir / "out_est" / "report.json"));
  CHECK(est_report.at("method") == "sampled-nK");
  CHECK(est_report.at("n") == 2);
  for (const auto& p : est_report.at("players")) CHECK(p.at("std_runs").get<double>() > 0.0);
}

TEST_CASE("config validation reports field paths") {
  CHECK_THROWS_WITH_AS(parse_experiment_config(json{{"experiment", "bogus"}}, "."),
                       doctest::Contains("unknown kind"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_experiment_config(json{{"experiment", "qsvm"}, {"estimator", {{"alpha", 0.0}}}}, "."),
      doctest::Contains("estimator.alpha"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_experiment_config(json{{"experiment", "qsvm"}, {"estimator", {{"K", 0}}}}, "."),
      doctest::Contains("estimator.K"), ConfigError);
  json doc{{"experiment", "qaoa"}, {"value_function", "accuracy_qsvm"}};
  CHECK_THROWS_AS(build_context(parse_experiment_config(doc, ".")), ConfigError);
}

TEST_CASE("plotdata emits per-player rows and filtered marginals") {
  json report{{"method", "exact"},
              {"players",
               {{{"player", 1},
                 {"gate_index", 2},
                 {"gate_name", "RY"},
                 {"phi", 0.5},
                 {"std_runs", 0.0},
                 {"std_dist", 0.1}}}}};
  std::stringstream out;
  write_plotdata(report, out);
  CHECK(out.str().find("player,gate_index,gate_name,phi,std_runs,std_dist") != std::string::npos);
  CHECK(out.str().find("1,2,RY,0.5,0,0.1") != std::string::npos);

  std::stringstream in("player,delta,weight\n1,0.5,0.25\n1,0.1,0.0001\n2,0.3,0.01\n");
  std::stringstream filtered;
  filter_marginals_csv(in, filtered);
  CHECK(filtered.str().find("0.0001") == std::string::npos);
  CHECK(filtered.str().find("0.25") != std::string::npos);
  CHECK(filtered.str().find("0.01") != std::string::npos);
}

TEST_CASE("qaoa experiment context exposes layer players and optimizer notes") {
  json doc{{"experiment", "qaoa"},
           {"qaoa_reps", 1},
           {"estimator", {{"alpha", 1.0}, {"K", 1}, {"runs", 1}, {"seed", 1}}},
           {"output_dir", "unused"}};
  ExperimentContext ctx = build_context(parse_experiment_config(doc, "."));
  CHECK(ctx.game.players() == 2);
  CHECK(ctx.game.gate_label(1) == "cost");
  CHECK(ctx.game.gate_label(2) == "mix");
  CHECK(!ctx.notes.empty());
  ValueFunction vf = ctx.make_vf(7, 0);
  CHECK(vf.deterministic);
  double empty = vf.eval(0, 0);
  CHECK(empty == doctest::Approx(-5.0).epsilon(1e-10));  // |+>^7 at the mean cut
}
