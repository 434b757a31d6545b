#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qshap {

/// A named, seedable coalition evaluator. `eval(mask, seed)` returns one
/// realization of the (possibly uncertain) value function; deterministic
/// evaluators ignore the seed and return identical values for every draw.
struct ValueFunction {
  std::string name;
  bool deterministic = false;
  std::function<double(std::uint64_t mask, std::uint64_t seed)> eval;
};

/// Shapley weight w(S) = |S|! (N - |S| - 1)! / N! as a function of the
/// subset size. Exact in double precision for the supported player counts.
double shapley_weight(int subset_size, int players);

/// ceil(alpha * 2^(N-1)); alpha = 1 selects full enumeration instead of
/// coalition sampling.
std::uint64_t alpha_to_n(double alpha, int players);

struct PlayerResult {
  int player = 0;  // 1-based
  double phi = 0.0;
  double std_runs = 0.0;             // empirical std over independent runs
  std::optional<double> std_dist;    // distribution std, exact mode only
};

struct MarginalSample {
  double delta = 0.0;
  double weight = 0.0;
};

/// Per-player distribution of marginal contributions. Exact mode: one entry
/// per coalition with its Shapley weight (weights sum to one). Sampled mode:
/// the estimator's draw terms with weight 1/n.
struct MarginalDistribution {
  std::vector<std::vector<MarginalSample>> per_player;
};

struct ShapleyReport {
  std::string method;  // "exact" | "full-K" | "sampled-nK"
  int K = 1;
  std::uint64_t n = 0;
  double alpha = 1.0;
  std::vector<std::uint64_t> seeds;
  std::uint64_t evaluations = 0;  // value-function calls the estimator charges
  std::vector<PlayerResult> players;
};

/// Lookup/store hook for resumable evaluation logs. Keys are the coalition
/// bitmask plus a replication index; both estimators request replications in
/// a deterministic order, so warm reruns replay without re-evaluating.
class ValueCache {
 public:
  virtual ~ValueCache() = default;
  virtual std::optional<double> get(std::uint64_t mask, std::uint64_t rep) = 0;
  virtual void put(std::uint64_t mask, std::uint64_t rep, double value) = 0;
};

struct EngineOptions {
  int player_cap = 24;
  std::uint64_t max_bytes = std::uint64_t{2} << 30;
};

/// Exact Shapley values and the two unbiased estimators for uncertain value
/// functions. Coalition evaluations run in parallel with per-job seeds
/// derived from (master seed, bitmask, replication); reductions use pairwise
/// summation in a fixed order, so results do not depend on the thread count.
class ShapleyEngine {
 public:
  ShapleyEngine(ValueFunction vf, int players, EngineOptions options = {});

  void set_cache(ValueCache* cache) { cache_ = cache; }

  /// Every coalition evaluated exactly once; requires a deterministic value
  /// function. phi_i = sum_S w(S) [v(S u {i}) - v(S)].
  ShapleyReport exact(std::uint64_t seed);

  /// Full-enumeration estimator: every coalition sampled K times (2^N K
  /// calls). Reduces to exact() for deterministic inputs with K = 1.
  ShapleyReport full(int repetitions, std::uint64_t seed);

  /// Coalition-sampling estimator: per player, n coalitions S ~ w (sizes
  /// uniform, then a uniform subset of that size), each endpoint sampled K
  /// times; all realizations pooled per coalition before the mean
  /// differences are taken. Up to 2nNK calls.
  ShapleyReport sampled(std::uint64_t n, int repetitions, std::uint64_t seed);

  /// Dispatch on the sampling fraction: alpha = 1 runs exact (deterministic,
  /// K = 1) or full(K); alpha < 1 runs sampled(alpha_to_n(alpha), K).
  ShapleyReport run(double alpha, int repetitions, std::uint64_t seed);

  int players() const { return players_; }
  std::uint64_t coalition_count() const { return std::uint64_t{1} << players_; }

  /// Per-coalition values (mean over replications) after exact()/full().
  const std::vector<double>& values() const { return mean_values_; }

  /// Realization pool keyed by coalition after sampled().
  const std::map<std::uint64_t, std::vector<double>>& pool() const { return pool_; }

  /// Draw-term marginals after sampled().
  const MarginalDistribution& sampled_marginals() const { return sampled_marginals_; }

  std::uint64_t fresh_evaluations() const { return fresh_evaluations_; }

 private:
  std::vector<double> evaluate_all(int repetitions, std::uint64_t seed);
  void check_caps(std::uint64_t slots) const;

  ValueFunction vf_;
  int players_;
  EngineOptions options_;
  ValueCache* cache_ = nullptr;
  std::vector<double> mean_values_;
  std::map<std::uint64_t, std::vector<double>> pool_;
  MarginalDistribution sampled_marginals_;
  std::uint64_t fresh_evaluations_ = 0;
};

/// Full per-player marginal distribution from an exact value table.
MarginalDistribution exact_marginals(std::span<const double> values, int players);

/// Streams `player,delta,weight` rows without materializing the distribution.
void write_marginals_csv(std::ostream& out, const MarginalDistribution& marginals);
void write_exact_marginals_csv(std::ostream& out, std::span<const double> values, int players);

/// Multiset of coalition values at a fixed coalition size k.
struct ValueMultiset {
  int k = 0;
  std::vector<double> values;  // sorted ascending
};

std::vector<ValueMultiset> value_multisets(std::span<const double> values, int players);
std::vector<ValueMultiset> value_multisets(const std::map<std::uint64_t, std::vector<double>>& pool,
                                           int players);

/// Best value per size plus the running best over k' <= k (maximize value,
/// minimize size). Every k whose best attains the frontier is flagged.
struct ParetoPoint {
  int k = 0;
  double best = 0.0;
  double frontier = 0.0;
  bool on_frontier = false;
};

std::vector<ParetoPoint> pareto_frontier(const std::vector<ValueMultiset>& multisets);

}  // namespace qshap
