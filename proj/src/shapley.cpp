#include "qshap/shapley.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <unordered_map>

#include "qshap/errors.hpp"
#include "qshap/numeric.hpp"
#include "qshap/parallel.hpp"
#include "qshap/rng.hpp"

namespace qshap {

double shapley_weight(int subset_size, int players) {
  if (players < 1) throw ConfigError("shapley_weight: players must be >= 1");
  if (subset_size < 0 || subset_size > players - 1)
    throw ConfigError("shapley_weight: subset size " + std::to_string(subset_size) +
                      " outside [0, " + std::to_string(players - 1) + "]");
  return 1.0 / (static_cast<double>(players) * binomial(players - 1, subset_size));
}

std::uint64_t alpha_to_n(double alpha, int players) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw ConfigError("alpha must lie in (0, 1], got " + std::to_string(alpha));
  double scaled = alpha * std::ldexp(1.0, players - 1);
  return static_cast<std::uint64_t>(std::ceil(scaled));
}

namespace {

/// phi and the second moment of the marginal distribution for one value
/// slice, via pairwise-summed per-player buffers.
void reduce_slice(std::span<const double> values, int players, std::vector<double>& phi,
                  std::vector<double>& second_moment) {
  const std::uint64_t size = std::uint64_t{1} << players;
  std::vector<double> weights(players);
  for (int m = 0; m < players; ++m) weights[m] = shapley_weight(m, players);
  phi.assign(players, 0.0);
  second_moment.assign(players, 0.0);
  std::vector<double> wdelta(size / 2), wdelta2(size / 2);
  for (int i = 0; i < players; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    std::size_t slot = 0;
    for (std::uint64_t mask = 0; mask < size; ++mask) {
      if (mask & bit) continue;
      double delta = values[mask | bit] - values[mask];
      double w = weights[std::popcount(mask)];
      wdelta[slot] = w * delta;
      wdelta2[slot] = w * delta * delta;
      ++slot;
    }
    phi[i] = pairwise_sum(wdelta);
    second_moment[i] = pairwise_sum(wdelta2);
  }
}

}  // namespace

ShapleyEngine::ShapleyEngine(ValueFunction vf, int players, EngineOptions options)
    : vf_(std::move(vf)), players_(players), options_(options) {
  if (players_ < 1) throw ConfigError("shapley engine: at least one player required");
  if (players_ > 63) throw ConfigError("shapley engine: more than 63 players unsupported");
}

void ShapleyEngine::check_caps(std::uint64_t slots) const {
  if (players_ > options_.player_cap)
    throw ResourceCapError("shapley engine: " + std::to_string(players_) +
                           " players exceed the cap of " + std::to_string(options_.player_cap));
  std::uint64_t bytes = (slots + coalition_count() * 2) * sizeof(double);
  if (bytes > options_.max_bytes)
    throw ResourceCapError("shapley engine: evaluation table needs " + std::to_string(bytes) +
                           " bytes, cap is " + std::to_string(options_.max_bytes));
}

std::vector<double> ShapleyEngine::evaluate_all(int repetitions, std::uint64_t seed) {
  const std::uint64_t size = coalition_count();
  const std::uint64_t total = size * static_cast<std::uint64_t>(repetitions);
  check_caps(total);
  std::vector<double> values(total);
  std::vector<char> have(total, 0);
  if (cache_) {
    for (std::uint64_t rep = 0; rep < static_cast<std::uint64_t>(repetitions); ++rep)
      for (std::uint64_t mask = 0; mask < size; ++mask)
        if (auto hit = cache_->get(mask, rep)) {
          values[rep * size + mask] = *hit;
          have[rep * size + mask] = 1;
        }
  }
  std::vector<std::uint64_t> missing;
  for (std::uint64_t j = 0; j < total; ++j)
    if (!have[j]) missing.push_back(j);
  fresh_evaluations_ += missing.size();
  parallel_for(missing.size(), [&](std::size_t idx) {
    std::uint64_t j = missing[idx];
    std::uint64_t rep = j / size, mask = j % size;
    values[j] = vf_.eval(mask, derive_seed(seed, mask, rep));
  });
  if (cache_) {
    for (std::uint64_t j : missing) cache_->put(j % size, j / size, values[j]);
  }
  return values;
}

ShapleyReport ShapleyEngine::exact(std::uint64_t seed) {
  if (!vf_.deterministic)
    throw ConfigError("exact Shapley values require a deterministic value function");
  std::vector<double> values = evaluate_all(1, seed);
  std::vector<double> phi, m2;
  reduce_slice(values, players_, phi, m2);
  ShapleyReport report;
  report.method = "exact";
  report.K = 1;
  report.alpha = 1.0;
  report.seeds = {seed};
  report.evaluations = coalition_count();
  for (int i = 0; i < players_; ++i) {
    PlayerResult r;
    r.player = i + 1;
    r.phi = phi[i];
    r.std_dist = std::sqrt(std::max(0.0, m2[i] - phi[i] * phi[i]));
    report.players.push_back(r);
  }
  mean_values_ = std::move(values);
  pool_.clear();
  sampled_marginals_ = {};
  return report;
}

ShapleyReport ShapleyEngine::full(int repetitions, std::uint64_t seed) {
  if (repetitions < 1) throw ConfigError("full estimator: K must be >= 1");
  const std::uint64_t size = coalition_count();
  std::vector<double> values = evaluate_all(repetitions, seed);
  std::vector<std::vector<double>> phi_per_rep(repetitions);
  std::vector<double> m2;
  for (int k = 0; k < repetitions; ++k)
    reduce_slice(std::span<const double>(values).subspan(static_cast<std::size_t>(k) * size, size),
                 players_, phi_per_rep[k], m2);
  ShapleyReport report;
  report.method = "full-K";
  report.K = repetitions;
  report.alpha = 1.0;
  report.seeds = {seed};
  report.evaluations = size * static_cast<std::uint64_t>(repetitions);
  std::vector<double> buf(repetitions);
  for (int i = 0; i < players_; ++i) {
    for (int k = 0; k < repetitions; ++k) buf[k] = phi_per_rep[k][i];
    PlayerResult r;
    r.player = i + 1;
    r.phi = mean(buf);
    report.players.push_back(r);
  }
  // keep per-coalition replication means for value-multiset analyses
  mean_values_.assign(size, 0.0);
  std::vector<double> reps(repetitions);
  for (std::uint64_t mask = 0; mask < size; ++mask) {
    for (int k = 0; k < repetitions; ++k) reps[k] = values[static_cast<std::size_t>(k) * size + mask];
    mean_values_[mask] = mean(reps);
  }
  pool_.clear();
  sampled_marginals_ = {};
  return report;
}

ShapleyReport ShapleyEngine::sampled(std::uint64_t n, int repetitions, std::uint64_t seed) {
  if (n < 1) throw ConfigError("sampled estimator: n must be >= 1");
  if (repetitions < 1) throw ConfigError("sampled estimator: K must be >= 1");
  const int N = players_;
  const std::uint64_t per_player_jobs = 2 * n * static_cast<std::uint64_t>(repetitions);
  check_caps(per_player_jobs * N);

  // Draw phase: per player, n coalitions S ~ w over the other players.
  // Sizes are uniform on 0..N-1 because N * C(N-1, m) * w(m) = 1.
  std::vector<std::vector<std::uint64_t>> draws(N);
  for (int p = 0; p < N; ++p) {
    SplitMix64 rng(derive_seed(derive_seed(seed, "draws"), static_cast<std::uint64_t>(p)));
    std::vector<int> others;
    for (int q = 0; q < N; ++q)
      if (q != p) others.push_back(q);
    draws[p].reserve(n);
    for (std::uint64_t d = 0; d < n; ++d) {
      int m = static_cast<int>(rng.below(N));
      std::vector<int> pick = others;
      std::uint64_t mask = 0;
      for (int i = 0; i < m; ++i) {
        std::size_t j = i + rng.below(pick.size() - i);
        std::swap(pick[i], pick[j]);
        mask |= std::uint64_t{1} << pick[i];
      }
      draws[p].push_back(mask);
    }
  }

  // Job list in a fixed order; the occurrence counter gives every
  // realization of a coalition its own replication index.
  struct Job {
    std::uint64_t mask;
    std::uint64_t occurrence;
  };
  std::vector<Job> jobs;
  jobs.reserve(per_player_jobs * N);
  std::unordered_map<std::uint64_t, std::uint64_t> occurrences;
  auto push_job = [&](std::uint64_t mask) {
    jobs.push_back({mask, occurrences[mask]++});
  };
  for (int p = 0; p < N; ++p) {
    const std::uint64_t bit = std::uint64_t{1} << p;
    for (std::uint64_t d = 0; d < n; ++d) {
      for (int k = 0; k < repetitions; ++k) push_job(draws[p][d]);
      for (int k = 0; k < repetitions; ++k) push_job(draws[p][d] | bit);
    }
  }

  std::vector<double> results(jobs.size());
  std::vector<char> have(jobs.size(), 0);
  if (cache_) {
    for (std::size_t j = 0; j < jobs.size(); ++j)
      if (auto hit = cache_->get(jobs[j].mask, jobs[j].occurrence)) {
        results[j] = *hit;
        have[j] = 1;
      }
  }
  std::vector<std::size_t> missing;
  for (std::size_t j = 0; j < jobs.size(); ++j)
    if (!have[j]) missing.push_back(j);
  fresh_evaluations_ += missing.size();
  parallel_for(missing.size(), [&](std::size_t idx) {
    const Job& job = jobs[missing[idx]];
    results[missing[idx]] = vf_.eval(job.mask, derive_seed(seed, job.mask, job.occurrence));
  });
  if (cache_)
    for (std::size_t j : missing) cache_->put(jobs[j].mask, jobs[j].occurrence, results[j]);

  // Pool all realizations per coalition, then take pooled-mean differences.
  pool_.clear();
  for (std::size_t j = 0; j < jobs.size(); ++j) pool_[jobs[j].mask].push_back(results[j]);
  std::unordered_map<std::uint64_t, double> pooled_mean;
  pooled_mean.reserve(pool_.size());
  for (const auto& [mask, realizations] : pool_) pooled_mean[mask] = mean(realizations);

  ShapleyReport report;
  report.method = "sampled-nK";
  report.K = repetitions;
  report.n = n;
  report.seeds = {seed};
  report.evaluations = jobs.size();
  sampled_marginals_.per_player.assign(N, {});
  std::vector<double> terms(n);
  for (int p = 0; p < N; ++p) {
    const std::uint64_t bit = std::uint64_t{1} << p;
    for (std::uint64_t d = 0; d < n; ++d) {
      double delta = pooled_mean[draws[p][d] | bit] - pooled_mean[draws[p][d]];
      terms[d] = delta;
      sampled_marginals_.per_player[p].push_back({delta, 1.0 / static_cast<double>(n)});
    }
    PlayerResult r;
    r.player = p + 1;
    r.phi = pairwise_sum(terms) / static_cast<double>(n);
    report.players.push_back(r);
  }
  mean_values_.clear();
  return report;
}

ShapleyReport ShapleyEngine::run(double alpha, int repetitions, std::uint64_t seed) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw ConfigError("alpha must lie in (0, 1], got " + std::to_string(alpha));
  if (alpha == 1.0) {
    if (vf_.deterministic && repetitions == 1) return exact(seed);
    ShapleyReport report = full(repetitions, seed);
    return report;
  }
  ShapleyReport report = sampled(alpha_to_n(alpha, players_), repetitions, seed);
  report.alpha = alpha;
  return report;
}

MarginalDistribution exact_marginals(std::span<const double> values, int players) {
  const std::uint64_t size = std::uint64_t{1} << players;
  if (values.size() != size) throw ConfigError("exact_marginals: value table size mismatch");
  MarginalDistribution dist;
  dist.per_player.assign(players, {});
  for (int i = 0; i < players; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    dist.per_player[i].reserve(size / 2);
    for (std::uint64_t mask = 0; mask < size; ++mask) {
      if (mask & bit) continue;
      dist.per_player[i].push_back(
          {values[mask | bit] - values[mask], shapley_weight(std::popcount(mask), players)});
    }
  }
  return dist;
}

namespace {
void csv_row(std::ostream& out, int player, double delta, double weight) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g\n", player, delta, weight);
  out << buf;
}
}  // namespace

void write_marginals_csv(std::ostream& out, const MarginalDistribution& marginals) {
  out << "player,delta,weight\n";
  for (std::size_t p = 0; p < marginals.per_player.size(); ++p)
    for (const MarginalSample& s : marginals.per_player[p])
      csv_row(out, static_cast<int>(p + 1), s.delta, s.weight);
}

void write_exact_marginals_csv(std::ostream& out, std::span<const double> values, int players) {
  const std::uint64_t size = std::uint64_t{1} << players;
  if (values.size() != size) throw ConfigError("marginals csv: value table size mismatch");
  out << "player,delta,weight\n";
  for (int i = 0; i < players; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    for (std::uint64_t mask = 0; mask < size; ++mask) {
      if (mask & bit) continue;
      csv_row(out, i + 1, values[mask | bit] - values[mask],
              shapley_weight(std::popcount(mask), players));
    }
  }
}

std::vector<ValueMultiset> value_multisets(std::span<const double> values, int players) {
  const std::uint64_t size = std::uint64_t{1} << players;
  if (values.size() != size) throw ConfigError("value_multisets: value table size mismatch");
  std::vector<ValueMultiset> sets(players + 1);
  for (int k = 0; k <= players; ++k) sets[k].k = k;
  for (std::uint64_t mask = 0; mask < size; ++mask)
    sets[std::popcount(mask)].values.push_back(values[mask]);
  for (auto& s : sets) std::sort(s.values.begin(), s.values.end());
  return sets;
}

std::vector<ValueMultiset> value_multisets(
    const std::map<std::uint64_t, std::vector<double>>& pool, int players) {
  std::vector<ValueMultiset> sets(players + 1);
  for (int k = 0; k <= players; ++k) sets[k].k = k;
  for (const auto& [mask, realizations] : pool)
    sets[std::popcount(mask)].values.push_back(mean(realizations));
  for (auto& s : sets) std::sort(s.values.begin(), s.values.end());
  return sets;
}

std::vector<ParetoPoint> pareto_frontier(const std::vector<ValueMultiset>& multisets) {
  std::vector<ParetoPoint> frontier;
  double best_so_far = -std::numeric_limits<double>::infinity();
  for (const ValueMultiset& s : multisets) {
    if (s.values.empty()) continue;
    ParetoPoint p;
    p.k = s.k;
    p.best = s.values.back();
    best_so_far = std::max(best_so_far, p.best);
    p.frontier = best_so_far;
    p.on_frontier = p.best == best_so_far;
    frontier.push_back(p);
  }
  return frontier;
}

}  // namespace qshap
