#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "subchan/allocators.hpp"
#include "subchan/channel.hpp"

namespace subchan {

enum class ScoreMode { kExact, kBoth };

struct SweepConfig {
  ChannelParams channel_params;          // power_budgets replaced per grid point
  std::vector<double> budget_grid;       // per-link budget, W, strictly increasing
  int trials = 1000;
  std::uint64_t seed = 1;
  std::vector<Strategy> strategies = {std::begin(kAllStrategies), std::end(kAllStrategies)};
  ScoreMode score_mode = ScoreMode::kExact;
  int threads = 1;
  // Sweeps must not abort on the rare fully-shadowed instance.
  AllocatorOptions allocator_options{ZeroGainPolicy::kFallback, MaxSelectPower::kWaterFill,
                                     kDefaultPartitionGuard};
  // When set, every trial uses these |h|^2 instead of sampling.
  std::optional<Matrix> fixed_squared_gains;

  void validate() const;
};

/// Per-trial exact (and surrogate) rates of every enabled strategy at one budget.
struct TrialRates {
  double budget = 0.0;
  std::vector<Strategy> strategies;           // enabled, canonical order
  std::vector<std::vector<double>> exact;     // [strategy][trial]
  std::vector<std::vector<double>> low_approx;
  std::vector<std::vector<double>> high_approx;

  [[nodiscard]] const std::vector<double>& exact_of(Strategy s) const;
};

struct SweepRow {
  double budget = 0.0;
  Strategy strategy = Strategy::kOptimal;
  int trials = 0;
  double mean_rate = 0.0;
  double std_rate = 0.0;  // sample standard deviation (0 for one trial)
  double median_rate = 0.0;
  std::optional<double> mean_gap_vs_optimal;
  std::optional<double> median_gap_vs_optimal;  // not part of the CSV schema
  std::optional<double> mean_low_snr_approx;
  std::optional<double> mean_high_snr_approx;
};

/// Realisation of trial `trial` under `config` (sub-stream (seed, trial)).
[[nodiscard]] ChannelRealization trial_realization(const SweepConfig& config, int trial);

/// Evaluates every enabled strategy on the same realisations at each grid budget.
[[nodiscard]] std::vector<TrialRates> run_trials(const SweepConfig& config);

/// Budget-major, strategy-minor rows aggregated from run_trials.
[[nodiscard]] std::vector<SweepRow> run_sweep(const SweepConfig& config);
[[nodiscard]] std::vector<SweepRow> summarize(const SweepConfig& config,
                                              const std::vector<TrialRates>& rates);

[[nodiscard]] std::string sweep_csv(const std::vector<SweepRow>& rows, ScoreMode mode);

/// "LO:HI:POINTS" with optional ":log" (default) or ":lin".
[[nodiscard]] std::vector<double> parse_budget_grid(std::string_view text);

/// Relative shortfall (opt - x) / opt, zero when opt is not positive.
[[nodiscard]] double relative_gap(double optimal, double other);

[[nodiscard]] double mean_of(const std::vector<double>& xs);
[[nodiscard]] double sample_std_of(const std::vector<double>& xs);
[[nodiscard]] double median_of(std::vector<double> xs);

struct InstanceReport {
  ChannelParams params;
  std::uint64_t seed = 0;
  ChannelRealization chan;
  Allocation alloc;
  RateReport rates;
};

/// Samples trial 0 of `seed` and runs one strategy on it.
[[nodiscard]] InstanceReport dump_instance(const ChannelParams& params, std::uint64_t seed,
                                           Strategy strategy,
                                           const AllocatorOptions& options = {});

/// Line-oriented text: one `key value...` record per line, floats at 17 digits.
[[nodiscard]] std::string format_instance_report(const InstanceReport& report);

struct BenchOptions {
  int repetitions = 20;
  std::uint64_t seed = 1;
  std::uint64_t partition_guard = kDefaultPartitionGuard;
  int max_hungarian_dim = 2048;
  std::vector<Strategy> strategies = {std::begin(kAllStrategies), std::end(kAllStrategies)};
};

struct BenchRow {
  Strategy strategy = Strategy::kOptimal;
  int num_links = 0;
  int num_subchannels = 0;
  double work = 0.0;  // Hungarian: padded dimension; max-select: K*N; optimal: partitions
  std::uint64_t partitions = 0;
  double median_seconds = 0.0;
  int repetitions = 0;
  bool skipped = false;
};

[[nodiscard]] std::vector<BenchRow> scaling_bench(const std::vector<std::pair<int, int>>& dims,
                                                  const BenchOptions& options = {});
[[nodiscard]] std::string bench_csv(const std::vector<BenchRow>& rows);

/// Least-squares slope of log(y) against log(x).
[[nodiscard]] double fit_loglog_slope(const std::vector<double>& xs,
                                      const std::vector<double>& ys);

/// Slope of median time vs work for one strategy's non-skipped rows.
[[nodiscard]] std::optional<double> bench_slope(const std::vector<BenchRow>& rows,
                                                Strategy strategy);

/// "2x8,2x16" -> {(2,8),(2,16)}.
[[nodiscard]] std::vector<std::pair<int, int>> parse_dims(std::string_view text);

}  // namespace subchan
