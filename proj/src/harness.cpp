#include "subchan/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <thread>

#include "subchan/errors.hpp"

namespace subchan {

namespace {

std::string format_g(double value, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, value);
  return buf;
}

std::vector<Strategy> canonical_order(const std::vector<Strategy>& enabled) {
  std::vector<Strategy> out;
  for (Strategy s : kAllStrategies) {
    if (std::find(enabled.begin(), enabled.end(), s) != enabled.end()) out.push_back(s);
  }
  return out;
}

double parse_double(std::string_view text, std::string_view what) {
  const std::string s(text);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw ValidationError("cannot parse " + std::string(what) + " '" + s + "'");
  }
  return value;
}

int parse_int(std::string_view text, std::string_view what) {
  const double v = parse_double(text, what);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw ValidationError(std::string(what) + " must be an integer");
  }
  return static_cast<int>(v);
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace

void SweepConfig::validate() const {
  channel_params.validate();
  if (budget_grid.empty()) throw ValidationError("budget grid is empty");
  for (std::size_t i = 0; i < budget_grid.size(); ++i) {
    if (!(budget_grid[i] >= 0.0) || !std::isfinite(budget_grid[i])) {
      throw ValidationError("budgets must be non-negative and finite");
    }
    if (i > 0 && !(budget_grid[i] > budget_grid[i - 1])) {
      throw ValidationError("budget grid must be strictly increasing");
    }
  }
  if (trials < 1) throw ValidationError("trials must be >= 1");
  if (threads < 1) throw ValidationError("threads must be >= 1");
  if (strategies.empty()) throw ValidationError("no strategy enabled");
  if (fixed_squared_gains &&
      (fixed_squared_gains->rows() != channel_params.num_links ||
       fixed_squared_gains->cols() != channel_params.num_subchannels)) {
    throw ValidationError("fixed gains must be num_links x num_subchannels");
  }
  if (std::find(strategies.begin(), strategies.end(), Strategy::kOptimal) != strategies.end()) {
    const auto count =
        count_partitions(channel_params.num_links, channel_params.num_subchannels);
    if (count > allocator_options.partition_guard) {
      throw GuardExceededError("strategy opt: K=" + std::to_string(channel_params.num_links) +
                               ", N=" + std::to_string(channel_params.num_subchannels) +
                               " needs " + std::to_string(count) +
                               " partitions, guard is " +
                               std::to_string(allocator_options.partition_guard));
    }
  }
}

const std::vector<double>& TrialRates::exact_of(Strategy s) const {
  const auto it = std::find(strategies.begin(), strategies.end(), s);
  if (it == strategies.end()) {
    throw ValidationError("strategy " + std::string(strategy_name(s)) + " not in sweep");
  }
  return exact[static_cast<std::size_t>(it - strategies.begin())];
}

ChannelRealization trial_realization(const SweepConfig& config, int trial) {
  if (config.fixed_squared_gains) {
    return realization_from_squared_gains(config.channel_params, *config.fixed_squared_gains);
  }
  RngStream rng = RngStream::substream(config.seed, static_cast<std::uint64_t>(trial));
  return sample_realization(config.channel_params, rng);
}

std::vector<TrialRates> run_trials(const SweepConfig& config) {
  config.validate();
  const auto strategies = canonical_order(config.strategies);
  const auto num_budgets = config.budget_grid.size();
  const auto num_strategies = strategies.size();
  const auto trials = static_cast<std::size_t>(config.trials);
  const bool with_approx = config.score_mode == ScoreMode::kBoth;

  std::vector<TrialRates> out(num_budgets);
  for (std::size_t b = 0; b < num_budgets; ++b) {
    out[b].budget = config.budget_grid[b];
    out[b].strategies = strategies;
    out[b].exact.assign(num_strategies, std::vector<double>(trials, 0.0));
    if (with_approx) {
      out[b].low_approx.assign(num_strategies, std::vector<double>(trials, 0.0));
      out[b].high_approx.assign(num_strategies, std::vector<double>(trials, 0.0));
    }
  }
  std::vector<ChannelParams> budget_params;
  for (double budget : config.budget_grid) {
    budget_params.push_back(config.channel_params.with_uniform_budget(budget));
  }

  // Every slot is written by exactly one trial, so workers never share output cells.
  auto run_one = [&](std::size_t t) {
    const ChannelRealization chan = trial_realization(config, static_cast<int>(t));
    for (std::size_t b = 0; b < num_budgets; ++b) {
      const ChannelParams& params = budget_params[b];
      for (std::size_t s = 0; s < num_strategies; ++s) {
        const Allocation alloc = allocate(strategies[s], params, chan, config.allocator_options);
        out[b].exact[s][t] = exact_sum_rate(params, chan, alloc).total_rate;
        if (with_approx) {
          out[b].low_approx[s][t] = low_snr_approx_rate(params, chan, alloc);
          out[b].high_approx[s][t] = high_snr_approx_rate(params, chan, alloc);
        }
      }
    }
  };

  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.threads), trials);
  if (workers <= 1) {
    for (std::size_t t = 0; t < trials; ++t) run_one(t);
    return out;
  }
  std::vector<std::exception_ptr> errors(trials);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t t = w; t < trials; t += workers) {
        try {
          run_one(t);
        } catch (...) {
          errors[t] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  // Report the failure of the lowest trial index, as a serial run would.
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }
  return out;
}

double relative_gap(double optimal, double other) {
  return optimal > 0.0 ? (optimal - other) / optimal : 0.0;
}

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_std_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = mean_of(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double median_of(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  const std::size_t mid = xs.size() / 2;
  return xs.size() % 2 == 1 ? xs[mid] : 0.5 * (xs[mid - 1] + xs[mid]);
}

std::vector<SweepRow> summarize(const SweepConfig& config, const std::vector<TrialRates>& rates) {
  std::vector<SweepRow> rows;
  for (const TrialRates& point : rates) {
    const auto opt_it =
        std::find(point.strategies.begin(), point.strategies.end(), Strategy::kOptimal);
    const std::vector<double>* opt =
        opt_it == point.strategies.end()
            ? nullptr
            : &point.exact[static_cast<std::size_t>(opt_it - point.strategies.begin())];
    for (std::size_t s = 0; s < point.strategies.size(); ++s) {
      const auto& exact = point.exact[s];
      SweepRow row;
      row.budget = point.budget;
      row.strategy = point.strategies[s];
      row.trials = static_cast<int>(exact.size());
      row.mean_rate = mean_of(exact);
      row.std_rate = sample_std_of(exact);
      row.median_rate = median_of(exact);
      if (opt != nullptr) {
        std::vector<double> gaps(exact.size());
        for (std::size_t t = 0; t < exact.size(); ++t) gaps[t] = relative_gap((*opt)[t], exact[t]);
        row.mean_gap_vs_optimal = mean_of(gaps);
        row.median_gap_vs_optimal = median_of(std::move(gaps));
      }
      if (config.score_mode == ScoreMode::kBoth && !point.low_approx.empty()) {
        row.mean_low_snr_approx = mean_of(point.low_approx[s]);
        row.mean_high_snr_approx = mean_of(point.high_approx[s]);
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<SweepRow> run_sweep(const SweepConfig& config) {
  return summarize(config, run_trials(config));
}

std::string sweep_csv(const std::vector<SweepRow>& rows, ScoreMode mode) {
  std::string out = "budget,strategy,trials,mean_rate,std_rate,median_rate,mean_gap_vs_optimal";
  if (mode == ScoreMode::kBoth) out += ",mean_low_snr_approx,mean_high_snr_approx";
  out += '\n';
  for (const SweepRow& row : rows) {
    out += format_g(row.budget, 12);
    out += ',';
    out += strategy_name(row.strategy);
    out += ',' + std::to_string(row.trials);
    out += ',' + format_g(row.mean_rate, 12);
    out += ',' + format_g(row.std_rate, 12);
    out += ',' + format_g(row.median_rate, 12);
    out += ',';
    if (row.mean_gap_vs_optimal) out += format_g(*row.mean_gap_vs_optimal, 12);
    if (mode == ScoreMode::kBoth) {
      out += ',';
      if (row.mean_low_snr_approx) out += format_g(*row.mean_low_snr_approx, 12);
      out += ',';
      if (row.mean_high_snr_approx) out += format_g(*row.mean_high_snr_approx, 12);
    }
    out += '\n';
  }
  return out;
}

std::vector<double> parse_budget_grid(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() != 3 && parts.size() != 4) {
    throw ValidationError("budget grid must be LO:HI:POINTS[:log|lin], got '" +
                          std::string(text) + "'");
  }
  const double lo = parse_double(parts[0], "budget LO");
  const double hi = parse_double(parts[1], "budget HI");
  const int points = parse_int(parts[2], "budget POINTS");
  const std::string_view scale = parts.size() == 4 ? parts[3] : "log";
  if (points < 1) throw ValidationError("budget POINTS must be >= 1");
  if (points == 1) {
    if (lo != hi) throw ValidationError("a single budget point needs LO == HI");
  } else if (!(hi > lo)) {
    throw ValidationError("budget grid needs HI > LO");
  }
  std::vector<double> grid(static_cast<std::size_t>(points));
  if (scale == "log") {
    if (!(lo > 0.0)) throw ValidationError("log budget grid needs LO > 0");
    const double a = std::log10(lo);
    const double b = std::log10(hi);
    for (int i = 0; i < points; ++i) {
      grid[static_cast<std::size_t>(i)] =
          points == 1 ? lo : std::pow(10.0, a + (b - a) * i / (points - 1));
    }
  } else if (scale == "lin") {
    for (int i = 0; i < points; ++i) {
      grid[static_cast<std::size_t>(i)] =
          points == 1 ? lo : lo + (hi - lo) * i / (points - 1);
    }
  } else {
    throw ValidationError("budget grid scale must be log or lin, got '" + std::string(scale) + "'");
  }
  // Pin the end points so decade grids hit 1e-3 and 1e3 exactly.
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

InstanceReport dump_instance(const ChannelParams& params, std::uint64_t seed, Strategy strategy,
                             const AllocatorOptions& options) {
  InstanceReport report;
  report.params = params;
  report.seed = seed;
  RngStream rng = RngStream::substream(seed, 0);
  report.chan = sample_realization(params, rng);
  report.alloc = allocate(strategy, params, report.chan, options);
  report.rates = exact_sum_rate(params, report.chan, report.alloc);
  return report;
}

std::string format_instance_report(const InstanceReport& report) {
  const ChannelParams& p = report.params;
  std::ostringstream os;
  auto num = [](double v) { return format_g(v, 17); };
  os << "strategy " << strategy_name(report.alloc.strategy) << '\n';
  os << "seed " << report.seed << '\n';
  os << "num_links " << p.num_links << '\n';
  os << "num_subchannels " << p.num_subchannels << '\n';
  os << "bandwidth " << num(p.total_bandwidth) << '\n';
  os << "noise_psd " << num(p.noise_psd) << '\n';
  os << "shadow_prob " << num(p.shadow_prob) << '\n';
  os << "shadow_attenuation " << num(p.shadow_attenuation) << '\n';
  os << "quota " << p.quota() << '\n';
  for (int k = 0; k < p.num_links; ++k) {
    os << "budget " << k << ' ' << num(p.power_budgets[static_cast<std::size_t>(k)]) << '\n';
  }
  for (int k = 0; k < p.num_links; ++k) {
    os << "gain " << k;
    for (int n = 0; n < p.num_subchannels; ++n) os << ' ' << num(report.chan.normalized_gains(k, n));
    os << '\n';
  }
  for (int k = 0; k < p.num_links; ++k) {
    os << "shadowed " << k;
    for (int n = 0; n < p.num_subchannels; ++n) os << ' ' << (report.chan.shadow_mask(k, n) ? 1 : 0);
    os << '\n';
  }
  if (report.alloc.trace) {
    const AssignmentTrace& trace = *report.alloc.trace;
    os << "cost_orientation "
       << (trace.cost.orientation() == Orientation::kMaximize ? "maximize" : "minimize") << '\n';
    os << "cost_copies " << trace.copies << '\n';
    for (int r = 0; r < trace.cost.rows(); ++r) {
      os << "cost " << r;
      for (int c = 0; c < trace.cost.cols(); ++c) {
        os << ' ' << (trace.cost.is_forbidden(r, c) ? std::string("forbidden") : num(trace.cost(r, c)));
      }
      os << '\n';
    }
    const auto& cols = trace.result.column_of_row;
    for (std::size_t r = 0; r < cols.size(); ++r) {
      os << "assignment " << r << ' ' << r / static_cast<std::size_t>(trace.copies) << ' '
         << cols[r] << '\n';
    }
    os << "assignment_objective " << num(trace.result.objective_value) << '\n';
  }
  for (int k = 0; k < p.num_links; ++k) {
    os << "subchannels " << k;
    for (int n : report.alloc.subchannels_of_link[static_cast<std::size_t>(k)]) os << ' ' << n;
    os << '\n';
  }
  for (int k = 0; k < p.num_links; ++k) {
    os << "power " << k;
    for (int n = 0; n < p.num_subchannels; ++n) os << ' ' << num(report.alloc.powers(k, n));
    os << '\n';
  }
  for (int k = 0; k < p.num_links; ++k) {
    os << "rate " << k << ' ' << num(report.rates.per_link_rate[static_cast<std::size_t>(k)])
       << '\n';
  }
  os << "total_rate " << num(report.rates.total_rate) << '\n';
  return os.str();
}

std::vector<BenchRow> scaling_bench(const std::vector<std::pair<int, int>>& dims,
                                    const BenchOptions& options) {
  if (options.repetitions < 1) throw ValidationError("repetitions must be >= 1");
  using Clock = std::chrono::steady_clock;
  std::vector<BenchRow> rows;
  const auto strategies = canonical_order(options.strategies);
  for (const auto& [links, subchannels] : dims) {
    ChannelParams params;
    params.num_links = links;
    params.num_subchannels = subchannels;
    params.total_bandwidth = subchannels;
    params.shadow_prob = 0.0;
    params.power_budgets.assign(static_cast<std::size_t>(links), 1.0);
    params.validate();
    RngStream rng = RngStream::substream(options.seed, 0);
    const ChannelRealization chan = sample_realization(params, rng);
    const std::uint64_t partitions = count_partitions(links, subchannels);

    for (Strategy s : strategies) {
      BenchRow row;
      row.strategy = s;
      row.num_links = links;
      row.num_subchannels = subchannels;
      row.partitions = partitions;
      switch (s) {
        case Strategy::kLowSnr:
        case Strategy::kHighSnr:
          row.work = subchannels;  // rows <= cols, so the padded dimension is N
          row.skipped = subchannels > options.max_hungarian_dim;
          break;
        case Strategy::kOptimal:
          row.work = static_cast<double>(partitions);
          row.skipped = partitions > options.partition_guard;
          break;
        case Strategy::kMaxSelect:
          row.work = static_cast<double>(links) * subchannels;
          break;
      }
      if (!row.skipped) {
        AllocatorOptions alloc_options;
        alloc_options.partition_guard = options.partition_guard;
        std::vector<double> seconds;
        for (int r = 0; r < options.repetitions; ++r) {
          const auto start = Clock::now();
          const Allocation alloc = allocate(s, params, chan, alloc_options);
          const auto stop = Clock::now();
          if (alloc.subchannels_of_link.empty()) throw std::logic_error("empty allocation");
          seconds.push_back(std::chrono::duration<double>(stop - start).count());
        }
        row.median_seconds = median_of(std::move(seconds));
        row.repetitions = options.repetitions;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = "strategy,links,subchannels,work,partitions,median_seconds,repetitions,skipped\n";
  for (const BenchRow& row : rows) {
    out += std::string(strategy_name(row.strategy)) + ',' + std::to_string(row.num_links) + ',' +
           std::to_string(row.num_subchannels) + ',' + format_g(row.work, 12) + ',' +
           (row.partitions == std::numeric_limits<std::uint64_t>::max()
                ? std::string("overflow")
                : std::to_string(row.partitions)) +
           ',' +
           (row.skipped ? std::string() : format_g(row.median_seconds, 6)) + ',' +
           std::to_string(row.repetitions) + ',' + (row.skipped ? "1" : "0") + '\n';
  }
  return out;
}

double fit_loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw ValidationError("slope fit needs at least two (x, y) pairs");
  }
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) throw ValidationError("slope fit needs positive data");
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  const double mx = mean_of(lx);
  const double my = mean_of(ly);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx == 0.0) throw ValidationError("slope fit needs distinct x values");
  return sxy / sxx;
}

std::optional<double> bench_slope(const std::vector<BenchRow>& rows, Strategy strategy) {
  std::vector<double> xs, ys;
  for (const BenchRow& row : rows) {
    if (row.strategy != strategy || row.skipped) continue;
    xs.push_back(row.work);
    ys.push_back(row.median_seconds);
  }
  if (xs.size() < 2) return std::nullopt;
  return fit_loglog_slope(xs, ys);
}

std::vector<std::pair<int, int>> parse_dims(std::string_view text) {
  std::vector<std::pair<int, int>> dims;
  for (std::string_view item : split(text, ',')) {
    const auto kn = split(item, 'x');
    if (kn.size() != 2) throw ValidationError("dimension must be KxN, got '" + std::string(item) + "'");
    dims.emplace_back(parse_int(kn[0], "K"), parse_int(kn[1], "N"));
  }
  return dims;
}

}  // namespace subchan
