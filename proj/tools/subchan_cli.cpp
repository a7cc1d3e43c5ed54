// subchan: sum-rate sweeps, single-instance dumps and solver timing for the
// sub-channel allocation strategies.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "subchan/allocators.hpp"
#include "subchan/errors.hpp"
#include "subchan/harness.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitGuard = 4;

struct ChannelFlags {
  int links = 2;
  int subchannels = 4;
  double bandwidth = 0.0;  // 0: B = N, i.e. B/N = 1
  double noise_psd = 1.0;
  double shadow_prob = 0.02;
  double shadow_atten = 0.0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--links", links, "Number of links K");
    cmd->add_option("--subchannels", subchannels, "Number of sub-channels N");
    cmd->add_option("--bandwidth", bandwidth, "Total bandwidth B in Hz (default: N)");
    cmd->add_option("--noise-psd", noise_psd, "Noise power spectral density N0");
    cmd->add_option("--shadow-prob", shadow_prob, "Shadowing probability per entry");
    cmd->add_option("--shadow-atten", shadow_atten, "Multiplier on a shadowed |h|^2");
  }

  [[nodiscard]] subchan::ChannelParams params(double budget) const {
    subchan::ChannelParams p;
    p.num_links = links;
    p.num_subchannels = subchannels;
    p.total_bandwidth = bandwidth > 0.0 ? bandwidth : static_cast<double>(subchannels);
    p.noise_psd = noise_psd;
    p.shadow_prob = shadow_prob;
    p.shadow_attenuation = shadow_atten;
    p.power_budgets.assign(links > 0 ? static_cast<std::size_t>(links) : 0, budget);
    p.validate();
    return p;
  }
};

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

// Splices `key=value` lines of a --config file in front of the command-line
// flags; options keep their last value, so explicit flags win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty() || args.empty()) return args;
  std::ifstream in(path);
  if (!in) throw subchan::ValidationError("cannot open config file '" + path + "'");
  std::vector<std::string> injected;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw subchan::ValidationError("config line " + std::to_string(lineno) +
                                     ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key == "config") continue;
    injected.push_back("--" + key + "=" + trim(line.substr(eq + 1)));
  }
  // args[0] is the subcommand name.
  args.insert(args.begin() + 1, injected.begin(), injected.end());
  return args;
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw subchan::ValidationError("cannot open output file '" + path + "'");
  out << text;
}

std::vector<subchan::Strategy> parse_strategies(const std::string& csv) {
  std::vector<subchan::Strategy> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(subchan::parse_strategy(trim(item)));
  }
  return out;
}

subchan::ZeroGainPolicy parse_zero_gain(const std::string& s) {
  if (s == "fallback") return subchan::ZeroGainPolicy::kFallback;
  if (s == "strict") return subchan::ZeroGainPolicy::kStrict;
  throw subchan::ValidationError("--zero-gain must be fallback or strict");
}

subchan::MaxSelectPower parse_maxsel_power(const std::string& s) {
  if (s == "waterfill") return subchan::MaxSelectPower::kWaterFill;
  if (s == "equal") return subchan::MaxSelectPower::kEqualSplit;
  throw subchan::ValidationError("--maxsel-power must be waterfill or equal");
}

}  // namespace

int main(int argc, char** argv) {
  try {
    std::vector<std::string> args(argv + 1, argv + argc);
    args = expand_config(std::move(args));

    CLI::App app{"Sub-channel and power allocation benchmarks"};
    app.require_subcommand(1);
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    ChannelFlags chan_flags;
    std::string config_path;
    std::string out_path = "-";
    std::uint64_t seed = 1;
    std::string zero_gain = "fallback";
    std::string maxsel_power = "waterfill";
    std::uint64_t guard = subchan::kDefaultPartitionGuard;

    auto* sweep = app.add_subcommand("sweep", "Monte Carlo sum rate vs per-link budget (CSV)");
    chan_flags.add_to(sweep);
    std::string budgets = "1e-3:1e3:7:log";
    int trials = 2000;
    std::string strategies = "low,high,opt,maxsel";
    std::string score = "exact";
    int threads = 1;
    sweep->add_option("--budgets", budgets, "LO:HI:POINTS[:log|lin]");
    sweep->add_option("--trials", trials, "Realisations per budget point");
    sweep->add_option("--seed", seed, "Base seed");
    sweep->add_option("--strategies", strategies, "Subset of low,high,opt,maxsel");
    sweep->add_option("--out", out_path, "Output CSV path ('-' for stdout)");
    sweep->add_option("--score", score, "exact | both")->check(CLI::IsMember({"exact", "both"}));
    sweep->add_option("--threads", threads, "Worker threads over trials");
    sweep->add_option("--zero-gain", zero_gain, "High-SNR handling of H = 0: fallback | strict");
    sweep->add_option("--maxsel-power", maxsel_power, "Max-select power rule: waterfill | equal");
    sweep->add_option("--guard", guard, "Partition count guard for the optimal method");
    sweep->add_option("--config", config_path, "Flat key=value file mirroring the flags");

    auto* dump = app.add_subcommand("dump", "Allocate one sampled instance and print the details");
    chan_flags.add_to(dump);
    double budget = 1.0;
    std::string strategy = "high";
    dump->add_option("--budget", budget, "Per-link power budget");
    dump->add_option("--seed", seed, "Seed");
    dump->add_option("--strategy", strategy, "low | high | opt | maxsel");
    dump->add_option("--out", out_path, "Output path ('-' for stdout)");
    dump->add_option("--zero-gain", zero_gain, "High-SNR handling of H = 0: fallback | strict");
    dump->add_option("--maxsel-power", maxsel_power, "Max-select power rule: waterfill | equal");
    dump->add_option("--guard", guard, "Partition count guard for the optimal method");
    dump->add_option("--config", config_path, "Flat key=value file mirroring the flags");

    auto* bench = app.add_subcommand("bench", "Median wall time per strategy and dimension (CSV)");
    std::string dims = "2x8,2x16,32x64,64x128,128x256";
    int reps = 20;
    int max_hungarian_dim = 2048;
    std::string bench_strategies = "low,high,opt,maxsel";
    bench->add_option("--dims", dims, "Comma-separated KxN list");
    bench->add_option("--reps", reps, "Repetitions per cell (median reported)");
    bench->add_option("--seed", seed, "Seed");
    bench->add_option("--strategies", bench_strategies, "Subset of low,high,opt,maxsel");
    bench->add_option("--guard", guard, "Partition count guard for the optimal method");
    bench->add_option("--max-hungarian-dim", max_hungarian_dim, "Skip Hungarian cells above this N");
    bench->add_option("--out", out_path, "Output CSV path ('-' for stdout)");
    bench->add_option("--config", config_path, "Flat key=value file mirroring the flags");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
      app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
      return app.exit(e);
    } catch (const CLI::ParseError& e) {
      app.exit(e);
      return kExitValidation;
    }

    subchan::AllocatorOptions alloc_options;
    alloc_options.zero_gain_policy = parse_zero_gain(zero_gain);
    alloc_options.max_select_power = parse_maxsel_power(maxsel_power);
    alloc_options.partition_guard = guard;

    if (sweep->parsed()) {
      subchan::SweepConfig config;
      config.channel_params = chan_flags.params(1.0);
      config.budget_grid = subchan::parse_budget_grid(budgets);
      config.trials = trials;
      config.seed = seed;
      config.strategies = parse_strategies(strategies);
      config.score_mode = score == "both" ? subchan::ScoreMode::kBoth : subchan::ScoreMode::kExact;
      config.threads = threads;
      config.allocator_options = alloc_options;
      write_output(out_path, subchan::sweep_csv(subchan::run_sweep(config), config.score_mode));
    } else if (dump->parsed()) {
      const auto report = subchan::dump_instance(chan_flags.params(budget), seed,
                                                 subchan::parse_strategy(strategy), alloc_options);
      write_output(out_path, subchan::format_instance_report(report));
    } else if (bench->parsed()) {
      subchan::BenchOptions options;
      options.repetitions = reps;
      options.seed = seed;
      options.partition_guard = guard;
      options.max_hungarian_dim = max_hungarian_dim;
      options.strategies = parse_strategies(bench_strategies);
      const auto rows = subchan::scaling_bench(subchan::parse_dims(dims), options);
      write_output(out_path, subchan::bench_csv(rows));
      for (subchan::Strategy s : options.strategies) {
        if (const auto slope = subchan::bench_slope(rows, s)) {
          std::fprintf(stderr, "log-log slope %s: %.3f\n",
                       std::string(subchan::strategy_name(s)).c_str(), *slope);
        }
      }
    }
    return 0;
  } catch (const subchan::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const subchan::InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kExitInfeasible;
  } catch (const subchan::GuardExceededError& e) {
    std::cerr << "guard exceeded: " << e.what() << '\n';
    return kExitGuard;
  }
}
