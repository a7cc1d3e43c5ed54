#include "subchan/allocators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <utility>

#include "subchan/errors.hpp"
#include "subchan/power.hpp"

namespace subchan {

namespace {

void require_shape(const ChannelParams& params, const ChannelRealization& chan) {
  params.validate();
  if (chan.num_links() != params.num_links ||
      chan.num_subchannels() != params.num_subchannels ||
      chan.normalized_gains.rows() != params.num_links ||
      chan.normalized_gains.cols() != params.num_subchannels) {
    throw ValidationError("channel realization does not match num_links x num_subchannels");
  }
}

Allocation empty_allocation(const ChannelParams& params, Strategy strategy) {
  Allocation alloc;
  alloc.subchannels_of_link.resize(static_cast<std::size_t>(params.num_links));
  alloc.powers = Matrix::Zero(params.num_links, params.num_subchannels);
  alloc.strategy = strategy;
  return alloc;
}

std::vector<double> gains_on(const ChannelRealization& chan, int link,
                             const std::vector<int>& set) {
  std::vector<double> gains;
  gains.reserve(set.size());
  for (int n : set) gains.push_back(chan.normalized_gains(link, n));
  return gains;
}

// Water-filled powers over `set`; a set with no usable channel stays dark.
std::vector<double> water_fill_set(const ChannelRealization& chan, int link,
                                   const std::vector<int>& set, double budget) {
  const auto gains = gains_on(chan, link, set);
  if (std::none_of(gains.begin(), gains.end(), [](double g) { return g > 0.0; })) {
    return std::vector<double>(set.size(), 0.0);
  }
  return water_fill(gains, budget).powers;
}

// Shared by exact_sum_rate and optimal_allocate so both produce bit-identical rates.
double link_rate(double subchannel_bw, std::span<const double> gains,
                 std::span<const double> powers) {
  return subchannel_bw * log2_capacity(gains, powers);
}

void apply_powers(Allocation& alloc, int link, const std::vector<double>& powers) {
  const auto& set = alloc.subchannels_of_link[static_cast<std::size_t>(link)];
  for (std::size_t i = 0; i < set.size(); ++i) alloc.powers(link, set[i]) = powers[i];
}

}  // namespace

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kLowSnr: return "low";
    case Strategy::kHighSnr: return "high";
    case Strategy::kOptimal: return "opt";
    case Strategy::kMaxSelect: return "maxsel";
  }
  return "unknown";
}

Strategy parse_strategy(std::string_view name) {
  if (name == "low" || name == "low_snr") return Strategy::kLowSnr;
  if (name == "high" || name == "high_snr") return Strategy::kHighSnr;
  if (name == "opt" || name == "optimal") return Strategy::kOptimal;
  if (name == "maxsel" || name == "max_select") return Strategy::kMaxSelect;
  throw ValidationError("unknown strategy '" + std::string(name) + "'");
}

void validate_allocation(const ChannelParams& params, const ChannelRealization& chan,
                         const Allocation& alloc) {
  require_shape(params, chan);
  const int links = params.num_links;
  const int cols = params.num_subchannels;
  const auto quota = static_cast<std::size_t>(params.quota());
  if (static_cast<int>(alloc.subchannels_of_link.size()) != links) {
    throw ValidationError("allocation: expected one sub-channel set per link");
  }
  if (alloc.powers.rows() != links || alloc.powers.cols() != cols) {
    throw ValidationError("allocation: power matrix must be num_links x num_subchannels");
  }
  std::vector<int> owner(static_cast<std::size_t>(cols), -1);
  for (int k = 0; k < links; ++k) {
    const auto& set = alloc.subchannels_of_link[static_cast<std::size_t>(k)];
    if (set.size() != quota) {
      throw ValidationError("allocation: link " + std::to_string(k) + " holds " +
                            std::to_string(set.size()) + " sub-channels, quota is " +
                            std::to_string(quota));
    }
    for (int n : set) {
      if (n < 0 || n >= cols) {
        throw ValidationError("allocation: link " + std::to_string(k) +
                              " references sub-channel " + std::to_string(n) + " out of range");
      }
      if (owner[static_cast<std::size_t>(n)] != -1) {
        throw ValidationError("allocation: sub-channel " + std::to_string(n) +
                              " assigned to links " +
                              std::to_string(owner[static_cast<std::size_t>(n)]) + " and " +
                              std::to_string(k) + " (sets not disjoint)");
      }
      owner[static_cast<std::size_t>(n)] = k;
    }
  }
  for (int k = 0; k < links; ++k) {
    double used = 0.0;
    for (int n = 0; n < cols; ++n) {
      const double p = alloc.powers(k, n);
      if (!std::isfinite(p) || p < 0.0) {
        throw ValidationError("allocation: power (" + std::to_string(k) + ", " +
                              std::to_string(n) + ") is negative or non-finite");
      }
      if (p != 0.0 && owner[static_cast<std::size_t>(n)] != k) {
        throw ValidationError("allocation: link " + std::to_string(k) +
                              " has power on sub-channel " + std::to_string(n) +
                              " outside its set");
      }
      used += p;
    }
    if (used > params.power_budgets[static_cast<std::size_t>(k)] + 1e-9) {
      throw ValidationError("allocation: link " + std::to_string(k) + " uses " +
                            std::to_string(used) + " W, budget " +
                            std::to_string(params.power_budgets[static_cast<std::size_t>(k)]));
    }
  }
}

RateReport exact_sum_rate(const ChannelParams& params, const ChannelRealization& chan,
                          const Allocation& alloc) {
  validate_allocation(params, chan, alloc);
  const double bw = params.subchannel_bandwidth();
  RateReport report;
  for (int k = 0; k < params.num_links; ++k) {
    const auto& set = alloc.subchannels_of_link[static_cast<std::size_t>(k)];
    std::vector<double> powers;
    powers.reserve(set.size());
    for (int n : set) powers.push_back(alloc.powers(k, n));
    const double rate = link_rate(bw, gains_on(chan, k, set), powers);
    report.per_link_rate.push_back(rate);
    report.total_rate += rate;
  }
  return report;
}

double low_snr_approx_rate(const ChannelParams& params, const ChannelRealization& chan,
                           const Allocation& alloc) {
  validate_allocation(params, chan, alloc);
  double total = 0.0;
  for (int k = 0; k < params.num_links; ++k) {
    for (int n : alloc.subchannels_of_link[static_cast<std::size_t>(k)]) {
      total += alloc.powers(k, n) * chan.normalized_gains(k, n);
    }
  }
  return params.subchannel_bandwidth() / std::numbers::ln2 * total;
}

double high_snr_approx_rate(const ChannelParams& params, const ChannelRealization& chan,
                            const Allocation& alloc) {
  validate_allocation(params, chan, alloc);
  double total = 0.0;
  for (int k = 0; k < params.num_links; ++k) {
    for (int n : alloc.subchannels_of_link[static_cast<std::size_t>(k)]) {
      const double snr = alloc.powers(k, n) * chan.normalized_gains(k, n);
      if (snr > 0.0) total += std::log2(snr);
    }
  }
  return params.subchannel_bandwidth() * total;
}

CostMatrix low_snr_cost(const ChannelParams& params, const ChannelRealization& chan) {
  require_shape(params, chan);
  Matrix values(params.num_links, params.num_subchannels);
  for (int k = 0; k < params.num_links; ++k) {
    values.row(k) = params.power_budgets[static_cast<std::size_t>(k)] *
                    chan.normalized_gains.row(k);
  }
  return CostMatrix(std::move(values), Orientation::kMaximize);
}

CostMatrix high_snr_cost(const ChannelParams& params, const ChannelRealization& chan,
                         ZeroGainPolicy policy) {
  require_shape(params, chan);
  const int links = params.num_links;
  const int cols = params.num_subchannels;
  Matrix values = Matrix::Zero(links, cols);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int k = 0; k < links; ++k) {
    for (int n = 0; n < cols; ++n) {
      const double h = chan.normalized_gains(k, n);
      if (h > 0.0) {
        values(k, n) = std::log(h);
        lo = std::min(lo, values(k, n));
        hi = std::max(hi, values(k, n));
      }
    }
  }
  if (policy == ZeroGainPolicy::kFallback) {
    // Finite penalty below any all-usable completion; with no usable cell at all
    // every assignment is equivalent and the zeros stay.
    if (std::isfinite(lo)) {
      const double penalty = lo - (hi - lo + 1.0) * static_cast<double>(cols);
      for (int k = 0; k < links; ++k) {
        for (int n = 0; n < cols; ++n) {
          if (!(chan.normalized_gains(k, n) > 0.0)) values(k, n) = penalty;
        }
      }
    }
    return CostMatrix(std::move(values), Orientation::kMaximize);
  }
  CostMatrix cost(std::move(values), Orientation::kMaximize);
  for (int k = 0; k < links; ++k) {
    for (int n = 0; n < cols; ++n) {
      if (!(chan.normalized_gains(k, n) > 0.0)) cost.forbid(k, n);
    }
  }
  return cost;
}

Allocation low_snr_allocate(const ChannelParams& params, const ChannelRealization& chan) {
  CostMatrix cost = low_snr_cost(params, chan);
  AssignmentResult result = solve_assignment(cost);

  Allocation alloc = empty_allocation(params, Strategy::kLowSnr);
  std::vector<char> taken(static_cast<std::size_t>(params.num_subchannels), 0);
  for (int k = 0; k < params.num_links; ++k) {
    const int n = result.column_of_row[static_cast<std::size_t>(k)];
    alloc.subchannels_of_link[static_cast<std::size_t>(k)].push_back(n);
    taken[static_cast<std::size_t>(n)] = 1;
    const double gain = chan.normalized_gains(k, n);
    alloc.powers(k, n) = concentrate_on_best(std::span(&gain, 1),
                                             params.power_budgets[static_cast<std::size_t>(k)])[0];
  }

  // Remaining quota: round-robin over links, each taking its best free sub-channel unpowered.
  for (int round = 1; round < params.quota(); ++round) {
    for (int k = 0; k < params.num_links; ++k) {
      int best = -1;
      for (int n = 0; n < params.num_subchannels; ++n) {
        if (taken[static_cast<std::size_t>(n)]) continue;
        if (best < 0 || chan.normalized_gains(k, n) > chan.normalized_gains(k, best)) best = n;
      }
      taken[static_cast<std::size_t>(best)] = 1;
      alloc.subchannels_of_link[static_cast<std::size_t>(k)].push_back(best);
    }
  }
  for (auto& set : alloc.subchannels_of_link) std::sort(set.begin(), set.end());
  alloc.trace = AssignmentTrace{std::move(cost), 1, std::move(result)};
  return alloc;
}

Allocation high_snr_allocate(const ChannelParams& params, const ChannelRealization& chan,
                             ZeroGainPolicy policy) {
  CostMatrix cost = high_snr_cost(params, chan, policy);
  const int quota = params.quota();
  if (policy == ZeroGainPolicy::kStrict) {
    for (int k = 0; k < params.num_links; ++k) {
      const auto usable = (chan.normalized_gains.row(k).array() > 0.0).count();
      if (usable < quota) {
        throw InfeasibleError("high_snr_allocate: link " + std::to_string(k) + " has " +
                              std::to_string(usable) + " usable sub-channels, needs " +
                              std::to_string(quota));
      }
    }
  }
  AssignmentResult result = solve_assignment(replicate_rows(cost, quota));

  Allocation alloc = empty_allocation(params, Strategy::kHighSnr);
  alloc.subchannels_of_link = merge_replicas(result, quota);
  for (int k = 0; k < params.num_links; ++k) {
    apply_powers(alloc, k, equal_split(quota, params.power_budgets[static_cast<std::size_t>(k)]));
  }
  alloc.trace = AssignmentTrace{std::move(cost), quota, std::move(result)};
  return alloc;
}

std::uint64_t count_partitions(int num_links, int num_subchannels) {
  if (num_links < 1 || num_subchannels < num_links) {
    throw ValidationError("count_partitions: need 1 <= num_links <= num_subchannels");
  }
  constexpr std::uint64_t kMax = std::numeric_limits<std::uint64_t>::max();
  const int quota = num_subchannels / num_links;
  // Product of C(remaining, quota) over links; each binomial built exactly.
  unsigned __int128 total = 1;
  int remaining = num_subchannels;
  for (int k = 0; k < num_links; ++k) {
    unsigned __int128 binom = 1;
    for (int i = 1; i <= quota; ++i) {
      binom = binom * static_cast<unsigned>(remaining - quota + i) / static_cast<unsigned>(i);
      if (binom > kMax) return kMax;
    }
    total *= binom;
    if (total > kMax) return kMax;
    remaining -= quota;
  }
  return static_cast<std::uint64_t>(total);
}

std::uint64_t enumerate_partitions(int num_links, int num_subchannels,
                                   const std::function<void(const std::vector<int>&)>& visit) {
  if (num_links < 1 || num_subchannels < num_links) {
    throw ValidationError("enumerate_partitions: need 1 <= num_links <= num_subchannels");
  }
  const int quota = num_subchannels / num_links;
  std::vector<int> open(static_cast<std::size_t>(num_links), quota);
  int idle_open = num_subchannels - quota * num_links;
  std::vector<int> owner(static_cast<std::size_t>(num_subchannels), -1);
  std::uint64_t visited = 0;

  auto place = [&](auto&& self, int n) -> void {
    if (n == num_subchannels) {
      ++visited;
      visit(owner);
      return;
    }
    for (int k = 0; k < num_links; ++k) {
      if (open[static_cast<std::size_t>(k)] == 0) continue;
      --open[static_cast<std::size_t>(k)];
      owner[static_cast<std::size_t>(n)] = k;
      self(self, n + 1);
      ++open[static_cast<std::size_t>(k)];
    }
    if (idle_open > 0) {
      --idle_open;
      owner[static_cast<std::size_t>(n)] = -1;
      self(self, n + 1);
      ++idle_open;
    }
  };
  place(place, 0);
  return visited;
}

Allocation optimal_allocate(const ChannelParams& params, const ChannelRealization& chan,
                            std::uint64_t guard) {
  require_shape(params, chan);
  const std::uint64_t candidates = count_partitions(params.num_links, params.num_subchannels);
  if (candidates > guard) {
    throw GuardExceededError("optimal_allocate: K=" + std::to_string(params.num_links) +
                             ", N=" + std::to_string(params.num_subchannels) + " has " +
                             std::to_string(candidates) + " partitions, guard is " +
                             std::to_string(guard));
  }

  const int links = params.num_links;
  const double bw = params.subchannel_bandwidth();
  std::vector<std::vector<int>> sets(static_cast<std::size_t>(links));
  std::vector<std::vector<int>> best_sets;
  std::vector<std::vector<double>> best_powers;
  std::vector<std::vector<double>> powers(static_cast<std::size_t>(links));
  double best_rate = -1.0;

  enumerate_partitions(links, params.num_subchannels, [&](const std::vector<int>& owner) {
    for (auto& s : sets) s.clear();
    for (std::size_t n = 0; n < owner.size(); ++n) {
      if (owner[n] >= 0) sets[static_cast<std::size_t>(owner[n])].push_back(static_cast<int>(n));
    }
    double total = 0.0;
    for (int k = 0; k < links; ++k) {
      const auto& set = sets[static_cast<std::size_t>(k)];
      powers[static_cast<std::size_t>(k)] =
          water_fill_set(chan, k, set, params.power_budgets[static_cast<std::size_t>(k)]);
      total += link_rate(bw, gains_on(chan, k, set), powers[static_cast<std::size_t>(k)]);
    }
    if (total > best_rate) {
      best_rate = total;
      best_sets = sets;
      best_powers = powers;
    }
  });

  Allocation alloc = empty_allocation(params, Strategy::kOptimal);
  alloc.subchannels_of_link = std::move(best_sets);
  for (int k = 0; k < links; ++k) apply_powers(alloc, k, best_powers[static_cast<std::size_t>(k)]);
  return alloc;
}

Allocation max_select_allocate(const ChannelParams& params, const ChannelRealization& chan,
                               MaxSelectPower power) {
  require_shape(params, chan);
  const int links = params.num_links;
  const int cols = params.num_subchannels;
  const int quota = params.quota();

  // Cells in link-major order; stable sort on gain keeps (link, sub-channel) order on ties.
  std::vector<int> cells(static_cast<std::size_t>(links) * static_cast<std::size_t>(cols));
  for (std::size_t i = 0; i < cells.size(); ++i) cells[i] = static_cast<int>(i);
  const double* gains = chan.normalized_gains.data();
  std::stable_sort(cells.begin(), cells.end(),
                   [gains](int a, int b) { return gains[a] > gains[b]; });

  Allocation alloc = empty_allocation(params, Strategy::kMaxSelect);
  std::vector<char> taken(static_cast<std::size_t>(cols), 0);
  int remaining = quota * links;
  for (int cell : cells) {
    if (remaining == 0) break;
    const int k = cell / cols;
    const int n = cell % cols;
    auto& set = alloc.subchannels_of_link[static_cast<std::size_t>(k)];
    if (taken[static_cast<std::size_t>(n)] || static_cast<int>(set.size()) == quota) continue;
    taken[static_cast<std::size_t>(n)] = 1;
    set.push_back(n);
    --remaining;
  }

  for (int k = 0; k < links; ++k) {
    auto& set = alloc.subchannels_of_link[static_cast<std::size_t>(k)];
    std::sort(set.begin(), set.end());
    const double budget = params.power_budgets[static_cast<std::size_t>(k)];
    apply_powers(alloc, k,
                 power == MaxSelectPower::kWaterFill ? water_fill_set(chan, k, set, budget)
                                                     : equal_split(quota, budget));
  }
  return alloc;
}

Allocation allocate(Strategy strategy, const ChannelParams& params,
                    const ChannelRealization& chan, const AllocatorOptions& options) {
  switch (strategy) {
    case Strategy::kLowSnr: return low_snr_allocate(params, chan);
    case Strategy::kHighSnr: return high_snr_allocate(params, chan, options.zero_gain_policy);
    case Strategy::kOptimal: return optimal_allocate(params, chan, options.partition_guard);
    case Strategy::kMaxSelect: return max_select_allocate(params, chan, options.max_select_power);
  }
  throw ValidationError("unknown strategy");
}

}  // namespace subchan
