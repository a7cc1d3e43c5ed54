#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subchan/assignment.hpp"
#include "subchan/channel.hpp"

namespace subchan {

enum class Strategy { kLowSnr, kHighSnr, kOptimal, kMaxSelect };

inline constexpr Strategy kAllStrategies[] = {Strategy::kLowSnr, Strategy::kHighSnr,
                                              Strategy::kOptimal, Strategy::kMaxSelect};

/// Short CLI/CSV name: low, high, opt, maxsel.
[[nodiscard]] std::string_view strategy_name(Strategy s);
/// Accepts the short names and the long forms low_snr, high_snr, optimal, max_select.
[[nodiscard]] Strategy parse_strategy(std::string_view name);

/// The assignment problem a Hungarian-based allocator solved, kept for reporting.
struct AssignmentTrace {
  CostMatrix cost;     // K x N, before replication
  int copies = 1;      // rows were replicated this many times
  AssignmentResult result;  // on the replicated matrix
};

struct Allocation {
  std::vector<std::vector<int>> subchannels_of_link;  // pi(k), ascending
  Matrix powers;                                      // K x N, zero outside pi(k)
  Strategy strategy = Strategy::kOptimal;
  std::optional<AssignmentTrace> trace;
};

struct RateReport {
  std::vector<double> per_link_rate;  // bit/s
  double total_rate = 0.0;
};

/// Throws ValidationError naming the first violated constraint: disjoint
/// sets of exactly floor(N/K), zero power outside the set, non-negative
/// powers, per-link budget (1e-9 slack).
void validate_allocation(const ChannelParams& params, const ChannelRealization& chan,
                         const Allocation& alloc);

/// R_k = (B/N) sum_{n in pi(k)} log2(1 + p_{k,n} H_{k,n}); every strategy is scored with this.
[[nodiscard]] RateReport exact_sum_rate(const ChannelParams& params,
                                        const ChannelRealization& chan,
                                        const Allocation& alloc);

/// Linearised rate (B/N)/ln2 * sum p H, the low-SNR surrogate.
[[nodiscard]] double low_snr_approx_rate(const ChannelParams& params,
                                         const ChannelRealization& chan,
                                         const Allocation& alloc);
/// (B/N) sum log2(p H) over entries with p H > 0, the high-SNR surrogate.
[[nodiscard]] double high_snr_approx_rate(const ChannelParams& params,
                                          const ChannelRealization& chan,
                                          const Allocation& alloc);

/// c_ij = P_i H_ij, maximise.
[[nodiscard]] CostMatrix low_snr_cost(const ChannelParams& params,
                                      const ChannelRealization& chan);

/// How high_snr_allocate treats sub-channels with H = 0 (log undefined).
enum class ZeroGainPolicy {
  kStrict,    // forbidden; infeasible instances throw InfeasibleError
  kFallback,  // heavily penalised but usable when nothing else completes the quota
};

/// c_ij = ln H_ij, maximise; H = 0 cells forbidden (kStrict) or penalised (kFallback).
[[nodiscard]] CostMatrix high_snr_cost(const ChannelParams& params,
                                       const ChannelRealization& chan,
                                       ZeroGainPolicy policy = ZeroGainPolicy::kStrict);

/// One powered sub-channel per link chosen by the Hungarian method on P_i H_ij,
/// full budget on it; the rest of each quota is filled round-robin with the
/// link's best free sub-channels at zero power.
[[nodiscard]] Allocation low_snr_allocate(const ChannelParams& params,
                                          const ChannelRealization& chan);

/// Quota-replicated Hungarian assignment on ln H_ij with equal power split.
[[nodiscard]] Allocation high_snr_allocate(const ChannelParams& params,
                                           const ChannelRealization& chan,
                                           ZeroGainPolicy policy = ZeroGainPolicy::kStrict);

inline constexpr std::uint64_t kDefaultPartitionGuard = 1'000'000;

/// N! / ((q!)^K (N - Kq)!): ordered partitions into K sets of size q = floor(N/K)
/// plus an idle remainder. Saturates at UINT64_MAX.
[[nodiscard]] std::uint64_t count_partitions(int num_links, int num_subchannels);

/// Calls `visit` with the owning link of every sub-channel (-1 = idle) for each
/// quota-respecting partition. Returns the number visited.
std::uint64_t enumerate_partitions(int num_links, int num_subchannels,
                                   const std::function<void(const std::vector<int>&)>& visit);

/// Brute force over every partition, water-filling each link; returns the best.
[[nodiscard]] Allocation optimal_allocate(const ChannelParams& params,
                                          const ChannelRealization& chan,
                                          std::uint64_t guard = kDefaultPartitionGuard);

enum class MaxSelectPower { kWaterFill, kEqualSplit };

/// Greedy: repeatedly take the largest H_{k,n} among links with open quota and
/// free sub-channels (ties: lower link, then lower sub-channel).
[[nodiscard]] Allocation max_select_allocate(const ChannelParams& params,
                                             const ChannelRealization& chan,
                                             MaxSelectPower power = MaxSelectPower::kWaterFill);

struct AllocatorOptions {
  ZeroGainPolicy zero_gain_policy = ZeroGainPolicy::kStrict;
  MaxSelectPower max_select_power = MaxSelectPower::kWaterFill;
  std::uint64_t partition_guard = kDefaultPartitionGuard;
};

[[nodiscard]] Allocation allocate(Strategy strategy, const ChannelParams& params,
                                  const ChannelRealization& chan,
                                  const AllocatorOptions& options = {});

}  // namespace subchan
