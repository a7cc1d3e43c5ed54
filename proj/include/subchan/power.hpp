#pragma once

#include <span>
#include <vector>

namespace subchan {

struct WaterFillResult {
  std::vector<double> powers;  // aligned with the input gains
  double water_level = 0.0;    // mu; active channels get mu - 1/H
  std::vector<int> active_set; // indices with strictly positive power, ascending
};

/// Maximises sum log2(1 + p_n H_n) subject to sum p_n <= budget. Channels are
/// admitted in decreasing gain order while mu stays above their 1/H; mu is then
/// computed in closed form over the active set. Zero-gain channels never receive power.
/// Powers equal mu - 1/H_n up to rounding (they are computed relative to the
/// lowest floor, so a single active channel gets exactly the budget).
[[nodiscard]] WaterFillResult water_fill(std::span<const double> gains, double budget);

/// budget / set_size on every entry.
[[nodiscard]] std::vector<double> equal_split(int set_size, double budget);

/// Entire budget on the largest gain (lowest index wins ties).
[[nodiscard]] std::vector<double> concentrate_on_best(std::span<const double> gains,
                                                      double budget);

/// sum log2(1 + p_n H_n), the per-sub-channel rate in units of B/N.
[[nodiscard]] double log2_capacity(std::span<const double> gains,
                                   std::span<const double> powers);

}  // namespace subchan
