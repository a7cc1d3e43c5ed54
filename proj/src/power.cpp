#include "subchan/power.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "subchan/errors.hpp"

namespace subchan {

namespace {

void require_non_negative(std::span<const double> gains, double budget) {
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    throw ValidationError("power budget must be non-negative and finite");
  }
  for (std::size_t n = 0; n < gains.size(); ++n) {
    if (!(gains[n] >= 0.0) || !std::isfinite(gains[n])) {
      throw ValidationError("gain " + std::to_string(n) + " must be non-negative and finite");
    }
  }
}

}  // namespace

WaterFillResult water_fill(std::span<const double> gains, double budget) {
  require_non_negative(gains, budget);

  std::vector<int> order;
  order.reserve(gains.size());
  for (std::size_t n = 0; n < gains.size(); ++n) {
    if (gains[n] > 0.0) order.push_back(static_cast<int>(n));
  }

  WaterFillResult result;
  result.powers.assign(gains.size(), 0.0);
  if (order.empty()) {
    if (budget > 0.0) throw InfeasibleError("water_fill: no channel with positive gain");
    return result;
  }
  // Ascending floor height 1/H, i.e. descending gain; stable keeps index order on ties.
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return gains[a] > gains[b]; });

  // Floors are measured from the lowest one so small budgets do not cancel
  // against large 1/H values. Admit the largest prefix whose implied level
  // clears the floor of its last member.
  const double base_floor = 1.0 / gains[order[0]];
  auto lift = [&](int n) { return 1.0 / gains[n] - base_floor; };
  double lift_sum = 0.0;
  std::size_t active = 0;
  double excess = 0.0;  // water level above base_floor
  for (std::size_t k = 0; k < order.size(); ++k) {
    const double lift_k = lift(order[k]);
    const double candidate = (budget + lift_sum + lift_k) / static_cast<double>(k + 1);
    if (!(candidate > lift_k)) break;
    lift_sum += lift_k;
    active = k + 1;
    excess = candidate;
  }

  result.water_level = base_floor + excess;
  for (std::size_t k = 0; k < active; ++k) {
    const int n = order[k];
    result.powers[n] = excess - lift(n);
    result.active_set.push_back(n);
  }
  std::sort(result.active_set.begin(), result.active_set.end());
  return result;
}

std::vector<double> equal_split(int set_size, double budget) {
  if (set_size < 1) throw ValidationError("equal_split: set_size must be >= 1");
  if (!(budget >= 0.0) || !std::isfinite(budget)) {
    throw ValidationError("power budget must be non-negative and finite");
  }
  return std::vector<double>(static_cast<std::size_t>(set_size),
                             budget / static_cast<double>(set_size));
}

std::vector<double> concentrate_on_best(std::span<const double> gains, double budget) {
  if (gains.empty()) throw ValidationError("concentrate_on_best: empty gain list");
  require_non_negative(gains, budget);
  std::vector<double> powers(gains.size(), 0.0);
  const auto best = std::max_element(gains.begin(), gains.end());
  powers[static_cast<std::size_t>(best - gains.begin())] = budget;
  return powers;
}

double log2_capacity(std::span<const double> gains, std::span<const double> powers) {
  if (gains.size() != powers.size()) throw ValidationError("gains/powers length mismatch");
  double total = 0.0;
  for (std::size_t n = 0; n < gains.size(); ++n) total += std::log2(1.0 + powers[n] * gains[n]);
  return total;
}

}  // namespace subchan
