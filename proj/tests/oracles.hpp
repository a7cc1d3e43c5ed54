#pragma once

// Test-only reference computations. Nothing here calls into the solver or
// allocator code paths that the tests check.

#include <cmath>
#include <functional>
#include <vector>

#include "subchan/channel.hpp"

namespace subchan::oracle {

/// Water level by bisection on sum_n (mu - 1/H_n)^+ = budget.
inline std::vector<double> bisection_water_fill(const std::vector<double>& gains, double budget) {
  std::vector<double> powers(gains.size(), 0.0);
  double best = 0.0;
  for (double g : gains) best = std::max(best, g);
  if (best == 0.0 || budget == 0.0) return powers;
  auto used = [&](double mu) {
    double total = 0.0;
    for (double g : gains) {
      if (g > 0.0) total += std::max(0.0, mu - 1.0 / g);
    }
    return total;
  };
  double lo = 1.0 / best;
  double hi = lo + budget;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (used(mid) < budget ? lo : hi) = mid;
  }
  const double mu = 0.5 * (lo + hi);
  for (std::size_t n = 0; n < gains.size(); ++n) {
    if (gains[n] > 0.0) powers[n] = std::max(0.0, mu - 1.0 / gains[n]);
  }
  return powers;
}

inline double capacity(const std::vector<double>& gains, const std::vector<double>& powers) {
  double total = 0.0;
  for (std::size_t n = 0; n < gains.size(); ++n) total += std::log2(1.0 + powers[n] * gains[n]);
  return total;
}

/// Every labelling of N sub-channels with owners 0..K-1 or -1 (idle) that
/// gives each link exactly floor(N/K); found by scanning all (K+1)^N labels.
inline void for_each_partition(int links, int subchannels,
                               const std::function<void(const std::vector<int>&)>& visit) {
  const int quota = subchannels / links;
  const int base = links + 1;
  long long total = 1;
  for (int n = 0; n < subchannels; ++n) total *= base;
  std::vector<int> owner(static_cast<std::size_t>(subchannels));
  for (long long code = 0; code < total; ++code) {
    long long c = code;
    std::vector<int> count(static_cast<std::size_t>(links), 0);
    for (int n = 0; n < subchannels; ++n) {
      owner[static_cast<std::size_t>(n)] = static_cast<int>(c % base) - 1;
      c /= base;
      if (owner[static_cast<std::size_t>(n)] >= 0) ++count[static_cast<std::size_t>(owner[static_cast<std::size_t>(n)])];
    }
    bool ok = true;
    for (int k : count) ok = ok && k == quota;
    if (ok) visit(owner);
  }
}

/// Set of sub-channels owned by `link` under a labelling.
inline std::vector<int> set_of(const std::vector<int>& owner, int link) {
  std::vector<int> set;
  for (std::size_t n = 0; n < owner.size(); ++n) {
    if (owner[n] == link) set.push_back(static_cast<int>(n));
  }
  return set;
}

/// Best water-filled sum rate over all quota-respecting partitions.
inline double best_partition_rate(const Matrix& gains, const std::vector<double>& budgets,
                                  double subchannel_bw) {
  const int links = static_cast<int>(gains.rows());
  double best = 0.0;
  for_each_partition(links, static_cast<int>(gains.cols()), [&](const std::vector<int>& owner) {
    double total = 0.0;
    for (int k = 0; k < links; ++k) {
      std::vector<double> g;
      for (int n : set_of(owner, k)) g.push_back(gains(k, n));
      total += subchannel_bw * capacity(g, bisection_water_fill(g, budgets[static_cast<std::size_t>(k)]));
    }
    best = std::max(best, total);
  });
  return best;
}

}  // namespace subchan::oracle
