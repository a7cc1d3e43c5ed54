#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <set>

#include "oracles.hpp"
#include "subchan/allocators.hpp"
#include "subchan/errors.hpp"

using namespace subchan;

namespace {

ChannelParams params_for(int links, int subchannels, double budget) {
  ChannelParams p;
  p.num_links = links;
  p.num_subchannels = subchannels;
  p.total_bandwidth = subchannels;
  p.noise_psd = 1.0;
  p.shadow_prob = 0.0;
  p.power_budgets.assign(static_cast<std::size_t>(links), budget);
  return p;
}

Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()),
           static_cast<Eigen::Index>(rows.begin()->size()));
  int r = 0;
  for (const auto& row : rows) {
    int c = 0;
    for (double v : row) m(r, c++) = v;
    ++r;
  }
  return m;
}

}  // namespace

TEST(Strategy, Names) {
  for (Strategy s : kAllStrategies) EXPECT_EQ(parse_strategy(strategy_name(s)), s);
  EXPECT_EQ(parse_strategy("high_snr"), Strategy::kHighSnr);
  EXPECT_THROW((void)parse_strategy("greedy"), ValidationError);
}

TEST(ExactSumRate, ZeroPowersGiveZero) {
  const auto p = params_for(2, 4, 1.0);
  const auto chan = realization_from_squared_gains(p, Matrix::Ones(2, 4));
  Allocation alloc;
  alloc.subchannels_of_link = {{0, 1}, {2, 3}};
  alloc.powers = Matrix::Zero(2, 4);
  EXPECT_EQ(exact_sum_rate(p, chan, alloc).total_rate, 0.0);
}

TEST(ExactSumRate, UnitCase) {
  const auto p = params_for(1, 1, 1.0);
  const auto chan = realization_from_squared_gains(p, Matrix::Ones(1, 1));
  Allocation alloc;
  alloc.subchannels_of_link = {{0}};
  alloc.powers = Matrix::Ones(1, 1);
  const auto report = exact_sum_rate(p, chan, alloc);
  EXPECT_EQ(report.total_rate, 1.0);
  EXPECT_EQ(report.per_link_rate, (std::vector<double>{1.0}));
}

TEST(ExactSumRate, NamesViolatedConstraint) {
  const auto p = params_for(2, 4, 1.0);
  const auto chan = realization_from_squared_gains(p, Matrix::Ones(2, 4));
  auto expect_message = [&](const Allocation& a, const std::string& needle) {
    try {
      (void)exact_sum_rate(p, chan, a);
      FAIL() << "expected ValidationError containing " << needle;
    } catch (const ValidationError& e) {
      EXPECT_NE(std::string(e.what()).find(needle), std::string::npos) << e.what();
    }
  };
  Allocation overlap{{{0, 1}, {1, 2}}, Matrix::Zero(2, 4), Strategy::kOptimal, {}};
  expect_message(overlap, "not disjoint");
  Allocation short_set{{{0}, {2, 3}}, Matrix::Zero(2, 4), Strategy::kOptimal, {}};
  expect_message(short_set, "quota");
  Allocation outside{{{0, 1}, {2, 3}}, Matrix::Zero(2, 4), Strategy::kOptimal, {}};
  outside.powers(0, 3) = 0.1;
  expect_message(outside, "outside its set");
  Allocation over{{{0, 1}, {2, 3}}, Matrix::Zero(2, 4), Strategy::kOptimal, {}};
  over.powers(1, 2) = 0.8;
  over.powers(1, 3) = 0.3;
  expect_message(over, "budget");
  Allocation negative{{{0, 1}, {2, 3}}, Matrix::Zero(2, 4), Strategy::kOptimal, {}};
  negative.powers(0, 0) = -0.1;
  expect_message(negative, "negative");
}

// Oracle: brute force over the 12 one-per-link choices gives (0->0, 1->1).
TEST(LowSnr, DeskExample) {
  const auto p = params_for(2, 4, 1.0);
  const auto chan = realization_from_squared_gains(p, from_rows({{4, 1, 1, 1}, {3, 2, 1, 1}}));
  const auto alloc = low_snr_allocate(p, chan);
  ASSERT_TRUE(alloc.trace.has_value());
  EXPECT_EQ(alloc.trace->result.objective_value, 6.0);
  EXPECT_EQ(alloc.powers(0, 0), 1.0);
  EXPECT_EQ(alloc.powers(1, 1), 1.0);
  EXPECT_EQ(alloc.subchannels_of_link[0], (std::vector<int>{0, 2}));
  EXPECT_EQ(alloc.subchannels_of_link[1], (std::vector<int>{1, 3}));
  EXPECT_NEAR(exact_sum_rate(p, chan, alloc).total_rate, std::log2(5.0) + std::log2(3.0), 1e-12);
  EXPECT_NEAR(exact_sum_rate(p, chan, alloc).total_rate, 3.9068905956085183, 1e-12);
  EXPECT_NEAR(low_snr_approx_rate(p, chan, alloc), 6.0 / std::log(2.0), 1e-12);
}

TEST(LowSnr, SingleLinkTakesGlobalArgmax) {
  const auto p = params_for(1, 4, 2.0);
  const auto chan = realization_from_squared_gains(p, from_rows({{0.5, 3.0, 2.0, 1.0}}));
  const auto alloc = low_snr_allocate(p, chan);
  EXPECT_EQ(alloc.powers(0, 1), 2.0);
  EXPECT_EQ(alloc.powers.sum(), 2.0);
  EXPECT_EQ(alloc.subchannels_of_link[0].size(), 4u);
}

TEST(LowSnr, AllEqualGains) {
  const auto p = params_for(2, 4, 0.5);
  const auto chan = realization_from_squared_gains(p, Matrix::Constant(2, 4, 3.0));
  const auto alloc = low_snr_allocate(p, chan);
  EXPECT_EQ(alloc.trace->result.objective_value, 2 * 0.5 * 3.0);
}

// Oracle: all 6 equal partitions enumerated by hand; {0,1}|{2,3} wins.
TEST(HighSnr, DeskExample) {
  const auto p = params_for(2, 4, 2.0);
  const auto chan = realization_from_squared_gains(p, from_rows({{4, 3, 1, 1}, {1, 1, 4, 3}}));
  const auto alloc = high_snr_allocate(p, chan);
  EXPECT_EQ(alloc.subchannels_of_link[0], (std::vector<int>{0, 1}));
  EXPECT_EQ(alloc.subchannels_of_link[1], (std::vector<int>{2, 3}));
  for (int k = 0; k < 2; ++k) {
    for (int n : alloc.subchannels_of_link[static_cast<std::size_t>(k)]) EXPECT_EQ(alloc.powers(k, n), 1.0);
  }
  EXPECT_NEAR(exact_sum_rate(p, chan, alloc).total_rate, 8.643856189774723, 1e-12);
}

TEST(HighSnr, SingleLinkSplitsEvenly) {
  const auto p = params_for(1, 2, 3.0);
  const auto chan = realization_from_squared_gains(p, from_rows({{0.2, 5.0}}));
  const auto alloc = high_snr_allocate(p, chan);
  EXPECT_EQ(alloc.subchannels_of_link[0], (std::vector<int>{0, 1}));
  EXPECT_EQ(alloc.powers(0, 0), 1.5);
  EXPECT_EQ(alloc.powers(0, 1), 1.5);
}

TEST(HighSnr, AllEqualGainsAnyPartitionSameRate) {
  const auto p = params_for(2, 4, 1.0);
  const auto chan = realization_from_squared_gains(p, Matrix::Constant(2, 4, 2.0));
  const double rate = exact_sum_rate(p, chan, high_snr_allocate(p, chan)).total_rate;
  EXPECT_NEAR(rate, 4.0 * std::log2(2.0), 1e-12);
}

TEST(HighSnr, StrictRejectsLinkWithoutEnoughUsableChannels) {
  const auto p = params_for(2, 4, 1.0);
  const auto chan = realization_from_squared_gains(p, from_rows({{0, 0, 0, 1}, {1, 1, 1, 1}}));
  try {
    (void)high_snr_allocate(p, chan);
    FAIL() << "expected InfeasibleError";
  } catch (const InfeasibleError& e) {
    EXPECT_NE(std::string(e.what()).find("link 0"), std::string::npos);
  }
  const auto alloc = high_snr_allocate(p, chan, ZeroGainPolicy::kFallback);
  EXPECT_NO_THROW(validate_allocation(p, chan, alloc));
  EXPECT_TRUE(std::set<int>(alloc.subchannels_of_link[0].begin(), alloc.subchannels_of_link[0].end())
                  .count(3));
}

// Column 3 is dead for both links: no strict quota-respecting assignment exists.
TEST(HighSnr, FallbackUsesDeadChannelOnlyWhenUnavoidable) {
  const auto p = params_for(2, 4, 1.0);
  const auto chan = realization_from_squared_gains(p, from_rows({{2, 1, 3, 0}, {1, 2, 1, 0}}));
  EXPECT_THROW((void)high_snr_allocate(p, chan, ZeroGainPolicy::kStrict), InfeasibleError);
  const auto alloc = high_snr_allocate(p, chan, ZeroGainPolicy::kFallback);
  EXPECT_NO_THROW(validate_allocation(p, chan, alloc));
  int dead_uses = 0;
  for (const auto& set : alloc.subchannels_of_link) dead_uses += std::count(set.begin(), set.end(), 3);
  EXPECT_EQ(dead_uses, 1);
}

TEST(CountPartitions, Multinomial) {
  EXPECT_EQ(count_partitions(2, 4), 6u);
  EXPECT_EQ(count_partitions(2, 8), 70u);
  EXPECT_EQ(count_partitions(2, 16), 12870u);
  EXPECT_EQ(count_partitions(3, 9), 1680u);
  EXPECT_EQ(count_partitions(1, 5), 1u);
  EXPECT_EQ(count_partitions(2, 5), 30u);  // 5! / (2! 2! 1!)
  EXPECT_EQ(count_partitions(64, 128), std::numeric_limits<std::uint64_t>::max());
}

TEST(EnumeratePartitions, CountsMatchOracle) {
  for (auto [k, n] : {std::pair{2, 4}, {2, 5}, {3, 6}, {3, 7}, {2, 8}, {1, 3}}) {
    std::set<std::vector<int>> seen;
    const auto visited = enumerate_partitions(k, n, [&](const std::vector<int>& o) { seen.insert(o); });
    std::set<std::vector<int>> expected;
    oracle::for_each_partition(k, n, [&](const std::vector<int>& o) { expected.insert(o); });
    EXPECT_EQ(visited, count_partitions(k, n));
    EXPECT_EQ(seen, expected);
  }
}

TEST(Optimal, GuardExceeded) {
  const auto p = params_for(2, 16, 1.0);
  const auto chan = realization_from_squared_gains(p, Matrix::Ones(2, 16));
  EXPECT_THROW((void)optimal_allocate(p, chan, 1000), GuardExceededError);
}

TEST(Optimal, MatchesPartitionOracle) {
  std::mt19937_64 rng(101);
  std::exponential_distribution<double> gain(1.0);
  for (auto [k, n] : {std::pair{2, 4}, {2, 5}, {3, 6}, {1, 3}}) {
    for (double budget : {0.01, 1.0, 100.0}) {
      const auto p = params_for(k, n, budget);
      Matrix g(k, n);
      for (int r = 0; r < k; ++r) for (int c = 0; c < n; ++c) g(r, c) = gain(rng);
      const auto chan = realization_from_squared_gains(p, g);
      const auto alloc = optimal_allocate(p, chan);
      const double rate = exact_sum_rate(p, chan, alloc).total_rate;
      const double ref = oracle::best_partition_rate(g, p.power_budgets, p.subchannel_bandwidth());
      EXPECT_NEAR(rate, ref, 1e-9 * std::max(1.0, ref));
    }
  }
}

TEST(Optimal, AllEqualMatchesHighSnr) {
  const auto p = params_for(2, 4, 5.0);
  const auto chan = realization_from_squared_gains(p, Matrix::Constant(2, 4, 0.7));
  const double opt = exact_sum_rate(p, chan, optimal_allocate(p, chan)).total_rate;
  const double high = exact_sum_rate(p, chan, high_snr_allocate(p, chan)).total_rate;
  EXPECT_NEAR(opt, high, 1e-12);
}

// Hand trace: (0,0)=4, (1,1)=2, (0,2)=1, (1,3)=1.
TEST(MaxSelect, DeskTrace) {
  const auto p = params_for(2, 4, 1.0);
  const auto chan = realization_from_squared_gains(p, from_rows({{4, 1, 1, 1}, {3, 2, 1, 1}}));
  const auto alloc = max_select_allocate(p, chan);
  EXPECT_EQ(alloc.subchannels_of_link[0], (std::vector<int>{0, 2}));
  EXPECT_EQ(alloc.subchannels_of_link[1], (std::vector<int>{1, 3}));
}

TEST(MaxSelect, SingleLinkTakesEverything) {
  const auto p = params_for(1, 5, 1.0);
  const auto chan = realization_from_squared_gains(p, from_rows({{0.1, 2, 0.3, 4, 1}}));
  const auto alloc = max_select_allocate(p, chan);
  EXPECT_EQ(alloc.subchannels_of_link[0], (std::vector<int>{0, 1, 2, 3, 4}));
  const double opt = exact_sum_rate(p, chan, optimal_allocate(p, chan)).total_rate;
  EXPECT_NEAR(exact_sum_rate(p, chan, alloc).total_rate, opt, 1e-12);
}

TEST(MaxSelect, EqualSplitOption) {
  const auto p = params_for(2, 4, 1.0);
  const auto chan = realization_from_squared_gains(p, from_rows({{4, 1, 1, 1}, {3, 2, 1, 1}}));
  const auto alloc = max_select_allocate(p, chan, MaxSelectPower::kEqualSplit);
  EXPECT_EQ(alloc.powers(0, 0), 0.5);
  EXPECT_EQ(alloc.powers(0, 2), 0.5);
}

TEST(MaxSelect, AllEqualMatchesOptimal) {
  const auto p = params_for(2, 6, 2.0);
  const auto chan = realization_from_squared_gains(p, Matrix::Constant(2, 6, 1.3));
  const double opt = exact_sum_rate(p, chan, optimal_allocate(p, chan)).total_rate;
  EXPECT_NEAR(exact_sum_rate(p, chan, max_select_allocate(p, chan)).total_rate, opt, 1e-12);
}

// Surplus sub-channels (K does not divide N) stay idle for every strategy.
TEST(Allocators, SurplusLeftIdle) {
  const auto p = params_for(2, 5, 1.0);
  RngStream rng(4);
  const auto chan = sample_realization(p, rng);
  for (Strategy s : kAllStrategies) {
    const auto alloc = allocate(s, p, chan);
    std::size_t used = 0;
    for (const auto& set : alloc.subchannels_of_link) used += set.size();
    EXPECT_EQ(used, 4u) << strategy_name(s);
  }
}

TEST(AllocatorProperties, InvariantsAndSandwich) {
  std::mt19937_64 dims(55);
  for (int trial = 0; trial < 300; ++trial) {
    const int k = 1 + static_cast<int>(dims() % 3);
    const int n = k + static_cast<int>(dims() % (8 - k));
    auto p = params_for(k, n, std::pow(10.0, static_cast<double>(dims() % 7) - 3.0));
    p.shadow_prob = 0.1;
    RngStream rng = RngStream::substream(9, static_cast<std::uint64_t>(trial));
    const auto chan = sample_realization(p, rng);
    AllocatorOptions options;
    options.zero_gain_policy = ZeroGainPolicy::kFallback;
    const double opt = exact_sum_rate(p, chan, allocate(Strategy::kOptimal, p, chan, options)).total_rate;
    for (Strategy s : kAllStrategies) {
      const auto alloc = allocate(s, p, chan, options);
      EXPECT_NO_THROW(validate_allocation(p, chan, alloc)) << strategy_name(s);
      EXPECT_GE(opt, exact_sum_rate(p, chan, alloc).total_rate * (1.0 - 1e-12)) << strategy_name(s);
    }
  }
}

// The high-SNR partition maximises sum log H over all quota-respecting partitions.
TEST(AllocatorProperties, HighSnrPartitionIsLogArgmax) {
  std::mt19937_64 rng(808);
  std::exponential_distribution<double> gain(1.0);
  for (auto [k, n] : {std::pair{2, 4}, {2, 6}, {3, 6}, {2, 5}}) {
    for (int rep = 0; rep < 50; ++rep) {
      const auto p = params_for(k, n, 1.0);
      Matrix g(k, n);
      for (int r = 0; r < k; ++r) for (int c = 0; c < n; ++c) g(r, c) = gain(rng);
      const auto chan = realization_from_squared_gains(p, g);
      const auto alloc = high_snr_allocate(p, chan);
      double chosen = 0.0;
      for (int r = 0; r < k; ++r) {
        for (int c : alloc.subchannels_of_link[static_cast<std::size_t>(r)]) chosen += std::log(g(r, c));
      }
      double best = -std::numeric_limits<double>::infinity();
      oracle::for_each_partition(k, n, [&](const std::vector<int>& owner) {
        double s = 0.0;
        for (std::size_t c = 0; c < owner.size(); ++c) {
          if (owner[c] >= 0) s += std::log(g(owner[c], static_cast<Eigen::Index>(c)));
        }
        best = std::max(best, s);
      });
      EXPECT_NEAR(chosen, best, 1e-9);
    }
  }
}
