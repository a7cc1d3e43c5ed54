#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace subchan {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using BoolMatrix = Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Scenario constants shared by every allocator.
struct ChannelParams {
  int num_links = 2;
  int num_subchannels = 4;
  double total_bandwidth = 4.0;  // Hz
  double noise_psd = 1.0;        // W/Hz
  double shadow_prob = 0.02;
  double shadow_attenuation = 0.0;  // multiplier on a shadowed |h|^2
  std::vector<double> power_budgets = {1.0, 1.0};  // W, one per link

  /// Throws ValidationError on the first violated invariant.
  void validate() const;

  /// floor(N / K); every link gets exactly this many sub-channels.
  [[nodiscard]] int quota() const { return num_subchannels / num_links; }
  [[nodiscard]] double subchannel_bandwidth() const {
    return total_bandwidth / num_subchannels;
  }
  /// Noise power in one sub-channel, N0 * B / N.
  [[nodiscard]] double noise_power() const { return noise_psd * subchannel_bandwidth(); }

  /// Copy with every link budget set to `budget`.
  [[nodiscard]] ChannelParams with_uniform_budget(double budget) const;
};

/// Deterministic random stream. Each Monte Carlo trial owns the sub-stream
/// derived from (seed, trial), so draws do not depend on execution order.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);
  static RngStream substream(std::uint64_t seed, std::uint64_t trial);

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Exponential with unit mean.
  double unit_exponential();

 private:
  std::mt19937_64 engine_;
};

struct ChannelRealization {
  Matrix squared_gains;     // |h_{k,n}|^2, post-shadowing
  Matrix normalized_gains;  // H_{k,n} = |h_{k,n}|^2 / (N0 B / N)
  BoolMatrix shadow_mask;

  [[nodiscard]] int num_links() const { return static_cast<int>(squared_gains.rows()); }
  [[nodiscard]] int num_subchannels() const {
    return static_cast<int>(squared_gains.cols());
  }
};

[[nodiscard]] double normalized_gain(const ChannelParams& params, double squared_gain);

/// Draws |h|^2 ~ Exp(1) per (link, sub-channel), then shadows each entry with
/// probability P_f by scaling it with shadow_attenuation.
[[nodiscard]] ChannelRealization sample_realization(const ChannelParams& params,
                                                    RngStream& rng);

/// Builds a realization from caller-supplied |h|^2 values (no shadowing).
[[nodiscard]] ChannelRealization realization_from_squared_gains(const ChannelParams& params,
                                                                const Matrix& squared_gains);

}  // namespace subchan
