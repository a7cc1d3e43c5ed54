#include "subchan/channel.hpp"

#include <cmath>
#include <string>

#include "subchan/errors.hpp"

namespace subchan {

namespace {

// splitmix64 finalizer; decorrelates neighbouring (seed, trial) pairs.
std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

void ChannelParams::validate() const {
  if (num_links < 1) throw ValidationError("num_links must be >= 1");
  if (num_subchannels < 1) throw ValidationError("num_subchannels must be >= 1");
  if (num_subchannels < num_links) {
    throw ValidationError("num_subchannels (" + std::to_string(num_subchannels) +
                          ") must be >= num_links (" + std::to_string(num_links) + ")");
  }
  if (!(total_bandwidth > 0.0) || !std::isfinite(total_bandwidth)) {
    throw ValidationError("total_bandwidth must be positive and finite");
  }
  if (!(noise_psd > 0.0) || !std::isfinite(noise_psd)) {
    throw ValidationError("noise_psd must be positive and finite");
  }
  if (!(shadow_prob >= 0.0 && shadow_prob <= 1.0)) {
    throw ValidationError("shadow_prob must lie in [0, 1]");
  }
  if (!(shadow_attenuation >= 0.0) || !std::isfinite(shadow_attenuation)) {
    throw ValidationError("shadow_attenuation must be non-negative and finite");
  }
  if (static_cast<int>(power_budgets.size()) != num_links) {
    throw ValidationError("power_budgets must have one entry per link");
  }
  for (std::size_t k = 0; k < power_budgets.size(); ++k) {
    if (!(power_budgets[k] >= 0.0) || !std::isfinite(power_budgets[k])) {
      throw ValidationError("power budget of link " + std::to_string(k) +
                            " must be non-negative and finite");
    }
  }
}

ChannelParams ChannelParams::with_uniform_budget(double budget) const {
  ChannelParams copy = *this;
  copy.power_budgets.assign(static_cast<std::size_t>(num_links), budget);
  return copy;
}

RngStream::RngStream(std::uint64_t seed) : engine_(mix64(seed)) {}

RngStream RngStream::substream(std::uint64_t seed, std::uint64_t trial) {
  return RngStream(mix64(seed) ^ mix64(~trial));
}

double RngStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RngStream::unit_exponential() {
  return -std::log1p(-uniform());
}

double normalized_gain(const ChannelParams& params, double squared_gain) {
  if (!(squared_gain >= 0.0)) throw ValidationError("squared_gain must be >= 0");
  return squared_gain / params.noise_power();
}

ChannelRealization sample_realization(const ChannelParams& params, RngStream& rng) {
  params.validate();
  const int rows = params.num_links;
  const int cols = params.num_subchannels;
  ChannelRealization chan;
  chan.squared_gains.resize(rows, cols);
  chan.normalized_gains.resize(rows, cols);
  chan.shadow_mask.resize(rows, cols);
  const double noise = params.noise_power();
  for (int k = 0; k < rows; ++k) {
    for (int n = 0; n < cols; ++n) {
      double gain = rng.unit_exponential();
      // Always consume the shadow draw so the stream layout is independent of P_f.
      const bool shadowed = rng.uniform() < params.shadow_prob;
      if (shadowed) gain *= params.shadow_attenuation;
      chan.squared_gains(k, n) = gain;
      chan.normalized_gains(k, n) = gain / noise;
      chan.shadow_mask(k, n) = shadowed;
    }
  }
  return chan;
}

ChannelRealization realization_from_squared_gains(const ChannelParams& params,
                                                  const Matrix& squared_gains) {
  params.validate();
  if (squared_gains.rows() != params.num_links ||
      squared_gains.cols() != params.num_subchannels) {
    throw ValidationError("squared_gains must be num_links x num_subchannels");
  }
  if (!squared_gains.allFinite() || (squared_gains.array() < 0.0).any()) {
    throw ValidationError("squared_gains must be finite and non-negative");
  }
  ChannelRealization chan;
  chan.squared_gains = squared_gains;
  chan.normalized_gains = squared_gains / params.noise_power();
  chan.shadow_mask = BoolMatrix::Constant(squared_gains.rows(), squared_gains.cols(), false);
  return chan;
}

}  // namespace subchan
