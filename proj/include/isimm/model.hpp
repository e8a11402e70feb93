#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace isimm {

/// K-tap Gaussian ISI channel y_t = sum_i h_i x_{t-i} + w_t with input power constraint.
struct Channel {
  std::vector<double> taps;  // h_0..h_K
  double noise_var = 1.0;    // sigma^2
  double input_power = 1.0;  // P_X

  std::size_t memory() const noexcept { return taps.empty() ? 0 : taps.size() - 1; }
  double energy() const noexcept;
  /// Throws InvalidInput on empty or non-finite taps, non-positive variances.
  void validate() const;
};

/// Decoder metric taps alpha_0..alpha_K (the receiver's assumed channel).
struct Metric {
  std::vector<double> taps;

  void validate() const;
  bool memoryless() const noexcept;
};

/// Zero-pads (or keeps) the metric so that it has the same length as the channel.
/// A metric longer than the channel pads the channel instead; see `align`.
struct AlignedModel {
  std::vector<double> h;
  std::vector<double> alpha;
};
AlignedModel align(const Channel& channel, const Metric& metric);

/// Pi_m(a) = sum_{k=0}^{K-m} a_k a_{k+m}; returns 0 for m > K.
double lag_product(std::span<const double> taps, std::size_t m) noexcept;

double squared_norm(std::span<const double> taps) noexcept;

bool all_finite(std::span<const double> values) noexcept;

}  // namespace isimm
