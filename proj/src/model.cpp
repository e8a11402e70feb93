#include "isimm/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "isimm/error.hpp"

namespace isimm {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::invalid_input:
      return "invalid-input";
    case ErrorKind::infeasible:
      return "infeasible-computation";
    case ErrorKind::io:
      return "io";
  }
  return "unknown";
}

double Channel::energy() const noexcept { return squared_norm(taps); }

void Channel::validate() const {
  if (taps.empty()) throw InvalidInput("channel taps must be non-empty");
  if (!all_finite(taps)) throw InvalidInput("channel taps must be finite");
  if (!(noise_var > 0.0) || !std::isfinite(noise_var))
    throw InvalidInput("noise variance must be positive and finite");
  if (!(input_power > 0.0) || !std::isfinite(input_power))
    throw InvalidInput("input power must be positive and finite");
}

void Metric::validate() const {
  if (taps.empty()) throw InvalidInput("metric taps must be non-empty");
  if (!all_finite(taps)) throw InvalidInput("metric taps must be finite");
}

bool Metric::memoryless() const noexcept {
  return std::all_of(taps.begin() + std::min<std::size_t>(1, taps.size()), taps.end(),
                     [](double a) { return a == 0.0; });
}

AlignedModel align(const Channel& channel, const Metric& metric) {
  AlignedModel m{channel.taps, metric.taps};
  const std::size_t len = std::max(m.h.size(), m.alpha.size());
  m.h.resize(len, 0.0);
  m.alpha.resize(len, 0.0);
  return m;
}

double lag_product(std::span<const double> taps, std::size_t m) noexcept {
  if (m >= taps.size()) return 0.0;
  double s = 0.0;
  for (std::size_t k = 0; k + m < taps.size(); ++k) s += taps[k] * taps[k + m];
  return s;
}

double squared_norm(std::span<const double> taps) noexcept {
  return std::inner_product(taps.begin(), taps.end(), taps.begin(), 0.0);
}

bool all_finite(std::span<const double> values) noexcept {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace isimm
