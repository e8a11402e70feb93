#include "isimm/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include <Eigen/Cholesky>
#include <boost/math/special_functions/beta.hpp>

#include "isimm/armodel.hpp"
#include "isimm/error.hpp"
#include "isimm/parallel.hpp"

namespace isimm {

CodebookKind CodebookSpec::parse_kind(const std::string& name) {
  if (name == "iid") return CodebookKind::iid;
  if (name == "ar") return CodebookKind::autoregressive;
  if (name == "sphere" || name == "typeclass") return CodebookKind::type_class;
  throw InvalidInput("unknown codebook ensemble '" + name + "' (expected iid, ar, sphere or typeclass)");
}

std::string CodebookSpec::kind_name() const {
  switch (kind) {
    case CodebookKind::iid:
      return "iid";
    case CodebookKind::autoregressive:
      return "ar";
    case CodebookKind::type_class:
      return gamma.empty() ? "sphere" : "typeclass";
  }
  return "?";
}

DecoderKind parse_decoder(const std::string& name) {
  if (name == "metric") return DecoderKind::metric;
  if (name == "glrt") return DecoderKind::glrt;
  throw InvalidInput("unknown decoder '" + name + "' (expected metric or glrt)");
}

DecodeMode parse_decode_mode(const std::string& name) {
  if (name == "auto") return DecodeMode::automatic;
  if (name == "exhaustive") return DecodeMode::exhaustive;
  if (name == "order-statistic") return DecodeMode::order_statistic;
  throw InvalidInput("unknown decode mode '" + name + "' (expected auto, exhaustive or order-statistic)");
}

const char* to_string(DecoderKind kind) noexcept { return kind == DecoderKind::metric ? "metric" : "glrt"; }

const char* to_string(DecodeMode mode) noexcept {
  switch (mode) {
    case DecodeMode::automatic:
      return "auto";
    case DecodeMode::exhaustive:
      return "exhaustive";
    case DecodeMode::order_statistic:
      return "order-statistic";
  }
  return "?";
}

double SimConfig::codewords() const {
  const double m = std::exp(static_cast<double>(n) * rate);
  return std::ceil(m * (1.0 - 1e-12));
}

void SimConfig::validate() const {
  if (n < 2) throw InvalidInput("block length must be at least 2");
  if (!(rate >= 0.0) || !std::isfinite(rate)) throw InvalidInput("rate must be finite and >= 0");
  if (static_cast<double>(n) * rate > 600.0) throw InvalidInput("n * rate is too large to represent M");
  if (trials == 0) throw InvalidInput("trials must be positive");
  if (decoder == DecoderKind::metric) {
    if (alpha.empty() || !all_finite(alpha)) throw InvalidInput("metric taps must be finite and nonempty");
  }
  if (!(codebook.epsilon_fraction > 0.0)) throw InvalidInput("type-class epsilon must be positive");
  if (mode == DecodeMode::order_statistic && !order_statistic_applicable(*this))
    throw InvalidInput("order-statistic decoding needs the sphere ensemble with a memoryless metric or GLRT");
  const bool exhaustive = mode == DecodeMode::exhaustive ||
                          (mode == DecodeMode::automatic && !order_statistic_applicable(*this));
  if (exhaustive && codewords() > max_codewords)
    throw InvalidInput("M = ceil(exp(n R)) exceeds the exhaustive-decoding limit of " +
                       std::to_string(static_cast<long long>(max_codewords)) + " codewords");
}

bool order_statistic_applicable(const SimConfig& config) {
  if (config.codebook.kind != CodebookKind::type_class || !config.codebook.gamma.empty()) return false;
  if (config.decoder == DecoderKind::glrt) return true;
  return std::all_of(config.alpha.begin() + 1, config.alpha.end(), [](double a) { return a == 0.0; });
}

// ---------------------------------------------------------------------------

CodewordSampler::CodewordSampler(const CodebookSpec& spec, double p_x, std::size_t n, std::size_t max_attempts)
    : spec_(spec), p_x_(p_x), n_(n), max_attempts_(max_attempts) {
  if (!(p_x > 0.0)) throw InvalidInput("input power must be positive");
  if (n == 0) throw InvalidInput("block length must be positive");
  switch (spec.kind) {
    case CodebookKind::iid:
      eta_ = std::sqrt(p_x);
      break;
    case CodebookKind::autoregressive: {
      const ArParams ar = make_ar_params(spec.phi, p_x);
      phi_ = ar.phi;
      eta_ = std::sqrt(ar.eta2);
      break;
    }
    case CodebookKind::type_class: {
      if (spec.gamma.empty()) break;
      gamma_.push_back(p_x);
      gamma_.insert(gamma_.end(), spec.gamma.begin(), spec.gamma.end());
      const ArParams ar = ar_from_autocov(Autocov{gamma_});
      phi_ = ar.phi;
      eta_ = std::sqrt(ar.eta2);
      const std::size_t p = phi_.size();
      if (p > n) throw InvalidInput("type-class order exceeds the block length");
      Eigen::MatrixXd t(p, p);
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) t(i, j) = gamma_[i > j ? i - j : j - i];
      const Eigen::MatrixXd l = t.llt().matrixL();
      chol_.resize(p * p);
      for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) chol_[i * p + j] = l(i, j);
      break;
    }
  }
}

bool CodewordSampler::accepted(std::span<const double> x) const {
  const double eps = spec_.epsilon_fraction * p_x_;
  for (std::size_t k = 0; k < gamma_.size(); ++k) {
    double s = 0.0;
    for (std::size_t t = k; t < n_; ++t) s += x[t] * x[t - k];
    if (std::abs(s / static_cast<double>(n_) - gamma_[k]) > eps) return false;
  }
  return true;
}

void CodewordSampler::sample(std::mt19937_64& rng, std::span<double> out) const {
  std::normal_distribution<double> normal;
  if (out.size() != n_) throw InvalidInput("codeword buffer has the wrong length");
  switch (spec_.kind) {
    case CodebookKind::iid:
      for (double& v : out) v = eta_ * normal(rng);
      return;
    case CodebookKind::autoregressive:
      for (std::size_t t = 0; t < n_; ++t) {
        double v = eta_ * normal(rng);
        for (std::size_t k = 1; k <= phi_.size() && k <= t; ++k) v += phi_[k - 1] * out[t - k];
        out[t] = v;
      }
      return;
    case CodebookKind::type_class:
      break;
  }

  if (gamma_.empty()) {
    double norm2 = 0.0;
    do {
      norm2 = 0.0;
      for (double& v : out) {
        v = normal(rng);
        norm2 += v * v;
      }
    } while (norm2 == 0.0);
    const double scale = std::sqrt(static_cast<double>(n_) * p_x_ / norm2);
    for (double& v : out) v *= scale;
    return;
  }

  const std::size_t p = phi_.size();
  std::vector<double> z(p);
  for (std::size_t attempt = 0; attempt < max_attempts_; ++attempt) {
    // Stationary start from the Toeplitz covariance, then the AR recursion.
    for (double& v : z) v = normal(rng);
    for (std::size_t i = 0; i < p; ++i) {
      double v = 0.0;
      for (std::size_t j = 0; j <= i; ++j) v += chol_[i * p + j] * z[j];
      out[i] = v;
    }
    for (std::size_t t = p; t < n_; ++t) {
      double v = eta_ * normal(rng);
      for (std::size_t k = 1; k <= p; ++k) v += phi_[k - 1] * out[t - k];
      out[t] = v;
    }
    if (accepted(out)) return;
  }
  throw Infeasible("type-class sampler accepted no sequence in " + std::to_string(max_attempts_) +
                   " attempts; increase epsilon or the block length");
}

std::vector<double> sample_codeword(const CodebookSpec& spec, double p_x, std::size_t n, std::mt19937_64& rng) {
  std::vector<double> x(n);
  CodewordSampler(spec, p_x, n).sample(rng, x);
  return x;
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) noexcept {
  const auto mix = [](std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  };
  return mix(seed ^ mix(trial));
}

std::pair<double, double> wilson_interval(std::size_t errors, std::size_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double t = static_cast<double>(trials);
  const double p = static_cast<double>(errors) / t;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / t;
  const double center = (p + z2 / (2.0 * t)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / t + z2 / (4.0 * t * t)) / denom;
  return {std::clamp(std::min(center - half, p), 0.0, 1.0), std::clamp(std::max(center + half, p), 0.0, 1.0)};
}

// ---------------------------------------------------------------------------

namespace {

void transmit(const Channel& channel, std::span<const double> x, std::mt19937_64& rng, std::span<double> y) {
  std::normal_distribution<double> normal;
  const double sigma = std::sqrt(channel.noise_var);
  for (std::size_t t = 0; t < x.size(); ++t) {
    double v = 0.0;
    for (std::size_t k = 0; k < channel.taps.size() && k <= t; ++k) v += channel.taps[k] * x[t - k];
    y[t] = v + sigma * normal(rng);
  }
}

/// -sum_t (y_t - sum_k alpha_k x_{t-k})^2 with zero prefix.
double metric_score(std::span<const double> alpha, std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    double v = y[t];
    for (std::size_t k = 0; k < alpha.size() && k <= t; ++k) v -= alpha[k] * x[t - k];
    s -= v * v;
  }
  return s;
}

double glrt_score(std::span<const double> x, std::span<const double> y) {
  return std::abs(std::inner_product(x.begin(), x.end(), y.begin(), 0.0));
}

struct TrialContext {
  const SimConfig& config;
  const Channel& channel;
  const CodewordSampler& sampler;
  double codewords;
};

bool exhaustive_trial(const TrialContext& ctx, std::mt19937_64& rng) {
  const std::size_t n = ctx.config.n;
  std::vector<double> x(n), y(n), c(n);
  ctx.sampler.sample(rng, x);
  transmit(ctx.channel, x, rng, y);
  const bool glrt = ctx.config.decoder == DecoderKind::glrt;
  const auto score = [&](std::span<const double> cw) {
    return glrt ? glrt_score(cw, y) : metric_score(ctx.config.alpha, cw, y);
  };
  const double truth = score(x);
  const auto m = static_cast<std::uint64_t>(ctx.codewords);
  for (std::uint64_t i = 1; i < m; ++i) {
    ctx.sampler.sample(rng, c);
    if (score(c) >= truth) return true;  // ties count as errors
  }
  return false;
}

bool order_statistic_trial(const TrialContext& ctx, std::mt19937_64& rng) {
  const std::size_t n = ctx.config.n;
  std::vector<double> x(n), y(n);
  ctx.sampler.sample(rng, x);
  transmit(ctx.channel, x, rng, y);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  const double u = uniform(rng);
  if (ctx.codewords <= 1.0) return false;

  const double xy = std::inner_product(x.begin(), x.end(), y.begin(), 0.0);
  const double xx = std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
  const double yy = std::inner_product(y.begin(), y.end(), y.begin(), 0.0);
  const double c1 = std::clamp(xy / std::sqrt(xx * yy), -1.0, 1.0);

  // A competitor's normalized correlation C with y satisfies C^2 ~ Beta(1/2, (n-1)/2), C symmetric.
  const double b = 0.5 * static_cast<double>(n - 1);
  const auto upper_tail = [&](double c) {  // P(C >= c)
    const double half = 0.5 * boost::math::ibetac(0.5, b, c * c);
    return c >= 0.0 ? half : 1.0 - half;
  };
  double s = 0.0;  // probability that one competitor scores at least as well as the truth
  if (ctx.config.decoder == DecoderKind::glrt) {
    s = boost::math::ibetac(0.5, b, c1 * c1);
  } else {
    const double a0 = ctx.config.alpha[0];
    if (a0 == 0.0) return true;
    s = a0 > 0.0 ? upper_tail(c1) : upper_tail(-c1);
  }
  if (s >= 1.0) return true;
  const double p_error = -std::expm1((ctx.codewords - 1.0) * std::log1p(-s));
  return u < p_error;
}

}  // namespace

SimResult simulate_error_prob(const SimConfig& config, const Channel& channel) {
  const auto start = std::chrono::steady_clock::now();
  channel.validate();
  config.validate();

  const CodewordSampler sampler(config.codebook, channel.input_power, config.n, config.max_attempts);
  const bool fast = config.mode == DecodeMode::order_statistic ||
                    (config.mode == DecodeMode::automatic && order_statistic_applicable(config));
  const TrialContext ctx{config, channel, sampler, config.codewords()};

  std::vector<unsigned char> errors(config.trials, 0);
  parallel_for(
      config.trials,
      [&](std::size_t trial) {
        std::mt19937_64 rng(trial_seed(config.seed, trial));
        errors[trial] = fast ? order_statistic_trial(ctx, rng) : exhaustive_trial(ctx, rng);
      },
      config.threads);

  SimResult r;
  r.errors = static_cast<std::size_t>(std::count(errors.begin(), errors.end(), 1));
  r.trials = config.trials;
  r.seed = config.seed;
  r.codewords = ctx.codewords;
  r.decode_path = fast ? DecodeMode::order_statistic : DecodeMode::exhaustive;
  r.error_prob = static_cast<double>(r.errors) / static_cast<double>(r.trials);
  std::tie(r.ci_low, r.ci_high) = wilson_interval(r.errors, r.trials);
  r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace isimm
