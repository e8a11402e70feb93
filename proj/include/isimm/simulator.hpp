#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "isimm/model.hpp"

namespace isimm {

enum class CodebookKind { iid, autoregressive, type_class };

struct CodebookSpec {
  CodebookKind kind = CodebookKind::type_class;
  std::vector<double> phi;        // autoregressive: phi_1..phi_p
  std::vector<double> gamma;      // type class: gamma_1..gamma_p (gamma_0 = P_X); empty = sphere
  double epsilon_fraction = 0.05; // type class tolerance as a fraction of P_X

  /// "iid", "ar", "sphere" or "typeclass".
  static CodebookKind parse_kind(const std::string& name);
  std::string kind_name() const;
};

enum class DecoderKind { metric, glrt };
enum class DecodeMode { automatic, exhaustive, order_statistic };

DecoderKind parse_decoder(const std::string& name);
DecodeMode parse_decode_mode(const std::string& name);
const char* to_string(DecoderKind kind) noexcept;
const char* to_string(DecodeMode mode) noexcept;

struct SimConfig {
  std::size_t n = 32;   // block length
  double rate = 0.1;    // nats per channel use
  CodebookSpec codebook{};
  DecoderKind decoder = DecoderKind::metric;
  std::vector<double> alpha{1.0};  // metric taps (decoder = metric)
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  DecodeMode mode = DecodeMode::automatic;
  std::size_t threads = 0;
  double max_codewords = 1048576.0;    // guard for exhaustive decoding
  std::size_t max_attempts = 100000;   // type-class rejection sampling budget per codeword

  /// M = ceil(e^{nR}).
  double codewords() const;
  void validate() const;
};

struct SimResult {
  double error_prob = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t errors = 0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double codewords = 0.0;
  DecodeMode decode_path = DecodeMode::exhaustive;
  double wall_time = 0.0;  // seconds
};

/// Draws codewords of length n for a fixed ensemble and input power.
class CodewordSampler {
 public:
  CodewordSampler(const CodebookSpec& spec, double p_x, std::size_t n, std::size_t max_attempts = 100000);

  void sample(std::mt19937_64& rng, std::span<double> out) const;
  std::size_t length() const noexcept { return n_; }

 private:
  bool accepted(std::span<const double> x) const;

  CodebookSpec spec_;
  double p_x_;
  std::size_t n_;
  std::size_t max_attempts_;
  std::vector<double> phi_;
  double eta_ = 1.0;
  std::vector<double> gamma_;   // gamma_0..gamma_p
  std::vector<double> chol_;    // lower Cholesky factor of the p x p Toeplitz block, row-major
};

std::vector<double> sample_codeword(const CodebookSpec& spec, double p_x, std::size_t n, std::mt19937_64& rng);

/// Stream seed for trial `trial`, independent of evaluation order.
std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) noexcept;

/// Wilson score interval at normal quantile z.
std::pair<double, double> wilson_interval(std::size_t errors, std::size_t trials, double z = 1.959963984540054);

/// True when the sphere ensemble and a memoryless metric (or GLRT) allow sampling the
/// competitor maximum from its exact distribution instead of enumerating the codebook.
bool order_statistic_applicable(const SimConfig& config);

SimResult simulate_error_prob(const SimConfig& config, const Channel& channel);

}  // namespace isimm
