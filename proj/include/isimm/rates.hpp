#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "isimm/armodel.hpp"
#include "isimm/model.hpp"
#include "isimm/optimize.hpp"
#include "isimm/spectra.hpp"

namespace isimm {

/// Largest ensemble order accepted by the optimized bounds.
inline constexpr std::size_t kMaxEnsembleOrder = 8;

struct RateOptions {
  QuadratureOptions quadrature{};
  ScalarOptions scalar{};
  VectorOptions vector{};
  OuterOptions outer{};
};

/// Achievable-rate bound in nats per channel use.
struct RateResult {
  double rate = 0.0;      // max(0, raw_rate)
  double raw_rate = 0.0;  // unclamped value of the bound
  std::vector<double> inner_argmin;
  std::vector<double> outer_argmax;  // phi_1..phi_p or gamma_1..gamma_p when optimized
  std::size_t quadrature_points = 0;
  OptStatus status = OptStatus::converged;        // inner solve
  OptStatus outer_status = OptStatus::converged;  // outer search (converged for fixed evaluations)
};

/// Inner problem of the autoregressive-ensemble bound for one fixed phi:
///   I1 = 1/2 log(2 eta2) - min_{w >= 0} J(w),
///   J(w) = -1/2 <log f_w> + w^2/4 <S_Y |A|^2 / f_w> - w L.
/// <.> is the normalized periodic mean.
class ArRateProblem {
 public:
  ArRateProblem(const Channel& channel, const Metric& metric, std::vector<double> phi,
                const QuadratureOptions& quad = {});

  double objective(double omega) const;
  double derivative(double omega) const;
  double linear_term() const noexcept { return linear_; }
  double eta2() const noexcept { return eta2_; }
  const std::vector<double>& autocov() const noexcept { return gamma_; }
  std::size_t points() const noexcept { return a2_.size(); }

 private:
  std::vector<double> a2_;     // |A|^2
  std::vector<double> base_;   // |1 - Phi|^2 / (2 eta2)
  std::vector<double> sya2_;   // S_Y |A|^2
  std::vector<double> gamma_;  // gamma_0..gamma_K
  double eta2_ = 1.0;
  double linear_ = 0.0;
};

/// Inner problem of the fixed-composition bound for one fixed gamma_0..gamma_p:
///   I2 = 1/2 log(2 e eta2) - min_{w in W} J2(w),  w = (w_0..w_p, w_{p+1}).
class FcRateProblem {
 public:
  FcRateProblem(const Channel& channel, const Metric& metric, const Autocov& gamma,
                const QuadratureOptions& quad = {});

  std::size_t dimension() const noexcept { return p_ + 2; }
  std::size_t order() const noexcept { return p_; }
  double objective(std::span<const double> omega) const;
  void gradient(std::span<const double> omega, std::span<double> grad) const;
  /// Linear constraints describing W: all components >= 0 and the diagonal-dominance row.
  std::vector<LinearConstraint> constraints() const;
  std::vector<double> interior_point() const;
  double linear_term() const noexcept { return linear_; }
  double eta2() const noexcept { return eta2_; }
  std::size_t points() const noexcept { return w_.size(); }

 private:
  double g_at(std::span<const double> omega, std::size_t i) const;

  std::size_t p_ = 0;
  std::size_t n_ = 0;
  std::vector<double> cos_;    // cos(k nu_i), row-major [k][i], k = 0..p
  std::vector<double> tail_;   // sum_{k > min(p,K)} Pi_k(alpha) cos(k nu)
  std::vector<double> w_;      // S_Y |A|^2
  std::vector<double> gamma_;  // gamma_0..gamma_max(p,K)
  double tail_bound_ = 0.0;    // sum |Pi_m(alpha)| over the tail lags
  double eta2_ = 1.0;
  double linear_ = 0.0;
};

RateResult rate_ar_fixed(const Channel& channel, const Metric& metric, const std::vector<double>& phi,
                         const RateOptions& options = {});
RateResult rate_ar_opt(const Channel& channel, const Metric& metric, std::size_t p,
                       const RateOptions& options = {});

/// gamma holds gamma_0..gamma_p with gamma_0 = P_X.
RateResult rate_fc_fixed(const Channel& channel, const Metric& metric, const Autocov& gamma,
                         const RateOptions& options = {});
RateResult rate_fc_opt(const Channel& channel, const Metric& metric, std::size_t p,
                       const RateOptions& options = {});

/// GLRT rate 1/2 log(1 + h0^2 P / ((|h|^2 - h0^2) P + sigma2)).
RateResult rate_universal(const Channel& channel);

/// Largest |phi_k| over the stable region, used as the outer search box.
double ar_coefficient_bound(std::size_t p, std::size_t k);

// ---------------------------------------------------------------------------
// Sweeps

enum class EnsembleKind { autoregressive, fixed_composition };

struct EnsembleSpec {
  EnsembleKind kind = EnsembleKind::autoregressive;
  std::size_t order = 0;

  /// "iid", "arN", "fcN".
  static EnsembleSpec parse(const std::string& name);
  std::string name() const;
};

/// Which coefficient a sweep varies: alpha_k, h_k, sigma2 or px.
struct SweepAxis {
  enum class Target { alpha, h, sigma2, px } target = Target::alpha;
  std::size_t index = 0;

  static SweepAxis parse(const std::string& name);
  std::string name() const;
  void apply(Channel& channel, Metric& metric, double value) const;
};

struct SweepRow {
  double value = 0.0;
  std::string ensemble;
  std::optional<RateResult> result;
  std::string error;  // set when result is empty

  std::string status() const;
};

/// One row per (grid value, ensemble), grid-major. Per-point failures are recorded and the
/// sweep continues.
std::vector<SweepRow> sweep_rates(const Channel& channel, const Metric& metric, const SweepAxis& axis,
                                  const std::vector<double>& grid,
                                  const std::vector<EnsembleSpec>& ensembles,
                                  const RateOptions& options = {});

/// Header "<axis>,ensemble,rate,status"; numbers with 10 significant digits.
std::string sweep_csv(const SweepAxis& axis, const std::vector<SweepRow>& rows, double scale = 1.0);

/// n evenly spaced values from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, std::size_t n);

}  // namespace isimm
