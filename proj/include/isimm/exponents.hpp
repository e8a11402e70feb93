#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "isimm/model.hpp"
#include "isimm/optimize.hpp"
#include "isimm/spectra.hpp"

namespace isimm {

struct ExponentOptions {
  QuadratureOptions quadrature{};
  VectorOptions vector{};
  std::size_t grid_points = 21;  // per axis of the (P_Y, rho) grid
  NelderMeadOptions refine{1e-7, 1e-12, 600};
  double py_max = 0.0;            // 0 selects 4 (|h|^2 P_X + sigma2)
  double py_min_fraction = 1e-3;  // lower edge of the P_Y box relative to py_max
  double rho_margin = 1e-6;       // |rho| <= 1 - rho_margin
  double u_margin = 1e-9;         // feasibility requires u > u_margin on the grid
  std::size_t max_widenings = 4;  // P_Y box growth when the minimizer hits the upper edge
  std::size_t threads = 0;
};

struct ExponentResult {
  double exponent = 0.0;      // max(0, raw_exponent)
  double raw_exponent = 0.0;
  double rate = 0.0;
  double p_y = 0.0;           // outer minimizer
  double rho = 0.0;
  std::array<double, 3> omega_hat{};  // inner maximizer at (p_y, rho)
  double divergence = 0.0;    // max over omega_hat of V at (p_y, rho)
  double information = 0.0;   // I(rho) term before subtracting the rate
  double py_max = 0.0;        // final upper edge of the P_Y box
  std::size_t quadrature_points = 0;
  OptStatus status = OptStatus::converged;
};

struct InnerMaximum {
  double value = 0.0;
  std::array<double, 3> omega_hat{};
  OptStatus status = OptStatus::converged;
};

/// V(w, P_Y, rho) = 1/2 <log(4 e P_X sigma2 u_w)> - w0 P_X - w1 rho sqrt(P_X P_Y) - w2 P_Y
/// for the memoryless-metric exponent, with u_w from `integrand_u`.
class ExponentObjective {
 public:
  ExponentObjective(const Channel& channel, const QuadratureOptions& quad = {}, double u_margin = 1e-9);

  /// -inf when w is outside the feasible set.
  double value(const std::array<double, 3>& w, double p_y, double rho) const;
  void gradient(const std::array<double, 3>& w, double p_y, double rho, std::span<double> grad) const;
  bool feasible(const std::array<double, 3>& w) const;

  /// max over feasible w of V at fixed (P_Y, rho).
  InnerMaximum maximize(double p_y, double rho, const VectorOptions& options = {}) const;

  /// Closed-form maximizer for a single-tap channel; a feasible start point otherwise.
  std::array<double, 3> start(double p_y, double rho) const;

  const Channel& channel() const noexcept { return channel_; }
  std::size_t points() const noexcept { return points_; }

 private:
  Channel channel_;
  std::vector<double> re_h_;    // Re H / sigma2
  std::vector<double> abs_h2_;  // |H|^2 / sigma2
  std::size_t points_ = 0;
  double u_margin_ = 1e-9;
};

double objective_v(const std::array<double, 3>& omega_hat, double p_y, double rho, const Channel& channel,
                   const QuadratureOptions& quad = {});

/// -(|sgn h0 + sgn alpha0| / 4) log(1 - rho^2); +inf for |rho| >= 1 when the signs agree.
double mismatch_info(double rho, double h0, double alpha0);

/// -1/2 log(1 - rho^2).
double universal_info(double rho);

/// Random-coding exponent of the spherical ensemble with memoryless metric alpha0.
ExponentResult error_exponent(const Channel& channel, double alpha0, double rate,
                              const ExponentOptions& options = {});

/// Exponent of the GLRT decoder max |<x, y>|.
ExponentResult error_exponent_universal(const Channel& channel, double rate,
                                        const ExponentOptions& options = {});

/// Exponent at each rate; reuses the outer grid across rates. alpha0 = nullopt selects GLRT.
std::vector<ExponentResult> exponent_curve(const Channel& channel, std::optional<double> alpha0,
                                           const std::vector<double>& rates,
                                           const ExponentOptions& options = {});

/// Header "rate,exponent,p_y,rho,status"; 10 significant digits.
std::string exponent_csv(const std::vector<ExponentResult>& rows, double scale = 1.0);

}  // namespace isimm
