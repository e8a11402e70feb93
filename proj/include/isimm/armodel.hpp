#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "isimm/spectra.hpp"

namespace isimm {

/// Roots of z^p - sum phi_i z^{p-i} must lie inside |z| < 1 - kStabilityMargin.
inline constexpr double kStabilityMargin = 1e-9;

/// AR(p) input process X_t = sum_i phi_i X_{t-i} + eta Z_t.
struct ArParams {
  std::vector<double> phi;  // phi_1..phi_p
  double eta2 = 1.0;        // innovation variance
  double p_x = 1.0;         // stationary power E X_t^2

  std::size_t order() const noexcept { return phi.size(); }
};

/// Autocovariances gamma_0..gamma_m of a stationary process (gamma_{-k} = gamma_k).
struct Autocov {
  std::vector<double> gamma;

  std::size_t order() const noexcept { return gamma.empty() ? 0 : gamma.size() - 1; }
};

struct StabilityVerdict {
  bool stable = false;
  double spectral_radius = 0.0;
  std::string detail;
};

struct DefinitenessVerdict {
  bool positive_definite = false;
  std::size_t failing_minor = 0;  // size of the first non-PD leading minor, 0 if PD
  std::string detail;
};

StabilityVerdict validate_ar_coefficients(std::span<const double> phi);
DefinitenessVerdict validate_autocov(std::span<const double> gamma);

/// Throws InvalidInput with the verdict's detail when phi is not strictly stable.
void require_stable(std::span<const double> phi);

/// eta^2 = P_X / [(1/2pi) int dnu / |1 - Phi(nu)|^2], evaluated by periodic quadrature.
double eta_squared(std::span<const double> phi, double p_x, const QuadratureOptions& quad = {});

/// Stable phi with eta2 chosen so that the stationary power is p_x.
ArParams make_ar_params(std::vector<double> phi, double p_x, const QuadratureOptions& quad = {});

/// Solves the Yule-Walker system for gamma_0..gamma_p, then extends with
/// gamma_m = sum_k phi_k gamma_{m-k} up to lag m_max.
Autocov autocov_from_ar(const ArParams& params, std::size_t m_max);

/// Extends gamma beyond its last lag with the recursion of the AR model it implies.
Autocov extend_autocov(const Autocov& gamma, std::size_t m_max);

/// Levinson-Durbin. Throws InvalidInput naming the failing leading minor for non-PD input.
ArParams ar_from_autocov(const Autocov& gamma);

/// Reflection (partial correlation) coefficients from Levinson-Durbin.
std::vector<double> reflection_coefficients(const Autocov& gamma);

/// max_m |gamma_m - sum_k phi_k gamma_{m-k} - eta2 delta_m| over the lags present in gamma.
double yule_walker_residual(const ArParams& params, const Autocov& gamma);

}  // namespace isimm
