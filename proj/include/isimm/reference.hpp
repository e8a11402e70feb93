#pragma once

#include <cstddef>

#include <Eigen/Core>

#include "isimm/model.hpp"
#include "isimm/spectra.hpp"

namespace isimm {

struct CapacityResult {
  double capacity = 0.0;     // nats per channel use
  double water_level = 0.0;  // theta
  double allocated_power = 0.0;  // (1/2pi) int p(nu) dnu at the returned water level
  std::size_t quadrature_points = 0;
};

/// Water-filling capacity of the matched Gaussian ISI channel:
///   p(nu) = [theta - sigma2/|H|^2]_+,  C = 1/2 <log(1 + p |H|^2 / sigma2)>.
CapacityResult matched_capacity(const Channel& channel, const QuadratureOptions& quad = {});

/// Generalized mutual information of the i.i.d. Gaussian ensemble N(0, p_x) on y = h0 x + w,
/// Var w = noise, decoded with the scaled metric -(y - alpha0 x)^2. Closed form; see
/// docs/gmi_derivation.md.
double gmi_iid_gaussian(double h0, double noise, double alpha0, double p_x);

/// D(N(0, sigma_q) || N(0, sigma_p)) for 2x2 covariances. Throws InvalidInput unless both are PD.
double kl_gaussian_bivariate(const Eigen::Matrix2d& sigma_q, const Eigen::Matrix2d& sigma_p);

/// Covariance of (X, Y) with Var X = p_x, Var Y = p_y, correlation rho.
Eigen::Matrix2d test_covariance(double p_x, double p_y, double rho);

/// Covariance of (X, h0 X + W) with Var X = p_x, Var W = sigma2.
Eigen::Matrix2d channel_covariance(double h0, double p_x, double sigma2);

/// The same divergence written out for the single-tap case:
///   -1/2 log((1 - rho^2) P_Y / sigma2) + (P_Y - 2 h0 rho sqrt(P_X P_Y) + h0^2 P_X) / (2 sigma2) - 1/2.
double kl_single_tap(double p_y, double rho, double h0, double p_x, double sigma2);

}  // namespace isimm
