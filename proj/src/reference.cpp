#include "isimm/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "isimm/error.hpp"

namespace isimm {

CapacityResult matched_capacity(const Channel& channel, const QuadratureOptions& quad) {
  channel.validate();
  if (!(channel.energy() > 0.0)) throw InvalidInput("channel taps must not all be zero");
  require_valid_point_count(quad.points);

  const std::size_t n = quad.points;
  const double s2 = channel.noise_var;
  const double px = channel.input_power;
  const auto nu = periodic_grid(n);
  std::vector<double> floor_level(n);  // sigma2 / |H|^2, +inf at spectral nulls
  for (std::size_t i = 0; i < n; ++i) {
    const double g = std::norm(freq_response(channel.taps, nu[i]));
    floor_level[i] = g > 0.0 ? s2 / g : std::numeric_limits<double>::infinity();
  }
  const auto allocated = [&](double theta) {
    double sum = 0.0;
    for (double f : floor_level) sum += std::max(0.0, theta - f);
    return sum / static_cast<double>(n);
  };

  double lo = 0.0;
  double hi = px + *std::min_element(floor_level.begin(), floor_level.end());
  while (allocated(hi) < px) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (allocated(mid) < px ? lo : hi) = mid;
  }
  const double theta = 0.5 * (lo + hi);

  double sum = 0.0;
  for (double f : floor_level) sum += std::log(std::max(1.0, theta / f));
  CapacityResult out;
  out.capacity = 0.5 * sum / static_cast<double>(n);
  out.water_level = theta;
  out.allocated_power = allocated(theta);
  out.quadrature_points = n;
  return out;
}

double gmi_iid_gaussian(double h0, double noise, double alpha0, double p_x) {
  if (!(noise > 0.0)) throw InvalidInput("effective noise must be positive");
  if (!(p_x > 0.0)) throw InvalidInput("input power must be positive");
  if (!(h0 * alpha0 > 0.0)) return 0.0;
  const double a2p = alpha0 * alpha0 * p_x;
  const double d = (h0 - alpha0) * (h0 - alpha0) * p_x + noise;  // E (Y - alpha0 X)^2
  const double e = h0 * h0 * p_x + noise;                        // E Y^2
  const double z = (a2p + std::sqrt(a2p * a2p + 4.0 * d * e)) / (2.0 * d);
  return 0.5 * std::log(z) + (z - 1.0) / (2.0 * a2p) * (e / z - d);
}

double kl_gaussian_bivariate(const Eigen::Matrix2d& sigma_q, const Eigen::Matrix2d& sigma_p) {
  const auto pd = [](const Eigen::Matrix2d& m) {
    return m.allFinite() && std::abs(m(0, 1) - m(1, 0)) <= 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff()) &&
           m.llt().info() == Eigen::Success && m.determinant() > 0.0;
  };
  if (!pd(sigma_q) || !pd(sigma_p)) throw InvalidInput("covariance matrices must be symmetric positive definite");
  const double trace = (sigma_p.inverse() * sigma_q).trace();
  return 0.5 * (trace - 2.0 + std::log(sigma_p.determinant() / sigma_q.determinant()));
}

Eigen::Matrix2d test_covariance(double p_x, double p_y, double rho) {
  const double c = rho * std::sqrt(p_x * p_y);
  Eigen::Matrix2d m;
  m << p_x, c, c, p_y;
  return m;
}

Eigen::Matrix2d channel_covariance(double h0, double p_x, double sigma2) {
  Eigen::Matrix2d m;
  m << p_x, h0 * p_x, h0 * p_x, h0 * h0 * p_x + sigma2;
  return m;
}

double kl_single_tap(double p_y, double rho, double h0, double p_x, double sigma2) {
  return -0.5 * std::log((1.0 - rho * rho) * p_y / sigma2) +
         (p_y - 2.0 * h0 * rho * std::sqrt(p_x * p_y) + h0 * h0 * p_x) / (2.0 * sigma2) - 0.5;
}

}  // namespace isimm
