#include "isimm/spectra.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <utility>

#include "isimm/armodel.hpp"
#include "isimm/error.hpp"
#include "isimm/model.hpp"

namespace isimm {

std::complex<double> freq_response(std::span<const double> taps, double nu) {
  std::complex<double> sum = 0.0;
  for (std::size_t k = 0; k < taps.size(); ++k)
    sum += taps[k] * std::polar(1.0, -static_cast<double>(k) * nu);
  return sum;
}

std::complex<double> ar_response(std::span<const double> phi, double nu) {
  std::complex<double> sum = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k)
    sum += phi[k] * std::polar(1.0, -static_cast<double>(k + 1) * nu);
  return sum;
}

SpectralDensities::SpectralDensities(std::vector<double> h, double sigma2, double eta2,
                                     std::vector<double> phi)
    : h_(std::move(h)), sigma2_(sigma2), eta2_(eta2), phi_(std::move(phi)) {
  if (!(sigma2_ > 0.0)) throw InvalidInput("noise variance must be positive");
  if (!(eta2_ > 0.0)) throw InvalidInput("innovation variance must be positive");
  require_stable(phi_);
}

double SpectralDensities::input(double nu) const {
  return eta2_ / std::norm(1.0 - ar_response(phi_, nu));
}

double SpectralDensities::output(double nu) const {
  return std::norm(freq_response(h_, nu)) * input(nu) + sigma2_;
}

double integrand_f(double omega, std::span<const double> alpha, std::span<const double> phi,
                   double eta2, double nu) {
  const std::complex<double> Phi = ar_response(phi, nu);
  // 1 + |Phi|^2 - 2 Re Phi == |1 - Phi|^2
  const double bracket = 1.0 + std::norm(Phi) - 2.0 * Phi.real();
  return 0.5 * omega * std::norm(freq_response(alpha, nu)) + bracket / (2.0 * eta2);
}

double integrand_g(std::span<const double> omega, std::span<const double> alpha, std::size_t p,
                   double nu) {
  if (omega.size() != p + 2) throw InvalidInput("integrand_g expects p+2 multipliers");
  const std::size_t K = alpha.empty() ? 0 : alpha.size() - 1;
  double g = 0.0;
  for (std::size_t k = 0; k <= p; ++k) g += omega[k] * std::cos(static_cast<double>(k) * nu);
  double tail = 0.0;
  for (std::size_t k = 1 + std::min(p, K); k <= K; ++k)
    tail += lag_product(alpha, k) * std::cos(static_cast<double>(k) * nu);
  return g + omega[p + 1] * tail;
}

double integrand_u(const std::array<double, 3>& omega_hat, std::span<const double> h,
                   double sigma2, double nu) {
  const std::complex<double> H = freq_response(h, nu);
  const double lambda = 0.5 / sigma2 + omega_hat[2];
  return lambda * (omega_hat[0] + 0.5 * std::norm(H) / sigma2) - 0.25 * std::norm(omega_hat[1] - H / sigma2);
}

std::vector<double> periodic_grid(std::size_t n) {
  std::vector<double> nu(n);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) nu[i] = step * static_cast<double>(i);
  return nu;
}

void require_valid_point_count(std::size_t n_points) {
  if (n_points < 8 || (n_points & (n_points - 1)) != 0)
    throw InvalidInput("quadrature point count must be a power of two >= 8, got " +
                       std::to_string(n_points));
}

double integrate_periodic(const std::function<double(double)>& f, std::size_t n_points) {
  require_valid_point_count(n_points);
  const std::vector<double> nu = periodic_grid(n_points);
  double sum = 0.0;
  for (double v : nu) {
    const double s = f(v);
    if (!std::isfinite(s)) {
      std::ostringstream msg;
      msg << "non-finite integrand sample " << s << " at nu = " << v;
      throw Infeasible(msg.str());
    }
    sum += s;
  }
  return sum / static_cast<double>(n_points);
}

double periodic_mean(std::span<const double> samples) {
  double sum = 0.0;
  for (double s : samples) sum += s;
  return sum / static_cast<double>(samples.size());
}

}  // namespace isimm
