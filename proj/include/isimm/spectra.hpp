#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace isimm {

/// Uniform periodic grid used for every (1/2pi) * integral over [0, 2pi).
struct QuadratureOptions {
  std::size_t points = 4096;  // power of two, >= 8
};

/// Values below this floor are treated as zero when a logarithm is needed.
inline constexpr double kLogFloor = 1e-300;

/// sum_k taps[k] e^{-jk nu}
std::complex<double> freq_response(std::span<const double> taps, double nu);

/// Phi(nu) = sum_{k=1}^p phi_k e^{-jk nu}, i.e. freq_response of (0, phi_1, ..., phi_p).
std::complex<double> ar_response(std::span<const double> phi, double nu);

/// Input and output power spectral densities of an AR(p) input through the ISI channel:
///   S_X(nu) = eta2 / |1 - Phi(nu)|^2,   S_Y(nu) = |H(nu)|^2 S_X(nu) + sigma2.
class SpectralDensities {
 public:
  /// Throws InvalidInput if phi is not strictly stable or a variance is not positive.
  SpectralDensities(std::vector<double> h, double sigma2, double eta2, std::vector<double> phi);

  double input(double nu) const;
  double output(double nu) const;

 private:
  std::vector<double> h_;
  double sigma2_;
  double eta2_;
  std::vector<double> phi_;
};

/// f_omega(nu) = (omega/2)|A(nu)|^2 + |1 - Phi(nu)|^2 / (2 eta2).
double integrand_f(double omega, std::span<const double> alpha, std::span<const double> phi,
                   double eta2, double nu);

/// g_omega(nu) = sum_{k=0}^p omega_k cos(k nu) + omega_{p+1} sum_{k=1+min(p,K)}^K Pi_k(alpha) cos(k nu).
/// `omega` has p+2 entries.
double integrand_g(std::span<const double> omega, std::span<const double> alpha, std::size_t p,
                   double nu);

/// Exponent integrand
///   u(nu) = (1/(2 sigma2) + w2) (w0 + |H(nu)|^2 / (2 sigma2)) - |w1 - H(nu)/sigma2|^2 / 4,
/// the symbol of the quadratic form whose log-determinant gives the divergence term.
/// Feasibility additionally needs 1/(2 sigma2) + w2 > 0; see `exponents.hpp`.
double integrand_u(const std::array<double, 3>& omega_hat, std::span<const double> h,
                   double sigma2, double nu);

/// nu_i = 2 pi i / n, i = 0..n-1.
std::vector<double> periodic_grid(std::size_t n);

/// Trapezoidal rule on the uniform periodic grid, normalized by 1/(2 pi).
/// Throws InvalidInput for a bad point count and Infeasible on a non-finite sample.
double integrate_periodic(const std::function<double(double)>& f, std::size_t n_points);

/// Same rule applied to samples already taken on `periodic_grid(samples.size())`.
double periodic_mean(std::span<const double> samples);

void require_valid_point_count(std::size_t n_points);

}  // namespace isimm
