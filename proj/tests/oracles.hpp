#pragma once

// Independent reference computations used only by the tests.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

namespace oracle {

/// Stable AR coefficients from reflection coefficients |k_i| < 1 via the step-up recursion.
inline std::vector<double> step_up(const std::vector<double>& k) {
  std::vector<double> a;
  for (double ki : k) {
    std::vector<double> next(a.size() + 1);
    for (std::size_t j = 0; j < a.size(); ++j) next[j] = a[j] - ki * a[a.size() - 1 - j];
    next[a.size()] = ki;
    a = next;
  }
  return a;
}

inline std::vector<double> random_stable_phi(std::mt19937_64& rng, std::size_t p, double max_k = 0.9) {
  std::uniform_real_distribution<double> u(-max_k, max_k);
  std::vector<double> k(p);
  for (double& v : k) v = u(rng);
  return step_up(k);
}

/// Normalized trapezoid on n equispaced nodes, written out independently of the library.
template <class F>
double mean_over_circle(F f, int n = 8192) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += f(2.0 * std::numbers::pi * i / n);
  return s / n;
}

inline std::complex<double> dtft(const std::vector<double>& taps, double nu, int first_index = 0) {
  std::complex<double> s = 0.0;
  for (std::size_t k = 0; k < taps.size(); ++k)
    s += taps[k] * std::exp(std::complex<double>(0.0, -(double(k) + first_index) * nu));
  return s;
}

/// Mutual information of a Gaussian input with spectrum S_X through the ISI channel.
inline double gaussian_mi(const std::vector<double>& h, double sigma2, const std::vector<double>& phi, double px) {
  const double inv = mean_over_circle([&](double nu) { return 1.0 / std::norm(1.0 - dtft(phi, nu, 1)); });
  const double eta2 = px / inv;
  return 0.5 * mean_over_circle([&](double nu) {
    const double sx = eta2 / std::norm(1.0 - dtft(phi, nu, 1));
    return std::log(1.0 + std::norm(dtft(h, nu)) * sx / sigma2);
  });
}

/// Best AR(1) mutual information by a dense scan plus local golden refinement.
inline double best_ar1_mi(const std::vector<double>& h, double sigma2, double px) {
  double best_phi = 0.0, best = -1.0;
  for (int i = -99; i <= 99; ++i) {
    const double phi = i / 100.0;
    const double v = gaussian_mi(h, sigma2, {phi}, px);
    if (v > best) best = v, best_phi = phi;
  }
  double lo = best_phi - 0.01, hi = best_phi + 0.01;
  for (int it = 0; it < 60; ++it) {
    const double a = hi - 0.618 * (hi - lo), b = lo + 0.618 * (hi - lo);
    if (gaussian_mi(h, sigma2, {a}, px) > gaussian_mi(h, sigma2, {b}, px)) hi = b;
    else lo = a;
  }
  return gaussian_mi(h, sigma2, {0.5 * (lo + hi)}, px);
}

/// i.i.d. Gaussian GMI as sup_s of the Gaussian-integral objective, maximized numerically.
inline double gmi_numeric(double h0, double noise, double alpha0, double px) {
  const double d = (h0 - alpha0) * (h0 - alpha0) * px + noise;
  const double e = h0 * h0 * px + noise;
  const auto obj = [&](double s) {
    const double c = 1.0 + 2.0 * s * alpha0 * alpha0 * px;
    return -s * d + 0.5 * std::log(c) + s * e / c;
  };
  double best = 0.0, best_s = 0.0;
  for (int i = 1; i <= 20000; ++i) {
    const double s = i * 1e-3;
    if (obj(s) > best) best = obj(s), best_s = s;
  }
  double lo = std::max(0.0, best_s - 1e-3), hi = best_s + 1e-3;
  for (int it = 0; it < 100; ++it) {
    const double a = hi - 0.618 * (hi - lo), b = lo + 0.618 * (hi - lo);
    if (obj(a) > obj(b)) hi = b;
    else lo = a;
  }
  return std::max(best, obj(0.5 * (lo + hi)));
}

}  // namespace oracle
