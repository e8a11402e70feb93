#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "isimm/armodel.hpp"
#include "isimm/error.hpp"
#include "oracles.hpp"

using namespace isimm;

namespace {

// gamma_0..gamma_p for unit innovation variance from the (p+1)x(p+1) Yule-Walker system
Eigen::VectorXd yule_walker_dense(const std::vector<double>& phi) {
  const int p = static_cast<int>(phi.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p + 1, p + 1);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(p + 1);
  rhs(0) = 1.0;
  for (int i = 0; i <= p; ++i) {
    m(i, i) += 1.0;
    for (int k = 1; k <= p; ++k) m(i, std::abs(i - k)) -= phi[k - 1];
  }
  return m.fullPivLu().solve(rhs);
}

}  // namespace

TEST_SUITE("armodel") {

TEST_CASE("innovation variance") {
  CHECK(eta_squared({}, 2.0) == doctest::Approx(2.0));
  const std::vector<double> p1{0.5};
  CHECK(eta_squared(p1, 1.0) == doctest::Approx(0.75).epsilon(1e-12));
  const std::vector<double> p2{0.5, -0.3};
  const double g0 = yule_walker_dense(p2)(0);
  CHECK(g0 == doctest::Approx(1.3 / (0.7 * 1.44)).epsilon(1e-12));
  CHECK(eta_squared(p2, 1.0) == doctest::Approx(1.0 / g0).epsilon(1e-10));
  const std::vector<double> bad{1.2};
  CHECK_THROWS_AS(eta_squared(bad, 1.0), InvalidInput);
}

TEST_CASE("autocovariance of AR models") {
  const auto white = autocov_from_ar(make_ar_params({}, 1.5), 3);
  CHECK(white.gamma == std::vector<double>{1.5, 0.0, 0.0, 0.0});

  const auto ar1 = make_ar_params({0.5}, 1.0);
  const auto g = autocov_from_ar(ar1, 6);
  for (std::size_t m = 0; m <= 6; ++m) CHECK(g.gamma[m] == doctest::Approx(std::pow(0.5, m)).epsilon(1e-12));
  CHECK(yule_walker_residual(ar1, g) < 1e-10);

  const auto ar2 = make_ar_params({0.5, -0.3}, 1.0);
  const auto g2 = autocov_from_ar(ar2, 2);
  const Eigen::VectorXd dense = yule_walker_dense({0.5, -0.3}) / yule_walker_dense({0.5, -0.3})(0);
  for (int m = 0; m <= 2; ++m) CHECK(g2.gamma[m] == doctest::Approx(dense(m)).epsilon(1e-10));
}

TEST_CASE("sample autocovariance of a simulated AR(1)") {
  const double phi = 0.6;
  const auto params = make_ar_params({phi}, 1.0);
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> z(0.0, 1.0);
  const std::size_t n = 1000000;
  std::vector<double> x(n);
  double prev = z(rng);
  for (std::size_t t = 0; t < n; ++t) {
    prev = phi * prev + std::sqrt(params.eta2) * z(rng);
    x[t] = prev;
  }
  const auto g = autocov_from_ar(params, 3);
  for (std::size_t m = 0; m <= 3; ++m) {
    double s = 0.0;
    for (std::size_t t = m; t < n; ++t) s += x[t] * x[t - m];
    CHECK(std::abs(s / double(n - m) - g.gamma[m]) < 1e-2);
  }
}

TEST_CASE("Levinson-Durbin") {
  const auto white = ar_from_autocov({{1.0, 0.0, 0.0}});
  CHECK(std::abs(white.phi[0]) < 1e-15);
  CHECK(std::abs(white.phi[1]) < 1e-15);
  CHECK(white.eta2 == doctest::Approx(1.0));

  const auto ar1 = ar_from_autocov({{1.0, 0.5}});
  CHECK(ar1.phi[0] == doctest::Approx(0.5));
  CHECK(ar1.eta2 == doctest::Approx(0.75));

  try {
    ar_from_autocov({{1.0, 1.1}});
    FAIL("expected InvalidInput");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find('2') != std::string::npos);
  }

  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 40; ++trial) {
    const auto phi = oracle::random_stable_phi(rng, 1 + trial % 5, 0.9);
    const auto params = make_ar_params(phi, 1.0 + 0.1 * trial);
    const auto gamma = autocov_from_ar(params, phi.size());
    const auto back = ar_from_autocov(gamma);
    for (std::size_t k = 0; k < phi.size(); ++k) CHECK(back.phi[k] == doctest::Approx(phi[k]).epsilon(1e-9));
    CHECK(back.eta2 == doctest::Approx(params.eta2).epsilon(1e-9));
    for (double k : reflection_coefficients(gamma)) CHECK(std::abs(k) < 1.0);
    CHECK(validate_autocov(gamma.gamma).positive_definite);
  }
}

TEST_CASE("stability and definiteness verdicts") {
  const std::vector<double> s{0.5}, u{1.2}, s3{0.3, 0.2, 0.1}, u3{1.5, -0.2, 0.4};
  CHECK(validate_ar_coefficients(s).stable);
  CHECK_FALSE(validate_ar_coefficients(u).stable);
  CHECK(validate_ar_coefficients(s3).stable);
  CHECK_FALSE(validate_ar_coefficients(u3).stable);
  CHECK(validate_ar_coefficients({}).stable);
  CHECK_THROWS_AS(require_stable(u), InvalidInput);

  const std::vector<double> bad{1.0, 1.1};
  const auto v = validate_autocov(bad);
  CHECK_FALSE(v.positive_definite);
  CHECK(v.failing_minor == 2);
  const std::vector<double> bad3{1.0, 0.9, 0.1};
  CHECK(validate_autocov(bad3).failing_minor == 3);
}

TEST_CASE("spectrum integrates to the stationary power") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const auto phi = oracle::random_stable_phi(rng, 1 + trial % 4, 0.85);
    const auto params = make_ar_params(phi, 2.0);
    SpectralDensities s({1.0}, 1.0, params.eta2, phi);
    CHECK(integrate_periodic([&](double nu) { return s.input(nu); }, 4096) == doctest::Approx(2.0).epsilon(1e-8));
    const auto g = autocov_from_ar(params, 4);
    for (std::size_t m = 1; m <= 4; ++m) {
      const double wk = integrate_periodic([&](double nu) { return s.input(nu) * std::cos(double(m) * nu); }, 4096);
      CHECK(std::abs(wk - g.gamma[m]) < 1e-8);
    }
  }
}

}  // TEST_SUITE
