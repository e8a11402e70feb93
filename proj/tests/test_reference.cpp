#include <doctest.h>

#include <Eigen/LU>
#include <cmath>
#include <numbers>
#include <random>

#include "isimm/error.hpp"
#include "isimm/reference.hpp"
#include "oracles.hpp"

using namespace isimm;

TEST_SUITE("reference") {

TEST_CASE("water-filling capacity") {
  const auto flat = matched_capacity(Channel{{1.0}, 1.0, 1.0});
  CHECK(flat.capacity == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-10));
  CHECK(flat.allocated_power == doctest::Approx(1.0).epsilon(1e-9));

  const double r = 1.0 / std::numbers::sqrt2;
  const auto c2 = matched_capacity(Channel{{r, r}, 1.0, 1.0});
  CHECK(std::abs(c2.capacity - 0.374) < 5e-4);
  CHECK(c2.allocated_power == doctest::Approx(1.0).epsilon(1e-9));
  const auto c3 = matched_capacity(Channel{{2 / std::sqrt(5.0), 1 / std::sqrt(5.0)}, 1.0, 1.0});
  CHECK(std::abs(c3.capacity - 0.3625) < 5e-4);

  // direct water-filling with an independent bisection on the level
  const std::vector<double> h{0.9, -0.5, 0.3};
  const auto power = [&](double theta) {
    return oracle::mean_over_circle([&](double nu) { return std::max(0.0, theta - 0.5 / std::norm(oracle::dtft(h, nu))); }, 4096);
  };
  double lo = 0.0, hi = 100.0;
  for (int i = 0; i < 200; ++i) (power(0.5 * (lo + hi)) < 2.0 ? lo : hi) = 0.5 * (lo + hi);
  const double theta = 0.5 * (lo + hi);
  const double cap = 0.5 * oracle::mean_over_circle([&](double nu) {
    const double g = std::norm(oracle::dtft(h, nu));
    return std::log(1.0 + std::max(0.0, theta - 0.5 / g) * g / 0.5);
  }, 4096);
  const auto ours = matched_capacity(Channel{h, 0.5, 2.0});
  CHECK(ours.capacity == doctest::Approx(cap).epsilon(1e-9));
  CHECK(ours.water_level == doctest::Approx(theta).epsilon(1e-8));
}

TEST_CASE("capacity invariances") {
  const std::vector<double> h{0.9, -0.5, 0.3};
  const double c = matched_capacity(Channel{h, 1.0, 1.0}).capacity;
  CHECK(std::abs(matched_capacity(Channel{{-0.9, 0.5, -0.3}, 1.0, 1.0}).capacity - c) < 1e-10);
  CHECK(std::abs(matched_capacity(Channel{{0.3, -0.5, 0.9}, 1.0, 1.0}).capacity - c) < 1e-10);
}

TEST_CASE("i.i.d. Gaussian GMI") {
  CHECK(gmi_iid_gaussian(1.0, 1.0, 1.0, 1.0) == doctest::Approx(0.5 * std::log(2.0)).epsilon(1e-12));
  CHECK(gmi_iid_gaussian(2.0, 0.5, 2.0, 3.0) == doctest::Approx(0.5 * std::log(1 + 4 * 3 / 0.5)).epsilon(1e-12));
  CHECK(gmi_iid_gaussian(1.0, 1.0, 1e6, 1.0) < 1e-5);
  CHECK(gmi_iid_gaussian(1.0, 1.0, -1.0, 1.0) == 0.0);

  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.05, 3.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double h0 = u(rng), n = u(rng), a = u(rng), p = u(rng);
    CHECK(std::abs(gmi_iid_gaussian(h0, n, a, p) - oracle::gmi_numeric(h0, n, a, p)) < 1e-7);
    CHECK(gmi_iid_gaussian(h0, n, a, p) <= 0.5 * std::log(1 + h0 * h0 * p / n) + 1e-12);
  }

  // unique maximum at the matched coefficient
  double best = -1.0, arg = 0.0;
  for (int i = 1; i <= 300; ++i) {
    const double a = i / 100.0;
    const double v = gmi_iid_gaussian(1.0, 1.0, a, 1.0);
    if (v > best) best = v, arg = a;
  }
  CHECK(arg == doctest::Approx(1.0));
  CHECK(gmi_iid_gaussian(1.0, 1.0, 0.99, 1.0) < best);
  CHECK(gmi_iid_gaussian(1.0, 1.0, 1.01, 1.0) < best);
}

TEST_CASE("bivariate Gaussian divergence") {
  const Eigen::Matrix2d a = test_covariance(1.0, 2.0, 0.3);
  CHECK(std::abs(kl_gaussian_bivariate(a, a)) < 1e-12);
  CHECK(std::abs(kl_gaussian_bivariate(test_covariance(1.0, 2.0, 1 / std::sqrt(2.0)), channel_covariance(1.0, 1.0, 1.0))) < 1e-12);

  Eigen::Matrix2d bad;
  bad << 1.0, 2.0, 2.0, 1.0;
  CHECK_THROWS_AS(kl_gaussian_bivariate(bad, a), InvalidInput);
  CHECK_THROWS_AS(kl_gaussian_bivariate(a, bad), InvalidInput);

  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> py(0.1, 5.0), rho(-0.99, 0.99), h(-2.0, 2.0), s(0.2, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double p_y = py(rng), r = rho(rng), h0 = h(rng), px = s(rng), s2 = s(rng);
    const double general = kl_gaussian_bivariate(test_covariance(px, p_y, r), channel_covariance(h0, px, s2));
    CHECK(general >= 0.0);
    CHECK(std::abs(general - kl_single_tap(p_y, r, h0, px, s2)) < 1e-10);
    // trace/log-det form written out for 2x2
    const Eigen::Matrix2d q = test_covariance(px, p_y, r), p = channel_covariance(h0, px, s2);
    const double manual = 0.5 * ((p.inverse() * q).trace() - 2.0 + std::log(p.determinant() / q.determinant()));
    CHECK(std::abs(general - manual) < 1e-10);
  }
}

}  // TEST_SUITE
