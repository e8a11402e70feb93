#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "isimm/error.hpp"
#include "isimm/rates.hpp"
#include "isimm/reference.hpp"
#include "oracles.hpp"

using namespace isimm;

namespace {

const double kHalfLog2 = 0.5 * std::log(2.0);
const double kR = 1.0 / std::numbers::sqrt2;

Channel fig2_channel() { return {{kR, kR}, 1.0, 1.0}; }

double fd_derivative(const std::function<double(double)>& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

}  // namespace

TEST_SUITE("rates") {

TEST_CASE("autoregressive bound, fixed phi") {
  const Channel awgn{{1.0}, 1.0, 1.0};
  auto r = rate_ar_fixed(awgn, Metric{{1.0}}, {});
  CHECK(r.rate == doctest::Approx(kHalfLog2).epsilon(1e-9));
  CHECK(r.rate == doctest::Approx(oracle::gmi_numeric(1.0, 1.0, 1.0, 1.0)).epsilon(1e-7));

  r = rate_ar_fixed(awgn, Metric{{-1.0}}, {});
  CHECK(r.rate == 0.0);
  CHECK(r.raw_rate <= 0.0);

  for (double a : {0.3, 0.8, 1.7, 3.0}) {
    r = rate_ar_fixed(awgn, Metric{{a}}, {});
    CHECK(std::abs(r.rate - oracle::gmi_numeric(1.0, 1.0, a, 1.0)) < 1e-6);
  }
  CHECK_THROWS_AS(rate_ar_fixed(awgn, Metric{{1.0}}, {1.5}), InvalidInput);
}

TEST_CASE("matched autoregressive bound equals the Gaussian mutual information") {
  const auto ch = fig2_channel();
  const Metric matched{{kR, kR}};
  for (double phi : {-0.4, 0.0, 0.3, 0.6}) {
    const auto r = rate_ar_fixed(ch, matched, {phi});
    CHECK(std::abs(r.rate - oracle::gaussian_mi(ch.taps, 1.0, {phi}, 1.0)) < 1e-7);
  }
  const auto best = rate_ar_opt(ch, matched, 1);
  const double mi = oracle::best_ar1_mi(ch.taps, 1.0, 1.0);
  CHECK(std::abs(best.rate - mi) < 1e-6);
  CHECK(best.rate <= 0.374);
  CHECK(best.rate <= matched_capacity(ch).capacity + 1e-4);

  // stationarity of the outer maximum
  const double phi_star = best.outer_argmax.at(0);
  CHECK(std::abs(phi_star) < 0.99);
  const auto f = [&](double phi) { return rate_ar_fixed(ch, matched, {phi}).raw_rate; };
  CHECK(std::abs(fd_derivative(f, phi_star, 1e-4)) < 1e-4);
}

TEST_CASE("inner first-order conditions") {
  const auto ch = fig2_channel();
  const Metric met{{kR, 0.4}};
  const ArRateProblem ar(ch, met, {0.3});
  const auto r = rate_ar_fixed(ch, met, {0.3});
  REQUIRE(r.status == OptStatus::converged);
  const double w = r.inner_argmin.at(0);
  CHECK(w > 0.0);
  CHECK(std::abs(fd_derivative([&](double x) { return ar.objective(x); }, w, 1e-6 * std::max(1.0, w))) < 1e-5);

  const Autocov gamma{{1.0, 0.25}};
  const FcRateProblem fc(ch, met, gamma);
  const auto q = rate_fc_fixed(ch, met, gamma);
  REQUIRE(q.status == OptStatus::converged);
  const auto g = central_gradient([&](std::span<const double> x) { return fc.objective(x); }, q.inner_argmin);
  double norm = 0.0;
  for (double v : g) norm += v * v;
  CHECK(std::sqrt(norm) < 1e-5);
}

TEST_CASE("fixed-composition bound") {
  const Channel awgn{{1.0}, 1.0, 1.0};
  for (double a : {0.25, 0.5, 1.0, 2.0, 4.0})
    CHECK(rate_fc_fixed(awgn, Metric{{a}}, Autocov{{1.0}}).rate == doctest::Approx(kHalfLog2).epsilon(1e-6));
  CHECK(rate_fc_fixed(awgn, Metric{{-1.0}}, Autocov{{1.0}}).rate == 0.0);
  CHECK_THROWS_AS(rate_fc_fixed(awgn, Metric{{1.0}}, Autocov{{2.0}}), InvalidInput);
  CHECK_THROWS_AS(rate_fc_fixed(fig2_channel(), Metric{{1.0, 0.2}}, Autocov{{1.0, 1.2}}), InvalidInput);

  // flat in alpha0 over a 20-point grid
  double lo = 1e9, hi = -1e9;
  for (double a : linspace(0.2, 3.0, 20)) {
    const double r = rate_fc_fixed(awgn, Metric{{a}}, Autocov{{1.0}}).rate;
    lo = std::min(lo, r), hi = std::max(hi, r);
  }
  CHECK(hi - lo < 1e-3);

  CHECK(rate_fc_opt(awgn, Metric{{2.0}}, 0).rate == rate_fc_fixed(awgn, Metric{{2.0}}, Autocov{{1.0}}).rate);
  CHECK(rate_ar_opt(awgn, Metric{{2.0}}, 0).rate == rate_ar_fixed(awgn, Metric{{2.0}}, {}).rate);
}

TEST_CASE("matched fixed-composition bound equals the AR(1) mutual information") {
  const auto ch = fig2_channel();
  const auto r = rate_fc_opt(ch, Metric{{kR, kR}}, 1);
  CHECK(std::abs(r.rate - oracle::best_ar1_mi(ch.taps, 1.0, 1.0)) < 1e-5);
  CHECK(r.rate <= matched_capacity(ch).capacity + 1e-4);
}

TEST_CASE("universal rate") {
  CHECK(rate_universal(Channel{{2.0}, 1.0, 1.0}).rate == doctest::Approx(0.5 * std::log(5.0)));
  CHECK(rate_universal(Channel{{1.0, 1.0}, 1.0, 1.0}).rate == doctest::Approx(0.5 * std::log(1.5)).epsilon(1e-12));

  // equals the best memoryless fixed-composition rate
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 2; ++trial) {
    const Channel ch{{0.5 + std::abs(u(rng)), u(rng), u(rng)}, 1.0, 1.0};
    double best = 0.0;
    for (double a : linspace(0.05, 3.0, 60)) best = std::max(best, rate_fc_fixed(ch, Metric{{a}}, Autocov{{1.0}}).rate);
    CHECK(std::abs(best - rate_universal(ch).rate) < 1e-4);
  }
}

TEST_CASE("monotone in order and below capacity") {
  const auto ch = fig2_channel();
  for (double a1 : {0.2, 0.9}) {
    const Metric met{{kR, a1}};
    const double cap = matched_capacity(ch).capacity;
    const auto ar0 = rate_ar_opt(ch, met, 0), ar1 = rate_ar_opt(ch, met, 1);
    const auto fc0 = rate_fc_opt(ch, met, 0), fc1 = rate_fc_opt(ch, met, 1);
    CHECK(ar1.rate >= ar0.rate - 1e-6);
    CHECK(fc1.rate >= fc0.rate - 1e-6);
    for (double r : {ar0.rate, ar1.rate, fc0.rate, fc1.rate}) CHECK(r <= cap + 1e-4);
  }
}

TEST_CASE("quadrature doubling") {
  const auto ch = fig2_channel();
  const Metric met{{kR, 0.5}};
  RateOptions coarse, fine;
  fine.quadrature.points = 2 * coarse.quadrature.points;
  CHECK(std::abs(rate_ar_fixed(ch, met, {0.3}, coarse).rate - rate_ar_fixed(ch, met, {0.3}, fine).rate) < 1e-6);
  const Autocov g{{1.0, 0.3}};
  CHECK(std::abs(rate_fc_fixed(ch, met, g, coarse).rate - rate_fc_fixed(ch, met, g, fine).rate) < 1e-6);
}

TEST_CASE("ensemble and axis names") {
  CHECK(EnsembleSpec::parse("iid").kind == EnsembleKind::autoregressive);
  CHECK(EnsembleSpec::parse("iid").order == 0);
  CHECK(EnsembleSpec::parse("fc2").kind == EnsembleKind::fixed_composition);
  CHECK(EnsembleSpec::parse("fc2").order == 2);
  CHECK(EnsembleSpec::parse("ar1").name() == "ar1");
  CHECK_THROWS_AS(EnsembleSpec::parse("ar12"), InvalidInput);
  CHECK_THROWS_AS(EnsembleSpec::parse("xyz"), InvalidInput);
  CHECK(SweepAxis::parse("alpha1").index == 1);
  CHECK(SweepAxis::parse("sigma2").target == SweepAxis::Target::sigma2);
  CHECK_THROWS_AS(SweepAxis::parse("beta"), InvalidInput);
}

TEST_CASE("sweeps record per-point failures and stay ordered") {
  const Channel awgn{{1.0}, 1.0, 1.0};
  const auto axis = SweepAxis::parse("alpha0");
  const std::vector<double> grid{0.0, 0.5, 1.0};
  const std::vector<EnsembleSpec> ens{EnsembleSpec::parse("iid"), EnsembleSpec::parse("fc0")};
  const auto rows = sweep_rates(awgn, Metric{{1.0}}, axis, grid, ens);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].value == 0.0);
  CHECK(rows[1].ensemble == "fc0");
  CHECK_FALSE(rows[0].result.has_value());
  CHECK_FALSE(rows[0].error.empty());
  CHECK(rows[5].result->rate == doctest::Approx(kHalfLog2).epsilon(1e-6));

  const auto csv = sweep_csv(axis, rows);
  CHECK(csv.rfind("alpha0,ensemble,rate,status\n", 0) == 0);
  CHECK(csv == sweep_csv(axis, sweep_rates(awgn, Metric{{1.0}}, axis, grid, ens)));
  CHECK(csv.find("0.5,fc0,0.3465735903,converged") != std::string::npos);
}

}  // TEST_SUITE
