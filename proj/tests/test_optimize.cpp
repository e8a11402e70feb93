#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "isimm/armodel.hpp"
#include "isimm/optimize.hpp"
#include "isimm/rates.hpp"

using namespace isimm;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_SUITE("optimize") {

TEST_CASE("scalar convex minimization") {
  auto r = minimize_scalar_convex([](double w) { return std::exp(w) - w; }, 0.0, {0.0, 1.0});
  CHECK(r.status == OptStatus::boundary);
  CHECK(r.x[0] == doctest::Approx(0.0));
  CHECK(r.value == doctest::Approx(1.0));

  r = minimize_scalar_convex([](double w) { return w <= 0 ? kInf : w + 1.0 / w; }, 0.0, {0.0, 1.0});
  CHECK(r.status == OptStatus::converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-12));

  r = minimize_scalar_convex([](double) { return kInf; }, 0.0, {0.0, 1.0});
  CHECK(r.status == OptStatus::infeasible);

  // far minimizer found through bracket expansion
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> a(0.1, 10.0), m(0.0, 50.0);
  for (int trial = 0; trial < 30; ++trial) {
    const double aa = a(rng), mm = m(rng);
    r = minimize_scalar_convex([&](double w) { return aa * (w - mm) * (w - mm); }, 0.0, {0.0, 1.0});
    CHECK(std::abs(r.x[0] - mm) < 1e-8 * std::max(1.0, mm));
  }
}

TEST_CASE("barrier BFGS on linear constraints") {
  ConvexProblem p;
  p.objective = [](std::span<const double> x) { return (x[0] - 1) * (x[0] - 1) + (x[1] - 2) * (x[1] - 2); };
  p.start = {0.0, 0.0};
  auto r = minimize_vector_convex(p);
  CHECK(r.status == OptStatus::converged);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(2.0).epsilon(1e-6));

  // cone x0 >= x1 >= 0, unconstrained minimizer outside
  ConvexProblem cone;
  cone.objective = [](std::span<const double> x) { return (x[0] + 1) * (x[0] + 1) + (x[1] + 1) * (x[1] + 1); };
  cone.constraints = {{{0.0, 1.0}, 0.0}, {{1.0, -1.0}, 0.0}};
  cone.start = {2.0, 1.0};
  r = minimize_vector_convex(cone);
  CHECK(r.status == OptStatus::boundary);
  CHECK(std::abs(r.x[0]) < 1e-5);
  CHECK(std::abs(r.x[1]) < 1e-5);

  cone.start = {-1.0, 1.0};
  CHECK(minimize_vector_convex(cone).status == OptStatus::infeasible);

  // random convex quadratics on the positive orthant; the KKT point is known in closed form
  std::mt19937_64 rng(8);
  std::normal_distribution<double> z(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t d = 2 + trial % 3;
    std::vector<double> c(d), scale(d);
    for (std::size_t i = 0; i < d; ++i) c[i] = z(rng), scale[i] = 0.5 + std::abs(z(rng));
    ConvexProblem q;
    q.objective = [=](std::span<const double> x) {
      double s = 0;
      for (std::size_t i = 0; i < d; ++i) s += scale[i] * (x[i] - c[i]) * (x[i] - c[i]);
      return s;
    };
    for (std::size_t i = 0; i < d; ++i) {
      std::vector<double> a(d, 0.0);
      a[i] = 1.0;
      q.constraints.push_back({a, 0.0});
    }
    q.start.assign(d, 1.0);
    r = minimize_vector_convex(q);
    double best = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      const double xi = std::max(0.0, c[i]);
      best += scale[i] * (xi - c[i]) * (xi - c[i]);
    }
    INFO("excess " << r.value - best << " status " << to_string(r.status));
    CHECK(r.value <= best + 1e-8);
    CHECK(r.value >= best - 1e-12);
  }
}

TEST_CASE("fixed-composition inner problem against a 40^4 grid scan") {
  const Channel ch{{0.8, 0.4, 0.3, 0.2}, 1.0, 1.0};
  const Metric met{{0.7, 0.5, 0.2, 0.1}};
  const QuadratureOptions quad{256};
  const FcRateProblem prob(ch, met, Autocov{{1.0, 0.3, 0.1}}, quad);
  REQUIRE(prob.dimension() == 4);

  ConvexProblem cp;
  cp.objective = [&](std::span<const double> x) { return prob.objective(x); };
  cp.gradient = [&](std::span<const double> x, std::span<double> g) { prob.gradient(x, g); };
  cp.constraints = prob.constraints();
  cp.start = prob.interior_point();
  const auto r = minimize_vector_convex(cp);
  REQUIRE(r.status != OptStatus::infeasible);

  const int n = 40;
  std::vector<double> lo(4), step(4);
  for (int i = 0; i < 4; ++i) {
    const double half = 0.25 * (1.0 + std::abs(r.x[i]));
    lo[i] = std::max(0.0, r.x[i] - half);
    step[i] = (r.x[i] + half - lo[i]) / (n - 1);
  }
  double grid_min = kInf;
  std::vector<double> x(4);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int e = 0; e < n; ++e) {
          x = {lo[0] + a * step[0], lo[1] + b * step[1], lo[2] + c * step[2], lo[3] + e * step[3]};
          bool inside = true;
          for (const auto& con : cp.constraints) inside = inside && con.slack(x) >= 0.0;
          if (!inside) continue;
          const double v = prob.objective(x);
          if (std::isfinite(v)) grid_min = std::min(grid_min, v);
        }
  REQUIRE(std::isfinite(grid_min));
  CHECK(r.value <= grid_min + 1e-8);
  CHECK(grid_min - r.value < 1e-3);
}

TEST_CASE("finite-difference gradient") {
  const VectorFunction f = [](std::span<const double> x) { return x[0] * x[0] + 3 * x[0] * x[1]; };
  const std::vector<double> x{1.0, 2.0};
  const auto g = central_gradient(f, x);
  CHECK(g[0] == doctest::Approx(8.0).epsilon(1e-6));
  CHECK(g[1] == doctest::Approx(3.0).epsilon(1e-6));

  const VectorFunction edge = [](std::span<const double> x) { return x[0] < 0 ? kInf : x[0] * x[0] + x[0]; };
  const std::vector<double> at{0.0};
  CHECK(central_gradient(edge, at)[0] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("Nelder-Mead") {
  const VectorFunction rosen = [](std::span<const double> x) {
    return 100 * (x[1] - x[0] * x[0]) * (x[1] - x[0] * x[0]) + (1 - x[0]) * (1 - x[0]);
  };
  const std::vector<double> scale{0.5, 0.5};
  const auto r = nelder_mead(rosen, {-1.2, 1.0}, scale, {1e-10, 1e-16, 10000});
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("outer maximization") {
  const auto yes = [](std::span<const double>) { return true; };
  const Box box{{-1.0}, {1.0}};
  auto r = maximize_outer([](std::span<const double> x) { return -(x[0] - 0.3) * (x[0] - 0.3); }, yes, box);
  CHECK(r.x[0] == doctest::Approx(0.3).epsilon(1e-6));

  // two equal maxima: the lower grid index wins and repeated runs agree
  const VectorFunction twin = [](std::span<const double> x) { return -(x[0] * x[0] - 0.25) * (x[0] * x[0] - 0.25); };
  const auto a = maximize_outer(twin, yes, box, {41, 5000, {}, 1});
  const auto b = maximize_outer(twin, yes, box, {41, 5000, {}, 1});
  CHECK(a.x[0] == doctest::Approx(-0.5).epsilon(1e-5));
  CHECK(a.x == b.x);
  CHECK(a.value == b.value);

  r = maximize_outer(twin, [](std::span<const double>) { return false; }, box);
  CHECK(r.status == OptStatus::infeasible);

  OuterOptions opts;
  opts.grid_points = 41;
  opts.max_grid_evaluations = 5000;
  CHECK(grid_points_per_axis(1, opts) == 41);
  CHECK(grid_points_per_axis(2, opts) == 41);
  CHECK(grid_points_per_axis(3, opts) == 17);
}

}  // TEST_SUITE
