#include "isimm/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "isimm/error.hpp"
#include "isimm/parallel.hpp"

namespace isimm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.6180339887498949;  // (sqrt(5) - 1) / 2

double sanitize(double v) { return std::isnan(v) ? kInf : v; }

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

const char* to_string(OptStatus status) noexcept {
  switch (status) {
    case OptStatus::converged:
      return "converged";
    case OptStatus::boundary:
      return "boundary";
    case OptStatus::infeasible:
      return "infeasible";
    case OptStatus::max_iterations:
      return "max-iterations";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------

OptResult minimize_scalar_convex(const std::function<double(double)>& f, double lower,
                                 std::pair<double, double> initial_bracket,
                                 const ScalarOptions& options) {
  OptResult out;
  std::size_t evals = 0;
  const auto eval = [&](double x) {
    ++evals;
    return sanitize(f(x));
  };

  double a = std::max(lower, initial_bracket.first);
  double b = std::max(initial_bracket.second, a + options.tolerance);
  double fa = eval(a);
  double fb = eval(b);
  double lo = lower;
  double hi = b;
  bool expanded_out = false;

  if (fb < fa) {
    // Walk downhill until the function turns up again.
    double c = b + (b - a) / kGolden;
    double fc = eval(c);
    std::size_t steps = 0;
    while (fc < fb && steps < options.max_iterations) {
      a = b;
      fa = fb;
      b = c;
      fb = fc;
      c = b + (b - a) / kGolden;
      fc = eval(c);
      ++steps;
    }
    expanded_out = fc < fb;
    lo = a;
    hi = c;
  } else if (!std::isfinite(fa) && !std::isfinite(fb)) {
    // Could be an interior window of feasibility left of b; scan down toward lower.
    lo = lower;
    hi = b;
  }

  double x1 = hi - kGolden * (hi - lo);
  double x2 = lo + kGolden * (hi - lo);
  double f1 = eval(x1);
  double f2 = eval(x2);
  std::size_t iter = 0;
  while (hi - lo > options.tolerance && iter < options.max_iterations) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - kGolden * (hi - lo);
      f1 = eval(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + kGolden * (hi - lo);
      f2 = eval(x2);
    }
    ++iter;
  }

  double best_x = f1 <= f2 ? x1 : x2;
  double best_f = std::min(f1, f2);
  const double f_lower = eval(lower);
  out.status = OptStatus::converged;
  if (f_lower <= best_f && best_x - lower <= 10.0 * options.tolerance) {
    best_x = lower;
    best_f = f_lower;
    out.status = OptStatus::boundary;
  }
  if (!std::isfinite(best_f)) out.status = OptStatus::infeasible;
  if (expanded_out || iter >= options.max_iterations) out.status = OptStatus::max_iterations;
  out.x = {best_x};
  out.value = best_f;
  out.iterations = evals;
  out.tolerance_achieved = hi - lo;
  return out;
}

// ---------------------------------------------------------------------------

double LinearConstraint::slack(std::span<const double> x) const {
  return std::inner_product(a.begin(), a.end(), x.begin(), b);
}

std::vector<double> central_gradient(const VectorFunction& f, std::span<const double> x,
                                     double rel_step) {
  std::vector<double> probe(x.begin(), x.end());
  std::vector<double> grad(x.size());
  const double f0 = sanitize(f(x));
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = rel_step * std::max(1.0, std::abs(x[i]));
    probe[i] = x[i] + h;
    const double fp = sanitize(f(probe));
    probe[i] = x[i] - h;
    const double fm = sanitize(f(probe));
    probe[i] = x[i];
    if (std::isfinite(fp) && std::isfinite(fm))
      grad[i] = (fp - fm) / (2.0 * h);
    else if (std::isfinite(fp))
      grad[i] = (fp - f0) / h;
    else if (std::isfinite(fm))
      grad[i] = (f0 - fm) / h;
    else
      grad[i] = std::numeric_limits<double>::quiet_NaN();
  }
  return grad;
}

namespace {

struct BfgsOutcome {
  std::vector<double> x;
  double value;
  std::size_t iterations;
  bool hit_limit;
  double grad_norm;
};

// Minimizes f(x) - mu sum log slack(x) from x. The barrier curvature enters the Newton system
// exactly; BFGS only models the Hessian of f.
BfgsOutcome bfgs(const VectorFunction& f, const GradientFunction& grad,
                 const std::vector<LinearConstraint>& constraints, double mu, std::vector<double> x,
                 const VectorOptions& opt) {
  const std::size_t d = x.size();
  using Vec = Eigen::VectorXd;
  using Mat = Eigen::MatrixXd;
  const auto total = [&](std::span<const double> z) {
    double v = sanitize(f(z));
    for (const auto& c : constraints) {
      const double sl = c.slack(z);
      if (!(sl > 0.0)) return kInf;
      v -= mu * std::log(sl);
    }
    return v;
  };
  const auto obj_grad = [&](std::span<const double> z) {
    Vec g(d);
    grad(z, std::span<double>(g.data(), d));
    return g;
  };
  const auto full_grad = [&](std::span<const double> z, const Vec& g_obj) {
    Vec g = g_obj;
    for (const auto& c : constraints) {
      const double sl = c.slack(z);
      for (std::size_t i = 0; i < d; ++i) g(i) -= mu * c.a[i] / sl;
    }
    return g;
  };
  const auto barrier_hessian = [&](std::span<const double> z) {
    Mat h = Mat::Zero(d, d);
    for (const auto& c : constraints) {
      const double sl = c.slack(z);
      const Eigen::Map<const Vec> a(c.a.data(), d);
      h.noalias() += (mu / (sl * sl)) * a * a.transpose();
    }
    return h;
  };

  Mat B = Mat::Identity(d, d);
  bool scaled = false;
  double fx = total(x);
  Vec g_obj = obj_grad(x);
  Vec g = full_grad(x, g_obj);
  std::vector<double> x_new(d);
  std::size_t iter = 0;
  for (; iter < opt.max_iterations; ++iter) {
    const double gnorm = g.cwiseAbs().maxCoeff();
    if (!std::isfinite(gnorm)) break;
    if (gnorm <= opt.gradient_tolerance * (1.0 + std::abs(fx))) break;

    Vec dir;
    Eigen::LLT<Mat> llt(B + barrier_hessian(x));
    if (llt.info() == Eigen::Success) dir = -llt.solve(g);
    double slope = dir.size() == static_cast<Eigen::Index>(d) ? dir.dot(g) : 0.0;
    if (!(slope < 0.0) || !dir.allFinite()) {
      B = Mat::Identity(d, d);
      scaled = false;
      dir = -g;
      slope = -g.squaredNorm();
    }

    double t = 1.0;
    for (const auto& c : constraints) {
      double rate = 0.0;
      for (std::size_t i = 0; i < d; ++i) rate += c.a[i] * dir(i);
      if (rate < 0.0) t = std::min(t, 0.99 * c.slack(x) / -rate);
    }
    const bool capped = t < 1.0;

    double f_new = kInf;
    bool accepted = false;
    for (int k = 0; k < 80; ++k) {
      for (std::size_t i = 0; i < d; ++i) x_new[i] = x[i] + t * dir(i);
      f_new = total(x_new);
      if (f_new <= fx + 1e-4 * t * slope) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;

    const Vec g_obj_new = obj_grad(x_new);
    Vec step(d);
    for (std::size_t i = 0; i < d; ++i) step(i) = x_new[i] - x[i];
    const Vec y = g_obj_new - g_obj;
    const double sy = step.dot(y);
    if (sy > 1e-300 && std::isfinite(sy)) {
      if (!scaled) {
        B = Mat::Identity(d, d) * (y.squaredNorm() / sy);
        scaled = true;
      }
      const Vec Bs = B * step;
      const double sBs = step.dot(Bs);
      if (sBs > 0.0) B += y * y.transpose() / sy - Bs * Bs.transpose() / sBs;
    }

    const double change = std::abs(fx - f_new);
    const double moved = t * dir.cwiseAbs().maxCoeff();
    x.assign(x_new.begin(), x_new.end());
    g_obj = g_obj_new;
    g = full_grad(x, g_obj);
    fx = f_new;
    // Near the optimum the objective is flat to rounding; stop once steps stop paying off.
    if (!capped && change <= opt.value_tolerance * 1e-3 * std::max(1.0, std::abs(fx)) &&
        g.cwiseAbs().maxCoeff() <= 1e3 * opt.gradient_tolerance * (1.0 + std::abs(fx)))
      break;
    if (!capped && moved <= 1e-15 * (1.0 + inf_norm(x))) break;
  }
  return {std::move(x), fx, iter, iter >= opt.max_iterations, g.cwiseAbs().maxCoeff()};
}

}  // namespace

OptResult minimize_vector_convex(const ConvexProblem& problem, const VectorOptions& options) {
  OptResult out;
  const std::size_t d = problem.start.size();
  if (d == 0 || d > 10) throw InvalidInput("minimize_vector_convex supports 1..10 variables");
  for (const auto& c : problem.constraints)
    if (c.a.size() != d) throw InvalidInput("constraint dimension mismatch");

  out.x = problem.start;
  const auto min_slack = [&](std::span<const double> x) {
    double m = kInf;
    for (const auto& c : problem.constraints) m = std::min(m, c.slack(x));
    return m;
  };
  if (!(min_slack(out.x) > 0.0) || !std::isfinite(sanitize(problem.objective(out.x)))) {
    out.status = OptStatus::infeasible;
    out.value = kInf;
    return out;
  }

  const auto objective_gradient = [&](std::span<const double> x, std::span<double> g) {
    if (problem.gradient) {
      problem.gradient(x, g);
    } else {
      const auto fd = central_gradient(problem.objective, x, options.fd_step);
      std::copy(fd.begin(), fd.end(), g.begin());
    }
  };

  std::size_t total_iter = 0;
  bool hit_limit = false;
  double grad_norm = 0.0;
  if (problem.constraints.empty()) {
    auto r = bfgs(problem.objective, objective_gradient, {}, 0.0, out.x, options);
    out.x = std::move(r.x);
    total_iter = r.iterations;
    hit_limit = r.hit_limit;
    grad_norm = r.grad_norm;
  } else {
    for (double mu = options.barrier_initial;; mu *= options.barrier_shrink) {
      mu = std::max(mu, options.barrier_final);
      auto r = bfgs(problem.objective, objective_gradient, problem.constraints, mu, out.x, options);
      out.x = std::move(r.x);
      total_iter += r.iterations;
      hit_limit = hit_limit || r.hit_limit;
      grad_norm = r.grad_norm;
      if (mu <= options.barrier_final) break;
    }
  }

  out.value = sanitize(problem.objective(out.x));
  out.iterations = total_iter;
  out.tolerance_achieved = grad_norm;
  if (!std::isfinite(out.value))
    out.status = OptStatus::infeasible;
  else if (!problem.constraints.empty() && min_slack(out.x) < options.boundary_slack)
    out.status = OptStatus::boundary;
  else if (hit_limit)
    out.status = OptStatus::max_iterations;
  else
    out.status = OptStatus::converged;
  return out;
}

// ---------------------------------------------------------------------------

OptResult nelder_mead(const VectorFunction& f, std::vector<double> x0, std::span<const double> scale,
                      const NelderMeadOptions& options) {
  const std::size_t d = x0.size();
  OptResult out;
  std::size_t evals = 0;
  const auto eval = [&](std::span<const double> x) {
    ++evals;
    return sanitize(f(x));
  };

  std::vector<std::vector<double>> simplex(d + 1, x0);
  std::vector<double> values(d + 1);
  values[0] = eval(x0);
  for (std::size_t i = 0; i < d; ++i) {
    // Pick a feasible vertex along +e_i or -e_i, shrinking the step if needed.
    double step = scale[i];
    for (int k = 0; k < 40; ++k) {
      simplex[i + 1] = x0;
      simplex[i + 1][i] += step;
      values[i + 1] = eval(simplex[i + 1]);
      if (std::isfinite(values[i + 1])) break;
      simplex[i + 1][i] = x0[i] - step;
      values[i + 1] = eval(simplex[i + 1]);
      if (std::isfinite(values[i + 1])) break;
      step *= 0.5;
    }
  }

  std::vector<std::size_t> order(d + 1);
  std::vector<double> centroid(d), trial(d), trial2(d);
  bool converged = false;
  while (evals < options.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[d - 1];

    double diameter = 0.0;
    for (std::size_t v = 0; v <= d; ++v)
      for (std::size_t i = 0; i < d; ++i)
        diameter = std::max(diameter, std::abs(simplex[v][i] - simplex[best][i]));
    const double spread = values[worst] - values[best];
    if (diameter <= options.x_tolerance ||
        (std::isfinite(spread) && spread <= options.f_tolerance && diameter <= 1e3 * options.x_tolerance)) {
      converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t v = 0; v <= d; ++v)
      if (v != worst)
        for (std::size_t i = 0; i < d; ++i) centroid[i] += simplex[v][i] / static_cast<double>(d);

    const auto along = [&](double coef, std::vector<double>& dst) {
      for (std::size_t i = 0; i < d; ++i)
        dst[i] = centroid[i] + coef * (simplex[worst][i] - centroid[i]);
      return eval(dst);
    };

    const double fr = along(-1.0, trial);
    if (fr < values[best]) {
      const double fe = along(-2.0, trial2);
      if (fe < fr) {
        simplex[worst] = trial2;
        values[worst] = fe;
      } else {
        simplex[worst] = trial;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = trial;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const double fc = along(outside ? -0.5 : 0.5, trial2);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = trial2;
      values[worst] = fc;
      continue;
    }
    for (std::size_t v = 0; v <= d; ++v) {
      if (v == best) continue;
      for (std::size_t i = 0; i < d; ++i)
        simplex[v][i] = simplex[best][i] + 0.5 * (simplex[v][i] - simplex[best][i]);
      values[v] = eval(simplex[v]);
    }
  }

  const auto best_it = std::min_element(values.begin(), values.end());
  const auto best = static_cast<std::size_t>(best_it - values.begin());
  out.x = simplex[best];
  out.value = *best_it;
  out.iterations = evals;
  double diameter = 0.0;
  for (std::size_t v = 0; v <= d; ++v)
    for (std::size_t i = 0; i < d; ++i)
      diameter = std::max(diameter, std::abs(simplex[v][i] - simplex[best][i]));
  out.tolerance_achieved = diameter;
  if (!std::isfinite(out.value))
    out.status = OptStatus::infeasible;
  else
    out.status = converged ? OptStatus::converged : OptStatus::max_iterations;
  return out;
}

// ---------------------------------------------------------------------------

bool Box::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (!(x[i] >= lower[i] && x[i] <= upper[i])) return false;
  return true;
}

std::size_t grid_points_per_axis(std::size_t dimension, const OuterOptions& options) {
  if (dimension == 0) return 1;
  std::size_t m = std::max<std::size_t>(options.grid_points, 2);
  while (m > 3 && std::pow(static_cast<double>(m), static_cast<double>(dimension)) >
                      static_cast<double>(options.max_grid_evaluations))
    --m;
  return m;
}

OptResult maximize_outer(const VectorFunction& f,
                         const std::function<bool(std::span<const double>)>& feasible,
                         const Box& box, const OuterOptions& options) {
  const std::size_t d = box.dimension();
  if (box.upper.size() != d) throw InvalidInput("box bounds have different dimensions");
  const auto score = [&](std::span<const double> x) {
    if (!box.contains(x) || !feasible(x)) return -kInf;
    const double v = f(x);
    return std::isfinite(v) ? v : -kInf;
  };

  OptResult out;
  if (d == 0) {
    out.x = {};
    out.value = score(out.x);
    out.iterations = 1;
    out.status = std::isfinite(out.value) ? OptStatus::converged : OptStatus::infeasible;
    return out;
  }

  const std::size_t m = grid_points_per_axis(d, options);
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) total *= m;
  std::vector<double> step(d);
  for (std::size_t i = 0; i < d; ++i) step[i] = (box.upper[i] - box.lower[i]) / static_cast<double>(m - 1);
  const auto point = [&](std::size_t index) {
    std::vector<double> x(d);
    for (std::size_t i = 0; i < d; ++i) {
      x[i] = box.lower[i] + step[i] * static_cast<double>(index % m);
      index /= m;
    }
    return x;
  };

  std::vector<double> grid_values(total);
  parallel_for(total, [&](std::size_t idx) { grid_values[idx] = score(point(idx)); }, options.threads);

  std::size_t best = 0;
  for (std::size_t idx = 1; idx < total; ++idx)
    if (grid_values[idx] > grid_values[best]) best = idx;
  if (!std::isfinite(grid_values[best])) {
    out.status = OptStatus::infeasible;
    out.value = -kInf;
    out.iterations = total;
    return out;
  }

  std::vector<double> scale(d);
  for (std::size_t i = 0; i < d; ++i) scale[i] = 0.5 * step[i];
  const OptResult refined = nelder_mead(
      [&](std::span<const double> x) { return -score(x); }, point(best), scale, options.refine);

  if (std::isfinite(refined.value) && -refined.value >= grid_values[best]) {
    out.x = refined.x;
    out.value = -refined.value;
    out.status = refined.status;
    out.tolerance_achieved = refined.tolerance_achieved;
  } else {
    out.x = point(best);
    out.value = grid_values[best];
    out.status = OptStatus::converged;
    out.tolerance_achieved = *std::min_element(step.begin(), step.end());
  }
  out.iterations = total + refined.iterations;
  return out;
}

}  // namespace isimm
