#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace isimm {

enum class OptStatus { converged, boundary, infeasible, max_iterations };

const char* to_string(OptStatus status) noexcept;

struct OptResult {
  std::vector<double> x;  // argmin or argmax, depending on the routine
  double value = 0.0;
  OptStatus status = OptStatus::infeasible;
  std::size_t iterations = 0;
  double tolerance_achieved = 0.0;
};

// ---------------------------------------------------------------------------
// 1-D convex minimization on [lower, inf)

struct ScalarOptions {
  double tolerance = 1e-8;  // final bracket width
  std::size_t max_iterations = 400;
};

/// Golden-section search after exponential bracket expansion from `initial_bracket`.
/// `f` may return +inf where it is undefined; those points count as "uphill".
/// Returns status boundary when the minimum sits at `lower`.
OptResult minimize_scalar_convex(const std::function<double(double)>& f, double lower,
                                 std::pair<double, double> initial_bracket,
                                 const ScalarOptions& options = {});

// ---------------------------------------------------------------------------
// Small-dimensional convex minimization

using VectorFunction = std::function<double(std::span<const double>)>;
using GradientFunction = std::function<void(std::span<const double>, std::span<double>)>;

/// a . x + b >= 0
struct LinearConstraint {
  std::vector<double> a;
  double b = 0.0;

  double slack(std::span<const double> x) const;
};

struct ConvexProblem {
  VectorFunction objective;  // +inf outside its natural domain
  GradientFunction gradient;  // optional; central differences when empty
  std::vector<LinearConstraint> constraints;
  std::vector<double> start;  // strictly feasible
};

struct VectorOptions {
  double value_tolerance = 1e-10;     // successive value change
  double gradient_tolerance = 1e-7;   // infinity norm, scaled by 1 + |f|
  double fd_step = 1e-6;              // relative central-difference step
  std::size_t max_iterations = 500;   // per barrier stage
  double barrier_initial = 1e-2;
  double barrier_final = 1e-12;
  double barrier_shrink = 0.1;
  double boundary_slack = 1e-6;       // slack below which a constraint counts as active
};

/// Quasi-Newton (BFGS) with a log-barrier on the linear constraints. Without constraints
/// a single BFGS solve is run. Status boundary means some constraint is active.
OptResult minimize_vector_convex(const ConvexProblem& problem, const VectorOptions& options = {});

/// Central differences with step rel_step * max(1, |x_i|); falls back to one-sided
/// differences where one neighbour is outside the domain (+inf).
std::vector<double> central_gradient(const VectorFunction& f, std::span<const double> x,
                                     double rel_step = 1e-6);

// ---------------------------------------------------------------------------
// Derivative-free search

struct NelderMeadOptions {
  double x_tolerance = 1e-9;
  double f_tolerance = 1e-12;
  std::size_t max_evaluations = 4000;
};

/// Minimizes f starting from a simplex x0 + scale_i e_i. +inf marks infeasible points.
OptResult nelder_mead(const VectorFunction& f, std::vector<double> x0, std::span<const double> scale,
                      const NelderMeadOptions& options = {});

struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  std::size_t dimension() const noexcept { return lower.size(); }
  bool contains(std::span<const double> x) const;
};

struct OuterOptions {
  std::size_t grid_points = 41;             // per axis
  std::size_t max_grid_evaluations = 5000;  // caps grid_points^d for larger d
  NelderMeadOptions refine{};
  std::size_t threads = 0;                  // 0 = default_thread_count()
};

/// Grid points per axis actually used for a d-dimensional box.
std::size_t grid_points_per_axis(std::size_t dimension, const OuterOptions& options);

/// Coarse grid over `box` (endpoints included) followed by Nelder-Mead refinement from the
/// best grid point. Points failing `feasible` or returning a non-finite value score -inf.
/// Grid ties go to the lowest grid index.
OptResult maximize_outer(const VectorFunction& f, const std::function<bool(std::span<const double>)>& feasible,
                         const Box& box, const OuterOptions& options = {});

}  // namespace isimm
