#include "isimm/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "isimm/error.hpp"
#include "isimm/parallel.hpp"

namespace isimm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

ExponentObjective::ExponentObjective(const Channel& channel, const QuadratureOptions& quad, double u_margin)
    : channel_(channel), u_margin_(u_margin) {
  channel_.validate();
  require_valid_point_count(quad.points);
  // A single-tap channel has a constant integrand; one sample is exact.
  points_ = channel_.memory() == 0 ? 1 : quad.points;
  const auto nu = points_ == 1 ? std::vector<double>{0.0} : periodic_grid(points_);
  re_h_.resize(points_);
  abs_h2_.resize(points_);
  const double s2 = channel_.noise_var;
  for (std::size_t i = 0; i < points_; ++i) {
    const auto H = freq_response(channel_.taps, nu[i]);
    re_h_[i] = H.real() / s2;
    abs_h2_[i] = std::norm(H) / s2;
  }
}

bool ExponentObjective::feasible(const std::array<double, 3>& w) const {
  const double lambda = 0.5 / channel_.noise_var + w[2];
  if (!(lambda > 0.0)) return false;
  for (std::size_t i = 0; i < points_; ++i) {
    // |w1 - H/s2|^2 = w1^2 - 2 w1 Re H/s2 + |H|^2/s2^2
    const double u = lambda * (w[0] + 0.5 * abs_h2_[i]) -
                     0.25 * (w[1] * w[1] - 2.0 * w[1] * re_h_[i] + abs_h2_[i] / channel_.noise_var);
    if (!(u > u_margin_)) return false;
  }
  return true;
}

double ExponentObjective::value(const std::array<double, 3>& w, double p_y, double rho) const {
  const double px = channel_.input_power;
  const double s2 = channel_.noise_var;
  const double lambda = 0.5 / s2 + w[2];
  if (!(lambda > 0.0)) return -kInf;
  double log_sum = 0.0;
  for (std::size_t i = 0; i < points_; ++i) {
    const double u = lambda * (w[0] + 0.5 * abs_h2_[i]) -
                     0.25 * (w[1] * w[1] - 2.0 * w[1] * re_h_[i] + abs_h2_[i] / s2);
    if (!(u > u_margin_)) return -kInf;
    log_sum += std::log(4.0 * std::numbers::e * px * s2 * u);
  }
  return 0.5 * log_sum / static_cast<double>(points_) - w[0] * px - w[1] * rho * std::sqrt(px * p_y) -
         w[2] * p_y;
}

void ExponentObjective::gradient(const std::array<double, 3>& w, double p_y, double rho,
                                 std::span<double> grad) const {
  const double px = channel_.input_power;
  const double lambda = 0.5 / channel_.noise_var + w[2];
  double g0 = 0.0, g1 = 0.0, g2 = 0.0;
  for (std::size_t i = 0; i < points_; ++i) {
    const double b = w[0] + 0.5 * abs_h2_[i];
    const double u = lambda * b - 0.25 * (w[1] * w[1] - 2.0 * w[1] * re_h_[i] + abs_h2_[i] / channel_.noise_var);
    g0 += lambda / u;
    g1 += -0.5 * (w[1] - re_h_[i]) / u;
    g2 += b / u;
  }
  const double n = static_cast<double>(points_);
  grad[0] = 0.5 * g0 / n - px;
  grad[1] = 0.5 * g1 / n - rho * std::sqrt(px * p_y);
  grad[2] = 0.5 * g2 / n - p_y;
}

std::array<double, 3> ExponentObjective::start(double p_y, double rho) const {
  const double px = channel_.input_power;
  const double s2 = channel_.noise_var;
  const double h0 = channel_.taps[0];
  // N = Sigma^{-1} / 2 for Sigma = [[P_X, c], [c, P_Y]], c = rho sqrt(P_X P_Y).
  const double c = rho * std::sqrt(px * p_y);
  const double det = px * p_y - c * c;
  if (det > 0.0) {
    const double n11 = 0.5 * p_y / det;
    const double n12 = -0.5 * c / det;
    const double n22 = 0.5 * px / det;
    const std::array<double, 3> w{n11 - 0.5 * h0 * h0 / s2, 2.0 * n12 + h0 / s2, n22 - 0.5 / s2};
    if (feasible(w)) return w;
  }
  return {1.0, 0.0, 1.0 - 0.5 / s2};
}

InnerMaximum ExponentObjective::maximize(double p_y, double rho, const VectorOptions& options) const {
  ConvexProblem cp;
  cp.objective = [&](std::span<const double> x) { return -value({x[0], x[1], x[2]}, p_y, rho); };
  cp.gradient = [&](std::span<const double> x, std::span<double> g) {
    gradient({x[0], x[1], x[2]}, p_y, rho, g);
    for (double& v : g) v = -v;
  };
  const auto w0 = start(p_y, rho);
  cp.start.assign(w0.begin(), w0.end());
  const OptResult r = minimize_vector_convex(cp, options);
  InnerMaximum out;
  out.value = -r.value;
  out.omega_hat = {r.x[0], r.x[1], r.x[2]};
  out.status = r.status;
  return out;
}

double objective_v(const std::array<double, 3>& omega_hat, double p_y, double rho, const Channel& channel,
                   const QuadratureOptions& quad) {
  return ExponentObjective(channel, quad).value(omega_hat, p_y, rho);
}

double mismatch_info(double rho, double h0, double alpha0) {
  const double weight = std::abs(sgn(h0) + sgn(alpha0)) / 4.0;
  if (weight == 0.0) return 0.0;
  if (!(std::abs(rho) < 1.0)) return kInf;
  return -weight * std::log1p(-rho * rho);
}

double universal_info(double rho) {
  if (!(std::abs(rho) < 1.0)) return kInf;
  return -0.5 * std::log1p(-rho * rho);
}

// ---------------------------------------------------------------------------

namespace {

/// Outer minimization over (P_Y, rho) of max_w V + [I(rho) - R]_+, with the grid of inner
/// maxima cached so that a whole curve shares it.
class OuterSearch {
 public:
  OuterSearch(const Channel& channel, std::optional<double> alpha0, const ExponentOptions& options)
      : objective_(channel, options.quadrature, options.u_margin), alpha0_(alpha0), options_(options) {
    if (options.grid_points < 3) throw InvalidInput("exponent grid needs at least 3 points per axis");
    if (!(options.rho_margin > 0.0 && options.rho_margin < 1.0)) throw InvalidInput("rho margin must lie in (0, 1)");
    const double truth_py = channel.energy() * channel.input_power + channel.noise_var;
    py_max_ = options.py_max > 0.0 ? options.py_max : 4.0 * truth_py;
    truth_py_ = truth_py;
    truth_rho_ = channel.taps[0] * std::sqrt(channel.input_power / truth_py);
  }

  ExponentResult solve(double rate) {
    if (!(rate >= 0.0) || !std::isfinite(rate)) throw InvalidInput("rate must be finite and >= 0");
    for (std::size_t widen = 0;; ++widen) {
      ensure_grid();
      ExponentResult r = solve_in_box(rate);
      if (r.p_y < py_max_ * (1.0 - 1e-3) || widen >= options_.max_widenings) return r;
      py_max_ *= 4.0;
      grid_.clear();
    }
  }

 private:
  double info(double rho) const {
    return alpha0_ ? mismatch_info(rho, objective_.channel().taps[0], *alpha0_) : universal_info(rho);
  }
  double rho_limit() const { return 1.0 - options_.rho_margin; }
  double py_min() const { return options_.py_min_fraction * py_max_; }

  double py_at(std::size_t i) const {
    const std::size_t m = options_.grid_points;
    return py_min() + (py_max_ - py_min()) * static_cast<double>(i) / static_cast<double>(m - 1);
  }
  double rho_at(std::size_t j) const {
    const std::size_t m = options_.grid_points;
    return -rho_limit() + 2.0 * rho_limit() * static_cast<double>(j) / static_cast<double>(m - 1);
  }

  InnerMaximum inner(double p_y, double rho) const {
    try {
      InnerMaximum m = objective_.maximize(p_y, rho, options_.vector);
      if (!std::isfinite(m.value)) m.value = kInf;
      return m;
    } catch (const Error&) {
      InnerMaximum m;
      m.value = kInf;
      m.status = OptStatus::infeasible;
      return m;
    }
  }

  void ensure_grid() {
    if (!grid_.empty()) return;
    const std::size_t m = options_.grid_points;
    grid_.resize(m * m);
    parallel_for(
        grid_.size(), [&](std::size_t idx) { grid_[idx] = inner(py_at(idx / m), rho_at(idx % m)); },
        options_.threads);
  }

  ExponentResult solve_in_box(double rate) const {
    const auto total = [&](const InnerMaximum& m, double rho) {
      return m.value + std::max(0.0, info(rho) - rate);
    };
    const std::size_t m = options_.grid_points;
    std::size_t best = 0;
    double best_f = kInf;
    for (std::size_t idx = 0; idx < grid_.size(); ++idx) {
      const double f = total(grid_[idx], rho_at(idx % m));
      if (f < best_f) {
        best_f = f;
        best = idx;
      }
    }

    ExponentResult r;
    r.rate = rate;
    r.py_max = py_max_;
    r.quadrature_points = objective_.points();
    if (!std::isfinite(best_f)) {
      r.status = OptStatus::infeasible;
      r.raw_exponent = kInf;
      r.exponent = kInf;
      return r;
    }

    const auto record = [&](double p_y, double rho, const InnerMaximum& im) {
      r.p_y = p_y;
      r.rho = rho;
      r.omega_hat = im.omega_hat;
      r.divergence = im.value;
      r.information = info(rho);
      r.raw_exponent = total(im, rho);
      r.status = im.status == OptStatus::boundary ? OptStatus::converged : im.status;
    };
    record(py_at(best / m), rho_at(best % m), grid_[best]);

    const auto f = [&](std::span<const double> x) {
      if (!(x[0] > 0.0 && x[0] <= py_max_ && std::abs(x[1]) <= rho_limit())) return kInf;
      return total(inner(x[0], x[1]), x[1]);
    };
    const double step_py = (py_max_ - py_min()) / static_cast<double>(m - 1);
    const double step_rho = 2.0 * rho_limit() / static_cast<double>(m - 1);
    const std::array<double, 2> scale{0.5 * step_py, 0.5 * step_rho};
    // restarts: a collapsed simplex can stall on the [I - R]_+ kink
    std::vector<double> start{r.p_y, r.rho};
    for (int restart = 0; restart < 6; ++restart) {
      const OptResult nm = nelder_mead(f, start, scale, options_.refine);
      if (!(std::isfinite(nm.value) && nm.value < r.raw_exponent)) break;
      const double gain = r.raw_exponent - nm.value;
      record(nm.x[0], nm.x[1], inner(nm.x[0], nm.x[1]));
      if (nm.status == OptStatus::max_iterations) r.status = OptStatus::max_iterations;
      if (gain <= 1e-12 * (1.0 + std::abs(nm.value))) break;
      start = {nm.x[0], nm.x[1]};
    }

    // The true output statistics are always a candidate.
    if (truth_py_ <= py_max_ && std::abs(truth_rho_) <= rho_limit()) {
      const InnerMaximum at_truth = inner(truth_py_, truth_rho_);
      if (total(at_truth, truth_rho_) < r.raw_exponent) record(truth_py_, truth_rho_, at_truth);
    }
    if (r.p_y >= py_max_ * (1.0 - 1e-3)) r.status = OptStatus::boundary;
    r.exponent = std::max(0.0, r.raw_exponent);
    return r;
  }

  ExponentObjective objective_;
  std::optional<double> alpha0_;
  ExponentOptions options_;
  double py_max_ = 0.0;
  double truth_py_ = 0.0;
  double truth_rho_ = 0.0;
  std::vector<InnerMaximum> grid_;
};

}  // namespace

ExponentResult error_exponent(const Channel& channel, double alpha0, double rate, const ExponentOptions& options) {
  if (!std::isfinite(alpha0)) throw InvalidInput("alpha0 must be finite");
  OuterSearch search(channel, alpha0, options);
  return search.solve(rate);
}

ExponentResult error_exponent_universal(const Channel& channel, double rate, const ExponentOptions& options) {
  OuterSearch search(channel, std::nullopt, options);
  return search.solve(rate);
}

std::vector<ExponentResult> exponent_curve(const Channel& channel, std::optional<double> alpha0,
                                           const std::vector<double>& rates, const ExponentOptions& options) {
  if (alpha0 && !std::isfinite(*alpha0)) throw InvalidInput("alpha0 must be finite");
  OuterSearch search(channel, alpha0, options);
  std::vector<ExponentResult> out;
  out.reserve(rates.size());
  for (double r : rates) out.push_back(search.solve(r));
  return out;
}

std::string exponent_csv(const std::vector<ExponentResult>& rows, double scale) {
  std::string out = "rate,exponent,p_y,rho,status\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%s\n", r.rate * scale, r.exponent * scale, r.p_y,
                  r.rho, to_string(r.status));
    out += buf;
  }
  return out;
}

}  // namespace isimm
