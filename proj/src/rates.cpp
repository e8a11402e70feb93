#include "isimm/rates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "isimm/error.hpp"
#include "isimm/parallel.hpp"

namespace isimm {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_nonzero_metric(const Metric& metric) {
  if (squared_norm(metric.taps) <= 0.0) throw InvalidInput("metric taps must not all be zero");
}

/// sum_{l,i} alpha_l h_i gamma_{|l-i|}
double cross_term(const AlignedModel& m, std::span<const double> gamma) {
  double sum = 0.0;
  for (std::size_t l = 0; l < m.alpha.size(); ++l)
    for (std::size_t i = 0; i < m.h.size(); ++i)
      sum += m.alpha[l] * m.h[i] * gamma[l > i ? l - i : i - l];
  return sum;
}

/// S_Y(nu_i) |A(nu_i)|^2 on the periodic grid.
std::vector<double> weighted_output(const AlignedModel& m, double sigma2, double eta2,
                                    const std::vector<double>& phi, std::size_t n) {
  const SpectralDensities dens(m.h, sigma2, eta2, phi);
  const auto nu = periodic_grid(n);
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = dens.output(nu[i]) * std::norm(freq_response(m.alpha, nu[i]));
  return w;
}

RateResult finish(double log_term, const OptResult& inner, std::size_t points) {
  RateResult r;
  r.raw_rate = log_term - inner.value;
  r.rate = std::max(0.0, r.raw_rate);
  r.inner_argmin = inner.x;
  r.quadrature_points = points;
  r.status = inner.status;
  if (inner.status == OptStatus::infeasible) throw Infeasible("inner minimization found no feasible point");
  return r;
}

RateOptions serial(RateOptions options) {
  options.outer.threads = 1;
  return options;
}

}  // namespace

// ---------------------------------------------------------------------------
// Autoregressive ensemble

ArRateProblem::ArRateProblem(const Channel& channel, const Metric& metric, std::vector<double> phi,
                             const QuadratureOptions& quad) {
  channel.validate();
  metric.validate();
  require_nonzero_metric(metric);
  require_stable(phi);
  require_valid_point_count(quad.points);
  const AlignedModel m = align(channel, metric);
  const std::size_t K = m.h.size() - 1;

  const ArParams params = make_ar_params(phi, channel.input_power, quad);
  eta2_ = params.eta2;
  gamma_ = autocov_from_ar(params, K).gamma;

  linear_ = cross_term(m, gamma_) - 0.5 * squared_norm(m.alpha) * gamma_[0];
  for (std::size_t l = 1; l <= K; ++l) linear_ -= lag_product(m.alpha, l) * gamma_[l];

  const std::size_t n = quad.points;
  const auto nu = periodic_grid(n);
  a2_.resize(n);
  base_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    a2_[i] = std::norm(freq_response(m.alpha, nu[i]));
    base_[i] = std::norm(1.0 - ar_response(phi, nu[i])) / (2.0 * eta2_);
  }
  sya2_ = weighted_output(m, channel.noise_var, eta2_, phi, n);
}

double ArRateProblem::objective(double omega) const {
  if (!(omega >= 0.0)) return kInf;
  double log_sum = 0.0, ratio_sum = 0.0;
  for (std::size_t i = 0; i < a2_.size(); ++i) {
    const double f = 0.5 * omega * a2_[i] + base_[i];
    if (!(f > kLogFloor)) return kInf;
    log_sum += std::log(f);
    ratio_sum += sya2_[i] / f;
  }
  const double n = static_cast<double>(a2_.size());
  return -0.5 * log_sum / n + 0.25 * omega * omega * ratio_sum / n - omega * linear_;
}

double ArRateProblem::derivative(double omega) const {
  double d_log = 0.0, ratio = 0.0, d_ratio = 0.0;
  for (std::size_t i = 0; i < a2_.size(); ++i) {
    const double f = 0.5 * omega * a2_[i] + base_[i];
    const double df = 0.5 * a2_[i];
    d_log += df / f;
    ratio += sya2_[i] / f;
    d_ratio += sya2_[i] * df / (f * f);
  }
  const double n = static_cast<double>(a2_.size());
  return -0.5 * d_log / n + 0.5 * omega * ratio / n - 0.25 * omega * omega * d_ratio / n - linear_;
}

RateResult rate_ar_fixed(const Channel& channel, const Metric& metric, const std::vector<double>& phi,
                         const RateOptions& options) {
  const ArRateProblem problem(channel, metric, phi, options.quadrature);
  const OptResult inner = minimize_scalar_convex([&](double w) { return problem.objective(w); }, 0.0,
                                                 {0.0, 1.0}, options.scalar);
  RateResult r = finish(0.5 * std::log(2.0 * problem.eta2()), inner, problem.points());
  r.outer_argmax = phi;
  return r;
}

double ar_coefficient_bound(std::size_t p, std::size_t k) {
  // |phi_k| <= C(p, k) for a monic polynomial with all roots in the closed unit disk.
  double c = 1.0;
  for (std::size_t j = 1; j <= k; ++j) c = c * static_cast<double>(p - k + j) / static_cast<double>(j);
  return c;
}

RateResult rate_ar_opt(const Channel& channel, const Metric& metric, std::size_t p,
                       const RateOptions& options) {
  if (p > kMaxEnsembleOrder) throw InvalidInput("AR order above 8 is not supported");
  if (p == 0) return rate_ar_fixed(channel, metric, {}, options);
  channel.validate();
  metric.validate();
  require_nonzero_metric(metric);

  Box box;
  for (std::size_t k = 1; k <= p; ++k) {
    box.lower.push_back(-ar_coefficient_bound(p, k));
    box.upper.push_back(ar_coefficient_bound(p, k));
  }
  const auto value = [&](std::span<const double> phi) {
    try {
      return rate_ar_fixed(channel, metric, {phi.begin(), phi.end()}, serial(options)).raw_rate;
    } catch (const Error&) {
      return -kInf;
    }
  };
  const auto stable = [](std::span<const double> phi) { return validate_ar_coefficients(phi).stable; };
  const OptResult outer = maximize_outer(value, stable, box, options.outer);
  if (outer.status == OptStatus::infeasible) throw Infeasible("no stable AR coefficients gave a finite rate");

  RateResult r = rate_ar_fixed(channel, metric, outer.x, options);
  r.outer_status = outer.status;
  return r;
}

// ---------------------------------------------------------------------------
// Fixed-composition ensemble

FcRateProblem::FcRateProblem(const Channel& channel, const Metric& metric, const Autocov& gamma,
                             const QuadratureOptions& quad) {
  channel.validate();
  metric.validate();
  require_nonzero_metric(metric);
  require_valid_point_count(quad.points);
  if (gamma.gamma.empty()) throw InvalidInput("autocovariance vector is empty");
  if (!all_finite(gamma.gamma)) throw InvalidInput("autocovariances must be finite");
  const double px = channel.input_power;
  if (std::abs(gamma.gamma[0] - px) > 1e-9 * std::max(1.0, px))
    throw InvalidInput("gamma_0 must equal the input power P_X");

  const AlignedModel m = align(channel, metric);
  const std::size_t K = m.h.size() - 1;
  p_ = gamma.order();

  const ArParams ar = ar_from_autocov(gamma);  // throws on non-PD input
  eta2_ = ar.eta2;
  gamma_ = extend_autocov(gamma, std::max(p_, K)).gamma;

  linear_ = cross_term(m, gamma_);
  for (std::size_t l = 1 + std::min(p_, K); l <= K; ++l) {
    const double pi_l = lag_product(m.alpha, l);
    linear_ -= pi_l * gamma_[l];
    tail_bound_ += std::abs(pi_l);
  }

  n_ = quad.points;
  const auto nu = periodic_grid(n_);
  cos_.resize((p_ + 1) * n_);
  tail_.assign(n_, 0.0);
  for (std::size_t k = 0; k <= p_; ++k)
    for (std::size_t i = 0; i < n_; ++i) cos_[k * n_ + i] = std::cos(static_cast<double>(k) * nu[i]);
  for (std::size_t l = 1 + std::min(p_, K); l <= K; ++l) {
    const double pi_l = lag_product(m.alpha, l);
    for (std::size_t i = 0; i < n_; ++i) tail_[i] += pi_l * std::cos(static_cast<double>(l) * nu[i]);
  }
  w_ = weighted_output(m, channel.noise_var, eta2_, ar.phi, n_);
}

double FcRateProblem::g_at(std::span<const double> omega, std::size_t i) const {
  double g = omega[p_ + 1] * tail_[i];
  for (std::size_t k = 0; k <= p_; ++k) g += omega[k] * cos_[k * n_ + i];
  return g;
}

double FcRateProblem::objective(std::span<const double> omega) const {
  double log_sum = 0.0, ratio_sum = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double g = g_at(omega, i);
    if (!(g > kLogFloor)) return kInf;
    log_sum += std::log(g);
    ratio_sum += w_[i] / g;
  }
  const double n = static_cast<double>(n_);
  const double last = omega[p_ + 1];
  double value = -0.5 * log_sum / n + 0.25 * last * last * ratio_sum / n - last * linear_;
  for (std::size_t k = 0; k <= p_; ++k) value += omega[k] * gamma_[k];
  return value;
}

void FcRateProblem::gradient(std::span<const double> omega, std::span<double> grad) const {
  const std::size_t d = p_ + 2;
  std::vector<double> d_log(d, 0.0), d_ratio(d, 0.0);
  double ratio = 0.0;
  for (std::size_t i = 0; i < n_; ++i) {
    const double g = g_at(omega, i);
    const double inv = 1.0 / g;
    const double wr = w_[i] * inv * inv;
    ratio += w_[i] * inv;
    for (std::size_t k = 0; k <= p_; ++k) {
      d_log[k] += cos_[k * n_ + i] * inv;
      d_ratio[k] += cos_[k * n_ + i] * wr;
    }
    d_log[p_ + 1] += tail_[i] * inv;
    d_ratio[p_ + 1] += tail_[i] * wr;
  }
  const double n = static_cast<double>(n_);
  const double last = omega[p_ + 1];
  for (std::size_t k = 0; k < d; ++k) grad[k] = -0.5 * d_log[k] / n - 0.25 * last * last * d_ratio[k] / n;
  for (std::size_t k = 0; k <= p_; ++k) grad[k] += gamma_[k];
  grad[p_ + 1] += 0.5 * last * ratio / n - linear_;
}

std::vector<LinearConstraint> FcRateProblem::constraints() const {
  const std::size_t d = p_ + 2;
  std::vector<LinearConstraint> out;
  for (std::size_t k = 0; k < d; ++k) {
    LinearConstraint c{std::vector<double>(d, 0.0), 0.0};
    c.a[k] = 1.0;
    out.push_back(std::move(c));
  }
  LinearConstraint dominance{std::vector<double>(d, -1.0), 0.0};
  dominance.a[0] = 1.0;
  dominance.a[p_ + 1] = -tail_bound_;
  out.push_back(std::move(dominance));
  return out;
}

std::vector<double> FcRateProblem::interior_point() const {
  std::vector<double> w(p_ + 2, 0.01);
  w[0] = 1.0 + 0.01 * static_cast<double>(p_) + 0.01 * tail_bound_;
  return w;
}

RateResult rate_fc_fixed(const Channel& channel, const Metric& metric, const Autocov& gamma,
                         const RateOptions& options) {
  const FcRateProblem problem(channel, metric, gamma, options.quadrature);
  ConvexProblem cp;
  cp.objective = [&](std::span<const double> w) { return problem.objective(w); };
  cp.gradient = [&](std::span<const double> w, std::span<double> g) { problem.gradient(w, g); };
  cp.constraints = problem.constraints();
  cp.start = problem.interior_point();
  const OptResult inner = minimize_vector_convex(cp, options.vector);
  RateResult r = finish(0.5 * std::log(2.0 * std::numbers::e * problem.eta2()), inner, problem.points());
  r.outer_argmax.assign(gamma.gamma.begin() + 1, gamma.gamma.end());
  return r;
}

RateResult rate_fc_opt(const Channel& channel, const Metric& metric, std::size_t p,
                       const RateOptions& options) {
  if (p > kMaxEnsembleOrder) throw InvalidInput("fixed-composition order above 8 is not supported");
  channel.validate();
  const double px = channel.input_power;
  if (p == 0) return rate_fc_fixed(channel, metric, Autocov{{px}}, options);
  metric.validate();
  require_nonzero_metric(metric);

  const auto full = [px](std::span<const double> lags) {
    std::vector<double> g{px};
    g.insert(g.end(), lags.begin(), lags.end());
    return g;
  };
  Box box{std::vector<double>(p, -px), std::vector<double>(p, px)};
  const auto value = [&](std::span<const double> lags) {
    try {
      return rate_fc_fixed(channel, metric, Autocov{full(lags)}, serial(options)).raw_rate;
    } catch (const Error&) {
      return -kInf;
    }
  };
  const auto pd = [&](std::span<const double> lags) {
    return validate_autocov(full(lags)).positive_definite;
  };
  const OptResult outer = maximize_outer(value, pd, box, options.outer);
  if (outer.status == OptStatus::infeasible) throw Infeasible("no positive-definite autocovariance gave a finite rate");

  RateResult r = rate_fc_fixed(channel, metric, Autocov{full(outer.x)}, options);
  r.outer_status = outer.status;
  return r;
}

// ---------------------------------------------------------------------------

RateResult rate_universal(const Channel& channel) {
  channel.validate();
  const double energy = channel.energy();
  if (!(energy > 0.0)) throw InvalidInput("channel taps must not all be zero");
  const double h0 = channel.taps[0];
  const double px = channel.input_power;
  RateResult r;
  r.raw_rate = 0.5 * std::log1p(h0 * h0 * px / ((energy - h0 * h0) * px + channel.noise_var));
  r.rate = r.raw_rate;
  return r;
}

// ---------------------------------------------------------------------------
// Sweeps

EnsembleSpec EnsembleSpec::parse(const std::string& name) {
  if (name == "iid") return {EnsembleKind::autoregressive, 0};
  const auto order_of = [&](std::size_t prefix) {
    const std::string digits = name.substr(prefix);
    if (digits.empty() || digits.size() > 2 ||
        !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); }))
      throw InvalidInput("unknown ensemble '" + name + "' (expected iid, arN or fcN)");
    const auto order = static_cast<std::size_t>(std::stoul(digits));
    if (order > kMaxEnsembleOrder) throw InvalidInput("ensemble order in '" + name + "' exceeds 8");
    return order;
  };
  if (name.rfind("ar", 0) == 0) return {EnsembleKind::autoregressive, order_of(2)};
  if (name.rfind("fc", 0) == 0) return {EnsembleKind::fixed_composition, order_of(2)};
  throw InvalidInput("unknown ensemble '" + name + "' (expected iid, arN or fcN)");
}

std::string EnsembleSpec::name() const {
  if (kind == EnsembleKind::autoregressive) return order == 0 ? "iid" : "ar" + std::to_string(order);
  return "fc" + std::to_string(order);
}

SweepAxis SweepAxis::parse(const std::string& name) {
  if (name == "sigma2") return {Target::sigma2, 0};
  if (name == "px") return {Target::px, 0};
  const auto indexed = [&](std::size_t prefix, Target t) {
    const std::string digits = name.substr(prefix);
    if (digits.empty() || digits.size() > 2 ||
        !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); }))
      throw InvalidInput("unknown sweep axis '" + name + "'");
    return SweepAxis{t, static_cast<std::size_t>(std::stoul(digits))};
  };
  if (name.rfind("alpha", 0) == 0) return indexed(5, Target::alpha);
  if (name.rfind("h", 0) == 0) return indexed(1, Target::h);
  throw InvalidInput("unknown sweep axis '" + name + "' (expected alphaK, hK, sigma2 or px)");
}

std::string SweepAxis::name() const {
  switch (target) {
    case Target::alpha:
      return "alpha" + std::to_string(index);
    case Target::h:
      return "h" + std::to_string(index);
    case Target::sigma2:
      return "sigma2";
    case Target::px:
      return "px";
  }
  return "?";
}

void SweepAxis::apply(Channel& channel, Metric& metric, double value) const {
  switch (target) {
    case Target::alpha:
      if (metric.taps.size() <= index) metric.taps.resize(index + 1, 0.0);
      metric.taps[index] = value;
      break;
    case Target::h:
      if (channel.taps.size() <= index) channel.taps.resize(index + 1, 0.0);
      channel.taps[index] = value;
      break;
    case Target::sigma2:
      channel.noise_var = value;
      break;
    case Target::px:
      channel.input_power = value;
      break;
  }
}

std::string SweepRow::status() const {
  if (!result) return error;
  if (result->outer_status != OptStatus::converged) return to_string(result->outer_status);
  return to_string(result->status);
}

std::vector<SweepRow> sweep_rates(const Channel& channel, const Metric& metric, const SweepAxis& axis,
                                  const std::vector<double>& grid,
                                  const std::vector<EnsembleSpec>& ensembles,
                                  const RateOptions& options) {
  std::vector<SweepRow> rows(grid.size() * ensembles.size());
  const RateOptions inner = serial(options);
  parallel_for(
      rows.size(),
      [&](std::size_t idx) {
        const double value = grid[idx / ensembles.size()];
        const EnsembleSpec& ens = ensembles[idx % ensembles.size()];
        SweepRow& row = rows[idx];
        row.value = value;
        row.ensemble = ens.name();
        try {
          Channel ch = channel;
          Metric me = metric;
          axis.apply(ch, me, value);
          row.result = ens.kind == EnsembleKind::autoregressive ? rate_ar_opt(ch, me, ens.order, inner)
                                                                : rate_fc_opt(ch, me, ens.order, inner);
        } catch (const Error& e) {
          row.error = to_string(e.kind());
        }
      },
      options.outer.threads);
  return rows;
}

std::string sweep_csv(const SweepAxis& axis, const std::vector<SweepRow>& rows, double scale) {
  std::string out = axis.name() + ",ensemble,rate,status\n";
  char buf[64];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof buf, "%.10g", row.value);
    out += buf;
    out += ',' + row.ensemble + ',';
    if (row.result) {
      std::snprintf(buf, sizeof buf, "%.10g", row.result->rate * scale);
      out += buf;
    } else {
      out += "nan";
    }
    out += ',' + row.status() + '\n';
  }
  return out;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

}  // namespace isimm
