#include "isimm/armodel.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdio>
#include <sstream>

#include "isimm/error.hpp"
#include "isimm/model.hpp"

namespace isimm {

namespace {

// Largest root modulus of z^p - phi_1 z^{p-1} - ... - phi_p.
double root_radius(std::span<const double> phi) {
  const std::size_t p = phi.size();
  if (p == 0) return 0.0;
  if (p == 1) return std::abs(phi[0]);
  if (p == 2) {
    // z^2 - phi1 z - phi2
    const std::complex<double> disc = std::sqrt(std::complex<double>(phi[0] * phi[0] + 4.0 * phi[1]));
    const std::complex<double> r1 = 0.5 * (phi[0] + disc);
    const std::complex<double> r2 = 0.5 * (phi[0] - disc);
    return std::max(std::abs(r1), std::abs(r2));
  }
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p),
                                                    static_cast<Eigen::Index>(p));
  for (std::size_t i = 0; i < p; ++i) companion(0, static_cast<Eigen::Index>(i)) = phi[i];
  for (std::size_t i = 1; i < p; ++i)
    companion(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i - 1)) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

StabilityVerdict validate_ar_coefficients(std::span<const double> phi) {
  StabilityVerdict v;
  if (!all_finite(phi)) {
    v.detail = "AR coefficients must be finite";
    return v;
  }
  v.spectral_radius = root_radius(phi);
  v.stable = v.spectral_radius < 1.0 - kStabilityMargin;
  if (!v.stable) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "AR coefficients are not stable (root radius %.12g >= 1)",
                  v.spectral_radius);
    v.detail = buf;
  }
  return v;
}

DefinitenessVerdict validate_autocov(std::span<const double> gamma) {
  DefinitenessVerdict v;
  if (gamma.empty() || !all_finite(gamma)) {
    v.failing_minor = 1;
    v.detail = "autocovariance vector must be non-empty and finite";
    return v;
  }
  const auto n = static_cast<Eigen::Index>(gamma.size());
  Eigen::MatrixXd toeplitz(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) toeplitz(i, j) = gamma[static_cast<std::size_t>(std::abs(i - j))];
  // Pivot-by-pivot Cholesky so the first failing leading minor can be reported.
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = toeplitz(j, j) - L.row(j).head(j).squaredNorm();
    if (!(d > 0.0)) {
      v.failing_minor = static_cast<std::size_t>(j + 1);
      v.detail = "Toeplitz matrix is not positive definite (leading minor " +
                 std::to_string(v.failing_minor) + ")";
      return v;
    }
    L(j, j) = std::sqrt(d);
    for (Eigen::Index i = j + 1; i < n; ++i)
      L(i, j) = (toeplitz(i, j) - L.row(i).head(j).dot(L.row(j).head(j))) / L(j, j);
  }
  v.positive_definite = true;
  return v;
}

void require_stable(std::span<const double> phi) {
  const StabilityVerdict v = validate_ar_coefficients(phi);
  if (!v.stable) throw InvalidInput(v.detail);
}

double eta_squared(std::span<const double> phi, double p_x, const QuadratureOptions& quad) {
  require_stable(phi);
  if (!(p_x > 0.0)) throw InvalidInput("input power must be positive");
  if (phi.empty()) return p_x;
  const double inv_gain = integrate_periodic(
      [&](double nu) { return 1.0 / std::norm(1.0 - ar_response(phi, nu)); }, quad.points);
  return p_x / inv_gain;
}

ArParams make_ar_params(std::vector<double> phi, double p_x, const QuadratureOptions& quad) {
  const double eta2 = eta_squared(phi, p_x, quad);
  return ArParams{std::move(phi), eta2, p_x};
}

Autocov autocov_from_ar(const ArParams& params, std::size_t m_max) {
  require_stable(params.phi);
  const std::size_t p = params.order();
  const auto n = static_cast<Eigen::Index>(p + 1);
  // gamma_m - sum_k phi_k gamma_{|m-k|} = eta2 delta_m, m = 0..p
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  b(0) = params.eta2;
  for (std::size_t m = 0; m <= p; ++m)
    for (std::size_t k = 1; k <= p; ++k) {
      const std::size_t lag = m >= k ? m - k : k - m;
      A(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(lag)) -= params.phi[k - 1];
    }
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
  if (!lu.isInvertible()) throw Infeasible("singular Yule-Walker system");
  const Eigen::VectorXd sol = lu.solve(b);

  Autocov out;
  out.gamma.assign(sol.data(), sol.data() + sol.size());
  out.gamma.resize(std::max(m_max, p) + 1);
  for (std::size_t m = p + 1; m < out.gamma.size(); ++m) {
    double g = 0.0;
    for (std::size_t k = 1; k <= p; ++k) g += params.phi[k - 1] * out.gamma[m - k];
    out.gamma[m] = g;
  }
  out.gamma.resize(m_max + 1);
  return out;
}

namespace {

struct Levinson {
  std::vector<double> phi;
  std::vector<double> reflection;
  double error = 0.0;
};

Levinson levinson_durbin(std::span<const double> gamma) {
  if (gamma.empty() || !all_finite(gamma))
    throw InvalidInput("autocovariance vector must be non-empty and finite");
  if (!(gamma[0] > 0.0))
    throw InvalidInput("Toeplitz matrix is not positive definite (leading minor 1)");
  const std::size_t p = gamma.size() - 1;
  Levinson out;
  out.error = gamma[0];
  std::vector<double> a;  // prediction coefficients of the current order
  for (std::size_t m = 1; m <= p; ++m) {
    double acc = gamma[m];
    for (std::size_t k = 1; k < m; ++k) acc -= a[k - 1] * gamma[m - k];
    const double kappa = acc / out.error;
    std::vector<double> next(m);
    for (std::size_t k = 1; k < m; ++k) next[k - 1] = a[k - 1] - kappa * a[m - k - 1];
    next[m - 1] = kappa;
    const double err = out.error * (1.0 - kappa * kappa);
    if (!(err > 0.0) || !(std::abs(kappa) < 1.0))
      throw InvalidInput("Toeplitz matrix is not positive definite (leading minor " +
                         std::to_string(m + 1) + ")");
    out.reflection.push_back(kappa);
    out.error = err;
    a = std::move(next);
  }
  out.phi = std::move(a);
  return out;
}

}  // namespace

ArParams ar_from_autocov(const Autocov& gamma) {
  Levinson ld = levinson_durbin(gamma.gamma);
  return ArParams{std::move(ld.phi), ld.error, gamma.gamma[0]};
}

std::vector<double> reflection_coefficients(const Autocov& gamma) {
  return levinson_durbin(gamma.gamma).reflection;
}

Autocov extend_autocov(const Autocov& gamma, std::size_t m_max) {
  Autocov out = gamma;
  if (m_max + 1 <= out.gamma.size()) {
    out.gamma.resize(m_max + 1);
    return out;
  }
  const ArParams ar = ar_from_autocov(gamma);
  const std::size_t p = ar.order();
  out.gamma.resize(m_max + 1);
  for (std::size_t m = p + 1; m <= m_max; ++m) {
    double g = 0.0;
    for (std::size_t k = 1; k <= p; ++k) g += ar.phi[k - 1] * out.gamma[m - k];
    out.gamma[m] = g;
  }
  return out;
}

double yule_walker_residual(const ArParams& params, const Autocov& gamma) {
  const auto at = [&](std::ptrdiff_t lag) {
    return gamma.gamma[static_cast<std::size_t>(lag < 0 ? -lag : lag)];
  };
  double worst = 0.0;
  for (std::size_t m = 0; m < gamma.gamma.size(); ++m) {
    double r = gamma.gamma[m] - (m == 0 ? params.eta2 : 0.0);
    bool in_range = true;
    for (std::size_t k = 1; k <= params.order(); ++k) {
      const auto lag = static_cast<std::ptrdiff_t>(m) - static_cast<std::ptrdiff_t>(k);
      if (static_cast<std::size_t>(lag < 0 ? -lag : lag) >= gamma.gamma.size()) {
        in_range = false;
        break;
      }
      r -= params.phi[k - 1] * at(lag);
    }
    if (in_range) worst = std::max(worst, std::abs(r));
  }
  return worst;
}

}  // namespace isimm
