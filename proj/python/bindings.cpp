#include <optional>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "isimm/armodel.hpp"
#include "isimm/error.hpp"
#include "isimm/exponents.hpp"
#include "isimm/rates.hpp"
#include "isimm/reference.hpp"
#include "isimm/simulator.hpp"

namespace py = pybind11;
using namespace isimm;

namespace {

Channel channel(std::vector<double> h, double sigma2, double px) { return Channel{std::move(h), sigma2, px}; }

RateOptions rate_options(std::size_t quad_points, std::size_t outer_grid) {
  RateOptions o;
  o.quadrature.points = quad_points;
  o.outer.grid_points = outer_grid;
  return o;
}

py::dict to_dict(const RateResult& r) {
  py::dict d;
  d["rate"] = r.rate;
  d["raw_rate"] = r.raw_rate;
  d["inner_argmin"] = r.inner_argmin;
  d["outer_argmax"] = r.outer_argmax;
  d["quadrature_points"] = r.quadrature_points;
  d["status"] = to_string(r.status);
  d["outer_status"] = to_string(r.outer_status);
  return d;
}

py::dict to_dict(const ExponentResult& r) {
  py::dict d;
  d["exponent"] = r.exponent;
  d["raw_exponent"] = r.raw_exponent;
  d["rate"] = r.rate;
  d["p_y"] = r.p_y;
  d["rho"] = r.rho;
  d["omega_hat"] = std::vector<double>(r.omega_hat.begin(), r.omega_hat.end());
  d["divergence"] = r.divergence;
  d["status"] = to_string(r.status);
  return d;
}

}  // namespace

PYBIND11_MODULE(_isimm, m) {
  m.doc() = "Achievable rates, error exponents and Monte Carlo checks for mismatched decoding on Gaussian ISI channels";

  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<Infeasible>(m, "Infeasible", PyExc_RuntimeError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("freq_response", [](const std::vector<double>& taps, double nu) { return freq_response(taps, nu); },
        py::arg("taps"), py::arg("nu"));
  m.def("eta_squared", [](const std::vector<double>& phi, double px) { return eta_squared(phi, px); },
        py::arg("phi"), py::arg("px") = 1.0);
  m.def(
      "autocov_from_ar",
      [](const std::vector<double>& phi, double px, std::size_t m_max) {
        return autocov_from_ar(make_ar_params(phi, px), m_max).gamma;
      },
      py::arg("phi"), py::arg("px") = 1.0, py::arg("m_max") = 0);
  m.def(
      "ar_from_autocov",
      [](const std::vector<double>& gamma) {
        const ArParams a = ar_from_autocov(Autocov{gamma});
        return py::make_tuple(a.phi, a.eta2);
      },
      py::arg("gamma"), "Returns (phi, eta2).");

  m.def(
      "rate_ar",
      [](std::vector<double> h, std::vector<double> alpha, std::optional<std::vector<double>> phi, std::size_t order,
         double sigma2, double px, std::size_t quad_points, std::size_t outer_grid) {
        const Channel c = channel(std::move(h), sigma2, px);
        const RateOptions o = rate_options(quad_points, outer_grid);
        RateResult r;
        {
          py::gil_scoped_release release;
          r = phi ? rate_ar_fixed(c, Metric{alpha}, *phi, o) : rate_ar_opt(c, Metric{alpha}, order, o);
        }
        return to_dict(r);
      },
      py::arg("h"), py::arg("alpha"), py::arg("phi") = py::none(), py::arg("order") = 0, py::arg("sigma2") = 1.0,
      py::arg("px") = 1.0, py::arg("quad_points") = 4096, py::arg("outer_grid") = 41,
      "Autoregressive-ensemble rate; fixed phi when given, otherwise optimized over AR(order).");
  m.def(
      "rate_fc",
      [](std::vector<double> h, std::vector<double> alpha, std::optional<std::vector<double>> gamma, std::size_t order,
         double sigma2, double px, std::size_t quad_points, std::size_t outer_grid) {
        const Channel c = channel(std::move(h), sigma2, px);
        const RateOptions o = rate_options(quad_points, outer_grid);
        RateResult r;
        {
          py::gil_scoped_release release;
          if (gamma) {
            std::vector<double> g{px};
            g.insert(g.end(), gamma->begin(), gamma->end());
            r = rate_fc_fixed(c, Metric{alpha}, Autocov{g}, o);
          } else {
            r = rate_fc_opt(c, Metric{alpha}, order, o);
          }
        }
        return to_dict(r);
      },
      py::arg("h"), py::arg("alpha"), py::arg("gamma") = py::none(), py::arg("order") = 0, py::arg("sigma2") = 1.0,
      py::arg("px") = 1.0, py::arg("quad_points") = 4096, py::arg("outer_grid") = 41,
      "Fixed-composition rate; gamma lists gamma_1..gamma_p (gamma_0 = px).");
  m.def(
      "rate_universal",
      [](std::vector<double> h, double sigma2, double px) { return rate_universal(channel(std::move(h), sigma2, px)).rate; },
      py::arg("h"), py::arg("sigma2") = 1.0, py::arg("px") = 1.0);
  m.def(
      "matched_capacity",
      [](std::vector<double> h, double sigma2, double px) {
        return matched_capacity(channel(std::move(h), sigma2, px)).capacity;
      },
      py::arg("h"), py::arg("sigma2") = 1.0, py::arg("px") = 1.0);
  m.def("gmi_iid_gaussian", &gmi_iid_gaussian, py::arg("h0"), py::arg("noise"), py::arg("alpha0"), py::arg("px") = 1.0);

  m.def(
      "error_exponent",
      [](std::vector<double> h, std::optional<double> alpha0, double rate, double sigma2, double px) {
        const Channel c = channel(std::move(h), sigma2, px);
        ExponentResult r;
        {
          py::gil_scoped_release release;
          r = alpha0 ? error_exponent(c, *alpha0, rate) : error_exponent_universal(c, rate);
        }
        return to_dict(r);
      },
      py::arg("h"), py::arg("alpha0"), py::arg("rate"), py::arg("sigma2") = 1.0, py::arg("px") = 1.0,
      "Memoryless-metric exponent; alpha0=None selects the GLRT decoder.");

  m.def(
      "simulate",
      [](std::vector<double> h, std::size_t n, double rate, std::vector<double> alpha, const std::string& decoder,
         const std::string& ensemble, std::size_t trials, std::uint64_t seed, const std::string& mode, double sigma2,
         double px) {
        SimConfig cfg;
        cfg.n = n;
        cfg.rate = rate;
        cfg.alpha = std::move(alpha);
        cfg.decoder = parse_decoder(decoder);
        cfg.codebook.kind = CodebookSpec::parse_kind(ensemble);
        cfg.trials = trials;
        cfg.seed = seed;
        cfg.mode = parse_decode_mode(mode);
        SimResult r;
        {
          py::gil_scoped_release release;
          r = simulate_error_prob(cfg, channel(std::move(h), sigma2, px));
        }
        py::dict d;
        d["error_prob"] = r.error_prob;
        d["ci_low"] = r.ci_low;
        d["ci_high"] = r.ci_high;
        d["errors"] = r.errors;
        d["trials"] = r.trials;
        d["codewords"] = r.codewords;
        d["decode_path"] = to_string(r.decode_path);
        return d;
      },
      py::arg("h"), py::arg("n"), py::arg("rate"), py::arg("alpha") = std::vector<double>{1.0},
      py::arg("decoder") = "metric", py::arg("ensemble") = "sphere", py::arg("trials") = 1000, py::arg("seed") = 1,
      py::arg("mode") = "auto", py::arg("sigma2") = 1.0, py::arg("px") = 1.0);
}
