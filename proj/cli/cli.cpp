#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "isimm/error.hpp"
#include "isimm/exponents.hpp"
#include "isimm/parallel.hpp"
#include "isimm/rates.hpp"
#include "isimm/reference.hpp"
#include "isimm/simulator.hpp"

namespace isimm::cli {

using json = nlohmann::ordered_json;

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t");
    const auto last = item.find_last_not_of(" \t");
    if (first == std::string::npos) throw InvalidInput("empty entry in list '" + text + "'");
    item = item.substr(first, last - first + 1);
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end != item.c_str() + item.size() || !std::isfinite(v))
      throw InvalidInput("not a finite number: '" + item + "'");
    out.push_back(v);
  }
  return out;
}

double round10(double value) {
  if (!std::isfinite(value)) return value;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", value);
  return std::strtod(buf, nullptr);
}

namespace {

json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return round10(v);
}

json nums(std::span<const double> v) {
  json a = json::array();
  for (double x : v) a.push_back(num(x));
  return a;
}

/// Every value any subcommand can take; each subcommand binds the fields it uses.
struct Settings {
  std::string config;
  std::string h = "1";
  std::string alpha = "1";
  double sigma2 = 1.0;
  double px = 1.0;
  std::size_t quad_points = 4096;
  std::size_t threads = 0;
  std::string output;
  bool bits = false;

  std::string phi;
  std::string gamma;
  std::size_t order = 0;
  std::size_t outer_grid = 41;
  std::size_t max_grid_evals = 5000;
  double scalar_tol = 1e-8;
  double value_tol = 1e-10;
  double grad_tol = 1e-7;

  double alpha0 = 1.0;
  double rate = 0.0;
  std::string rate_grid;
  std::size_t exp_grid = 21;
  double py_max = 0.0;

  std::string axis = "alpha1";
  double from = 0.0;
  double to = 1.5;
  std::size_t points = 41;
  std::string ensembles = "iid,ar1,fc0,fc1";

  std::size_t n = 32;
  std::string ensemble = "sphere";
  double epsilon = 0.05;
  std::string decoder = "metric";
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  std::string mode = "auto";
  double max_codewords = 1048576.0;

  int figure = 0;
  std::size_t figure_points = 0;
};

void add_io(CLI::App* sub, Settings& s) {
  sub->add_option("--config", s.config, "Key=value file; command-line flags take precedence");
  sub->add_option("--output,-o", s.output, "Write the result to this file instead of stdout");
  sub->add_option("--threads", s.threads, "Worker threads (0 = ISIMM_THREADS or hardware concurrency)");
}

void add_channel(CLI::App* sub, Settings& s) {
  sub->add_option("--h", s.h, "Channel taps h0,h1,...");
  sub->add_option("--sigma2", s.sigma2, "Noise variance");
  sub->add_option("--px", s.px, "Input power P_X");
}

void add_quadrature(CLI::App* sub, Settings& s) {
  sub->add_option("--quad-points", s.quad_points, "Periodic quadrature points (power of two)");
}

void add_rate_tuning(CLI::App* sub, Settings& s) {
  add_quadrature(sub, s);
  sub->add_option("--outer-grid", s.outer_grid, "Outer grid points per axis");
  sub->add_option("--max-grid-evals", s.max_grid_evals, "Cap on outer grid size");
  sub->add_option("--scalar-tol", s.scalar_tol, "Bracket width for the scalar inner problem");
  sub->add_option("--value-tol", s.value_tol, "Value tolerance of the vector inner problem");
  sub->add_option("--grad-tol", s.grad_tol, "Gradient tolerance of the vector inner problem");
  sub->add_flag("--bits", s.bits, "Report rates in bits instead of nats");
}

void add_exponent_tuning(CLI::App* sub, Settings& s) {
  add_quadrature(sub, s);
  sub->add_option("--rate", s.rate, "Rate R in nats");
  sub->add_option("--rate-grid", s.rate_grid, "lo:hi:count; emits an exponent-curve CSV");
  sub->add_option("--exp-grid", s.exp_grid, "Grid points per axis over (P_Y, rho)");
  sub->add_option("--py-max", s.py_max, "Upper edge of the P_Y box (0 = 4 (|h|^2 P_X + sigma2))");
  sub->add_flag("--bits", s.bits, "Report rates and exponents in bits");
}

Channel make_channel(const Settings& s) {
  Channel c{parse_list(s.h), s.sigma2, s.px};
  c.validate();
  return c;
}

Metric make_metric(const Settings& s) {
  Metric m{parse_list(s.alpha)};
  m.validate();
  return m;
}

RateOptions rate_options(const Settings& s) {
  RateOptions o;
  o.quadrature.points = s.quad_points;
  o.scalar.tolerance = s.scalar_tol;
  o.vector.value_tolerance = s.value_tol;
  o.vector.gradient_tolerance = s.grad_tol;
  o.outer.grid_points = s.outer_grid;
  o.outer.max_grid_evaluations = s.max_grid_evals;
  o.outer.threads = s.threads;
  if (s.outer_grid < 2) throw InvalidInput("outer grid needs at least 2 points per axis");
  return o;
}

ExponentOptions exponent_options(const Settings& s) {
  ExponentOptions o;
  o.quadrature.points = s.quad_points;
  o.grid_points = s.exp_grid;
  o.py_max = s.py_max;
  o.threads = s.threads;
  return o;
}

double unit_scale(const Settings& s) { return s.bits ? 1.0 / std::numbers::ln2 : 1.0; }
const char* unit_name(const Settings& s) { return s.bits ? "bits" : "nats"; }

/// Resolved values of every option of `sub`, defaults included.
json echo_config(const CLI::App& sub) {
  json cfg = json::object();
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string name = opt->get_single_name();
    if (name.empty() || name == "help" || name == "config") continue;
    if (opt->get_expected_max() == 0) {
      cfg[name] = opt->count() > 0 && opt->as<bool>();
      continue;
    }
    const std::string text = opt->count() > 0 ? opt->as<std::string>() : opt->get_default_str();
    const bool list = name == "h" || name == "alpha" || name == "phi" || name == "gamma";
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (!list && !text.empty() && end == text.c_str() + text.size() && std::isfinite(v)) {
      if (v == std::floor(v) && std::abs(v) < 9e15 && text.find_first_of(".eE") == std::string::npos) {
        cfg[name] = static_cast<long long>(v);
      } else {
        cfg[name] = num(v);
      }
    } else if (list && text.empty()) {
      cfg[name] = json::array();
    } else if (list || text.find(',') != std::string::npos) {
      try {
        cfg[name] = nums(parse_list(text));
      } catch (const InvalidInput&) {
        cfg[name] = text;
      }
    } else {
      cfg[name] = text;
    }
  }
  return cfg;
}

json rate_json(const RateResult& r, const Settings& s) {
  const double k = unit_scale(s);
  json j;
  j["rate"] = num(r.rate * k);
  j["raw_rate"] = num(r.raw_rate * k);
  j["units"] = unit_name(s);
  j["inner_argmin"] = nums(r.inner_argmin);
  j["outer_argmax"] = nums(r.outer_argmax);
  j["quadrature_points"] = r.quadrature_points;
  j["status"] = to_string(r.status);
  j["outer_status"] = to_string(r.outer_status);
  return j;
}

json exponent_json(const ExponentResult& r, const Settings& s) {
  const double k = unit_scale(s);
  json j;
  j["rate"] = num(r.rate * k);
  j["exponent"] = num(r.exponent * k);
  j["raw_exponent"] = num(r.raw_exponent * k);
  j["units"] = unit_name(s);
  j["p_y"] = num(r.p_y);
  j["rho"] = num(r.rho);
  j["omega_hat"] = nums(r.omega_hat);
  j["divergence"] = num(r.divergence * k);
  j["information"] = num(r.information * k);
  j["py_max"] = num(r.py_max);
  j["quadrature_points"] = r.quadrature_points;
  j["status"] = to_string(r.status);
  return j;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(parse_list(item).at(0));
  if (parts.size() != 3 || parts[2] < 1 || parts[2] != std::floor(parts[2]))
    throw InvalidInput("grid must be lo:hi:count, got '" + text + "'");
  return linspace(parts[0], parts[1], static_cast<std::size_t>(parts[2]));
}

std::vector<EnsembleSpec> parse_ensembles(const std::string& text) {
  std::vector<EnsembleSpec> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(EnsembleSpec::parse(item));
  if (out.empty()) throw InvalidInput("no ensembles selected");
  return out;
}

std::string document(const std::string& command, const CLI::App& sub, json result) {
  json j;
  j["command"] = command;
  j["config"] = echo_config(sub);
  j["result"] = std::move(result);
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Figure presets

struct FigurePreset {
  Channel channel;
  Metric metric;
  SweepAxis axis;
  std::vector<double> grid;
  std::vector<EnsembleSpec> ensembles;
};

std::string figure_four(const Settings& s) {
  const std::size_t points = s.figure_points ? s.figure_points : 31;
  const auto grid = linspace(0.0, 3.0, points);
  const RateOptions options = rate_options(s);
  std::vector<SweepRow> rows(2 * grid.size());
  parallel_for(
      rows.size(),
      [&](std::size_t idx) {
        const double h0 = grid[idx / 2];
        const Channel ch{{h0, 1.0}, 1.0, 1.0};
        SweepRow& row = rows[idx];
        row.value = h0;
        try {
          if (idx % 2 == 0) {
            row.ensemble = "fc0-best-alpha0";
            RateOptions serial = options;
            serial.outer.threads = 1;
            const auto value = [&](std::span<const double> a) {
              try {
                return rate_fc_fixed(ch, Metric{{a[0]}}, Autocov{{ch.input_power}}, serial).raw_rate;
              } catch (const Error&) {
                return -std::numeric_limits<double>::infinity();
              }
            };
            const OptResult best = maximize_outer(value, [](std::span<const double>) { return true; },
                                                  Box{{-3.0}, {3.0}}, serial.outer);
            if (best.status == OptStatus::infeasible) throw Infeasible("no alpha0 gave a finite rate");
            RateResult r = rate_fc_fixed(ch, Metric{{best.x[0]}}, Autocov{{ch.input_power}}, serial);
            r.outer_argmax = best.x;
            r.outer_status = best.status;
            row.result = r;
          } else {
            row.ensemble = "universal";
            row.result = rate_universal(ch);
          }
        } catch (const Error& e) {
          row.error = to_string(e.kind());
        }
      },
      s.threads);
  return sweep_csv(SweepAxis::parse("h0"), rows, unit_scale(s));
}

std::string reproduce_figure(const Settings& s) {
  const double r2 = 1.0 / std::numbers::sqrt2;
  const std::vector<EnsembleSpec> all{EnsembleSpec::parse("iid"), EnsembleSpec::parse("ar1"),
                                      EnsembleSpec::parse("fc0"), EnsembleSpec::parse("fc1")};
  FigurePreset f;
  const auto pts = [&](std::size_t preset) { return s.figure_points ? s.figure_points : preset; };
  switch (s.figure) {
    case 1:
      f = {Channel{{1.0}, 1.0, 1.0}, Metric{{1.0}}, SweepAxis::parse("alpha0"), linspace(0.2, 3.0, pts(29)),
           {EnsembleSpec::parse("iid"), EnsembleSpec::parse("fc0")}};
      break;
    case 2:
      f = {Channel{{r2, r2}, 1.0, 1.0}, Metric{{r2, r2}}, SweepAxis::parse("alpha1"), linspace(0.0, 1.5, pts(41)),
           all};
      break;
    case 3:
      f = {Channel{{2.0 / std::sqrt(5.0), 1.0 / std::sqrt(5.0)}, 1.0, 1.0}, Metric{{1.0, 1.0}},
           SweepAxis::parse("alpha0"), linspace(0.0, 2.0, pts(41)), all};
      break;
    case 4:
      return figure_four(s);
    case 5:
      f = {Channel{{r2, r2, r2}, 1.0, 1.0}, Metric{{1.0}}, SweepAxis::parse("alpha0"), linspace(0.05, 3.0, pts(60)),
           all};
      break;
    default:
      throw InvalidInput("figure must be one of 1, 2, 3, 4, 5");
  }
  const auto rows = sweep_rates(f.channel, f.metric, f.axis, f.grid, f.ensembles, rate_options(s));
  return sweep_csv(f.axis, rows, unit_scale(s));
}

// ---------------------------------------------------------------------------
// Config files

struct ConfigEntry {
  std::string section;  // empty: applies to every subcommand that has the key
  std::string key;
  std::string value;
  int line = 0;
};

std::vector<ConfigEntry> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path + "'");
  std::vector<ConfigEntry> out;
  std::string line, section;
  int number = 0;
  const auto trim = [](std::string t) {
    const auto a = t.find_first_not_of(" \t\r");
    if (a == std::string::npos) return std::string();
    const auto b = t.find_last_not_of(" \t\r");
    return t.substr(a, b - a + 1);
  };
  while (std::getline(in, line)) {
    ++number;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidInput(path + ":" + std::to_string(number) + ": expected key = value");
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    out.push_back({section, trim(line.substr(0, eq)), value, number});
  }
  return out;
}

/// Turns config entries into leading command-line arguments for `sub`; later flags win.
std::vector<std::string> config_arguments(const std::vector<ConfigEntry>& entries, const CLI::App& sub,
                                          const std::string& path) {
  std::vector<std::string> args;
  for (const auto& e : entries) {
    if (!e.section.empty() && e.section != sub.get_name()) continue;
    const CLI::Option* opt = sub.get_option_no_throw("--" + e.key);
    if (opt == nullptr || e.key == "config") {
      if (e.section.empty()) continue;
      throw InvalidInput(path + ":" + std::to_string(e.line) + ": unknown key '" + e.key + "' for " + e.section);
    }
    if (opt->get_expected_max() == 0) {
      if (e.value == "true" || e.value == "1") args.push_back("--" + e.key);
      else if (e.value != "false" && e.value != "0")
        throw InvalidInput(path + ":" + std::to_string(e.line) + ": flag '" + e.key + "' needs true or false");
      continue;
    }
    args.push_back("--" + e.key);
    args.push_back(e.value);
  }
  return args;
}

void emit(const std::string& text, const Settings& s, std::ostream& out) {
  if (s.output.empty()) {
    out << text;
    return;
  }
  std::ofstream file(s.output, std::ios::binary);
  if (!file) throw IoError("cannot open output file '" + s.output + "'");
  file << text;
  if (!file) throw IoError("failed writing output file '" + s.output + "'");
}

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_input:
      return kExitInvalidInput;
    case ErrorKind::infeasible:
      return kExitInfeasible;
    case ErrorKind::io:
      return kExitIo;
  }
  return kExitInvalidInput;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Achievable rates and error exponents for Gaussian ISI channels with mismatched decoding", "isimm"};
  app.option_defaults()->always_capture_default()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  auto* rate_ar = app.add_subcommand("rate-ar", "Autoregressive-ensemble rate (fixed --phi or optimized over --order)");
  add_io(rate_ar, s);
  add_channel(rate_ar, s);
  rate_ar->add_option("--alpha", s.alpha, "Metric taps alpha0,alpha1,...");
  rate_ar->add_option("--phi", s.phi, "AR coefficients phi1,...,phip (omit to optimize)");
  rate_ar->add_option("--order", s.order, "AR order p to optimize over");
  add_rate_tuning(rate_ar, s);

  auto* rate_fc = app.add_subcommand("rate-fc", "Fixed-composition rate (fixed --gamma or optimized over --order)");
  add_io(rate_fc, s);
  add_channel(rate_fc, s);
  rate_fc->add_option("--alpha", s.alpha, "Metric taps alpha0,alpha1,...");
  rate_fc->add_option("--gamma", s.gamma, "Autocovariances gamma1,...,gammap; gamma0 = P_X (omit to optimize)");
  rate_fc->add_option("--order", s.order, "Number of correlation constraints p to optimize over");
  add_rate_tuning(rate_fc, s);

  auto* rate_uni = app.add_subcommand("rate-universal", "Rate of the GLRT decoder");
  add_io(rate_uni, s);
  add_channel(rate_uni, s);
  rate_uni->add_flag("--bits", s.bits, "Report the rate in bits");

  auto* expo = app.add_subcommand("exponent", "Error exponent with memoryless metric alpha0 (sphere ensemble)");
  add_io(expo, s);
  add_channel(expo, s);
  expo->add_option("--alpha0", s.alpha0, "Memoryless metric coefficient");
  add_exponent_tuning(expo, s);

  auto* expo_uni = app.add_subcommand("exponent-universal", "Error exponent of the GLRT decoder");
  add_io(expo_uni, s);
  add_channel(expo_uni, s);
  add_exponent_tuning(expo_uni, s);

  auto* cap = app.add_subcommand("matched-capacity", "Water-filling capacity of the matched channel");
  add_io(cap, s);
  add_channel(cap, s);
  add_quadrature(cap, s);
  cap->add_flag("--bits", s.bits, "Report capacity in bits");

  auto* sweep = app.add_subcommand("sweep", "Rate sweep over one coefficient (CSV)");
  add_io(sweep, s);
  add_channel(sweep, s);
  sweep->add_option("--alpha", s.alpha, "Metric taps alpha0,alpha1,...");
  sweep->add_option("--axis", s.axis, "alphaK, hK, sigma2 or px");
  sweep->add_option("--from", s.from, "First grid value");
  sweep->add_option("--to", s.to, "Last grid value");
  sweep->add_option("--points", s.points, "Grid points");
  sweep->add_option("--ensembles", s.ensembles, "Comma list of iid, arN, fcN");
  add_rate_tuning(sweep, s);

  auto* sim = app.add_subcommand("simulate", "Monte Carlo error probability of a random code");
  add_io(sim, s);
  add_channel(sim, s);
  sim->add_option("--n", s.n, "Block length");
  sim->add_option("--rate", s.rate, "Rate in nats; M = ceil(exp(n R))");
  sim->add_option("--ensemble", s.ensemble, "iid, ar, sphere or typeclass");
  sim->add_option("--phi", s.phi, "AR coefficients for --ensemble ar");
  sim->add_option("--gamma", s.gamma, "gamma1,...,gammap for --ensemble typeclass");
  sim->add_option("--epsilon", s.epsilon, "Type-class tolerance as a fraction of P_X");
  sim->add_option("--decoder", s.decoder, "metric or glrt");
  sim->add_option("--alpha", s.alpha, "Metric taps for --decoder metric");
  sim->add_option("--trials", s.trials, "Monte Carlo trials");
  sim->add_option("--seed", s.seed, "Base seed");
  sim->add_option("--mode", s.mode, "auto, exhaustive or order-statistic");
  sim->add_option("--max-codewords", s.max_codewords, "Exhaustive decoding limit on M");

  auto* fig = app.add_subcommand("reproduce-figure", "Preset rate sweeps (CSV) for figures 1-5");
  add_io(fig, s);
  fig->add_option("figure", s.figure, "Figure number")->required()->check(CLI::Range(1, 5));
  fig->add_option("--points", s.figure_points, "Override the preset grid size (0 = preset)");
  add_rate_tuning(fig, s);

  try {
    std::vector<std::string> argv = args;
    // Config-file values become leading arguments so that explicit flags override them.
    if (!argv.empty()) {
      std::string config_path;
      for (std::size_t i = 1; i < argv.size(); ++i) {
        if (argv[i] == "--config" && i + 1 < argv.size()) config_path = argv[i + 1];
        else if (argv[i].rfind("--config=", 0) == 0) config_path = argv[i].substr(9);
      }
      CLI::App* target = app.get_subcommand_no_throw(argv[0]);
      if (!config_path.empty() && target != nullptr) {
        const auto extra = config_arguments(read_config(config_path), *target, config_path);
        argv.insert(argv.begin() + 1, extra.begin(), extra.end());
      }
    }
    std::reverse(argv.begin(), argv.end());
    app.parse(argv);

    if (*rate_ar) {
      const RateOptions o = rate_options(s);
      const RateResult r = s.phi.empty() ? rate_ar_opt(make_channel(s), make_metric(s), s.order, o)
                                         : rate_ar_fixed(make_channel(s), make_metric(s), parse_list(s.phi), o);
      emit(document("rate-ar", *rate_ar, rate_json(r, s)), s, out);
    } else if (*rate_fc) {
      const RateOptions o = rate_options(s);
      RateResult r;
      if (s.gamma.empty()) {
        r = rate_fc_opt(make_channel(s), make_metric(s), s.order, o);
      } else {
        std::vector<double> g{s.px};
        const auto lags = parse_list(s.gamma);
        g.insert(g.end(), lags.begin(), lags.end());
        r = rate_fc_fixed(make_channel(s), make_metric(s), Autocov{g}, o);
      }
      emit(document("rate-fc", *rate_fc, rate_json(r, s)), s, out);
    } else if (*rate_uni) {
      emit(document("rate-universal", *rate_uni, rate_json(rate_universal(make_channel(s)), s)), s, out);
    } else if (*expo || *expo_uni) {
      const bool universal = expo_uni->parsed();
      const CLI::App& sub = universal ? *expo_uni : *expo;
      const Channel ch = make_channel(s);
      const ExponentOptions o = exponent_options(s);
      const std::optional<double> a0 = universal ? std::nullopt : std::optional<double>(s.alpha0);
      if (!s.rate_grid.empty()) {
        emit(exponent_csv(exponent_curve(ch, a0, parse_grid(s.rate_grid), o), unit_scale(s)), s, out);
      } else {
        const ExponentResult r = universal ? error_exponent_universal(ch, s.rate, o)
                                           : error_exponent(ch, s.alpha0, s.rate, o);
        emit(document(sub.get_name(), sub, exponent_json(r, s)), s, out);
      }
    } else if (*cap) {
      QuadratureOptions q;
      q.points = s.quad_points;
      const CapacityResult c = matched_capacity(make_channel(s), q);
      json j;
      j["capacity"] = num(c.capacity * unit_scale(s));
      j["units"] = unit_name(s);
      j["water_level"] = num(c.water_level);
      j["allocated_power"] = num(c.allocated_power);
      j["quadrature_points"] = c.quadrature_points;
      emit(document("matched-capacity", *cap, j), s, out);
    } else if (*sweep) {
      const SweepAxis axis = SweepAxis::parse(s.axis);
      const auto rows = sweep_rates(make_channel(s), make_metric(s), axis, linspace(s.from, s.to, s.points),
                                    parse_ensembles(s.ensembles), rate_options(s));
      emit(sweep_csv(axis, rows, unit_scale(s)), s, out);
    } else if (*sim) {
      SimConfig c;
      c.n = s.n;
      c.rate = s.rate;
      c.codebook.kind = CodebookSpec::parse_kind(s.ensemble);
      if (!s.phi.empty()) c.codebook.phi = parse_list(s.phi);
      if (!s.gamma.empty()) c.codebook.gamma = parse_list(s.gamma);
      if (s.ensemble == "sphere" && !c.codebook.gamma.empty())
        throw InvalidInput("--gamma requires --ensemble typeclass");
      c.codebook.epsilon_fraction = s.epsilon;
      c.decoder = parse_decoder(s.decoder);
      c.alpha = parse_list(s.alpha);
      c.trials = s.trials;
      c.seed = s.seed;
      c.mode = parse_decode_mode(s.mode);
      c.threads = s.threads;
      c.max_codewords = s.max_codewords;
      const SimResult r = simulate_error_prob(c, make_channel(s));
      json j;
      j["command"] = "simulate";
      j["config"] = echo_config(*sim);
      j["error_prob"] = num(r.error_prob);
      j["ci_low"] = num(r.ci_low);
      j["ci_high"] = num(r.ci_high);
      j["errors"] = r.errors;
      j["trials"] = r.trials;
      j["seed"] = r.seed;
      j["codewords"] = num(r.codewords);
      j["decode_path"] = to_string(r.decode_path);
      j["wall_time"] = num(r.wall_time);
      emit(j.dump(2) + "\n", s, out);
    } else if (*fig) {
      emit(reproduce_figure(s), s, out);
    }
    return kExitOk;
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error [invalid-input]: " << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const Error& e) {
    err << "error [" << to_string(e.kind()) << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error [invalid-input]: " << e.what() << "\n";
    return kExitInvalidInput;
  }
}

}  // namespace isimm::cli
