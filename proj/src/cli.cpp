#include "pce/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "pce/analysis.hpp"
#include "pce/errors.hpp"
#include "pce/fuel.hpp"
#include "pce/lindblad.hpp"
#include "pce/micromaser.hpp"

namespace pce::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void config_error(const std::string& what) {
  fail(ErrorKind::Config, what);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& text) {
  try {
    size_t used = 0;
    const double v = std::stod(text, &used);
    if (trim(text.substr(used)).empty() && std::isfinite(v)) return v;
  } catch (const std::exception&) {
  }
  config_error("'" + key + "' expects a number, got '" + text + "'");
}

long to_long(const std::string& key, const std::string& text) {
  const double v = to_double(key, text);
  if (v != std::floor(v) || std::abs(v) > 9e15) {
    config_error("'" + key + "' expects an integer, got '" + text + "'");
  }
  return static_cast<long>(v);
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(trim(item));
  return out;
}

void require(bool ok, const std::string& what) {
  if (!ok) config_error(what);
}

bool is_half_integer(double s) {
  return s >= 0.5 && std::abs(2.0 * s - std::round(2.0 * s)) < 1e-12;
}

std::string sibling(const std::string& path, const std::string& suffix) {
  std::filesystem::path p(path);
  const std::string stem = p.stem().string();
  return (p.parent_path() / (stem + suffix)).string();
}

class CsvWriter {
 public:
  CsvWriter(const std::string& command, const Settings& settings) {
    os_ << "# schema: " << kSchemaVersion << "\n";
    os_ << "# command: " << command << "\n";
    for (const auto& [k, v] : settings.all()) {
      os_ << "# config: " << k << "=" << v << "\n";
    }
  }

  void comment(const std::string& text) { os_ << "# " << text << "\n"; }

  void header(std::initializer_list<std::string> names) {
    header(std::vector<std::string>(names));
  }
  void header(const std::vector<std::string>& names) {
    for (size_t i = 0; i < names.size(); ++i) os_ << (i ? "," : "") << names[i];
    os_ << "\n";
  }

  template <typename... Cells>
  void row(const Cells&... cells) {
    bool first = true;
    ((os_ << (first ? "" : ",") << cell(cells), first = false), ...);
    os_ << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) os_ << (i ? "," : "") << cells[i];
    os_ << "\n";
  }

  std::string str() const { return os_.str(); }

 private:
  static std::string cell(double v) { return format_number(v); }
  static std::string cell(long v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }

  std::ostringstream os_;
};

}  // namespace

// -------------------------------------------------------------- Settings

Settings::Settings() {
  values_ = {
      {"omega", "6"},
      {"J", "0.8"},
      {"t_b", "1"},
      {"s_grid", "0.5:5:0.5"},
      {"lambda_grid", "0,0.25,0.5,0.75,0.9,1"},
      {"schemes", "collective,star"},
      {"star_max_n", "12"},
      {"omega_2pi_hz", "50e9"},
      {"q", "2e10"},
      {"gamma_2pi_hz", "33.3"},
      {"g_pi_hz", "50e3"},
      {"tau_s", "9.5e-6"},
      {"nex", "500,1500,2500,4500,6500"},
      {"n_max", "30"},
      {"tq", "3.28"},
      {"s", "5"},
      {"lambda", "1"},
      {"rel_tol", "1e-8"},
      {"window", "50"},
      {"max_cycles", "1000000"},
      {"stride", "100"},
      {"sweep_nex", "6500"},
      {"schedule_q", "2e10"},
      {"alpha", "1"},
      {"threads", "0"},
      {"fit_threshold", "5e-4"},
  };
}

void Settings::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file '" + path + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      config_error(path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    set(trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
}

void Settings::set(const std::string& key, const std::string& value) {
  if (!values_.contains(key)) config_error("unknown config key '" + key + "'");
  values_[key] = value;
}

const std::string& Settings::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) config_error("unknown config key '" + key + "'");
  return it->second;
}

// ------------------------------------------------------------- RunConfig

std::vector<double> parse_grid(const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) config_error("empty grid");
  if (t.find(':') != std::string::npos) {
    const auto parts = split(t, ':');
    if (parts.size() != 3) config_error("range grid must be start:stop:step");
    const double start = to_double("grid", parts[0]);
    const double stop = to_double("grid", parts[1]);
    const double step = to_double("grid", parts[2]);
    if (!(step > 0.0) || stop < start) config_error("range grid needs step > 0, stop >= start");
    const long count = std::lround(std::floor((stop - start) / step + 1e-9)) + 1;
    if (count > 100000) config_error("range grid too large");
    std::vector<double> out;
    for (long k = 0; k < count; ++k) out.push_back(start + static_cast<double>(k) * step);
    return out;
  }
  std::vector<double> out;
  for (const auto& item : split(t, ',')) out.push_back(to_double("grid", item));
  return out;
}

RunConfig RunConfig::from_settings(const std::string& command, const Settings& s) {
  RunConfig c;
  c.command = command;
  auto num = [&](const char* k) { return to_double(k, s.get(k)); };
  auto integer = [&](const char* k) { return to_long(k, s.get(k)); };

  c.omega = num("omega");
  c.J = num("J");
  c.T_b = num("t_b");
  c.s_grid = parse_grid(s.get("s_grid"));
  c.lambda_grid = parse_grid(s.get("lambda_grid"));
  c.schemes = split(s.get("schemes"), ',');
  c.star_max_n = static_cast<int>(integer("star_max_n"));
  c.omega_2pi_hz = num("omega_2pi_hz");
  c.q = parse_grid(s.get("q"));
  c.gamma_2pi_hz = parse_grid(s.get("gamma_2pi_hz"));
  c.g_pi_hz = num("g_pi_hz");
  c.tau_s = num("tau_s");
  c.nex = parse_grid(s.get("nex"));
  c.n_max = static_cast<int>(integer("n_max"));
  if (s.get("tq") == "model") {
    c.tq_from_model = true;
  } else {
    c.tq = num("tq");
  }
  c.s = num("s");
  c.lambda = num("lambda");
  c.rel_tol = num("rel_tol");
  c.window = integer("window");
  c.max_cycles = integer("max_cycles");
  c.stride = integer("stride");
  c.sweep_nex = num("sweep_nex");
  c.schedule_q = num("schedule_q");
  c.alpha = num("alpha");
  c.threads = static_cast<unsigned>(std::max(0L, integer("threads")));
  c.fit_threshold = num("fit_threshold");

  require(c.omega > 0.0, "omega must be > 0");
  require(c.J >= 0.0, "J must be >= 0");
  require(c.T_b > 0.0, "t_b must be > 0");
  for (double x : c.s_grid) require(is_half_integer(x), "s_grid entries must be positive half-integers");
  for (double x : c.lambda_grid) require(x >= 0.0, "lambda_grid entries must be >= 0");
  require(!c.schemes.empty(), "schemes must not be empty");
  for (const auto& sc : c.schemes) {
    require(sc == "collective" || sc == "star", "unknown scheme '" + sc + "'");
  }
  require(c.star_max_n >= 1, "star_max_n must be >= 1");
  require(c.omega_2pi_hz > 0.0, "omega_2pi_hz must be > 0");
  for (double x : c.q) require(x > 0.0, "q entries must be > 0");
  for (double x : c.gamma_2pi_hz) require(x >= 0.0, "gamma_2pi_hz entries must be >= 0");
  require(c.g_pi_hz >= 0.0, "g_pi_hz must be >= 0");
  require(c.tau_s > 0.0, "tau_s must be > 0");
  for (double x : c.nex) require(x >= 1.0, "nex entries must be >= 1");
  require(c.n_max >= 10, "n_max must be >= 10");
  require(c.tq_from_model || c.tq > 0.0, "tq must be > 0 or 'model'");
  require(is_half_integer(c.s), "s must be a positive half-integer");
  require(c.lambda >= 0.0, "lambda must be >= 0");
  require(c.rel_tol > 0.0, "rel_tol must be > 0");
  require(c.window >= 1, "window must be >= 1");
  require(c.max_cycles >= 1, "max_cycles must be >= 1");
  require(c.stride >= 1, "stride must be >= 1");
  require(c.sweep_nex >= 1.0, "sweep_nex must be >= 1");
  require(c.schedule_q > 0.0, "schedule_q must be > 0");
  require(c.alpha > 0.0, "alpha must be > 0");
  require(c.fit_threshold >= 0.0, "fit_threshold must be >= 0");
  return c;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// ------------------------------------------------------------- commands

namespace {

MicromaserParams micromaser_params(const RunConfig& c, double q, double gamma_hz,
                                   double nex) {
  return MicromaserParams::from_lab_units(c.omega_2pi_hz, q, gamma_hz, c.g_pi_hz,
                                          c.tau_s, nex, c.n_max, c.omega / c.T_b);
}

std::string default_out(const RunConfig& c) {
  return c.out.empty() ? c.command + ".csv" : c.out;
}

}  // namespace

CommandResult cmd_fuel_temp(const RunConfig& c, const Settings& settings) {
  CsvWriter csv("fuel-temp", settings);
  csv.header({"scheme", "S", "lambda", "p_e", "Tq_over_Tb", "eta"});
  CommandResult result;
  for (const auto& scheme : c.schemes) {
    for (double S : c.s_grid) {
      for (double lambda : c.lambda_grid) {
        FuelModel model;
        if (scheme == "star") {
          StarModelParams p;
          p.omega = c.omega;
          p.J = c.J;
          p.lambda = lambda;
          p.N = static_cast<int>(std::lround(2.0 * S));
          p.max_outer_spins = c.star_max_n;
          if (p.N > c.star_max_n) {
            csv.comment("flagged: star scheme N=" + std::to_string(p.N) +
                        " exceeds star_max_n=" + std::to_string(c.star_max_n));
            csv.row(scheme, S, lambda, kNaN, kNaN, kNaN);
            continue;
          }
          model = p;
        } else {
          model = CollectiveModelParams{c.omega, c.J, lambda, S};
        }
        const CentralSpinState fuel = central_spin_state(model, c.T_b);
        double tq = kNaN, eta = kNaN;
        try {
          tq = effective_temperature(fuel).value / c.T_b;
          eta = carnot_efficiency(tq, 1.0);
        } catch (const Error& e) {
          csv.comment("flagged: " + std::string(to_string(e.kind())) + ": " + e.what());
        }
        csv.row(scheme, S, lambda, fuel.p_e, tq, eta);
      }
    }
  }
  result.files.push_back({default_out(c), csv.str()});
  return result;
}

CommandResult cmd_coarse(const RunConfig& c, const Settings& settings) {
  CsvWriter csv("coarse", settings);
  csv.header({"S", "lambda", "p_e", "n_bar", "Tf_over_Tb", "trace_distance"});
  const double omega = c.omega / c.T_b;
  for (double S : c.s_grid) {
    for (double lambda : c.lambda_grid) {
      const CentralSpinState fuel =
          central_spin_state(CollectiveModelParams{c.omega, c.J, lambda, S}, c.T_b);
      const CoarseGrainedParams p{c.alpha, fuel.p_e};
      const ThermalField analytic = coarse_grained_steady_field(p, omega);
      const DensityMatrix numeric = steady_state(coarse_grained_generator(p, c.n_max));
      const DensityMatrix expected = thermal_fock_state(c.n_max, analytic.mean_photons);
      csv.row(S, lambda, fuel.p_e, analytic.mean_photons, analytic.temperature,
              trace_distance(numeric.matrix(), expected.matrix()));
    }
  }
  CommandResult result;
  result.files.push_back({default_out(c), csv.str()});
  return result;
}

CommandResult cmd_micromaser(const RunConfig& c, const Settings& settings) {
  CentralSpinState fuel =
      c.tq_from_model
          ? central_spin_state(CollectiveModelParams{c.omega, c.J, c.lambda, c.s}, c.T_b)
          : CentralSpinState::thermal(c.omega, c.tq * c.T_b);
  // Work in units of T_b from here on.
  fuel.omega = c.omega / c.T_b;
  const double tq = effective_temperature(fuel).value;

  CsvWriter trace_csv("micromaser", settings);
  trace_csv.header({"N_ex", "cycle", "time", "n_bar", "Tf_over_Tb"});
  CsvWriter summary("micromaser-summary", settings);
  summary.header({"N_ex", "rate", "tau0", "cycles", "converged", "steady_Tf_over_Tb",
                  "cg_Tq_over_Tb", "status"});

  CommandResult result;
  const Convergence conv{c.rel_tol, c.window, c.max_cycles};
  for (double nex : c.nex) {
    try {
      const Micromaser engine(micromaser_params(c, c.q.front(), c.gamma_2pi_hz.front(), nex),
                              fuel);
      const TemperatureTrace trace = engine.run(conv);
      for (size_t k = 0; k < trace.samples.size(); ++k) {
        if (k % static_cast<size_t>(c.stride) != 0 && k + 1 != trace.samples.size()) continue;
        const auto& s = trace.samples[k];
        trace_csv.row(nex, static_cast<long>(k), s.time, s.mean_photons, s.temperature);
      }
      summary.row(nex, engine.stages().schedule.rate, engine.stages().schedule.tau0,
                  trace.cycles, trace.converged ? 1 : 0, trace.steady_temperature, tq,
                  trace.converged ? "ok" : "not-converged");
      if (!trace.converged && result.exit_code == kOk) result.exit_code = kNotConverged;
    } catch (const Error& e) {
      summary.row(nex, kNaN, kNaN, 0L, 0, kNaN, tq, to_string(e.kind()));
      result.exit_code = kRuntimeError;
      result.message += std::string("N_ex=") + format_number(nex) + ": " + e.what() + "\n";
    }
  }
  const std::string out = default_out(c);
  result.files.push_back({out, trace_csv.str()});
  result.files.push_back({sibling(out, "_summary.csv"), summary.str()});
  return result;
}

CommandResult cmd_sweep_fit(const RunConfig& c, const Settings& settings) {
  struct Series {
    std::string label;
    std::optional<MicromaserParams> params;
  };
  std::vector<Series> series{{"cg", std::nullopt}};
  const double schedule_kappa = kTwoPi * c.omega_2pi_hz / c.schedule_q;
  for (double q : c.q) {
    for (double gamma : c.gamma_2pi_hz) {
      MicromaserParams p = micromaser_params(c, q, gamma, c.sweep_nex);
      p.schedule_kappa = schedule_kappa;
      series.push_back({"mm_Q" + show(q) + "_g" + show(gamma), p});
    }
  }

  std::vector<SweepPoint> grid;
  for (double lambda : c.lambda_grid) {
    for (double S : c.s_grid) {
      for (const auto& s : series) {
        SweepPoint pt;
        pt.S = S;
        pt.lambda = lambda;
        pt.omega = c.omega / c.T_b;
        pt.J = c.J / c.T_b;
        pt.micromaser = s.params;
        grid.push_back(pt);
      }
    }
  }
  const std::vector<SweepRow> rows = steady_sweep(grid, c.threads);

  CommandResult result;
  CsvWriter csv("sweep-fit", settings);
  std::vector<std::string> header{"lambda", "S"};
  for (const auto& s : series) header.push_back(s.label);
  csv.header(header);

  CsvWriter fits("sweep-fit-fits", settings);
  fits.header({"lambda", "series", "degree", "a", "b", "c", "d", "e", "R2"});

  size_t k = 0;
  for (double lambda : c.lambda_grid) {
    std::vector<std::vector<double>> ys(series.size());
    for (double S : c.s_grid) {
      std::vector<std::string> cells{format_number(lambda), format_number(S)};
      for (size_t j = 0; j < series.size(); ++j, ++k) {
        const SweepRow& r = rows[k];
        if (!r.ok()) {
          csv.comment("error at lambda=" + format_number(lambda) + " S=" +
                      format_number(S) + " " + series[j].label + ": " + r.error);
          result.exit_code = kRuntimeError;
        }
        cells.push_back(format_number(r.ok() ? r.T_f : kNaN));
        ys[j].push_back(r.ok() ? r.T_f : kNaN);
      }
      csv.row(cells);
    }
    for (size_t j = 0; j < series.size(); ++j) {
      std::vector<double> xs_ok, ys_ok;
      for (size_t i = 0; i < c.s_grid.size(); ++i) {
        if (std::isfinite(ys[j][i])) {
          xs_ok.push_back(c.s_grid[i]);
          ys_ok.push_back(ys[j][i]);
        }
      }
      try {
        const FitResult f = select_model(xs_ok, ys_ok, c.fit_threshold);
        const auto& co = f.coefficients;
        fits.row(lambda, series[j].label, f.degree, co[0], co[1], co[2], co[3], co[4],
                 f.r_squared);
      } catch (const Error& e) {
        fits.comment("fit failed for lambda=" + format_number(lambda) + " " +
                     series[j].label + ": " + e.what());
      }
    }
  }
  const std::string out = default_out(c);
  result.files.push_back({out, csv.str()});
  result.files.push_back({sibling(out, "_fit.csv"), fits.str()});
  return result;
}

// ------------------------------------------------------------------ run

namespace {

void write_atomically(const OutputFile& f) {
  const std::filesystem::path target(f.path);
  if (target.has_parent_path()) std::filesystem::create_directories(target.parent_path());
  const std::filesystem::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) fail(ErrorKind::Config, "cannot write '" + tmp.string() + "'");
    os << f.contents;
  }
  std::filesystem::rename(tmp, target);
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Config: return kConfigError;
    case ErrorKind::NonConvergence: return kNotConverged;
    default: return kRuntimeError;
  }
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spin-star fuelled photonic Carnot engine simulator"};
  app.require_subcommand(1);

  std::string config_path, out_path, s_grid, lambda_grid, nex, q, gamma, threshold;
  std::vector<std::string> overrides;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "key=value config file");
    sub->add_option("--out", out_path, "output CSV path");
    sub->add_option("--s-grid", s_grid, "spin magnitudes, list or start:stop:step");
    sub->add_option("--lambda-grid", lambda_grid, "anisotropy ratios");
    sub->add_option("--nex", nex, "atoms per photon lifetime");
    sub->add_option("--q", q, "cavity quality factors");
    sub->add_option("--gamma-2pi", gamma, "atomic decay rates gamma/2pi in Hz");
    sub->add_option("--fit-threshold", threshold, "R^2 gain needed to raise the fit degree");
    sub->add_option("--set", overrides, "override any config key (key=value)");
  };
  for (const char* name : {"fuel-temp", "coarse", "micromaser", "sweep-fit"}) {
    add_common(app.add_subcommand(name));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    Settings settings;
    if (!config_path.empty()) settings.load_file(config_path);
    const std::pair<const char*, const std::string*> flags[] = {
        {"s_grid", &s_grid}, {"lambda_grid", &lambda_grid}, {"nex", &nex},
        {"q", &q}, {"gamma_2pi_hz", &gamma}, {"fit_threshold", &threshold}};
    for (const auto& [key, value] : flags) {
      if (!value->empty()) settings.set(key, *value);
    }
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) config_error("--set expects key=value, got '" + kv + "'");
      settings.set(trim(kv.substr(0, eq)), trim(kv.substr(eq + 1)));
    }
    RunConfig config = RunConfig::from_settings(command, settings);
    config.out = out_path;

    CommandResult result;
    if (command == "fuel-temp") result = cmd_fuel_temp(config, settings);
    else if (command == "coarse") result = cmd_coarse(config, settings);
    else if (command == "micromaser") result = cmd_micromaser(config, settings);
    else result = cmd_sweep_fit(config, settings);

    for (const auto& f : result.files) {
      write_atomically(f);
      out << "wrote " << f.path << "\n";
    }
    if (!result.message.empty()) err << result.message;
    return result.exit_code;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
}

}  // namespace pce::cli
