#pragma once

// Command-line driver. Subcommands: fuel-temp, coarse, micromaser, sweep-fit.
// Output is CSV with '#' comment lines carrying the schema version and the
// fully resolved configuration.

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace pce::cli {

inline constexpr const char* kSchemaVersion = "pce-csv/1";

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kRuntimeError = 3,
  kNotConverged = 4,
};

/// key=value settings: defaults, then a config file, then flag overrides.
class Settings {
 public:
  Settings();

  void load_file(const std::string& path);
  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;
  const std::map<std::string, std::string>& all() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

struct RunConfig {
  std::string command;
  std::string out;

  // fuel, in units of T_b
  double omega = 6.0;
  double J = 0.8;
  double T_b = 1.0;
  std::vector<double> s_grid;
  std::vector<double> lambda_grid;
  std::vector<std::string> schemes;
  int star_max_n = 12;

  // micromaser, lab notation
  double omega_2pi_hz = 50e9;
  std::vector<double> q;
  std::vector<double> gamma_2pi_hz;
  double g_pi_hz = 50e3;
  double tau_s = 9.5e-6;
  std::vector<double> nex;
  int n_max = 30;
  bool tq_from_model = false;
  double tq = 3.28;
  double s = 5.0;
  double lambda = 1.0;
  double rel_tol = 1e-8;
  long window = 50;
  long max_cycles = 1'000'000;
  long stride = 100;

  // sweep
  double sweep_nex = 6500.0;
  double schedule_q = 2e10;
  double alpha = 1.0;
  unsigned threads = 0;

  double fit_threshold = 5e-4;

  /// Parses and validates every field; throws Error(Config).
  static RunConfig from_settings(const std::string& command, const Settings& s);
};

/// Parses a grid: "a,b,c" or the inclusive range "start:stop:step".
std::vector<double> parse_grid(const std::string& text);

/// Fixed 10-significant-digit formatting used for every CSV number.
std::string format_number(double v);

struct OutputFile {
  std::string path;
  std::string contents;
};

struct CommandResult {
  std::vector<OutputFile> files;
  int exit_code = kOk;
  std::string message;
};

CommandResult cmd_fuel_temp(const RunConfig& config, const Settings& settings);
CommandResult cmd_coarse(const RunConfig& config, const Settings& settings);
CommandResult cmd_micromaser(const RunConfig& config, const Settings& settings);
CommandResult cmd_sweep_fit(const RunConfig& config, const Settings& settings);

/// Entry point used by the executable; writes files only after the whole
/// command succeeded or finished with per-point errors.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace pce::cli
