#pragma once

// Command-line front end: dispersion, bands, action and verify.

#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "kpqhj/errors.hpp"

namespace kpqhj::cli {

enum ExitCode : int { kOk = 0, kConfigError = 1, kNumericError = 2 };

struct ConfigError : Error {
  using Error::Error;
};

struct RunConfig {
  double v0 = 10.0;
  double c = 1.0;
  double d = 1.0;
  double e_min = 0.1;
  double e_max = 40.0;
  int n_samples = 4000;
  double gamma = 1.0;
  double delta = 0.0;
  std::optional<double> energy;
  std::string format = "csv";
  std::string out;  // empty: stdout
  bool plot_script = false;
  int periods = 2;
  bool inject_error = false;
  std::map<std::string, double> tolerances;
};

// Shortest-free fixed rendering: 17 significant digits, '.' separator,
// independent of the locale.
std::string format_number(double value);

// key=value lines; '#' starts a comment. Throws ConfigError for unknown keys
// or malformed values.
void apply_config_text(const std::string& text, RunConfig& cfg);

// Throws ConfigError naming the first invalid field.
void validate(const RunConfig& cfg, const std::string& command);

// Names accepted by --tol and their defaults.
const std::map<std::string, double>& default_tolerances();

// Runs one invocation. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kpqhj::cli
