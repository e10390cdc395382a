#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "stwt/estimation.hpp"
#include "stwt/markov_fpt.hpp"

namespace stwt {

enum class OutputFormat { Csv, Json };

struct RunConfig {
  double epsilon = 1e-9;
  int max_horizon = 4000;
  double min_support = 30.0;
  OutputFormat format = OutputFormat::Csv;
  FallbackPolicy fallback_policy = FallbackPolicy::Uniform;

  FptOptions fpt_options() const { return {epsilon, max_horizon}; }
  EstimationOptions estimation_options() const { return {min_support}; }
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reads "key = value" lines over `base`. Blank lines and lines starting
/// with '#' are ignored. Keys: epsilon, max_horizon, min_support, format,
/// fallback_policy. Throws ConfigError on unknown keys or bad values.
RunConfig parse_run_config(std::istream& in, RunConfig base = {});
RunConfig load_run_config(const std::filesystem::path& path, RunConfig base = {});

/// Setters shared by the config file and the command line; all throw
/// ConfigError on invalid input.
void set_epsilon(RunConfig& cfg, double value);
void set_max_horizon(RunConfig& cfg, int value);
void set_min_support(RunConfig& cfg, double value);
OutputFormat parse_output_format(std::string_view text);
FallbackPolicy parse_fallback_policy(std::string_view text);

}  // namespace stwt
