#include "stwt/run_config.hpp"

#include <charconv>
#include <fstream>
#include <istream>

namespace stwt {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("invalid value '" + std::string(text) + "' for " + std::string(key));
  }
  return value;
}

}  // namespace

void set_epsilon(RunConfig& cfg, double value) {
  if (!(value > 0.0 && value < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  cfg.epsilon = value;
}

void set_max_horizon(RunConfig& cfg, int value) {
  if (value < 1) throw ConfigError("max_horizon must be >= 1");
  cfg.max_horizon = value;
}

void set_min_support(RunConfig& cfg, double value) {
  if (!(value >= 0.0)) throw ConfigError("min_support must be >= 0");
  cfg.min_support = value;
}

OutputFormat parse_output_format(std::string_view text) {
  if (text == "csv") return OutputFormat::Csv;
  if (text == "json") return OutputFormat::Json;
  throw ConfigError("unknown format '" + std::string(text) + "' (expected csv or json)");
}

FallbackPolicy parse_fallback_policy(std::string_view text) {
  if (text == "uniform") return FallbackPolicy::Uniform;
  if (text == "absorbing_fs") return FallbackPolicy::AbsorbingFs;
  throw ConfigError("unknown fallback policy '" + std::string(text) +
                    "' (expected uniform or absorbing_fs)");
}

RunConfig parse_run_config(std::istream& in, RunConfig cfg) {
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    const auto content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    const auto eq = content.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_number) + ": expected key=value");
    }
    const auto key = trim(content.substr(0, eq));
    const auto value = trim(content.substr(eq + 1));
    if (key == "epsilon") {
      set_epsilon(cfg, parse_number<double>(key, value));
    } else if (key == "max_horizon") {
      set_max_horizon(cfg, parse_number<int>(key, value));
    } else if (key == "min_support") {
      set_min_support(cfg, parse_number<double>(key, value));
    } else if (key == "format") {
      cfg.format = parse_output_format(value);
    } else if (key == "fallback_policy") {
      cfg.fallback_policy = parse_fallback_policy(value);
    } else {
      throw ConfigError("config line " + std::to_string(line_number) + ": unknown key '" +
                        std::string(key) + "'");
    }
  }
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_run_config(in, base);
}

}  // namespace stwt
