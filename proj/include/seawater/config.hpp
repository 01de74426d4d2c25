#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "format.hpp"
#include "initial.hpp"
#include "params.hpp"

namespace seawater {

/// Everything a command needs. Defaults reproduce the reference experiment on
/// a 32 x 32 grid.
struct RunConfig {
  double rho = 0.9;
  double nu = 1.0;
  std::optional<double> mass_f; // profile only; runs take the masses of the initial data
  std::optional<double> mass_g;
  int grid_n = 32;
  std::string mesh_file; // overrides grid_n when set
  double t_max = 5.0;
  double dt_max = 2e-4;
  double newton_tol = 1e-9;
  int newton_max_iter = 30;
  std::string initial = "paper-5.2";
  std::string out_dir = ".";
  unsigned long long seed = 0; // reserved
  std::vector<double> nus;
  int workers = 1;
  double checkpoint_interval = 1.0;
  int profile_samples = 201;

  bool operator==(const RunConfig &) const = default;

  void validate() const {
    PhysicalParams{rho, nu, 1.0, 1.0}.validate_coefficients();
    if (mass_f && !(*mass_f > 0.0))
      throw InvalidArgument("mass_f must be positive");
    if (mass_g && !(*mass_g > 0.0))
      throw InvalidArgument("mass_g must be positive");
    if (mesh_file.empty() && grid_n < 2)
      throw InvalidArgument("grid_n must be at least 2");
    if (!(t_max >= 0.0) || !std::isfinite(t_max))
      throw InvalidArgument("t_max must be nonnegative");
    if (!(dt_max > 0.0))
      throw InvalidArgument("dt_max must be positive");
    if (!(newton_tol > 0.0))
      throw InvalidArgument("newton_tol must be positive");
    if (newton_max_iter < 1)
      throw InvalidArgument("newton_max_iter must be at least 1");
    if (workers < 1)
      throw InvalidArgument("workers must be at least 1");
    if (!(checkpoint_interval > 0.0))
      throw InvalidArgument("checkpoint_interval must be positive");
    if (profile_samples < 2)
      throw InvalidArgument("profile_samples must be at least 2");
    for (double v : nus)
      if (!(v > 0.0) || !std::isfinite(v))
        throw InvalidArgument("every nu in the sweep list must be positive");
    parse_initial_condition(initial);
  }
};

inline std::vector<double> parse_double_list(std::string_view text) {
  std::vector<double> out;
  for (auto item : split(text, ','))
    if (!trim(item).empty())
      out.push_back(parse_double(item));
  return out;
}

inline std::string format_double_list(const std::vector<double> &v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i)
      out += ',';
    out += format_double(v[i]);
  }
  return out;
}

namespace detail {

struct ConfigKey {
  const char *name;
  std::function<void(RunConfig &, std::string_view)> set;
  std::function<std::optional<std::string>(const RunConfig &)> get;
};

inline int parse_int(std::string_view v) {
  const long long x = parse_integer(v);
  if (x < -2147483647LL || x > 2147483647LL)
    throw ParseError("integer out of range: " + std::string(v));
  return static_cast<int>(x);
}

inline const std::vector<ConfigKey> &config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"rho", [](RunConfig &c, std::string_view v) { c.rho = parse_double(v); },
       [](const RunConfig &c) -> std::optional<std::string> { return format_double(c.rho); }},
      {"nu", [](RunConfig &c, std::string_view v) { c.nu = parse_double(v); },
       [](const RunConfig &c) -> std::optional<std::string> { return format_double(c.nu); }},
      {"mass_f", [](RunConfig &c, std::string_view v) { c.mass_f = parse_double(v); },
       [](const RunConfig &c) -> std::optional<std::string> {
         if (!c.mass_f)
           return std::nullopt;
         return format_double(*c.mass_f);
       }},
      {"mass_g", [](RunConfig &c, std::string_view v) { c.mass_g = parse_double(v); },
       [](const RunConfig &c) -> std::optional<std::string> {
         if (!c.mass_g)
           return std::nullopt;
         return format_double(*c.mass_g);
       }},
      {"grid_n", [](RunConfig &c, std::string_view v) { c.grid_n = parse_int(v); },
       [](const RunConfig &c) -> std::optional<std::string> { return std::to_string(c.grid_n); }},
      {"mesh_file", [](RunConfig &c, std::string_view v) { c.mesh_file = std::string(v); },
       [](const RunConfig &c) -> std::optional<std::string> { return c.mesh_file; }},
      {"t_max", [](RunConfig &c, std::string_view v) { c.t_max = parse_double(v); },
       [](const RunConfig &c) -> std::optional<std::string> { return format_double(c.t_max); }},
      {"dt_max", [](RunConfig &c, std::string_view v) { c.dt_max = parse_double(v); },
       [](const RunConfig &c) -> std::optional<std::string> { return format_double(c.dt_max); }},
      {"newton_tol", [](RunConfig &c, std::string_view v) { c.newton_tol = parse_double(v); },
       [](const RunConfig &c) -> std::optional<std::string> {
         return format_double(c.newton_tol);
       }},
      {"newton_max_iter",
       [](RunConfig &c, std::string_view v) { c.newton_max_iter = parse_int(v); },
       [](const RunConfig &c) -> std::optional<std::string> {
         return std::to_string(c.newton_max_iter);
       }},
      {"initial", [](RunConfig &c, std::string_view v) { c.initial = std::string(v); },
       [](const RunConfig &c) -> std::optional<std::string> { return c.initial; }},
      {"out_dir", [](RunConfig &c, std::string_view v) { c.out_dir = std::string(v); },
       [](const RunConfig &c) -> std::optional<std::string> { return c.out_dir; }},
      {"seed",
       [](RunConfig &c, std::string_view v) {
         const long long x = parse_integer(v);
         if (x < 0)
           throw ParseError("seed must be nonnegative");
         c.seed = static_cast<unsigned long long>(x);
       },
       [](const RunConfig &c) -> std::optional<std::string> { return std::to_string(c.seed); }},
      {"nus", [](RunConfig &c, std::string_view v) { c.nus = parse_double_list(v); },
       [](const RunConfig &c) -> std::optional<std::string> {
         return format_double_list(c.nus);
       }},
      {"workers", [](RunConfig &c, std::string_view v) { c.workers = parse_int(v); },
       [](const RunConfig &c) -> std::optional<std::string> {
         return std::to_string(c.workers);
       }},
      {"checkpoint_interval",
       [](RunConfig &c, std::string_view v) { c.checkpoint_interval = parse_double(v); },
       [](const RunConfig &c) -> std::optional<std::string> {
         return format_double(c.checkpoint_interval);
       }},
      {"profile_samples",
       [](RunConfig &c, std::string_view v) { c.profile_samples = parse_int(v); },
       [](const RunConfig &c) -> std::optional<std::string> {
         return std::to_string(c.profile_samples);
       }},
  };
  return keys;
}

inline const ConfigKey *find_key(std::string_view name) {
  for (const auto &k : config_keys())
    if (name == k.name)
      return &k;
  return nullptr;
}

} // namespace detail

inline std::vector<std::string> config_key_names() {
  std::vector<std::string> out;
  for (const auto &k : detail::config_keys())
    out.emplace_back(k.name);
  return out;
}

/// Sets one field from its textual value; unknown keys are a ParseError.
inline void set_config_value(RunConfig &c, std::string_view key, std::string_view value) {
  const auto *k = detail::find_key(trim(key));
  if (!k)
    throw ParseError("unknown config key '" + std::string(trim(key)) + "'");
  k->set(c, trim(value));
}

/// Flat `key = value` text; '#' starts a comment, blank lines are ignored.
/// Keys not present keep the values already in `base`.
inline RunConfig parse_config(std::istream &in, RunConfig base = {}) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const auto body = trim(line);
    if (body.empty())
      continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos)
      throw ParseError("config line " + std::to_string(lineno) + ": expected key = value");
    set_config_value(base, body.substr(0, eq), body.substr(eq + 1));
  }
  return base;
}

inline RunConfig parse_config(std::string_view text, RunConfig base = {}) {
  std::istringstream in{std::string(text)};
  return parse_config(in, std::move(base));
}

inline RunConfig load_config(const std::string &path, RunConfig base = {}) {
  std::ifstream in(path);
  if (!in)
    throw ParseError("cannot open config file '" + path + "'");
  return parse_config(in, std::move(base));
}

inline std::string serialize_config(const RunConfig &c) {
  std::string out;
  for (const auto &k : detail::config_keys())
    if (auto v = k.get(c))
      out += std::string(k.name) + " = " + *v + '\n';
  return out;
}

inline constexpr const char *kEnvPrefix = "SEAWATER_";

/// Applies SEAWATER_<KEY> variables (key upper-cased, e.g. SEAWATER_DT_MAX).
/// `lookup` defaults to std::getenv.
inline void apply_env_overrides(
    RunConfig &c,
    const std::function<const char *(const char *)> &lookup = [](const char *name) {
      return std::getenv(name);
    }) {
  for (const auto &k : detail::config_keys()) {
    std::string var = kEnvPrefix;
    for (const char *p = k.name; *p; ++p)
      var += static_cast<char>(std::toupper(static_cast<unsigned char>(*p)));
    if (const char *v = lookup(var.c_str()))
      k.set(c, v);
  }
}

} // namespace seawater
