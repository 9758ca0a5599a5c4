#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "wdn/solver.hpp"

namespace wdn {

/// Adapter selection and worker count. Sources, later ones winning: built-in
/// defaults, the config file, environment variables, command-line flags.
struct Config {
  std::string adapter = "builtin";  // "builtin" or "external:ipopt"
  std::string ipopt_library;        // required by "external:ipopt"
  std::size_t workers = 1;
  std::size_t max_iterations = SolverOptions{}.max_iterations;
};

inline constexpr const char* kEnvConfig = "WDN_OPT_CONFIG";
inline constexpr const char* kEnvAdapter = "WDN_OPT_ADAPTER";
inline constexpr const char* kEnvIpoptLibrary = "WDN_OPT_IPOPT_LIBRARY";
inline constexpr const char* kEnvWorkers = "WDN_OPT_WORKERS";

using EnvLookup = std::function<std::optional<std::string>(const char*)>;

/// Reads the process environment.
std::optional<std::string> process_env(const char* name);

/// JSON object with optional keys "adapter", "ipopt_library", "workers",
/// "max_iterations"; unknown keys are rejected. Throws ParseError.
void apply_config_text(Config& config, std::string_view text);

/// Defaults, then the file named by `path` (or by WDN_OPT_CONFIG when `path`
/// is empty), then WDN_OPT_ADAPTER, WDN_OPT_IPOPT_LIBRARY and
/// WDN_OPT_WORKERS.
Config resolve_config(const std::string& path = {}, const EnvLookup& env = process_env);

/// "builtin" or "external:ipopt". Throws AdapterError for unknown names or a
/// missing Ipopt library path; nothing is searched for.
std::unique_ptr<SolverAdapter> make_adapter(std::string_view name, const Config& config);

}  // namespace wdn
