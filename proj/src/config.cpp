#include "wdn/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "wdn/errors.hpp"

namespace wdn {

namespace {

std::size_t parse_count(const std::string& text, const char* what) {
  std::size_t pos = 0;
  unsigned long long value = 0;
  try {
    value = std::stoull(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != text.size() || value == 0) {
    throw ParseError(std::string(what) + " must be a positive integer, got '" + text + "'");
  }
  return static_cast<std::size_t>(value);
}

}  // namespace

std::optional<std::string> process_env(const char* name) {
  const char* value = std::getenv(name);
  if (!value || !*value) return std::nullopt;
  return std::string(value);
}

void apply_config_text(Config& config, std::string_view text) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed config: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("config must be a JSON object");
  try {
    for (const auto& [key, value] : doc.items()) {
      if (key == "adapter") {
        config.adapter = value.get<std::string>();
      } else if (key == "ipopt_library") {
        config.ipopt_library = value.get<std::string>();
      } else if (key == "workers") {
        config.workers = parse_count(std::to_string(value.get<long long>()), "workers");
      } else if (key == "max_iterations") {
        config.max_iterations = parse_count(std::to_string(value.get<long long>()), "max_iterations");
      } else {
        throw ParseError("unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed config: ") + e.what());
  }
}

Config resolve_config(const std::string& path, const EnvLookup& env) {
  Config config;
  std::string file = path;
  if (file.empty()) file = env(kEnvConfig).value_or("");
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open config '" + file + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    apply_config_text(config, buffer.str());
  }
  if (auto v = env(kEnvAdapter)) config.adapter = *v;
  if (auto v = env(kEnvIpoptLibrary)) config.ipopt_library = *v;
  if (auto v = env(kEnvWorkers)) config.workers = parse_count(*v, kEnvWorkers);
  return config;
}

std::unique_ptr<SolverAdapter> make_adapter(std::string_view name, const Config& config) {
  if (name == "builtin") return std::make_unique<BuiltinSolver>();
  if (name == "external:ipopt") {
    if (config.ipopt_library.empty()) {
      throw AdapterError("adapter external:ipopt needs an Ipopt library path (config key "
                         "'ipopt_library' or " + std::string(kEnvIpoptLibrary) + ")");
    }
    return std::make_unique<IpoptAdapter>(config.ipopt_library);
  }
  throw AdapterError("unknown adapter '" + std::string(name) +
                     "' (expected builtin or external:ipopt)");
}

}  // namespace wdn
