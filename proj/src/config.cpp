#include "adt/config.hpp"

#include <cstdlib>

#include "adt/error.hpp"
#include "adt/fs.hpp"
#include "json.hpp"

namespace adt {

namespace {

using nlohmann::json;

const char* env(const char* name) {
  const char* v = std::getenv(name);
  return (v && *v) ? v : nullptr;
}

int env_int(const char* name, int fallback) {
  const char* v = env(name);
  if (!v) return fallback;
  try {
    return std::stoi(v);
  } catch (const std::exception&) {
    throw ConfigError(std::string(name) + " is not an integer: " + v);
  }
}

}  // namespace

ServiceConfig ServiceConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");

  ServiceConfig c;
  try {
    if (j.contains("store_root")) c.store_root = j["store_root"].get<std::string>();
    c.host = j.value("host", c.host);
    c.port = j.value("port", c.port);
    c.workers = j.value("workers", c.workers);
    c.max_upload_bytes = j.value("max_upload_bytes", c.max_upload_bytes);
    c.provider = j.value("provider", c.provider);
    c.model_id = j.value("model_id", c.model_id);
    if (j.contains("prompts_dir")) c.prompts_dir = j["prompts_dir"].get<std::string>();
    if (j.contains("openai")) {
      const auto& o = j["openai"];
      c.openai.base_url = o.value("base_url", c.openai.base_url);
      c.openai.path = o.value("path", c.openai.path);
      c.openai.timeout = std::chrono::milliseconds(o.value("timeout_ms", c.openai.timeout.count()));
      c.openai.max_connections = o.value("max_connections", c.openai.max_connections);
    }
    if (j.contains("retry")) {
      const auto& r = j["retry"];
      c.retry.max_retries = r.value("max_retries", c.retry.max_retries);
      c.retry.base_delay = std::chrono::milliseconds(r.value("base_delay_ms", c.retry.base_delay.count()));
      c.retry.max_delay = std::chrono::milliseconds(r.value("max_delay_ms", c.retry.max_delay.count()));
    }
    if (j.contains("grounder")) {
      const auto& g = j["grounder"];
      c.grounder_url = g.value("url", c.grounder_url);
      c.grounding.timeout = std::chrono::milliseconds(g.value("timeout_ms", c.grounding.timeout.count()));
      c.grounding.retries = g.value("retries", c.grounding.retries);
      c.grounding.max_connections = g.value("max_connections", c.grounding.max_connections);
    }
    if (j.contains("decoder")) {
      const auto& d = j["decoder"];
      c.decoder.probe_command = d.value("probe_command", c.decoder.probe_command);
      c.decoder.extract_command = d.value("extract_command", c.decoder.extract_command);
      c.decoder.quality = d.value("quality", c.decoder.quality);
      if (d.contains("cache_dir")) c.decoder.cache_dir = d["cache_dir"].get<std::string>();
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field has the wrong type: ") + e.what());
  }
  c.validate();
  return c;
}

ServiceConfig ServiceConfig::load(const std::filesystem::path& path) {
  return from_json_text(fs::read_file(path));
}

void ServiceConfig::apply_env() {
  if (const char* v = env(kEnvStore)) store_root = v;
  if (const char* v = env(kEnvHost)) host = v;
  port = env_int(kEnvPort, port);
  workers = env_int(kEnvWorkers, workers);
  if (const char* v = env(kEnvProvider)) provider = v;
  if (const char* v = env(kEnvModel)) model_id = v;
  if (const char* v = env(kEnvGrounderUrl)) grounder_url = v;
  if (const char* v = env(kEnvProbeCommand)) decoder.probe_command = v;
  if (const char* v = env(kEnvExtractCommand)) decoder.extract_command = v;

  const OpenAiConfig from_env = OpenAiConfig::from_env();
  if (!from_env.api_key.empty()) openai.api_key = from_env.api_key;
  if (from_env.base_url != OpenAiConfig{}.base_url) openai.base_url = from_env.base_url;
  validate();
}

void ServiceConfig::validate() const {
  if (port < 0 || port > 65535) throw ConfigError("port out of range");
  if (workers < 1) throw ConfigError("workers must be at least 1");
  if (max_upload_bytes == 0) throw ConfigError("max_upload_bytes must be positive");
  if (provider != "mock" && provider != "openai") throw ConfigError("unknown provider '" + provider + "'");
  if (decoder.quality < 1 || decoder.quality > 31) throw ConfigError("decoder quality must be in 1..31");
}

}  // namespace adt
