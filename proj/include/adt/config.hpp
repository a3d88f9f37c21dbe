#pragma once

// Service configuration: JSON file, then environment overrides.

#include <cstddef>
#include <filesystem>
#include <string>

#include "adt/frames.hpp"
#include "adt/grounding.hpp"
#include "adt/provider.hpp"

namespace adt {

struct ServiceConfig {
  std::filesystem::path store_root = "adt-store";
  std::string host = "127.0.0.1";
  int port = 8080;
  int workers = 4;
  std::size_t max_upload_bytes = std::size_t{512} << 20;

  std::string provider = "mock";  // mock | openai
  OpenAiConfig openai;
  std::string model_id = "gpt-4o";
  RetryPolicy retry;
  std::filesystem::path prompts_dir;  // empty: built-in templates

  std::string grounder_url;  // empty: fallback grounder
  HttpGroundingConfig grounding;
  DecoderConfig decoder;

  // Environment variables read by apply_env().
  static constexpr const char* kEnvStore = "ADT_STORE";
  static constexpr const char* kEnvHost = "ADT_HOST";
  static constexpr const char* kEnvPort = "ADT_PORT";
  static constexpr const char* kEnvWorkers = "ADT_WORKERS";
  static constexpr const char* kEnvProvider = "ADT_PROVIDER";
  static constexpr const char* kEnvModel = "ADT_MODEL";
  static constexpr const char* kEnvGrounderUrl = "ADT_GROUNDER_URL";
  static constexpr const char* kEnvProbeCommand = "ADT_PROBE_COMMAND";
  static constexpr const char* kEnvExtractCommand = "ADT_EXTRACT_COMMAND";

  static ServiceConfig from_json_text(const std::string& text);
  static ServiceConfig load(const std::filesystem::path& path);
  // Reads the variables above plus the provider credential variables.
  void apply_env();
  void validate() const;
};

}  // namespace adt
