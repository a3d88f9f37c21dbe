#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>

#include "adt/corpus.hpp"
#include "adt/prompt.hpp"
#include "adt/provider.hpp"

namespace adt {

// Thread-safe JSONL log of provider requests and outcomes.
class AuditLog {
 public:
  explicit AuditLog(std::filesystem::path path) : path_(std::move(path)) {}
  void record(const std::string& json_line);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::mutex mutex_;
};

struct TranslateOptions {
  PromptSet prompts = PromptSet::defaults();
  RetryPolicy retry;
  AuditLog* audit = nullptr;
};

struct TranslationResult {
  std::string output_text;
  std::int64_t input_tokens = 0;
  std::int64_t output_tokens = 0;
  std::int64_t latency_ms = 0;
  int retry_count = 0;
  std::map<std::string, std::string> provider_meta;
};

// Trims surrounding whitespace; a reply wrapped in a ``` fence is unwrapped.
std::string sanitize_reply(std::string_view reply);

// Single-turn zero-shot translation. Retryable provider errors are retried
// with exponential backoff up to retry.max_retries; an empty reply throws
// ProviderError(kEmptyReply).
TranslationResult translate(const TranslationRequest& request, ChatProviderClient& provider,
                            const TranslateOptions& options = {});

struct PivotResult {
  TranslationResult to_english;
  TranslationResult to_target;

  const std::string& english_text() const { return to_english.output_text; }
  const std::string& target_text() const { return to_target.output_text; }
};

// source -> English (text only) -> target. Frames in the request go with the
// second stage. Errors carry stage "pivot" or "target". Requires source and
// target to differ from English.
PivotResult translate_with_pivot(const TranslationRequest& request, ChatProviderClient& provider,
                                 const TranslateOptions& options = {});

// Machine-translation adapter for synthetic data built on a chat provider and
// the text-only prompt.
class ChatMtClient final : public MtProviderClient {
 public:
  ChatMtClient(ChatProviderClient& provider, std::string model_id, TranslateOptions options = {})
      : provider_(provider), model_(std::move(model_id)), options_(std::move(options)) {}
  std::string translate(const std::string& text, Language source, Language target) override;
  std::string provider_id() const override { return provider_.name() + ":" + model_; }

 private:
  ChatProviderClient& provider_;
  std::string model_;
  TranslateOptions options_;
};

struct DeepLConfig {
  std::string url = "https://api-free.deepl.com/v2/translate";
  std::string auth_key;  // ADT_DEEPL_API_KEY
  std::chrono::milliseconds timeout{30000};
};

// DeepL REST client (form-encoded POST, JSON reply).
class DeepLClient final : public MtProviderClient {
 public:
  explicit DeepLClient(DeepLConfig config) : config_(std::move(config)) {}
  std::string translate(const std::string& text, Language source, Language target) override;
  std::string provider_id() const override { return "deepl"; }

 private:
  DeepLConfig config_;
};

}  // namespace adt
